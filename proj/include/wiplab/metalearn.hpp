#ifndef WIPLAB_METALEARN_HPP_
#define WIPLAB_METALEARN_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "wiplab/chain.hpp"
#include "wiplab/mass_model.hpp"

namespace wiplab
{

// Candidate poses, each balanced under the ground-truth beta and within
// joint limits, with features precomputed column-wise.
struct PosePool
{
  Eigen::MatrixXd poses;     // L x n_poses
  Eigen::MatrixXd features;  // 4L x n_poses
  std::uint64_t seed = 0;
  double acceptance_rate = 0.0;

  int size() const { return static_cast<int>(poses.cols()); }
};

struct SelectionRecord
{
  int pool_index = 0;         // index into the original pool
  double aggregate_error = 0.0;  // sum_k |phi' beta_k| at selection time
  double max_error = 0.0;        // max_k |phi' beta_k| at selection time
};

enum class FilterStatus
{
  kConverged,
  kPoolExhausted,
  kMaxIterations,
};

struct FilteredPoses
{
  Eigen::MatrixXd poses;     // L x n_selected, in emission order
  std::vector<SelectionRecord> records;
  FilterStatus status = FilterStatus::kPoolExhausted;
  Eigen::MatrixXd final_betas;  // ensemble after all updates

  int size() const { return static_cast<int>(poses.cols()); }
};

// Samples q_2..q_L uniformly within limits, solves the base angle that
// balances the chain under beta_true, and keeps the pose when that angle
// respects its own limit.
PosePool generate_pool(const ChainGeometry & geom, const Beta & beta_true, int n_poses,
                       std::uint64_t rng_seed);

// Argmax over pool columns of the summed absolute prediction error over
// the ensemble; ties break to the lowest index. Deterministic for any
// worker count (WIPLAB_WORKERS caps threads).
std::pair<int, double> select_next(const Eigen::MatrixXd & features,
                                   const Eigen::MatrixXd & betas);

// Greedy pose filtering: select the most informative pose, gradient-step
// every ensemble member on it, remove it, until the selection-time max
// error stays below x_tol for consecutive_required iterations.
FilteredPoses filter_poses(const PosePool & pool, const BetaEnsemble & ensemble, double eta,
                           double x_tol, int consecutive_required, int max_iter);

// Same loop with uniform random selection without replacement; the
// comparison baseline.
FilteredPoses random_baseline(const PosePool & pool, const BetaEnsemble & ensemble, double eta,
                              double x_tol, int consecutive_required, int max_iter,
                              std::uint64_t rng_seed);

}  // namespace wiplab

#endif  // WIPLAB_METALEARN_HPP_
