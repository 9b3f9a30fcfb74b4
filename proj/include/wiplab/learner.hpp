#ifndef WIPLAB_LEARNER_HPP_
#define WIPLAB_LEARNER_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "wiplab/chain.hpp"

namespace wiplab
{

struct LearningConfig
{
  // Hand-tuned: features carry a 1/M normalization, so ||phi||^2 ~ 1e-3
  // on the default model and eta * ||phi||^2 stays below 1 (monotone
  // per-pose error contraction) at this value.
  double eta = 400.0;
  double x_tol = 2e-3;        // m
  int consecutive_required = 10;
  bool project_mass_sum = false;
  double total_mass = 0.0;    // required when projection is on
  int max_iterations = 100000;
};

struct LearningRecord
{
  int iteration = 0;
  int pose_id = 0;
  double error_pre = 0.0;   // phi' beta before the update
  double error_post = 0.0;
  double mass_sum = 0.0;
  std::uint64_t beta_hash = 0;
};

enum class StopReason
{
  kConverged,
  kStreamExhausted,
  kMaxIterations,
};

struct FitResult
{
  Beta beta;
  std::vector<LearningRecord> trace;
  StopReason stop = StopReason::kStreamExhausted;
  int iterations = 0;
};

// One observation: a pose id and its feature vector.
struct PoseSample
{
  int pose_id = 0;
  Eigen::VectorXd phi;
};

// J = 1/2 (phi' beta)^2
double cost(const Eigen::VectorXd & phi, const Beta & beta);

// grad J = phi (phi' beta)
Eigen::VectorXd gradient(const Eigen::VectorXd & phi, const Beta & beta);

// Plain gradient step, optional mass-sum projection afterwards.
Beta update(const Beta & beta, const Eigen::VectorXd & phi, const LearningConfig & cfg);

// Sequential descent over the sample stream; stops once the pre-update
// error stays below x_tol for consecutive_required samples. Throws
// ConvergenceError if the trailing mean error doubles from its minimum
// (eta too large).
FitResult fit(const Beta & beta0, const std::vector<PoseSample> & stream,
              const LearningConfig & cfg);

}  // namespace wiplab

#endif  // WIPLAB_LEARNER_HPP_
