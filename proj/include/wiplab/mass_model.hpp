#ifndef WIPLAB_MASS_MODEL_HPP_
#define WIPLAB_MASS_MODEL_HPP_

#include <cstdint>

#include <Eigen/Dense>

#include "wiplab/chain.hpp"

namespace wiplab
{

// Columns are erroneous parameter vectors produced by rejection sampling
// against a target x_com error band.
struct BetaEnsemble
{
  Eigen::MatrixXd betas;  // 4L x n_beta
  std::uint64_t seed = 0;
  double noise_fraction = 0.0;
  double target_error_m = 0.0;

  int size() const { return static_cast<int>(betas.cols()); }
};

struct MassProjectionResult
{
  Beta beta;
  bool clamped = false;  // some mass hit the positivity floor and was redistributed
};

// Ground truth for the 7-link desk model: m1 = 70 kg, m3 = 6 kg, the
// remaining masses are configuration defaults; per-link CoMs sit at
// mid-link on the link axis.
Beta make_default_truth(const ChainGeometry & geom);

// Same construction from explicit link masses (must sum to geom.total_mass).
Beta make_midlink_truth(const ChainGeometry & geom, const std::vector<double> & masses);

// Independent multiplicative uniform noise in [1-f, 1+f] per component;
// mass components stay strictly positive.
Beta perturb(const Beta & beta_true, double noise_fraction, std::uint64_t rng_seed);

// Rejection-sample perturbed betas whose mean |x_com| error over a
// 100-pose probe set lies in [target, 2*target].
BetaEnsemble generate_ensemble(const Beta & beta_true, int n_beta, double target_error_m,
                               const ChainGeometry & geom, std::uint64_t rng_seed,
                               double noise_fraction = 0.2);

// Mean |phi' (beta - beta_true)| over a seeded probe pose set; the
// quantity the ensemble sampler thresholds on.
double probe_mean_error(const Beta & beta, const Beta & beta_true, const ChainGeometry & geom,
                        std::uint64_t rng_seed, int n_probe = 100);

// Orthogonal projection of the mass components onto sum(m_i) = M;
// first-moment components are untouched.
MassProjectionResult project_mass_sum(const Beta & beta, double total_mass);

}  // namespace wiplab

#endif  // WIPLAB_MASS_MODEL_HPP_
