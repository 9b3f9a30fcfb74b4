#include "wiplab/mass_model.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace wiplab
{

Beta make_midlink_truth(const ChainGeometry & geom, const std::vector<double> & masses)
{
  geom.validate();
  if (static_cast<int>(masses.size()) != geom.link_count) {
    throw InvalidParameterError("make_midlink_truth: one mass per link required");
  }
  double sum = 0.0;
  for (double m : masses) {
    if (!(m > 0.0)) {
      throw InvalidParameterError("make_midlink_truth: masses must be positive");
    }
    sum += m;
  }
  if (std::abs(sum - geom.total_mass) > 1e-9 * geom.total_mass) {
    throw InvalidParameterError("make_midlink_truth: masses must sum to total_mass");
  }
  Beta beta = Beta::Zero(4 * geom.link_count);
  for (int i = 0; i < geom.link_count; ++i) {
    beta(4 * i + 0) = masses[i] * geom.link_lengths[i] / 2.0;  // CoM at mid-link on the axis
    beta(4 * i + 3) = masses[i];
  }
  return beta;
}

Beta make_default_truth(const ChainGeometry & geom)
{
  if (geom.link_count != 7) {
    throw InvalidParameterError("make_default_truth: defined for the 7-link model");
  }
  return make_midlink_truth(geom, {70.0, 8.0, 6.0, 6.0, 4.0, 4.0, 2.0});
}

Beta perturb(const Beta & beta_true, double noise_fraction, std::uint64_t rng_seed)
{
  if (!(noise_fraction > 0.0 && noise_fraction < 1.0)) {
    throw InvalidParameterError("perturb: noise_fraction must lie in (0, 1)");
  }
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> factor(1.0 - noise_fraction, 1.0 + noise_fraction);
  Beta out = beta_true;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out(i) *= factor(rng);
  }
  for (Eigen::Index i = 3; i < out.size(); i += 4) {
    out(i) = std::max(out(i), 1e-9);
  }
  return out;
}

namespace
{

std::vector<Pose> probe_poses(const ChainGeometry & geom, std::uint64_t rng_seed, int n_probe)
{
  auto rng = substream(rng_seed, "probe-poses");
  std::vector<Pose> poses;
  poses.reserve(n_probe);
  for (int k = 0; k < n_probe; ++k) {
    Pose q(geom.link_count);
    for (int i = 0; i < geom.link_count; ++i) {
      std::uniform_real_distribution<double> u(geom.limit_lo[i], geom.limit_hi[i]);
      q(i) = u(rng);
    }
    poses.push_back(q);
  }
  return poses;
}

}  // namespace

double probe_mean_error(const Beta & beta, const Beta & beta_true, const ChainGeometry & geom,
                        std::uint64_t rng_seed, int n_probe)
{
  const auto poses = probe_poses(geom, rng_seed, n_probe);
  double acc = 0.0;
  for (const auto & q : poses) {
    const Eigen::VectorXd phi = feature_vector(geom, q);
    acc += std::abs(phi.dot(beta - beta_true));
  }
  return acc / static_cast<double>(n_probe);
}

BetaEnsemble generate_ensemble(const Beta & beta_true, int n_beta, double target_error_m,
                               const ChainGeometry & geom, std::uint64_t rng_seed,
                               double noise_fraction)
{
  if (n_beta < 1) {
    throw InvalidParameterError("generate_ensemble: n_beta must be >= 1");
  }
  if (!(target_error_m > 0.0)) {
    throw InvalidParameterError("generate_ensemble: target_error_m must be positive");
  }
  const auto poses = probe_poses(geom, rng_seed, 100);
  Eigen::MatrixXd Phi(beta_true.size(), static_cast<int>(poses.size()));
  for (std::size_t k = 0; k < poses.size(); ++k) {
    Phi.col(static_cast<int>(k)) = feature_vector(geom, poses[k]);
  }

  auto seeder = substream(rng_seed, "ensemble");
  BetaEnsemble ens;
  ens.betas.resize(beta_true.size(), n_beta);
  ens.seed = rng_seed;
  ens.noise_fraction = noise_fraction;
  ens.target_error_m = target_error_m;

  int accepted = 0;
  int consecutive_rejects = 0;
  while (accepted < n_beta) {
    const Beta cand = perturb(beta_true, noise_fraction, seeder());
    const double err = (Phi.transpose() * (cand - beta_true)).cwiseAbs().mean();
    if (err >= target_error_m && err <= 2.0 * target_error_m) {
      ens.betas.col(accepted++) = cand;
      consecutive_rejects = 0;
    } else if (++consecutive_rejects >= 10000) {
      throw ConvergenceError("generate_ensemble: target error band infeasible for this noise level");
    }
  }
  return ens;
}

MassProjectionResult project_mass_sum(const Beta & beta, double total_mass)
{
  if (!(total_mass > 0.0)) {
    throw InvalidParameterError("project_mass_sum: total_mass must be positive");
  }
  if (beta.size() % 4 != 0) {
    throw InvalidParameterError("project_mass_sum: beta length must be 4L");
  }
  const int L = static_cast<int>(beta.size() / 4);
  MassProjectionResult res;
  res.beta = beta;

  double sum = 0.0;
  for (int i = 0; i < L; ++i) {
    sum += beta(4 * i + 3);
  }
  const double shift = (total_mass - sum) / static_cast<double>(L);
  if (shift == 0.0) {
    return res;
  }
  std::vector<char> clamped(L, 0);
  for (int i = 0; i < L; ++i) {
    res.beta(4 * i + 3) += shift;
  }
  // redistribute until every mass clears the positivity floor
  for (int pass = 0; pass < L; ++pass) {
    double deficit = 0.0;
    int free_count = 0;
    for (int i = 0; i < L; ++i) {
      if (!clamped[i] && res.beta(4 * i + 3) < 1e-6) {
        deficit += 1e-6 - res.beta(4 * i + 3);
        res.beta(4 * i + 3) = 1e-6;
        clamped[i] = 1;
        res.clamped = true;
      }
      if (!clamped[i]) {
        ++free_count;
      }
    }
    if (deficit == 0.0) {
      break;
    }
    if (free_count == 0) {
      throw InvalidParameterError("project_mass_sum: cannot satisfy mass sum with positive masses");
    }
    const double d = deficit / static_cast<double>(free_count);
    for (int i = 0; i < L; ++i) {
      if (!clamped[i]) {
        res.beta(4 * i + 3) -= d;
      }
    }
  }
  return res;
}

}  // namespace wiplab
