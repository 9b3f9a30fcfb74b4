#ifndef WIPLAB_CONFIG_HPP_
#define WIPLAB_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "wiplab/adrc.hpp"
#include "wiplab/chain.hpp"

namespace wiplab
{

// Everything one experiment needs: the chain model, the truth masses,
// sampling sizes, learning parameters, controller tuning.
struct ExperimentConfig
{
  ChainGeometry geometry;
  std::vector<double> link_masses;  // ground-truth construction

  std::uint64_t seed = 1;
  int n_poses = 2000;
  int n_betas = 100;
  double noise = 0.2;           // perturbation fraction
  double target_error = 0.02;   // m, ensemble x_com error band lower edge
  double eta = 400.0;
  double x_tol = 2e-3;
  int consecutive = 10;
  int max_iter = 20000;
  double pose_noise_sigma = 0.0;  // rad, optional noise on observed balance angles
  bool project_mass_sum = true;   // in learning; pose filtering never projects

  ControllerConfig controller;
  double sim_duration = 30.0;

  std::string out_dir = ".";
  std::string source_path;   // config file this was loaded from, if any
  std::uint64_t config_hash = 0;

  static ExperimentConfig defaults();
  void validate() const;
};

// INI-style key/value file: [model], [link N], [experiment], [controller]
// sections, '#' comments.
ExperimentConfig load_config(const std::string & path);

Beta truth_beta(const ExperimentConfig & cfg);

}  // namespace wiplab

#endif  // WIPLAB_CONFIG_HPP_
