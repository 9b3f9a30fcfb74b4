#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "wiplab/harness.hpp"

namespace
{

struct CommonFlags
{
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  int n_poses = -1;
  int n_betas = -1;
  double noise = -1.0;
  double eta = -1.0;
  double xtol = -1.0;
};

void add_common(CLI::App * cmd, CommonFlags & flags)
{
  cmd->add_option("--config", flags.config_path, "experiment config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--seed", flags.seed, "root seed (overrides config)");
  cmd->add_option("--n-poses", flags.n_poses, "pool size (overrides config)");
  cmd->add_option("--n-betas", flags.n_betas, "ensemble size (overrides config)");
  cmd->add_option("--noise", flags.noise, "perturbation fraction (overrides config)");
  cmd->add_option("--eta", flags.eta, "gradient step size (overrides config)");
  cmd->add_option("--xtol", flags.xtol, "convergence threshold in meters (overrides config)");
}

wiplab::ExperimentConfig resolve(const CommonFlags & flags)
{
  wiplab::ExperimentConfig cfg = flags.config_path.empty()
                                     ? wiplab::ExperimentConfig::defaults()
                                     : wiplab::load_config(flags.config_path);
  if (!flags.out_dir.empty()) {
    cfg.out_dir = flags.out_dir;
  }
  if (flags.seed >= 0) {
    cfg.seed = static_cast<std::uint64_t>(flags.seed);
  }
  if (flags.n_poses > 0) {
    cfg.n_poses = flags.n_poses;
  }
  if (flags.n_betas > 0) {
    cfg.n_betas = flags.n_betas;
  }
  if (flags.noise > 0.0) {
    cfg.noise = flags.noise;
  }
  if (flags.eta > 0.0) {
    cfg.eta = flags.eta;
  }
  if (flags.xtol > 0.0) {
    cfg.x_tol = flags.xtol;
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"wiplab: wheeled-inverted-pendulum CoM identification laboratory"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string poses_csv, betas_csv;
  int pose_index = 0;

  auto * gen_poses = app.add_subcommand("gen-poses", "generate a balanced, safe pose pool");
  add_common(gen_poses, flags);

  auto * gen_betas = app.add_subcommand("gen-betas", "generate an erroneous parameter ensemble");
  add_common(gen_betas, flags);

  auto * filter = app.add_subcommand("filter", "greedy pose filtering over an ensemble");
  add_common(filter, flags);
  filter->add_option("--poses", poses_csv, "pose pool CSV (generated if omitted)");
  filter->add_option("--betas", betas_csv, "ensemble CSV (generated if omitted)");

  auto * learn = app.add_subcommand("learn", "gradient descent on a perturbed parameter vector");
  add_common(learn, flags);
  learn->add_option("--poses", poses_csv, "pose stream CSV (generated if omitted)");

  auto * simulate = app.add_subcommand("simulate", "closed-loop balance run for one pose");
  add_common(simulate, flags);
  simulate->add_option("--poses", poses_csv, "pose CSV (generated if omitted)");
  simulate->add_option("--pose-index", pose_index, "row of the pose to simulate");

  auto * eval = app.add_subcommand("eval", "train/test split evaluation of the learned model");
  add_common(eval, flags);
  eval->add_option("--poses", poses_csv, "pose set CSV (generated if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    const wiplab::ExperimentConfig cfg = resolve(flags);
    if (gen_poses->parsed()) {
      return wiplab::cmd_gen_poses(cfg);
    }
    if (gen_betas->parsed()) {
      return wiplab::cmd_gen_betas(cfg);
    }
    if (filter->parsed()) {
      return wiplab::cmd_filter(cfg, poses_csv, betas_csv);
    }
    if (learn->parsed()) {
      return wiplab::cmd_learn(cfg, poses_csv);
    }
    if (simulate->parsed()) {
      return wiplab::cmd_simulate(cfg, poses_csv, pose_index);
    }
    if (eval->parsed()) {
      return wiplab::cmd_eval(cfg, poses_csv);
    }
  } catch (const wiplab::ConfigError & e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const wiplab::InvalidParameterError & e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const wiplab::ConvergenceError & e) {
    std::fprintf(stderr, "convergence failure: %s\n", e.what());
    return 3;
  } catch (const wiplab::SimulationDivergedError & e) {
    std::fprintf(stderr, "simulation diverged: %s\n", e.what());
    return 4;
  } catch (const std::exception & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
