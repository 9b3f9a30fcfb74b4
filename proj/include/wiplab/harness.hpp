#ifndef WIPLAB_HARNESS_HPP_
#define WIPLAB_HARNESS_HPP_

#include <map>
#include <string>

#include "wiplab/config.hpp"
#include "wiplab/metalearn.hpp"

namespace wiplab
{

struct RunReport
{
  std::string experiment;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> metrics;
  double wall_time_s = 0.0;
};

void write_report(const std::string & path, const RunReport & report);

// Pool/ensemble round trips through the CSV formats.
void save_pose_pool(const std::string & path, const PosePool & pool);
PosePool load_pose_pool(const std::string & path, const ExperimentConfig & cfg);
void save_ensemble(const std::string & path, const BetaEnsemble & ensemble);
BetaEnsemble load_ensemble(const std::string & path);

// Subcommand bodies; each writes its CSVs plus a report under
// cfg.out_dir and returns the process exit code.
int cmd_gen_poses(const ExperimentConfig & cfg);
int cmd_gen_betas(const ExperimentConfig & cfg);
int cmd_filter(const ExperimentConfig & cfg, const std::string & poses_csv,
               const std::string & betas_csv);
int cmd_learn(const ExperimentConfig & cfg, const std::string & poses_csv);
int cmd_simulate(const ExperimentConfig & cfg, const std::string & poses_csv, int pose_index);
int cmd_eval(const ExperimentConfig & cfg, const std::string & poses_csv);

}  // namespace wiplab

#endif  // WIPLAB_HARNESS_HPP_
