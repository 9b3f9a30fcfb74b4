#include "wiplab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "wiplab/csv.hpp"
#include "wiplab/learner.hpp"

namespace wiplab
{

namespace
{

using Clock = std::chrono::steady_clock;

std::string out_path(const ExperimentConfig & cfg, const std::string & name)
{
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

std::string hash_hex(std::uint64_t h)
{
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double elapsed(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::string> pose_columns(int L)
{
  std::vector<std::string> cols;
  for (int i = 1; i <= L; ++i) {
    cols.push_back("q_" + std::to_string(i));
  }
  return cols;
}

// Accepts either a plain pose CSV (L columns) or the filtered-poses
// schema (order, q_1..q_L, aggregate_error, max_error).
Eigen::MatrixXd poses_from_csv(const std::string & path, int L)
{
  const Eigen::MatrixXd m = read_csv(path);
  if (m.cols() == L) {
    return m.transpose();
  }
  if (m.cols() == L + 3) {
    return m.middleCols(1, L).transpose();
  }
  throw ConfigError("poses CSV has unexpected column count: " + path);
}

std::vector<PoseSample> build_stream(const ExperimentConfig & cfg, const Eigen::MatrixXd & poses)
{
  auto noise_rng = substream(cfg.seed, "pose-noise");
  std::normal_distribution<double> gauss(0.0, cfg.pose_noise_sigma);
  std::vector<PoseSample> stream;
  stream.reserve(poses.cols());
  for (Eigen::Index k = 0; k < poses.cols(); ++k) {
    Pose q = poses.col(k);
    if (cfg.pose_noise_sigma > 0.0) {
      q(0) += gauss(noise_rng);
    }
    stream.push_back({static_cast<int>(k), feature_vector(cfg.geometry, q)});
  }
  return stream;
}

LearningConfig learning_config(const ExperimentConfig & cfg)
{
  LearningConfig lc;
  lc.eta = cfg.eta;
  lc.x_tol = cfg.x_tol;
  lc.consecutive_required = cfg.consecutive;
  lc.project_mass_sum = cfg.project_mass_sum;
  lc.total_mass = cfg.geometry.total_mass;
  lc.max_iterations = cfg.max_iter;
  return lc;
}

}  // namespace

void write_report(const std::string & path, const RunReport & report)
{
  nlohmann::json j;
  j["experiment"] = report.experiment;
  j["config_hash"] = hash_hex(report.config_hash);
  j["seed"] = report.seed;
  j["metrics"] = report.metrics;
  j["wall_time_s"] = report.wall_time_s;
  std::ofstream f(path);
  if (!f) {
    throw ConfigError("write_report: cannot open " + path);
  }
  f << j.dump(2) << "\n";
}

void save_pose_pool(const std::string & path, const PosePool & pool)
{
  std::vector<std::string> comments = {
      "seed = " + std::to_string(pool.seed),
      "acceptance_rate = " + format_double(pool.acceptance_rate),
  };
  write_csv(path, comments, pose_columns(static_cast<int>(pool.poses.rows())),
            pool.poses.transpose());
}

PosePool load_pose_pool(const std::string & path, const ExperimentConfig & cfg)
{
  const int L = cfg.geometry.link_count;
  PosePool pool;
  pool.poses = poses_from_csv(path, L);
  pool.features.resize(4 * L, pool.poses.cols());
  for (Eigen::Index k = 0; k < pool.poses.cols(); ++k) {
    pool.features.col(k) = feature_vector(cfg.geometry, pool.poses.col(k));
  }
  return pool;
}

void save_ensemble(const std::string & path, const BetaEnsemble & ensemble)
{
  std::vector<std::string> comments = {
      "seed = " + std::to_string(ensemble.seed),
      "noise_fraction = " + format_double(ensemble.noise_fraction),
      "target_error_m = " + format_double(ensemble.target_error_m),
  };
  std::vector<std::string> cols;
  for (int i = 0; i < ensemble.betas.rows(); ++i) {
    cols.push_back("beta_" + std::to_string(i + 1));
  }
  write_csv(path, comments, cols, ensemble.betas.transpose());
}

BetaEnsemble load_ensemble(const std::string & path)
{
  BetaEnsemble ens;
  ens.betas = read_csv(path).transpose();
  return ens;
}

int cmd_gen_poses(const ExperimentConfig & cfg)
{
  const auto t0 = Clock::now();
  const PosePool pool = generate_pool(cfg.geometry, truth_beta(cfg), cfg.n_poses, cfg.seed);
  save_pose_pool(out_path(cfg, "poses.csv"), pool);

  RunReport rep;
  rep.experiment = "gen-poses";
  rep.config_hash = cfg.config_hash;
  rep.seed = cfg.seed;
  rep.metrics["n_poses"] = pool.size();
  rep.metrics["acceptance_rate"] = pool.acceptance_rate;
  rep.wall_time_s = elapsed(t0);
  write_report(out_path(cfg, "report_gen_poses.json"), rep);
  return 0;
}

int cmd_gen_betas(const ExperimentConfig & cfg)
{
  const auto t0 = Clock::now();
  const Beta truth = truth_beta(cfg);
  const BetaEnsemble ens =
      generate_ensemble(truth, cfg.n_betas, cfg.target_error, cfg.geometry, cfg.seed, cfg.noise);
  save_ensemble(out_path(cfg, "betas.csv"), ens);

  double mean = 0.0, mean2 = 0.0;
  for (int k = 0; k < ens.size(); ++k) {
    const double e = probe_mean_error(ens.betas.col(k), truth, cfg.geometry, cfg.seed);
    mean += e;
    mean2 += e * e;
  }
  mean /= ens.size();

  RunReport rep;
  rep.experiment = "gen-betas";
  rep.config_hash = cfg.config_hash;
  rep.seed = cfg.seed;
  rep.metrics["n_betas"] = ens.size();
  rep.metrics["mean_initial_error_m"] = mean;
  rep.metrics["std_initial_error_m"] = std::sqrt(std::max(0.0, mean2 / ens.size() - mean * mean));
  rep.wall_time_s = elapsed(t0);
  write_report(out_path(cfg, "report_gen_betas.json"), rep);
  return 0;
}

int cmd_filter(const ExperimentConfig & cfg, const std::string & poses_csv,
               const std::string & betas_csv)
{
  const auto t0 = Clock::now();
  const Beta truth = truth_beta(cfg);
  const PosePool pool = poses_csv.empty()
                            ? generate_pool(cfg.geometry, truth, cfg.n_poses, cfg.seed)
                            : load_pose_pool(poses_csv, cfg);
  const BetaEnsemble ens =
      betas_csv.empty()
          ? generate_ensemble(truth, cfg.n_betas, cfg.target_error, cfg.geometry, cfg.seed,
                              cfg.noise)
          : load_ensemble(betas_csv);

  const FilteredPoses filtered =
      filter_poses(pool, ens, cfg.eta, cfg.x_tol, cfg.consecutive, cfg.max_iter);

  const int L = cfg.geometry.link_count;
  Eigen::MatrixXd rows(filtered.size(), L + 3);
  for (int k = 0; k < filtered.size(); ++k) {
    rows(k, 0) = k;
    rows.row(k).segment(1, L) = filtered.poses.col(k).transpose();
    rows(k, L + 1) = filtered.records[static_cast<std::size_t>(k)].aggregate_error;
    rows(k, L + 2) = filtered.records[static_cast<std::size_t>(k)].max_error;
  }
  std::vector<std::string> cols = {"order"};
  for (const auto & c : pose_columns(L)) {
    cols.push_back(c);
  }
  cols.push_back("aggregate_error");
  cols.push_back("max_error");
  write_csv(out_path(cfg, "filtered.csv"), {"seed = " + std::to_string(cfg.seed)}, cols, rows);

  RunReport rep;
  rep.experiment = "filter";
  rep.config_hash = cfg.config_hash;
  rep.seed = cfg.seed;
  rep.metrics["n_selected"] = filtered.size();
  rep.metrics["converged"] = filtered.status == FilterStatus::kConverged ? 1.0 : 0.0;
  if (!filtered.records.empty()) {
    rep.metrics["final_max_error_m"] = filtered.records.back().max_error;
  }
  rep.wall_time_s = elapsed(t0);
  write_report(out_path(cfg, "report_filter.json"), rep);
  return filtered.status == FilterStatus::kConverged ? 0 : 3;
}

int cmd_learn(const ExperimentConfig & cfg, const std::string & poses_csv)
{
  const auto t0 = Clock::now();
  const Beta truth = truth_beta(cfg);
  Eigen::MatrixXd poses;
  if (poses_csv.empty()) {
    poses = generate_pool(cfg.geometry, truth, cfg.n_poses, cfg.seed).poses;
  } else {
    poses = poses_from_csv(poses_csv, cfg.geometry.link_count);
  }
  const auto stream = build_stream(cfg, poses);
  const Beta beta0 = perturb(truth, cfg.noise, substream(cfg.seed, "learn-beta0")());
  const FitResult fit_result = fit(beta0, stream, learning_config(cfg));

  Eigen::MatrixXd rows(static_cast<Eigen::Index>(fit_result.trace.size()), 5);
  for (std::size_t k = 0; k < fit_result.trace.size(); ++k) {
    const auto & r = fit_result.trace[k];
    rows.row(static_cast<Eigen::Index>(k)) << r.iteration, r.pose_id, std::abs(r.error_pre),
        std::abs(r.error_post), r.mass_sum;
  }
  write_csv(out_path(cfg, "curve.csv"), {"seed = " + std::to_string(cfg.seed)},
            {"iteration", "pose_id", "abs_error_pre", "abs_error_post", "mass_sum"}, rows);

  std::vector<std::string> beta_cols;
  for (int i = 0; i < fit_result.beta.size(); ++i) {
    beta_cols.push_back("beta_" + std::to_string(i + 1));
  }
  write_csv(out_path(cfg, "beta_final.csv"), {"seed = " + std::to_string(cfg.seed)}, beta_cols,
            fit_result.beta.transpose());

  RunReport rep;
  rep.experiment = "learn";
  rep.config_hash = cfg.config_hash;
  rep.seed = cfg.seed;
  rep.metrics["iterations"] = fit_result.iterations;
  rep.metrics["converged"] = fit_result.stop == StopReason::kConverged ? 1.0 : 0.0;
  if (!fit_result.trace.empty()) {
    rep.metrics["final_abs_error_m"] = std::abs(fit_result.trace.back().error_pre);
  }
  rep.wall_time_s = elapsed(t0);
  write_report(out_path(cfg, "report_learn.json"), rep);
  return fit_result.stop == StopReason::kConverged ? 0 : 3;
}

int cmd_simulate(const ExperimentConfig & cfg, const std::string & poses_csv, int pose_index)
{
  const auto t0 = Clock::now();
  const Beta truth = truth_beta(cfg);
  Eigen::MatrixXd poses;
  if (poses_csv.empty()) {
    poses = generate_pool(cfg.geometry, truth, std::max(1, pose_index + 1), cfg.seed).poses;
  } else {
    poses = poses_from_csv(poses_csv, cfg.geometry.link_count);
  }
  if (pose_index < 0 || pose_index >= poses.cols()) {
    throw ConfigError("simulate: pose index out of range");
  }
  const Beta beta_est = perturb(truth, cfg.noise, substream(cfg.seed, "simulate-beta")());

  BalanceRunConfig run_cfg;
  run_cfg.duration = cfg.sim_duration;
  run_cfg.controller = cfg.controller;
  const BalanceResult res = balance_run(cfg.geometry, poses.col(pose_index), truth, beta_est, run_cfg);

  Eigen::MatrixXd rows(static_cast<Eigen::Index>(res.trace.size()), 9);
  for (std::size_t k = 0; k < res.trace.size(); ++k) {
    const auto & r = res.trace[k];
    rows.row(static_cast<Eigen::Index>(k)) << r.t, r.x, r.x_dot, r.theta, r.theta_dot, r.tau,
        r.f_x_hat, r.f_theta_hat, r.saturated ? 1.0 : 0.0;
  }
  write_csv(out_path(cfg, "trace.csv"), {"seed = " + std::to_string(cfg.seed)},
            {"t", "x", "x_dot", "theta", "theta_dot", "tau_w", "f_x_hat", "f_theta_hat",
             "saturated"},
            rows);

  RunReport rep;
  rep.experiment = "simulate";
  rep.config_hash = cfg.config_hash;
  rep.seed = cfg.seed;
  rep.metrics["settled"] = res.settled ? 1.0 : 0.0;
  rep.metrics["settle_time_s"] = res.settle_time;
  rep.metrics["peak_torque_nm"] = res.peak_torque;
  rep.metrics["settled_xcom_m"] = res.settled_xcom;
  rep.metrics["settled_q1_rad"] = res.settled_pose(0);
  rep.wall_time_s = elapsed(t0);
  write_report(out_path(cfg, "report_simulate.json"), rep);
  return res.settled ? 0 : 3;
}

int cmd_eval(const ExperimentConfig & cfg, const std::string & poses_csv)
{
  const auto t0 = Clock::now();
  const Beta truth = truth_beta(cfg);
  Eigen::MatrixXd poses;
  if (poses_csv.empty()) {
    poses = generate_pool(cfg.geometry, truth, cfg.n_poses, cfg.seed).poses;
  } else {
    poses = poses_from_csv(poses_csv, cfg.geometry.link_count);
  }
  const int n = static_cast<int>(poses.cols());
  if (n < 5) {
    throw ConfigError("eval: need at least 5 poses for a train/test split");
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) {
    order[i] = i;
  }
  auto rng = substream(cfg.seed, "split");
  std::shuffle(order.begin(), order.end(), rng);
  const int n_test = std::max(1, n / 5);
  const int n_train = n - n_test;

  Eigen::MatrixXd phi_test(4 * cfg.geometry.link_count, n_test);
  for (int k = 0; k < n_test; ++k) {
    phi_test.col(k) = feature_vector(cfg.geometry, poses.col(order[n_train + k]));
  }
  auto test_errors = [&](const Beta & b) {
    const Eigen::VectorXd e = (phi_test.transpose() * (b - truth)).cwiseAbs();
    return std::pair<double, double>(e.mean(), e.maxCoeff());
  };

  const Beta beta0 = perturb(truth, cfg.noise, substream(cfg.seed, "learn-beta0")());
  const LearningConfig lc = learning_config(cfg);
  Beta beta = beta0;
  std::vector<int> checkpoints = {0, n_train / 4, n_train / 2, 3 * n_train / 4, n_train};
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(checkpoints.size()), 3);
  std::size_t next_cp = 0;
  for (int it = 0; it <= n_train; ++it) {
    if (next_cp < checkpoints.size() && it == checkpoints[next_cp]) {
      const auto [mean_e, max_e] = test_errors(beta);
      rows.row(static_cast<Eigen::Index>(next_cp)) << it, mean_e, max_e;
      ++next_cp;
    }
    if (it == n_train) {
      break;
    }
    const Eigen::VectorXd phi = feature_vector(cfg.geometry, poses.col(order[it]));
    beta = update(beta, phi, lc);
  }
  write_csv(out_path(cfg, "eval.csv"), {"seed = " + std::to_string(cfg.seed)},
            {"iterations", "mean_test_error_m", "max_test_error_m"}, rows);

  RunReport rep;
  rep.experiment = "eval";
  rep.config_hash = cfg.config_hash;
  rep.seed = cfg.seed;
  rep.metrics["n_train"] = n_train;
  rep.metrics["n_test"] = n_test;
  rep.metrics["initial_mean_error_m"] = rows(0, 1);
  rep.metrics["final_mean_error_m"] = rows(rows.rows() - 1, 1);
  rep.metrics["final_max_error_m"] = rows(rows.rows() - 1, 2);
  rep.wall_time_s = elapsed(t0);
  write_report(out_path(cfg, "report_eval.json"), rep);
  return 0;
}

}  // namespace wiplab
