#include "wiplab/config.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "wiplab/mass_model.hpp"

namespace wiplab
{

ExperimentConfig ExperimentConfig::defaults()
{
  ExperimentConfig cfg;
  cfg.geometry = ChainGeometry::default_seven_link();
  cfg.link_masses = {70.0, 8.0, 6.0, 6.0, 4.0, 4.0, 2.0};
  return cfg;
}

void ExperimentConfig::validate() const
{
  geometry.validate();
  if (static_cast<int>(link_masses.size()) != geometry.link_count) {
    throw ConfigError("config: link_masses must have one entry per link");
  }
  if (n_poses < 1 || n_betas < 1) {
    throw ConfigError("config: n_poses and n_betas must be >= 1");
  }
  if (!(noise > 0.0 && noise < 1.0)) {
    throw ConfigError("config: noise must lie in (0, 1)");
  }
  if (!(target_error > 0.0) || !(eta > 0.0) || !(x_tol > 0.0)) {
    throw ConfigError("config: target_error, eta and xtol must be positive");
  }
  if (consecutive < 1 || max_iter < 1) {
    throw ConfigError("config: consecutive and max_iter must be >= 1");
  }
  if (!(controller.control_dt > 0.0 && controller.control_dt <= 0.01)) {
    throw ConfigError("config: control_dt must lie in (0, 0.01]");
  }
  if (!(controller.omega_o > 0.0) || !(controller.tau_max > 0.0)) {
    throw ConfigError("config: omega_o and tau_max must be positive");
  }
  if (!(sim_duration > 0.0)) {
    throw ConfigError("config: sim_duration must be positive");
  }
}

Beta truth_beta(const ExperimentConfig & cfg)
{
  return make_midlink_truth(cfg.geometry, cfg.link_masses);
}

namespace
{

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

SectionMap parse_ini(const std::string & path, std::string & raw)
{
  std::ifstream f(path);
  if (!f) {
    throw ConfigError("config: cannot open " + path);
  }
  std::stringstream buf;
  buf << f.rdbuf();
  raw = buf.str();

  SectionMap sections;
  std::string section;
  std::istringstream in(raw);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: expected key = value at " + path + ":" + std::to_string(lineno));
    }
    sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return sections;
}

double to_double(const std::string & s, const std::string & key)
{
  char * end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw ConfigError("config: bad numeric value for " + key);
  }
  return v;
}

template <typename T>
void maybe(const SectionMap & m, const std::string & sec, const std::string & key, T & out)
{
  const auto si = m.find(sec);
  if (si == m.end()) {
    return;
  }
  const auto ki = si->second.find(key);
  if (ki == si->second.end()) {
    return;
  }
  const double v = to_double(ki->second, sec + "." + key);
  out = static_cast<T>(v);
}

}  // namespace

ExperimentConfig load_config(const std::string & path)
{
  std::string raw;
  const SectionMap sections = parse_ini(path, raw);
  ExperimentConfig cfg = ExperimentConfig::defaults();
  cfg.source_path = path;
  cfg.config_hash = fnv1a(raw);

  int links = cfg.geometry.link_count;
  maybe(sections, "model", "links", links);
  if (links != cfg.geometry.link_count) {
    cfg.geometry.link_count = links;
    cfg.geometry.link_lengths.assign(links, 0.3);
    cfg.geometry.limit_lo.assign(links, -2.0);
    cfg.geometry.limit_hi.assign(links, 2.0);
    if (links > 0) {
      cfg.geometry.limit_lo[0] = -M_PI / 2.0;
      cfg.geometry.limit_hi[0] = M_PI / 2.0;
    }
    cfg.link_masses.assign(links, cfg.geometry.total_mass / links);
  }
  maybe(sections, "model", "total_mass", cfg.geometry.total_mass);
  maybe(sections, "model", "wheel_radius", cfg.geometry.wheel_radius);
  maybe(sections, "model", "wheel_mass", cfg.geometry.wheel_mass);
  maybe(sections, "model", "wheel_inertia", cfg.geometry.wheel_inertia);
  for (int i = 0; i < links; ++i) {
    const std::string sec = "link " + std::to_string(i + 1);
    maybe(sections, sec, "length", cfg.geometry.link_lengths[i]);
    maybe(sections, sec, "limit_lo", cfg.geometry.limit_lo[i]);
    maybe(sections, sec, "limit_hi", cfg.geometry.limit_hi[i]);
    maybe(sections, sec, "mass", cfg.link_masses[i]);
  }

  maybe(sections, "experiment", "seed", cfg.seed);
  maybe(sections, "experiment", "n_poses", cfg.n_poses);
  maybe(sections, "experiment", "n_betas", cfg.n_betas);
  maybe(sections, "experiment", "noise", cfg.noise);
  maybe(sections, "experiment", "target_error", cfg.target_error);
  maybe(sections, "experiment", "eta", cfg.eta);
  maybe(sections, "experiment", "xtol", cfg.x_tol);
  maybe(sections, "experiment", "consecutive", cfg.consecutive);
  maybe(sections, "experiment", "max_iter", cfg.max_iter);
  maybe(sections, "experiment", "pose_noise_sigma", cfg.pose_noise_sigma);
  int project = cfg.project_mass_sum ? 1 : 0;
  maybe(sections, "experiment", "project_mass_sum", project);
  cfg.project_mass_sum = project != 0;

  maybe(sections, "controller", "q_x", cfg.controller.q_diag(0));
  maybe(sections, "controller", "q_xdot", cfg.controller.q_diag(1));
  maybe(sections, "controller", "q_theta", cfg.controller.q_diag(2));
  maybe(sections, "controller", "q_thetadot", cfg.controller.q_diag(3));
  maybe(sections, "controller", "r", cfg.controller.r_weight);
  maybe(sections, "controller", "omega_o", cfg.controller.omega_o);
  maybe(sections, "controller", "tau_max", cfg.controller.tau_max);
  maybe(sections, "controller", "control_dt", cfg.controller.control_dt);
  maybe(sections, "controller", "duration", cfg.sim_duration);

  cfg.validate();
  return cfg;
}

}  // namespace wiplab
