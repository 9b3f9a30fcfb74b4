#include "wiplab/learner.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "wiplab/mass_model.hpp"

namespace wiplab
{

double cost(const Eigen::VectorXd & phi, const Beta & beta)
{
  if (phi.size() != beta.size()) {
    throw InvalidParameterError("cost: dimension mismatch");
  }
  const double e = phi.dot(beta);
  return 0.5 * e * e;
}

Eigen::VectorXd gradient(const Eigen::VectorXd & phi, const Beta & beta)
{
  if (phi.size() != beta.size()) {
    throw InvalidParameterError("gradient: dimension mismatch");
  }
  return phi * phi.dot(beta);
}

Beta update(const Beta & beta, const Eigen::VectorXd & phi, const LearningConfig & cfg)
{
  Beta next = beta - cfg.eta * gradient(phi, beta);
  if (cfg.project_mass_sum) {
    next = project_mass_sum(next, cfg.total_mass).beta;
  }
  return next;
}

FitResult fit(const Beta & beta0, const std::vector<PoseSample> & stream,
              const LearningConfig & cfg)
{
  if (stream.empty()) {
    throw InvalidParameterError("fit: empty pose stream");
  }
  if (!(cfg.eta > 0.0) || !(cfg.x_tol > 0.0) || cfg.consecutive_required < 1) {
    throw InvalidParameterError("fit: invalid learning config");
  }
  FitResult result;
  result.beta = beta0;
  result.stop = StopReason::kStreamExhausted;

  int consecutive_below = 0;
  std::deque<double> window;
  double min_window_mean = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < stream.size(); ++k) {
    if (static_cast<int>(k) >= cfg.max_iterations) {
      result.stop = StopReason::kMaxIterations;
      break;
    }
    const auto & sample = stream[k];
    const double pre = sample.phi.dot(result.beta);
    consecutive_below = (std::abs(pre) < cfg.x_tol) ? consecutive_below + 1 : 0;

    result.beta = update(result.beta, sample.phi, cfg);
    const double post = sample.phi.dot(result.beta);

    double mass_sum = 0.0;
    for (Eigen::Index i = 3; i < result.beta.size(); i += 4) {
      mass_sum += result.beta(i);
    }
    result.trace.push_back({static_cast<int>(k), sample.pose_id, pre, post, mass_sum,
                            fnv1a(result.beta.data(), sizeof(double) * result.beta.size())});
    ++result.iterations;

    if (consecutive_below >= cfg.consecutive_required) {
      result.stop = StopReason::kConverged;
      break;
    }

    window.push_back(std::abs(pre));
    if (window.size() > 20) {
      window.pop_front();
    }
    if (window.size() == 20) {
      double mean = 0.0;
      for (double v : window) {
        mean += v;
      }
      mean /= static_cast<double>(window.size());
      min_window_mean = std::min(min_window_mean, mean);
      if (mean > 2.0 * min_window_mean && mean > cfg.x_tol) {
        throw ConvergenceError("fit: error diverging, step size too large");
      }
    }
  }
  return result;
}

}  // namespace wiplab
