#include "wiplab/metalearn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <thread>

namespace wiplab
{

namespace
{

int worker_count(int n_cols)
{
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) {
    hw = 1;
  }
  if (const char * env = std::getenv("WIPLAB_WORKERS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < hw) {
      hw = static_cast<unsigned>(cap);
    }
  }
  return std::max(1, std::min<int>(static_cast<int>(hw), n_cols / 64 + 1));
}

}  // namespace

PosePool generate_pool(const ChainGeometry & geom, const Beta & beta_true, int n_poses,
                       std::uint64_t rng_seed)
{
  geom.validate();
  if (n_poses < 1) {
    throw InvalidParameterError("generate_pool: n_poses must be >= 1");
  }
  auto rng = substream(rng_seed, "pool");
  const int L = geom.link_count;
  PosePool pool;
  pool.poses.resize(L, n_poses);
  pool.features.resize(4 * L, n_poses);
  pool.seed = rng_seed;

  long draws = 0, accepts = 0, window_draws = 0, window_accepts = 0;
  while (accepts < n_poses) {
    Pose q(L);
    q(0) = 0.0;
    for (int i = 1; i < L; ++i) {
      std::uniform_real_distribution<double> u(geom.limit_lo[i], geom.limit_hi[i]);
      q(i) = u(rng);
    }
    ++draws;
    ++window_draws;
    bool ok = false;
    try {
      const double q1 = solve_balance_angle(geom, q, beta_true);
      if (q1 >= geom.limit_lo[0] && q1 <= geom.limit_hi[0]) {
        q(0) = q1;
        ok = true;
      }
    } catch (const DegenerateConfigurationError &) {
    }
    if (ok) {
      pool.poses.col(accepts) = q;
      pool.features.col(accepts) = feature_vector(geom, q);
      ++accepts;
      ++window_accepts;
    }
    if (window_draws >= 10000) {
      if (window_accepts * 100 < window_draws) {
        throw ConvergenceError("generate_pool: acceptance rate below 1%");
      }
      window_draws = 0;
      window_accepts = 0;
    }
  }
  pool.acceptance_rate = static_cast<double>(accepts) / static_cast<double>(draws);
  return pool;
}

std::pair<int, double> select_next(const Eigen::MatrixXd & features,
                                   const Eigen::MatrixXd & betas)
{
  const int n = static_cast<int>(features.cols());
  if (n == 0 || betas.cols() == 0) {
    throw InvalidParameterError("select_next: empty pool or ensemble");
  }
  const int workers = worker_count(n);
  std::vector<int> best_idx(workers, -1);
  std::vector<double> best_val(workers, -1.0);

  auto scan = [&](int w, int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      const double e = (features.col(i).transpose() * betas).cwiseAbs().sum();
      if (e > best_val[w]) {
        best_val[w] = e;
        best_idx[w] = i;
      }
    }
  };
  if (workers == 1) {
    scan(0, 0, n);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) {
      const int lo = static_cast<int>(static_cast<long>(n) * w / workers);
      const int hi = static_cast<int>(static_cast<long>(n) * (w + 1) / workers);
      threads.emplace_back(scan, w, lo, hi);
    }
    for (auto & t : threads) {
      t.join();
    }
  }
  // chunks are in index order, so strict > keeps the lowest-index tie
  int idx = best_idx[0];
  double val = best_val[0];
  for (int w = 1; w < workers; ++w) {
    if (best_val[w] > val) {
      val = best_val[w];
      idx = best_idx[w];
    }
  }
  return {idx, val};
}

namespace
{

void check_contraction(const PosePool & pool, double eta)
{
  if (!(eta > 0.0)) {
    throw InvalidParameterError("pose filtering: eta must be positive");
  }
  const double max_norm2 = pool.features.colwise().squaredNorm().maxCoeff();
  if (eta * max_norm2 >= 2.0) {
    throw InvalidParameterError("pose filtering: eta violates the contraction bound on this pool");
  }
}

FilteredPoses run_filter(const PosePool & pool, const BetaEnsemble & ensemble, double eta,
                         double x_tol, int consecutive_required, int max_iter,
                         std::mt19937_64 * random_order)
{
  check_contraction(pool, eta);
  if (consecutive_required < 1 || max_iter < 1) {
    throw InvalidParameterError("pose filtering: invalid termination parameters");
  }
  const int L = static_cast<int>(pool.poses.rows());
  Eigen::MatrixXd betas = ensemble.betas;
  std::vector<int> active(pool.size());
  std::iota(active.begin(), active.end(), 0);

  FilteredPoses out;
  std::vector<int> selected;
  int consecutive_below = 0;

  while (!active.empty() && static_cast<int>(selected.size()) < max_iter) {
    int pick;  // position within `active`
    if (random_order) {
      std::uniform_int_distribution<std::size_t> u(0, active.size() - 1);
      pick = static_cast<int>(u(*random_order));
    } else {
      const Eigen::MatrixXd sub = pool.features(Eigen::all, active);
      pick = select_next(sub, betas).first;
    }
    const int pool_idx = active[pick];
    const Eigen::VectorXd phi = pool.features.col(pool_idx);
    const Eigen::RowVectorXd errs = phi.transpose() * betas;

    SelectionRecord rec;
    rec.pool_index = pool_idx;
    rec.aggregate_error = errs.cwiseAbs().sum();
    rec.max_error = errs.cwiseAbs().maxCoeff();
    out.records.push_back(rec);
    selected.push_back(pool_idx);

    // Plain gradient step on every ensemble member, no projection
    betas.noalias() -= eta * phi * errs;
    active.erase(active.begin() + pick);

    consecutive_below = (rec.max_error < x_tol) ? consecutive_below + 1 : 0;
    if (consecutive_below >= consecutive_required) {
      out.status = FilterStatus::kConverged;
      break;
    }
  }
  if (out.status != FilterStatus::kConverged) {
    out.status = active.empty() ? FilterStatus::kPoolExhausted : FilterStatus::kMaxIterations;
  }
  out.poses.resize(L, static_cast<int>(selected.size()));
  for (std::size_t k = 0; k < selected.size(); ++k) {
    out.poses.col(static_cast<int>(k)) = pool.poses.col(selected[k]);
  }
  out.final_betas = std::move(betas);
  return out;
}

}  // namespace

FilteredPoses filter_poses(const PosePool & pool, const BetaEnsemble & ensemble, double eta,
                           double x_tol, int consecutive_required, int max_iter)
{
  return run_filter(pool, ensemble, eta, x_tol, consecutive_required, max_iter, nullptr);
}

FilteredPoses random_baseline(const PosePool & pool, const BetaEnsemble & ensemble, double eta,
                              double x_tol, int consecutive_required, int max_iter,
                              std::uint64_t rng_seed)
{
  auto rng = substream(rng_seed, "baseline");
  return run_filter(pool, ensemble, eta, x_tol, consecutive_required, max_iter, &rng);
}

}  // namespace wiplab
