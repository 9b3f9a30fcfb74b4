#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <set>

#include "wiplab/metalearn.hpp"

using namespace wiplab;

namespace
{

// Straight-line reference implementation of the greedy filtering loop,
// kept deliberately naive and independent of the library internals.
struct ReferenceStep
{
  int pool_index;
  double aggregate;
  double max_err;
};

std::vector<ReferenceStep> reference_filter(Eigen::MatrixXd features, Eigen::MatrixXd betas,
                                            double eta, double x_tol, int n_c, int max_iter)
{
  std::vector<int> alive(features.cols());
  for (std::size_t i = 0; i < alive.size(); ++i) {
    alive[i] = static_cast<int>(i);
  }
  std::vector<ReferenceStep> steps;
  int below = 0;
  while (!alive.empty() && static_cast<int>(steps.size()) < max_iter) {
    int best = -1;
    double best_val = -1.0;
    for (std::size_t p = 0; p < alive.size(); ++p) {
      double agg = 0.0;
      for (int k = 0; k < betas.cols(); ++k) {
        agg += std::abs(features.col(alive[p]).dot(betas.col(k)));
      }
      if (agg > best_val) {
        best_val = agg;
        best = static_cast<int>(p);
      }
    }
    const int idx = alive[best];
    double max_err = 0.0;
    for (int k = 0; k < betas.cols(); ++k) {
      const double e = features.col(idx).dot(betas.col(k));
      max_err = std::max(max_err, std::abs(e));
      betas.col(k) -= eta * features.col(idx) * e;
    }
    steps.push_back({idx, best_val, max_err});
    alive.erase(alive.begin() + best);
    below = (max_err < x_tol) ? below + 1 : 0;
    if (below >= n_c) {
      break;
    }
  }
  return steps;
}

PosePool synthetic_pool(int L, int n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  PosePool pool;
  pool.poses = Eigen::MatrixXd::Zero(L, n);
  pool.features.resize(4 * L, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < 4 * L; ++i) {
      pool.features(i, j) = 0.05 * g(rng);
    }
  }
  return pool;
}

BetaEnsemble synthetic_ensemble(int dim, int k, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  BetaEnsemble e;
  e.betas.resize(dim, k);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < dim; ++i) {
      e.betas(i, j) = g(rng);
    }
  }
  return e;
}

}  // namespace

TEST_CASE("pool poses are balanced, within limits, with bit-exact features")
{
  const auto g = ChainGeometry::default_seven_link();
  const Beta truth = make_default_truth(g);
  const auto pool = generate_pool(g, truth, 50, 2024);
  CHECK(pool.size() == 50);
  CHECK(pool.acceptance_rate > 0.0);
  CHECK(pool.acceptance_rate <= 1.0);
  CHECK(pool.seed == 2024);
  for (int j = 0; j < pool.size(); ++j) {
    const Pose q = pool.poses.col(j);
    CHECK(g.pose_within_limits(q));
    CHECK(std::abs(pool.features.col(j).dot(truth)) < 1e-10);
    CHECK(pool.features.col(j) == feature_vector(g, q));
  }
}

TEST_CASE("pool generation handles n = 1 and reproduces bit-exactly")
{
  const auto g = ChainGeometry::default_seven_link();
  const Beta truth = make_default_truth(g);
  CHECK(generate_pool(g, truth, 1, 5).size() == 1);
  const auto a = generate_pool(g, truth, 30, 77);
  const auto b = generate_pool(g, truth, 30, 77);
  CHECK(a.poses == b.poses);
  CHECK(a.features == b.features);
  CHECK_THROWS_AS(generate_pool(g, truth, 0, 1), InvalidParameterError);
}

TEST_CASE("select_next reduces to argmax for a single member")
{
  const auto pool = synthetic_pool(2, 40, 3);
  const auto ens = synthetic_ensemble(8, 1, 4);
  int expect = 0;
  double best = -1.0;
  for (int j = 0; j < 40; ++j) {
    const double e = std::abs(pool.features.col(j).dot(ens.betas.col(0)));
    if (e > best) {
      best = e;
      expect = j;
    }
  }
  const auto [idx, agg] = select_next(pool.features, ens.betas);
  CHECK(idx == expect);
  CHECK(agg == doctest::Approx(best).epsilon(1e-15));
}

TEST_CASE("select_next matches exhaustive evaluation on a 3x2 toy instance")
{
  Eigen::MatrixXd features(4, 3);
  features << 1.0, 0.0, 0.5, 0.0, 1.0, 0.5, 0.2, -0.3, 0.1, 0.0, 0.0, 0.4;
  Eigen::MatrixXd betas(4, 2);
  betas << 1.0, -1.0, 2.0, 1.0, 0.0, 3.0, 1.0, 0.0;
  double best = -1.0;
  int expect = 0;
  for (int j = 0; j < 3; ++j) {
    const double agg = std::abs(features.col(j).dot(betas.col(0))) +
                       std::abs(features.col(j).dot(betas.col(1)));
    if (agg > best) {
      best = agg;
      expect = j;
    }
  }
  const auto [idx, agg] = select_next(features, betas);
  CHECK(idx == expect);
  CHECK(agg == doctest::Approx(best).epsilon(1e-15));
}

TEST_CASE("select_next ties break to the lowest index")
{
  Eigen::MatrixXd features = Eigen::MatrixXd::Zero(4, 5);
  features(0, 1) = 1.0;
  features(0, 3) = -1.0;  // same |error| as column 1
  Eigen::MatrixXd betas = Eigen::MatrixXd::Zero(4, 1);
  betas(0, 0) = 2.0;
  CHECK(select_next(features, betas).first == 1);
}

TEST_CASE("select_next is invariant to the worker count")
{
  const auto pool = synthetic_pool(7, 1500, 9);
  const auto ens = synthetic_ensemble(28, 6, 10);
  setenv("WIPLAB_WORKERS", "1", 1);
  const auto serial = select_next(pool.features, ens.betas);
  unsetenv("WIPLAB_WORKERS");
  const auto parallel = select_next(pool.features, ens.betas);
  CHECK(serial.first == parallel.first);
  CHECK(serial.second == parallel.second);
  CHECK_THROWS_AS(select_next(Eigen::MatrixXd(4, 0), ens.betas), InvalidParameterError);
}

TEST_CASE("zero-error ensemble terminates after exactly N_c selections")
{
  const auto g = ChainGeometry::default_seven_link();
  const Beta truth = make_default_truth(g);
  const auto pool = generate_pool(g, truth, 40, 11);
  BetaEnsemble ens;
  ens.betas = truth;
  const auto res = filter_poses(pool, ens, 100.0, 2e-3, 10, 100000);
  CHECK(res.status == FilterStatus::kConverged);
  CHECK(res.size() == 10);
}

TEST_CASE("greedy filter matches the naive reference on a small instance")
{
  const auto pool = synthetic_pool(1, 12, 21);
  const auto ens = synthetic_ensemble(4, 3, 22);
  const double eta = 5.0, x_tol = 1e-3;
  const auto res = filter_poses(pool, ens, eta, x_tol, 3, 1000);
  const auto ref = reference_filter(pool.features, ens.betas, eta, x_tol, 3, 1000);
  REQUIRE(res.records.size() == ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k) {
    CHECK(res.records[k].pool_index == ref[k].pool_index);
    CHECK(res.records[k].aggregate_error == doctest::Approx(ref[k].aggregate).epsilon(1e-12));
    CHECK(res.records[k].max_error == doctest::Approx(ref[k].max_err).epsilon(1e-12));
    CHECK(res.poses.col(static_cast<int>(k)) == pool.poses.col(ref[k].pool_index));
  }
}

TEST_CASE("selection metadata is consistent and indices are distinct")
{
  const auto pool = synthetic_pool(2, 30, 31);
  const auto ens = synthetic_ensemble(8, 4, 32);
  const auto res = filter_poses(pool, ens, 5.0, 1e-4, 5, 1000);
  CHECK(res.records.size() == static_cast<std::size_t>(res.size()));
  std::set<int> seen;
  for (const auto & r : res.records) {
    CHECK(seen.insert(r.pool_index).second);
    CHECK(r.max_error <= r.aggregate_error + 1e-15);
  }
  CHECK(res.final_betas.cols() == 4);
}

TEST_CASE("statuses distinguish exhaustion from iteration cap")
{
  const auto pool = synthetic_pool(1, 6, 41);
  const auto ens = synthetic_ensemble(4, 2, 42);
  // impossible tolerance: a 6-pose pool runs dry
  const auto dry = filter_poses(pool, ens, 1e-6, 1e-300, 3, 1000);
  CHECK(dry.status == FilterStatus::kPoolExhausted);
  CHECK(dry.size() == 6);
  const auto capped = filter_poses(pool, ens, 1e-6, 1e-300, 3, 2);
  CHECK(capped.status == FilterStatus::kMaxIterations);
  CHECK(capped.size() == 2);
}

TEST_CASE("contraction precheck rejects an oversized step")
{
  const auto pool = synthetic_pool(1, 6, 51);
  const auto ens = synthetic_ensemble(4, 2, 52);
  const double max_norm2 = pool.features.colwise().squaredNorm().maxCoeff();
  CHECK_THROWS_AS(filter_poses(pool, ens, 2.1 / max_norm2, 1e-3, 3, 100),
                  InvalidParameterError);
}

TEST_CASE("final ensemble equals the sequence of plain gradient updates")
{
  const auto pool = synthetic_pool(2, 15, 61);
  const auto ens = synthetic_ensemble(8, 3, 62);
  const double eta = 4.0;
  const auto res = filter_poses(pool, ens, eta, 1e-6, 4, 1000);
  Eigen::MatrixXd betas = ens.betas;
  for (const auto & r : res.records) {
    const Eigen::VectorXd phi = pool.features.col(r.pool_index);
    betas -= eta * phi * (phi.transpose() * betas);
  }
  CHECK((betas - res.final_betas).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("random baseline is reproducible and follows the same termination rule")
{
  const auto pool = synthetic_pool(2, 25, 71);
  const auto ens = synthetic_ensemble(8, 3, 72);
  const auto a = random_baseline(pool, ens, 4.0, 1e-4, 5, 1000, 99);
  const auto b = random_baseline(pool, ens, 4.0, 1e-4, 5, 1000, 99);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK(a.records[k].pool_index == b.records[k].pool_index);
  }
  std::set<int> seen;
  for (const auto & r : a.records) {
    CHECK(seen.insert(r.pool_index).second);
  }
  if (a.status == FilterStatus::kConverged) {
    int tail_below = 0;
    for (std::size_t k = a.records.size(); k-- > 0 && a.records[k].max_error < 1e-4;) {
      ++tail_below;
    }
    CHECK(tail_below >= 5);
  }
}

TEST_CASE("greedy filtering beats the random baseline at small scale")
{
  const auto g = ChainGeometry::default_seven_link();
  const Beta truth = make_default_truth(g);
  const auto pool = generate_pool(g, truth, 400, 8);
  const auto ens = generate_ensemble(truth, 10, 0.02, g, 9);
  const double eta = 100.0, x_tol = 2e-3;
  const auto greedy = filter_poses(pool, ens, eta, x_tol, 10, 100000);
  CHECK(greedy.status == FilterStatus::kConverged);
  const auto rando = random_baseline(pool, ens, eta, x_tol, 10, 100000, 123);
  if (rando.status == FilterStatus::kConverged) {
    CHECK(greedy.size() < rando.size());
  }
  // every member's error on the last selected pose is below tolerance
  const auto & last = greedy.records.back();
  CHECK(last.max_error < x_tol);
}
