#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <utility>
#include <vector>

#include "core/covariation.hpp"
#include "core/rng.hpp"
#include "doctest.h"

using namespace hjbtk;

namespace {

ScalarPath brownian_path(const TimeGrid& grid, std::uint64_t seed, std::uint64_t stream) {
  NoiseModel noise;
  noise.d = 1;
  noise.q = {1.0};
  const WienerPath w = sample_wiener(noise, grid, seed, stream);
  ScalarPath p;
  p.grid = grid;
  p.values.assign(grid.steps + 1, 0.0);
  for (std::size_t i = 0; i < grid.steps; ++i)
    p.values[i + 1] = p.values[i] + w.increment(i, 0);
  return p;
}

ScalarPath ramp_path(const TimeGrid& grid, double slope) {
  ScalarPath p;
  p.grid = grid;
  p.values.assign(grid.steps + 1, 0.0);
  for (std::size_t i = 0; i <= grid.steps; ++i) p.values[i] = slope * grid.node(i);
  return p;
}

VecPath as_vec(const ScalarPath& s) {
  VecPath v;
  v.grid = s.grid;
  v.values.reserve(s.values.size());
  for (double x : s.values) v.values.push_back(HVec{x});
  return v;
}

}  // namespace

TEST_CASE("epsilon must be a positive multiple of the grid step") {
  const TimeGrid grid{0.0, 1.0, 100};
  const ScalarPath w = brownian_path(grid, 1, 0);
  CHECK_THROWS_AS(epsilon_covariation(w, w, 0.015), Error);
  CHECK_THROWS_AS(epsilon_covariation(w, w, 0.0), Error);
  CHECK_THROWS_AS(epsilon_covariation(w, w, -0.01), Error);
  CHECK_NOTHROW(epsilon_covariation(w, w, grid.dt()));
}

TEST_CASE("mismatched grids are rejected") {
  const ScalarPath a = brownian_path({0.0, 1.0, 100}, 1, 0);
  const ScalarPath b = brownian_path({0.0, 1.0, 50}, 1, 1);
  CHECK_THROWS_AS(epsilon_covariation(a, b, 0.02), Error);
}

TEST_CASE("brownian quadratic variation is recovered") {
  const TimeGrid grid{0.0, 1.0, 1000};
  const double eps = 0.01;
  double mean = 0.0;
  const std::size_t reps = 100;
  for (std::size_t r = 0; r < reps; ++r) {
    const ScalarPath w = brownian_path(grid, 314159, r);
    const ScalarPath c = epsilon_covariation(w, w, eps);
    CHECK(c.values.front() == 0.0);
    for (std::size_t k = 1; k < c.values.size(); ++k)
      CHECK(c.values[k] >= c.values[k - 1]);  // running sum of squares
    mean += c.values.back();
  }
  mean /= static_cast<double>(reps);
  CHECK(std::abs(mean - 1.0) <= 0.05);
}

TEST_CASE("the estimator is bilinear and symmetric") {
  const TimeGrid grid{0.0, 1.0, 200};
  const ScalarPath x = brownian_path(grid, 7, 0);
  const ScalarPath y = brownian_path(grid, 7, 1);
  const ScalarPath z = brownian_path(grid, 7, 2);
  ScalarPath xy = x;
  for (std::size_t i = 0; i < xy.values.size(); ++i) xy.values[i] += y.values[i];

  const double eps = 0.05;
  const ScalarPath cxz = epsilon_covariation(x, z, eps);
  const ScalarPath cyz = epsilon_covariation(y, z, eps);
  const ScalarPath csum = epsilon_covariation(xy, z, eps);
  for (std::size_t k = 0; k < csum.values.size(); ++k)
    CHECK(csum.values[k] ==
          doctest::Approx(cxz.values[k] + cyz.values[k]).epsilon(1e-12).scale(1.0));

  const ScalarPath czx = epsilon_covariation(z, x, eps);
  for (std::size_t k = 0; k < cxz.values.size(); ++k)
    CHECK(cxz.values[k] == czx.values[k]);  // products commute exactly

  // Rank-one functional against vector paths: swapping (u,w) and (x,y)
  // together leaves the estimate unchanged.
  const VecPath vx = as_vec(x);
  const VecPath vz = as_vec(z);
  const ChiFunctional uw{{2.0}, {-0.5}};
  const ChiFunctional wu{{-0.5}, {2.0}};
  const ScalarPath a = epsilon_covariation(vx, vz, uw, eps);
  const ScalarPath b = epsilon_covariation(vz, vx, wu, eps);
  for (std::size_t k = 0; k < a.values.size(); ++k) CHECK(a.values[k] == b.values[k]);
}

TEST_CASE("constant paths have exactly zero covariation") {
  const TimeGrid grid{0.0, 1.0, 64};
  ScalarPath c;
  c.grid = grid;
  c.values.assign(65, 3.75);
  const ScalarPath w = brownian_path(grid, 5, 0);
  for (double eps : {grid.dt(), 0.25}) {
    const ScalarPath cc = epsilon_covariation(c, c, eps);
    const ScalarPath cw = epsilon_covariation(c, w, eps);
    for (double v : cc.values) CHECK(v == 0.0);
    for (double v : cw.values) CHECK(v == 0.0);
  }
}

TEST_CASE("smooth ramps have vanishing quadratic variation") {
  const TimeGrid grid{0.0, 1.0, 100};
  const ScalarPath ramp = ramp_path(grid, 1.0);
  // eps = 0.1: 91 full increments of eps plus a capped tail of 9:
  // (h/eps) * (91 * eps^2 + 0.0001 * 285) = 0.09385.
  const ScalarPath c = epsilon_covariation(ramp, ramp, 0.1);
  CHECK(c.values.back() == doctest::Approx(0.09385).epsilon(1e-9));
  double prev = 1e9;
  for (double eps : {0.1, 0.05, 0.02}) {
    const double terminal = epsilon_covariation(ramp, ramp, eps).values.back();
    CHECK(terminal <= 2.0 * eps);
    CHECK(terminal >= 0.0);
    CHECK(terminal < prev);
    prev = terminal;
  }
}

TEST_CASE("covariation scans are reproducible") {
  const TimeGrid grid{0.0, 1.0, 400};
  const auto gen = [&](std::uint64_t r) {
    return std::make_pair(as_vec(brownian_path(grid, 99, 2 * r)),
                          as_vec(brownian_path(grid, 99, 2 * r + 1)));
  };
  const ChiFunctional phi{{1.0}, {1.0}};
  const std::vector<double> eps{0.05, 0.01};
  const CovariationEstimate a = covariation_scan(gen, phi, eps, 10);
  const CovariationEstimate b = covariation_scan(gen, phi, eps, 10);
  CHECK(a.epsilons == eps);
  CHECK(a.terminal_mean == b.terminal_mean);
  CHECK(a.terminal_spread == b.terminal_spread);
  CHECK(a.sup_dev_from_finest == b.sup_dev_from_finest);
  REQUIRE(a.replica0_paths.size() == 2);
  CHECK(a.sup_dev_from_finest.back() == 0.0);  // finest vs itself
  // Independent Brownian coordinates: terminal covariations hover near zero.
  CHECK(std::abs(a.terminal_mean.back()) < 0.2);
}

TEST_CASE("ramps are orthogonal to brownian motion") {
  const TimeGrid grid{0.0, 1.0, 500};
  std::vector<ScalarPath> ramps, noise;
  for (std::uint64_t r = 0; r < 40; ++r) {
    ramps.push_back(ramp_path(grid, 1.0));
    noise.push_back(brownian_path(grid, 2718, r));
  }
  const std::vector<double> eps{0.1, 0.05, 0.02};
  const OrthogonalityReport rep = orthogonality_test(ramps, noise, eps, 0.0);
  REQUIRE(rep.means.size() == 3);
  CHECK(rep.threshold == doctest::Approx(3.0 * rep.std_errors.back()));
  CHECK(rep.mean_within_band);
  CHECK(rep.pass);

  // A Brownian path is not orthogonal to itself: the bracket is ~ t.
  const OrthogonalityReport self = orthogonality_test(noise, noise, eps, 0.0);
  CHECK(self.means.back() > 0.5);
  CHECK_FALSE(self.mean_within_band);
  CHECK_FALSE(self.pass);
}

TEST_CASE("identically zero families pass exactly") {
  const TimeGrid grid{0.0, 1.0, 100};
  std::vector<ScalarPath> zeros, noise;
  for (std::uint64_t r = 0; r < 8; ++r) {
    ScalarPath z;
    z.grid = grid;
    z.values.assign(101, 0.0);
    zeros.push_back(z);
    noise.push_back(brownian_path(grid, 11, r));
  }
  const std::vector<double> eps{0.05, 0.01};
  const OrthogonalityReport rep = orthogonality_test(zeros, noise, eps, 1e-12);
  CHECK(rep.means == std::vector<double>{0.0, 0.0});
  CHECK(rep.std_errors.back() == 0.0);
  CHECK(rep.pass);
}

TEST_CASE("weak dirichlet split of a linear functional is exact") {
  // A = 0, zero drift, constant dispersion: v(t,x) = <c,x> makes v(t,X) a
  // martingale, so the remainder part vanishes identically.
  ControlledSDE problem;
  problem.A.eigenvalues = {0.0, 0.0};
  problem.noise.d = 1;
  problem.noise.q = {1.0};
  problem.noise.sigma = [](double, const HVec&, std::vector<double>& out) {
    out = {1.0, 0.5};
  };
  problem.control_set.bounded = false;

  HJBCandidate cand;
  cand.v = [](double, const HVec& x) { return 2.0 * x[0] - x[1]; };
  cand.dv_ds = [](double, const HVec&) { return 0.0; };
  cand.dv_dx = [](double, const HVec&) { return HVec{2.0, -1.0}; };

  Policy zero;
  zero.kind = Policy::Kind::feedback;
  zero.feedback = [](double, const HVec&) { return 0.0; };

  const TimeGrid grid{0.0, 1.0, 64};
  const WienerPath w = sample_wiener(problem.noise, grid, 21, 0);
  const Trajectory traj = simulate_mild(problem, zero, {0.25, -0.75}, grid, w);
  const auto [mart, rest] = weak_dirichlet_split(cand, problem, traj);
  REQUIRE(mart.values.size() == 65);
  REQUIRE(rest.values.size() == 65);
  CHECK(rest.values.front() == 0.0);
  for (std::size_t k = 0; k <= 64; ++k) {
    CHECK(std::abs(rest.values[k]) <= 1e-12);
    CHECK(mart.values[k] + rest.values[k] ==
          doctest::Approx(cand.v(grid.node(k), traj.states[k])).epsilon(1e-14));
  }
}

TEST_CASE("weak dirichlet remainder collects the bracket of a quadratic") {
  // v = x^2 on driftless unit-noise dynamics: the remainder accumulates
  // sum (dW)^2 ~ t.
  ControlledSDE problem;
  problem.A.eigenvalues = {0.0};
  problem.noise.d = 1;
  problem.noise.q = {1.0};
  problem.noise.sigma = [](double, const HVec&, std::vector<double>& out) {
    out = {1.0};
  };
  problem.control_set.bounded = false;

  HJBCandidate cand;
  cand.v = [](double, const HVec& x) { return x[0] * x[0]; };
  cand.dv_ds = [](double, const HVec&) { return 0.0; };
  cand.dv_dx = [](double, const HVec& x) { return HVec{2.0 * x[0]}; };

  Policy zero;
  zero.kind = Policy::Kind::feedback;
  zero.feedback = [](double, const HVec&) { return 0.0; };

  const TimeGrid grid{0.0, 1.0, 1000};
  const WienerPath w = sample_wiener(problem.noise, grid, 4242, 0);
  const Trajectory traj = simulate_mild(problem, zero, {0.0}, grid, w);
  const auto [mart, rest] = weak_dirichlet_split(cand, problem, traj);
  double bracket = 0.0;
  for (std::size_t i = 0; i < 1000; ++i) bracket += w.increment(i, 0) * w.increment(i, 0);
  CHECK(rest.values.back() == doctest::Approx(bracket).epsilon(1e-10));
  CHECK(std::abs(rest.values.back() - 1.0) < 0.2);
}
