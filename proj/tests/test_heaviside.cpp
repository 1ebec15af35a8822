#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <vector>

#include "core/heaviside.hpp"
#include "core/rng.hpp"
#include "doctest.h"

using namespace hjbtk;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("parameter validation") {
  ExampleParams p;
  CHECK_NOTHROW(p.validate());
  ExampleParams bad = p;
  bad.psi_index = 9;  // dim = 8
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = p;
  bad.T = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = p;
  bad.dim = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = p;
  bad.phi = {0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};  // orthogonal to psi = e1
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("alpha at the default parameters") {
  ExampleParams p;
  // (-rho + 2 lambda + beta^2) / <phi,psi>^2 = (-0.5 - 2 + 0.25) / 1.
  CHECK(alpha(p) == doctest::Approx(-2.25).epsilon(1e-15));
  // n = 1: e = 3; (-0.5 - 3 + 0.75) / (9/4) = -11/9.
  CHECK(alpha_seq(1, p) == doctest::Approx(-11.0 / 9.0).epsilon(1e-15));
  CHECK_THROWS_AS(alpha_seq(0, p), Error);
}

TEST_CASE("alpha sequence decreases toward alpha") {
  ExampleParams p;
  const double a = alpha(p);
  double prev = kInf;
  for (int n : {1, 2, 4, 8, 16, 32}) {
    const double an = alpha_seq(n, p);
    CHECK(an < prev);
    CHECK(an > a);  // approaches from above for these parameters
    prev = an;
  }
  CHECK(std::abs(alpha_seq(32, p) - a) < std::abs(alpha_seq(16, p) - a));
  CHECK(std::abs(alpha_seq(32, p) - a) < 0.05 * std::abs(alpha_seq(1, p) - a));
}

TEST_CASE("candidate value function") {
  ExampleParams p;
  const HVec e1 = basis_vector(p.dim, 1);
  CHECK(value_v(0.0, e1, p) == doctest::Approx(-2.25).epsilon(1e-15));
  // Heaviside side: negative mode contributes nothing.
  HVec neg = e1;
  neg[0] = -3.0;
  CHECK(value_v(0.3, neg, p) == 0.0);
  // Discounting in s.
  HVec two = e1;
  two[0] = 2.0;
  CHECK(value_v(1.0, two, p) ==
        doctest::Approx(-2.25 * std::exp(-0.5) * 4.0).epsilon(1e-14));
}

TEST_CASE("scalar oracle agrees with the candidate value everywhere") {
  ExampleParams p;
  CounterRng rng(314159, 0);
  for (int k = 0; k < 50; ++k) {
    const double s = p.T * rng.uniform();
    const double y0 = 4.0 * rng.uniform() - 1.0;  // includes negative starts
    HVec x(p.dim, 0.0);
    x[0] = y0;
    const double v = value_v(s, x, p);
    const double oracle = scalar_oracle_value(s, y0, p);
    CHECK(std::abs(oracle - v) <= 1e-10 * (1.0 + std::abs(v)));
  }
  CHECK(scalar_oracle_value(0.0, -1.0, p) == 0.0);
}

TEST_CASE("scalar oracle re-derived by quadrature") {
  // Independent re-computation of the integral form: running part
  // alpha^2 w^2 y0^2 int_s^T e^{-rho s} e^{(gamma-rho)(r-s)} dr via Simpson,
  // terminal part alpha e^{-rho T} y0^2 e^{gamma (T-s)}.
  ExampleParams p;
  const double a = alpha(p);
  const double w = 1.0;
  const double mu = p.lambda - a * w * w;
  const double gamma = 2.0 * mu + p.beta * p.beta;
  const double s = 0.25, y0 = 1.4;
  const int n = 20000;
  const double h = (p.T - s) / n;
  double integral = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = s + i * h;
    const double f = std::exp(-p.rho * s) * std::exp((gamma - p.rho) * (r - s));
    const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    integral += wgt * f;
  }
  integral *= h / 3.0;
  const double quad = a * a * w * w * y0 * y0 * integral +
                      a * std::exp(-p.rho * p.T) * y0 * y0 *
                          std::exp(gamma * (p.T - s));
  CHECK(scalar_oracle_value(s, y0, p) == doctest::Approx(quad).epsilon(1e-9));
}

TEST_CASE("approximating triples solve their own equation") {
  ExampleParams p;
  const HVec e1 = basis_vector(p.dim, 1);
  for (int n : {1, 2, 32}) {
    const ApproxTriple triple = approx_triple(n, p);
    CHECK(triple.n == n);
    // Terminal identity is exact by construction.
    HVec x = e1;
    x[0] = 1.7;
    CHECK(triple.v_n.v(p.T, x) == triple.g_n(x));
    // Negative side vanishes identically.
    x[0] = -0.8;
    CHECK(triple.v_n.v(0.2, x) == 0.0);
    CHECK(triple.h_n(0.2, x) == 0.0);
    CHECK(triple.g_n(x) == 0.0);
  }
  // Frozen point value: h_1(0, e1) = (1/4) e^2 alpha_1^2 = (9/4)(121/81) = 121/36.
  const ApproxTriple t1 = approx_triple(1, p);
  CHECK(t1.h_n(0.0, e1) == doctest::Approx(121.0 / 36.0).epsilon(1e-14));
}

TEST_CASE("closed-form hamiltonian branches") {
  ExampleParams p;
  const HamiltonianHandle F = make_hamiltonian(p);
  HVec x = basis_vector(p.dim, 1);
  HVec grad(p.dim, 0.0);
  grad[0] = 3.0;  // <p, phi> = 3
  // Positive side: -(1/4) e^{rho s} <p,phi>^2.
  CHECK(F(0.0, x, grad) == doctest::Approx(-2.25).epsilon(1e-14));
  CHECK(F(1.0, x, grad) ==
        doctest::Approx(-2.25 * std::exp(0.5)).epsilon(1e-14));
  // Negative side with <p,phi> != 0: minus infinity.
  x[0] = -1.0;
  CHECK(F(0.0, x, grad) == -kInf);
  // Negative side with p orthogonal to phi: finite zero.
  HVec ortho(p.dim, 0.0);
  ortho[1] = 5.0;
  CHECK(F(0.0, x, ortho) == 0.0);
  // Zero gradient: zero.
  CHECK(F(0.5, x, HVec(p.dim, 0.0)) == 0.0);
}

TEST_CASE("optimal feedback law") {
  ExampleParams p;
  HVec x = basis_vector(p.dim, 1);
  CHECK(optimal_feedback(0.0, x, p) == doctest::Approx(2.25).epsilon(1e-15));
  x[0] = 2.0;
  CHECK(optimal_feedback(0.7, x, p) == doctest::Approx(4.5).epsilon(1e-15));
  x[0] = -1.0;
  CHECK(optimal_feedback(0.0, x, p) == 0.0);
}

TEST_CASE("assembled problem pieces") {
  ExampleParams p;
  const ControlledSDE problem = make_problem(p);
  REQUIRE(problem.dim() == 8);
  // First eigenvalue is the example's lambda; the rest follow -k^2.
  CHECK(problem.A.eigenvalues[0] == p.lambda);
  CHECK(problem.A.eigenvalues[1] == -4.0);
  CHECK(problem.A.eigenvalues[7] == -64.0);
  CHECK_FALSE(problem.control_set.bounded);

  // Controlled drift pushes along phi.
  HVec out(8, 0.0), scratch(8, 0.0);
  HVec x = basis_vector(8, 1);
  problem.drift(0.0, x, 1.5, out, scratch);
  CHECK(out[0] == doctest::Approx(1.5).epsilon(1e-15));
  for (std::size_t i = 1; i < 8; ++i) CHECK(out[i] == 0.0);

  // Noise column is beta * x.
  std::vector<double> col;
  problem.noise.sigma(0.0, x, col);
  REQUIRE(col.size() == 8);
  CHECK(col[0] == doctest::Approx(p.beta).epsilon(1e-15));

  const CostSpec cost = make_cost(p);
  CHECK(cost.l(0.0, x, 2.0) == doctest::Approx(4.0).epsilon(1e-15));
  HVec neg = x;
  neg[0] = -1.0;
  CHECK(cost.l(0.0, neg, 2.0) == 0.0);
  CHECK(cost.g(x) == doctest::Approx(-2.25 * std::exp(-0.5)).epsilon(1e-14));

  const Policy pol = make_optimal_policy(p);
  CHECK(pol.label == "optimal-feedback");
  CHECK(pol.kind == Policy::Kind::feedback);
}

TEST_CASE("candidate derivatives and kink set") {
  ExampleParams p;
  const HJBCandidate cand = value_candidate(p);
  HVec x = basis_vector(p.dim, 1);
  x[0] = 1.3;
  const HVec grad = cand.dv_dx(0.4, x);
  CHECK(grad[0] == doctest::Approx(2.0 * alpha(p) * std::exp(-0.2) * 1.3).epsilon(1e-14));
  for (std::size_t i = 1; i < p.dim; ++i) CHECK(grad[i] == 0.0);
  CHECK(cand.dv_ds(0.4, x) ==
        doctest::Approx(-p.rho * cand.v(0.4, x)).epsilon(1e-13));
  REQUIRE(static_cast<bool>(cand.d2v_dxx));
  const std::vector<double> hess = cand.d2v_dxx(0.4, x);
  REQUIRE(hess.size() == p.dim * p.dim);
  CHECK(hess[0] == doctest::Approx(2.0 * alpha(p) * std::exp(-0.2)).epsilon(1e-14));
  CHECK(hess[1] == 0.0);

  const KinkSet kinks = make_kink_set(p, 0.01);
  HVec near = x;
  near[0] = 0.005;
  CHECK(kinks.excludes(0.0, near));
  near[0] = -0.005;
  CHECK(kinks.excludes(0.0, near));
  CHECK_FALSE(kinks.excludes(0.0, x));
}

TEST_CASE("pointwise verification gap integrand is nonnegative") {
  // F_CV(s,x,p,a) - F(s,x,p) = e^{-rho s} Theta(y) (a + alpha y w)^2 >= 0 on
  // the smooth region; sampled over controls and states.
  ExampleParams p;
  const ControlledSDE problem = make_problem(p);
  const CostSpec cost = make_cost(p);
  const HamiltonianHandle F = make_hamiltonian(p);
  const HJBCandidate cand = value_candidate(p);
  CounterRng rng(2718, 1);
  for (int k = 0; k < 200; ++k) {
    const double s = p.T * rng.uniform();
    HVec x(p.dim, 0.0);
    for (auto& xi : x) xi = 2.0 * rng.uniform() - 0.5;
    if (x[0] <= 0.0) x[0] = 0.25;  // smooth branch
    const double a = 6.0 * rng.uniform() - 3.0;
    const HVec grad = cand.dv_dx(s, x);
    const double gap = current_value_hamiltonian(cost, problem, s, x, grad, a) - F(s, x, grad);
    CHECK(gap >= -1e-12);
    // Closed form of the gap.
    const double y = x[0];
    const double predicted =
        std::exp(-p.rho * s) * (a + alpha(p) * y) * (a + alpha(p) * y);
    CHECK(gap == doctest::Approx(predicted).epsilon(1e-10));
    // The optimal feedback closes the gap exactly.
    const double astar = optimal_feedback(s, x, p);
    const double gap0 =
        current_value_hamiltonian(cost, problem, s, x, grad, astar) - F(s, x, grad);
    CHECK(std::abs(gap0) <= 1e-12 * (1.0 + std::abs(F(s, x, grad))));
  }
}
