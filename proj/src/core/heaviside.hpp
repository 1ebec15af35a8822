#pragma once

#include "hjb.hpp"

namespace hjbtk {

// The benchmark control problem on the truncated space: one distinguished
// eigendirection psi = e_{psi_index} with eigenvalue lambda carries the
// payoff; the drift is a*phi, the noise is the multiplicative field beta*x
// against a single Brownian direction, the running cost is
// e^{-rho t} Theta(<x,psi>) a^2 and the terminal cost is the payoff
// alpha e^{-rho T} Theta(<x,psi>) <x,psi>^2, where Theta is the Heaviside
// indicator of [0, inf).
struct ExampleParams {
  double rho = 0.5;
  double lambda = -1.0;
  double beta = 0.5;
  std::size_t dim = 8;
  HVec phi;                   // defaults to e_1
  std::size_t psi_index = 1;  // 1-based basis index of psi
  double T = 1.0;

  void validate() const;
  HVec psi() const;
  double phi_psi() const;  // <phi, psi>
};

// Theta(y): 1 on [0, inf), 0 on (-inf, 0).
double heaviside(double y);

// alpha = (-rho + 2 lambda + beta^2) / <phi,psi>^2.
double alpha(const ExampleParams& p);

// alpha_n = (-rho + (2+1/n) lambda + (beta^2/2)(2+1/n)(1+1/n))
//           / ((1/4)(2+1/n)^2 <phi,psi>^2); decreases to alpha from above.
double alpha_seq(int n, const ExampleParams& p);

// v(s,x) = alpha e^{-rho s} Theta(y) y^2 with y = <x,psi>.
double value_v(double s, const HVec& x, const ExampleParams& p);

// The candidate with all derivative handles; the second derivative is the
// one-sided extension 2 alpha e^{-rho s} Theta(y) psi psi^T, unreliable only
// on the kink set {|y| small}.
HJBCandidate value_candidate(const ExampleParams& p);

// v_n = alpha_n e^{-rho s} Theta(y) y^{2+1/n} with h_n = L0(v_n) in closed
// form and g_n = v_n(T, .). Satisfies L0(v_n) = h_n identically.
ApproxTriple approx_triple(int n, const ExampleParams& p);

// F(s,x,p): -inf when <p,phi> != 0 and <x,psi> < 0, else -e^{rho s}<p,phi>^2/4.
double hamiltonian_closed_form(double s, const HVec& x, const HVec& p,
                               const ExampleParams& p_ex);

// a*(t,x) = -alpha Theta(y) y <phi,psi>.
double optimal_feedback(double t, const HVec& x, const ExampleParams& p);

// Deterministic evaluation of the closed-loop cost through the scalar
// moment ODE of y(t) = <X(t),psi>: the running part integrates
// alpha^2 <phi,psi>^2 e^{-rho r} E[y(r)^2] and the terminal part adds
// alpha e^{-rho T} E[y(T)^2]. Collapses to alpha e^{-rho s} y0^2, which is
// exactly value_v; kept in integral form as an independent oracle.
double scalar_oracle_value(double s, double y0, const ExampleParams& p);

// Problem/cost/policy builders for the example.
ControlledSDE make_problem(const ExampleParams& p);
CostSpec make_cost(const ExampleParams& p);
Policy make_optimal_policy(const ExampleParams& p);
KinkSet make_kink_set(const ExampleParams& p, double margin = 1e-3);
HamiltonianHandle make_hamiltonian(const ExampleParams& p);

}  // namespace hjbtk
