#include "heaviside.hpp"

#include <cmath>
#include <limits>

namespace hjbtk {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// y^e for y >= 0 without ever feeding a negative base to pow.
inline double pos_pow(double y, double e) { return y > 0.0 ? std::pow(y, e) : 0.0; }
}  // namespace

void ExampleParams::validate() const {
  if (dim == 0) throw Error(errc::parameter, "example: dimension must be positive");
  if (psi_index < 1 || psi_index > dim)
    throw Error(errc::parameter, "example: psi_index out of range");
  if (!phi.empty() && phi.size() != dim)
    throw Error(errc::dimension_mismatch, "example: phi dimension mismatch");
  if (!(T > 0.0)) throw Error(errc::parameter, "example: need T > 0");
  if (phi_psi() == 0.0)
    throw Error(errc::parameter, "example: <phi,psi> must be nonzero");
}

HVec ExampleParams::psi() const { return basis_vector(dim, psi_index); }

double ExampleParams::phi_psi() const {
  if (phi.empty()) return psi_index == 1 ? 1.0 : 0.0;
  return phi[psi_index - 1];
}

double heaviside(double y) { return y >= 0.0 ? 1.0 : 0.0; }

double alpha(const ExampleParams& p) {
  const double w = p.phi_psi();
  return (-p.rho + 2.0 * p.lambda + p.beta * p.beta) / (w * w);
}

double alpha_seq(int n, const ExampleParams& p) {
  if (n < 1) throw Error(errc::parameter, "alpha_seq: n must be >= 1");
  const double e = 2.0 + 1.0 / static_cast<double>(n);
  const double w = p.phi_psi();
  const double num = -p.rho + e * p.lambda + 0.5 * p.beta * p.beta * e * (e - 1.0);
  return num / (0.25 * e * e * w * w);
}

double value_v(double s, const HVec& x, const ExampleParams& p) {
  const double y = x[p.psi_index - 1];
  if (y < 0.0) return 0.0;
  return alpha(p) * std::exp(-p.rho * s) * y * y;
}

HJBCandidate value_candidate(const ExampleParams& p) {
  p.validate();
  const double al = alpha(p);
  const double rho = p.rho;
  const std::size_t n = p.dim, pi = p.psi_index - 1;
  HJBCandidate c;
  c.v = [=](double s, const HVec& x) {
    const double y = x[pi];
    return y < 0.0 ? 0.0 : al * std::exp(-rho * s) * y * y;
  };
  c.dv_ds = [=](double s, const HVec& x) {
    const double y = x[pi];
    return y < 0.0 ? 0.0 : -rho * al * std::exp(-rho * s) * y * y;
  };
  c.dv_dx = [=](double s, const HVec& x) {
    HVec g(n, 0.0);
    const double y = x[pi];
    if (y >= 0.0) g[pi] = 2.0 * al * std::exp(-rho * s) * y;
    return g;
  };
  c.d2v_dxx = [=](double s, const HVec& x) {
    std::vector<double> hess(n * n, 0.0);
    if (x[pi] >= 0.0) hess[pi * n + pi] = 2.0 * al * std::exp(-rho * s);
    return hess;
  };
  c.growth_M = 2.0 * std::abs(al) * std::max(1.0, std::exp(-rho * p.T));
  c.growth_m = 1;
  return c;
}

ApproxTriple approx_triple(int n, const ExampleParams& p) {
  p.validate();
  const double e = 2.0 + 1.0 / static_cast<double>(n);
  const double an = alpha_seq(n, p);
  const double rho = p.rho, T = p.T, w = p.phi_psi();
  const std::size_t dim = p.dim, pi = p.psi_index - 1;

  ApproxTriple triple;
  triple.n = n;
  triple.v_n.v = [=](double s, const HVec& x) {
    return an * std::exp(-rho * s) * pos_pow(x[pi], e);
  };
  triple.v_n.dv_ds = [=](double s, const HVec& x) {
    return -rho * an * std::exp(-rho * s) * pos_pow(x[pi], e);
  };
  triple.v_n.dv_dx = [=](double s, const HVec& x) {
    HVec g(dim, 0.0);
    g[pi] = e * an * std::exp(-rho * s) * pos_pow(x[pi], e - 1.0);
    return g;
  };
  triple.v_n.d2v_dxx = [=](double s, const HVec& x) {
    std::vector<double> hess(dim * dim, 0.0);
    hess[pi * dim + pi] = e * (e - 1.0) * an * std::exp(-rho * s) * pos_pow(x[pi], e - 2.0);
    return hess;
  };
  triple.v_n.growth_M = e * std::abs(an) * std::max(1.0, std::exp(-rho * T));
  triple.v_n.growth_m = 2;
  triple.h_n = [=](double s, const HVec& x) {
    return 0.25 * an * an * e * e * w * w * std::exp(-rho * s) * pos_pow(x[pi], e);
  };
  triple.g_n = [=](const HVec& x) { return an * std::exp(-rho * T) * pos_pow(x[pi], e); };
  return triple;
}

double hamiltonian_closed_form(double s, const HVec& x, const HVec& p,
                               const ExampleParams& p_ex) {
  double pf = 0.0;
  if (p_ex.phi.empty()) {
    pf = p[0];
  } else {
    pf = inner(p, p_ex.phi);
  }
  const double y = x[p_ex.psi_index - 1];
  if (pf != 0.0 && y < 0.0) return -kInf;
  return -0.25 * std::exp(p_ex.rho * s) * pf * pf;
}

double optimal_feedback(double /*t*/, const HVec& x, const ExampleParams& p) {
  const double y = x[p.psi_index - 1];
  if (y < 0.0) return 0.0;
  return -alpha(p) * y * p.phi_psi();
}

double scalar_oracle_value(double s, double y0, const ExampleParams& p) {
  if (y0 <= 0.0) return 0.0;
  const double w = p.phi_psi() * p.phi_psi();
  const double al = alpha(p);
  const double mu = p.lambda - al * w;          // closed-loop drift rate of y
  const double gamma = 2.0 * mu + p.beta * p.beta;  // second-moment rate
  const double d = gamma - p.rho;
  const double span = p.T - s;
  // int_s^T e^{-rho r} E[y(r)^2] dr with E[y(r)^2] = y0^2 e^{gamma (r-s)}.
  const double integral =
      std::exp(-p.rho * s) * (std::abs(d) > 1e-14 ? std::expm1(d * span) / d : span);
  const double running = al * al * w * y0 * y0 * integral;
  const double terminal = al * std::exp(-p.rho * p.T) * y0 * y0 * std::exp(gamma * span);
  return running + terminal;
}

ControlledSDE make_problem(const ExampleParams& p) {
  p.validate();
  ControlledSDE problem;
  problem.A.eigenvalues.resize(p.dim);
  for (std::size_t k = 1; k <= p.dim; ++k)
    problem.A.eigenvalues[k - 1] = -static_cast<double>(k) * static_cast<double>(k);
  problem.A.eigenvalues[p.psi_index - 1] = p.lambda;

  HVec phi = p.phi.empty() ? basis_vector(p.dim, 1) : p.phi;
  problem.b_i = [phi](double, const HVec&, double a, HVec& out) {
    out = phi;
    for (auto& c : out) c *= a;
  };
  problem.noise.d = 1;
  problem.noise.q = {1.0};
  const double beta = p.beta;
  problem.noise.sigma = [beta](double, const HVec& x, std::vector<double>& out) {
    out.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = beta * x[k];
  };
  problem.control_set.bounded = false;
  return problem;
}

CostSpec make_cost(const ExampleParams& p) {
  p.validate();
  const double rho = p.rho, T = p.T, al = alpha(p);
  const std::size_t pi = p.psi_index - 1;
  CostSpec cost;
  cost.l = [=](double t, const HVec& x, double a) {
    return x[pi] < 0.0 ? 0.0 : std::exp(-rho * t) * a * a;
  };
  cost.g = [=](const HVec& x) {
    const double y = x[pi];
    return y < 0.0 ? 0.0 : al * std::exp(-rho * T) * y * y;
  };
  return cost;
}

Policy make_optimal_policy(const ExampleParams& p) {
  p.validate();
  ExampleParams copy = p;
  return synthesize_feedback(
      [copy](double t, const HVec& x) { return optimal_feedback(t, x, copy); },
      "optimal-feedback");
}

KinkSet make_kink_set(const ExampleParams& p, double margin) {
  KinkSet k;
  const std::size_t pi = p.psi_index - 1;
  k.margin = margin;
  k.near_kink = [pi, margin](double, const HVec& x) { return std::abs(x[pi]) < margin; };
  return k;
}

HamiltonianHandle make_hamiltonian(const ExampleParams& p) {
  ExampleParams copy = p;
  return [copy](double s, const HVec& x, const HVec& pp) {
    return hamiltonian_closed_form(s, x, pp, copy);
  };
}

}  // namespace hjbtk
