#include "control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "rng.hpp"

namespace hjbtk {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* to_string(QuasiFlag f) {
  switch (f) {
    case QuasiFlag::ok: return "ok";
    case QuasiFlag::positive_infinite: return "positive_part_suspected_infinite";
    case QuasiFlag::negative_infinite: return "negative_part_suspected_infinite";
    case QuasiFlag::both_infinite_suspected: return "both_parts_suspected_infinite";
  }
  return "unknown";
}

Policy constant_policy(double a, std::string label) {
  Policy p;
  p.kind = Policy::Kind::feedback;
  p.feedback = [a](double, const HVec&) { return a; };
  if (label.empty()) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "const:%g", a);
    label = buf;
  }
  p.label = std::move(label);
  return p;
}

Policy synthesize_feedback(std::function<double(double, const HVec&)> argmin,
                           std::string label) {
  if (!argmin) throw Error(errc::parameter, "synthesize_feedback: null argmin handle");
  Policy p;
  p.kind = Policy::Kind::feedback;
  p.feedback = std::move(argmin);
  p.label = std::move(label);
  return p;
}

CostEstimate evaluate_cost(const ControlledSDE& problem, const CostSpec& cost,
                           const Policy& policy, double s, const HVec& x0,
                           const TimeGrid& grid, const McConfig& mc) {
  grid.validate();
  if (grid.s != s)
    throw Error(errc::parameter, "evaluate_cost: grid must start at the initial time s");
  if (mc.replicas < 2)
    throw Error(errc::parameter, "evaluate_cost: need at least two replicas for a standard error");
  if (!cost.l || !cost.g) throw Error(errc::parameter, "evaluate_cost: cost handles missing");

  const std::size_t R = mc.replicas;
  std::vector<double> costs(R), pos(R), neg(R);
  const double h = grid.dt();

  parallel_for_indexed(R, mc.threads, [&](std::size_t r) {
    const WienerPath w = sample_wiener(problem.noise, grid, mc.seed, r);
    const Trajectory traj = simulate_mild(problem, policy, x0, grid, w);
    double acc = 0.0, accp = 0.0, accn = 0.0;
    for (std::size_t i = 0; i < grid.steps; ++i) {
      const double li = cost.l(grid.node(i), traj.states[i], traj.controls[i]);
      acc += li * h;
      accp += std::max(li, 0.0) * h;
      accn += std::max(-li, 0.0) * h;
    }
    const double gT = cost.g(traj.states.back());
    costs[r] = acc + gT;
    pos[r] = accp + std::max(gT, 0.0);
    neg[r] = accn + std::max(-gT, 0.0);
  });

  CostEstimate est;
  est.replicas = R;
  bool finite = true;
  double sum = 0.0, sump = 0.0, sumn = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    sum += costs[r];
    sump += pos[r];
    sumn += neg[r];
    finite = finite && std::isfinite(costs[r]);
  }
  est.mean = sum / static_cast<double>(R);
  est.positive_part_mean = sump / static_cast<double>(R);
  est.negative_part_mean = sumn / static_cast<double>(R);
  if (finite) {
    double ss = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      const double d = costs[r] - est.mean;
      ss += d * d;
    }
    est.std_error = std::sqrt(ss / static_cast<double>(R - 1) / static_cast<double>(R));
  } else {
    est.std_error = kInf;
  }
  est.flag = admissibility_report(pos, neg);
  return est;
}

double current_value_hamiltonian(const CostSpec& cost, const ControlledSDE& problem,
                                 double s, const HVec& x, const HVec& p, double a) {
  if (p.size() != problem.dim())
    throw Error(errc::dimension_mismatch, "current_value_hamiltonian: costate dimension mismatch");
  HVec b(problem.dim()), scratch(problem.dim());
  problem.drift(s, x, a, b, scratch);
  return inner(p, b) + cost.l(s, x, a);
}

namespace {

// Golden-section minimization on [lo,hi]; assumes one local minimum in the
// bracket, which the surrounding grid scan guarantees.
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  std::size_t iters) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (std::size_t k = 0; k < iters; ++k) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return std::min(fc, fd);
}

}  // namespace

double hamiltonian(const CostSpec& cost, const ControlledSDE& problem, double s,
                   const HVec& x, const HVec& p, const HamiltonianMethod& method) {
  if (method.closed_form) return method.closed_form(s, x, p);

  double lo, hi;
  if (method.scan.window) {
    lo = method.scan.window->first;
    hi = method.scan.window->second;
  } else if (problem.control_set.bounded) {
    lo = problem.control_set.lo;
    hi = problem.control_set.hi;
  } else {
    throw Error(errc::config,
                "hamiltonian: grid scan over an unbounded control set needs an explicit "
                "window or a closed form");
  }
  if (!(lo < hi) || method.scan.points < 3)
    throw Error(errc::config, "hamiltonian: scan window/points invalid");

  const auto f = [&](double a) { return current_value_hamiltonian(cost, problem, s, x, p, a); };

  const std::size_t P = method.scan.points;
  std::vector<double> vals(P);
  const double step = (hi - lo) / static_cast<double>(P - 1);
  std::size_t best = 0;
  double best_val = kInf, vmin = kInf, vmax = -kInf;
  for (std::size_t i = 0; i < P; ++i) {
    const double v = f(lo + step * static_cast<double>(i));
    vals[i] = v;
    if (v == -kInf) return -kInf;
    if (std::isfinite(v)) {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    if (v < best_val) {  // strict: ties keep the smaller control
      best_val = v;
      best = i;
    }
  }
  if (!std::isfinite(best_val)) return best_val;  // +inf everywhere

  // Decreasing past a window edge: treat the infimum as unbounded below.
  const double margin = 1e-9 * (1.0 + (vmax - vmin));
  if (best == 0 && vals[0] <= vals[1] - margin) return -kInf;
  if (best == P - 1 && vals[P - 1] <= vals[P - 2] - margin) return -kInf;

  const double bl = lo + step * static_cast<double>(best == 0 ? 0 : best - 1);
  const double br = lo + step * static_cast<double>(best + 1 >= P ? P - 1 : best + 1);
  return std::min(best_val, golden_min(f, bl, br, method.scan.golden_iters));
}

ValueEstimate estimate_value(const ControlledSDE& problem, const CostSpec& cost,
                             std::span<const Policy> family, double s, const HVec& x0,
                             const TimeGrid& grid, const McConfig& mc) {
  if (family.empty()) throw Error(errc::parameter, "estimate_value: empty policy family");
  ValueEstimate ve;
  ve.results.reserve(family.size());
  for (const Policy& p : family)
    ve.results.push_back({p.label, evaluate_cost(problem, cost, p, s, x0, grid, mc)});
  for (std::size_t i = 1; i < ve.results.size(); ++i) {
    const double cur = ve.results[i].estimate.mean;
    const double best = ve.results[ve.best_index].estimate.mean;
    if (cur < best || std::isnan(best)) ve.best_index = i;
  }
  return ve;
}

namespace {

bool part_suspected_infinite(std::span<const double> part) {
  const std::size_t n = part.size();
  for (double v : part)
    if (!std::isfinite(v)) return true;
  if (n < 8) return false;
  // Running-mean growth across the sample: integrable parts stabilize, while
  // heavy tails keep pushing the prefix mean up.
  const auto prefix_mean = [&](std::size_t m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += part[i];
    return s / static_cast<double>(m);
  };
  const double m1 = prefix_mean(n / 4), m2 = prefix_mean(n / 2), m3 = prefix_mean(n);
  return m1 > 0.0 && m2 > 1.5 * m1 && m3 > 1.5 * m2;
}

}  // namespace

QuasiFlag admissibility_report(std::span<const double> positive_integrals,
                               std::span<const double> negative_integrals) {
  const bool p = part_suspected_infinite(positive_integrals);
  const bool q = part_suspected_infinite(negative_integrals);
  if (p && q) return QuasiFlag::both_infinite_suspected;
  if (p) return QuasiFlag::positive_infinite;
  if (q) return QuasiFlag::negative_infinite;
  return QuasiFlag::ok;
}

}  // namespace hjbtk
