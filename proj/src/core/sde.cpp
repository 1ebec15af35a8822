#include "sde.hpp"

#include <cmath>
#include <utility>

#include "rng.hpp"

namespace hjbtk {

void TimeGrid::validate() const {
  if (!(s < T)) throw Error(errc::parameter, "time grid: need s < T");
  if (steps == 0) throw Error(errc::parameter, "time grid: need at least one step");
  if (!std::isfinite(s) || !std::isfinite(T))
    throw Error(errc::parameter, "time grid: endpoints must be finite");
}

void NoiseModel::validate(std::size_t state_dim) const {
  if (d == 0) throw Error(errc::parameter, "noise model: need d >= 1");
  if (q.size() != d)
    throw Error(errc::dimension_mismatch, "noise model: q must have one weight per direction");
  for (double qj : q)
    if (!(qj > 0.0)) throw Error(errc::parameter, "noise model: covariance weights must be positive");
  (void)state_dim;
}

void ControlledSDE::validate() const {
  if (A.dim() == 0) throw Error(errc::parameter, "problem: state dimension must be positive");
  noise.validate(A.dim());
  if (control_set.bounded && !(control_set.lo <= control_set.hi))
    throw Error(errc::parameter, "problem: control interval is empty");
}

WienerPath sample_wiener(const NoiseModel& noise, const TimeGrid& grid,
                         std::uint64_t master_seed, std::uint64_t stream) {
  grid.validate();
  noise.validate(0);
  WienerPath path;
  path.grid = grid;
  path.d = noise.d;
  path.master_seed = master_seed;
  path.stream = stream;
  path.increments.resize(grid.steps * noise.d);
  const double h = grid.dt();
  std::vector<double> scale(noise.d);
  for (std::size_t j = 0; j < noise.d; ++j) scale[j] = std::sqrt(noise.q[j] * h);
  CounterRng rng(master_seed, stream);
  for (std::size_t i = 0; i < grid.steps; ++i)
    for (std::size_t j = 0; j < noise.d; ++j)
      path.increments[i * noise.d + j] = scale[j] * rng.normal();
  return path;
}

WienerPath coarsen(const WienerPath& fine, std::size_t factor) {
  if (factor == 0 || fine.grid.steps % factor != 0)
    throw Error(errc::parameter, "coarsen: factor must divide the step count");
  WienerPath out;
  out.grid = fine.grid;
  out.grid.steps = fine.grid.steps / factor;
  out.d = fine.d;
  out.master_seed = fine.master_seed;
  out.stream = fine.stream;
  out.increments.assign(out.grid.steps * fine.d, 0.0);
  for (std::size_t i = 0; i < fine.grid.steps; ++i)
    for (std::size_t j = 0; j < fine.d; ++j)
      out.increments[(i / factor) * fine.d + j] += fine.increment(i, j);
  return out;
}

double WienerHistory::increment(std::size_t i, std::size_t j) const {
  if (path == nullptr || i >= steps_available)
    throw Error(errc::domain, "wiener history: increment not yet observable");
  return path->increment(i, j);
}

double Policy::evaluate(double t, const HVec& x, const WienerHistory& w) const {
  if (kind == Kind::feedback) {
    if (!feedback) throw Error(errc::parameter, "policy: feedback handle missing");
    return feedback(t, x);
  }
  if (!open_loop) throw Error(errc::parameter, "policy: open-loop handle missing");
  return open_loop(t, w);
}

void ControlledSDE::drift(double t, const HVec& x, double a, HVec& out, HVec& scratch) const {
  out.assign(dim(), 0.0);
  if (b_g) {
    b_g(t, x, a, scratch);
    axpy(1.0, scratch, out);
  }
  if (b_i) {
    b_i(t, x, a, scratch);
    axpy(1.0, scratch, out);
  }
}

Trajectory simulate_mild(const ControlledSDE& problem, const Policy& policy,
                         const HVec& x0, const TimeGrid& grid,
                         const WienerPath& path) {
  problem.validate();
  grid.validate();
  const std::size_t n = problem.dim();
  if (x0.size() != n)
    throw Error(errc::dimension_mismatch, "simulate_mild: initial state has wrong dimension");
  if (path.grid.steps != grid.steps || path.d != problem.noise.d)
    throw Error(errc::dimension_mismatch, "simulate_mild: wiener path does not match grid/noise");

  const double h = grid.dt();
  std::vector<double> decay(n);
  for (std::size_t k = 0; k < n; ++k) decay[k] = std::exp(problem.A.eigenvalues[k] * h);

  Trajectory traj;
  traj.grid = grid;
  traj.wiener = path;
  traj.states.reserve(grid.steps + 1);
  traj.controls.resize(grid.steps);
  traj.states.push_back(x0);

  HVec x = x0, b(n), scratch(n), next(n);
  std::vector<double> sig;
  for (std::size_t i = 0; i < grid.steps; ++i) {
    const double t = grid.node(i);
    const WienerHistory hist{&path, i};
    const double a = policy.evaluate(t, x, hist);
    if (!std::isfinite(a) || !problem.control_set.contains(a))
      throw PolicyRangeError(i, "policy produced a control outside the control set at step " +
                                    std::to_string(i));
    traj.controls[i] = a;

    problem.drift(t, x, a, b, scratch);
    problem.noise.sigma(t, x, sig);
    if (sig.size() != n * problem.noise.d)
      throw Error(errc::dimension_mismatch, "simulate_mild: sigma handle returned wrong size");

    for (std::size_t k = 0; k < n; ++k) {
      double incr = x[k] + h * b[k];
      for (std::size_t j = 0; j < problem.noise.d; ++j)
        incr += sig[j * n + k] * path.increment(i, j);
      next[k] = decay[k] * incr;
    }

    double nrm2 = 0.0;
    for (double v : next) nrm2 += v * v;
    if (!std::isfinite(nrm2) || nrm2 > kDivergenceBound * kDivergenceBound)
      throw DivergedError(i, "state diverged at step " + std::to_string(i) +
                                 " (|X| exceeded " + std::to_string(kDivergenceBound) + ")");

    x = next;
    traj.states.push_back(x);
  }
  return traj;
}

namespace {

double sigma_hs_norm(const NoiseModel& noise, const std::vector<double>& mat, std::size_t n) {
  // L2(U_0,H) norm: columns weighted by sqrt(q_j).
  double s = 0.0;
  for (std::size_t j = 0; j < noise.d; ++j) {
    double col = 0.0;
    for (std::size_t k = 0; k < n; ++k) col += mat[j * n + k] * mat[j * n + k];
    s += noise.q[j] * col;
  }
  return std::sqrt(s);
}

}  // namespace

HypothesisReport probe_coefficient_hypotheses(const ControlledSDE& problem,
                                              std::span<const CoefficientProbe> probes,
                                              double bound) {
  problem.validate();
  const std::size_t n = problem.dim();
  HypothesisReport rep;
  rep.bound = bound;
  HVec bx(n), by(n), scratch(n), diff(n);
  std::vector<double> sx, sy;
  for (const auto& p : probes) {
    problem.drift(p.t, p.x, p.a, bx, scratch);
    problem.noise.sigma(p.t, p.x, sx);
    const double nx = norm(p.x);
    rep.b_growth = std::max(rep.b_growth, norm(bx) / (1.0 + nx));
    rep.sigma_growth = std::max(rep.sigma_growth, sigma_hs_norm(problem.noise, sx, n) / (1.0 + nx));
    if (p.y.size() == n) {
      diff = p.x;
      axpy(-1.0, p.y, diff);
      const double sep = norm(diff);
      if (sep > 0.0) {
        problem.drift(p.t, p.y, p.a, by, scratch);
        problem.noise.sigma(p.t, p.y, sy);
        axpy(-1.0, by, bx);
        rep.b_lipschitz = std::max(rep.b_lipschitz, norm(bx) / sep);
        for (std::size_t i = 0; i < sx.size(); ++i) sx[i] -= sy[i];
        rep.sigma_lipschitz =
            std::max(rep.sigma_lipschitz, sigma_hs_norm(problem.noise, sx, n) / sep);
      }
    }
  }
  rep.violated = rep.b_lipschitz > bound || rep.b_growth > bound ||
                 rep.sigma_lipschitz > bound || rep.sigma_growth > bound;
  return rep;
}

}  // namespace hjbtk
