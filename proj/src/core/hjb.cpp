#include "hjb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "rng.hpp"

namespace hjbtk {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double apply_L0(const HJBCandidate& cand, const ControlledSDE& problem, double s,
                const HVec& x) {
  if (!cand.v || !cand.dv_ds || !cand.dv_dx)
    throw Error(errc::parameter, "apply_L0: candidate lacks v/dv_ds/dv_dx handles");
  if (!cand.d2v_dxx)
    throw Error(errc::capability, "apply_L0: candidate does not provide a second derivative");
  const std::size_t n = problem.dim();
  if (x.size() != n)
    throw Error(errc::dimension_mismatch, "apply_L0: state dimension mismatch");

  const HVec p = cand.dv_dx(s, x);
  const HVec ap = adjoint_apply(problem.A, p);
  double acc = cand.dv_ds(s, x) + inner(ap, x);

  const std::vector<double> hess = cand.d2v_dxx(s, x);
  if (hess.size() != n * n)
    throw Error(errc::dimension_mismatch, "apply_L0: second derivative has wrong size");
  std::vector<double> sig;
  problem.noise.sigma(s, x, sig);
  for (std::size_t j = 0; j < problem.noise.d; ++j) {
    const double* col = sig.data() + j * n;
    double quad = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double hrow = 0.0;
      for (std::size_t c = 0; c < n; ++c) hrow += hess[r * n + c] * col[c];
      quad += col[r] * hrow;
    }
    acc += 0.5 * problem.noise.q[j] * quad;
  }
  return acc;
}

ResidualStats classical_residual(const HJBCandidate& cand, const ControlledSDE& problem,
                                 const HamiltonianHandle& F,
                                 const std::function<double(const HVec&)>& g, double T,
                                 std::span<const ProbePoint> probes) {
  ResidualStats st;
  double ss = 0.0;
  for (const auto& pr : probes) {
    const HVec p = cand.dv_dx(pr.s, pr.x);
    const double fv = F(pr.s, pr.x, p);
    if (!std::isfinite(fv)) {
      ++st.probes_flagged;
      continue;
    }
    const double r = std::abs(apply_L0(cand, problem, pr.s, pr.x) + fv);
    st.max_abs = std::max(st.max_abs, r);
    ss += r * r;
    ++st.probes_used;
  }
  st.rms = st.probes_used ? std::sqrt(ss / static_cast<double>(st.probes_used)) : 0.0;
  for (const auto& pr : probes)
    st.terminal_max = std::max(st.terminal_max, std::abs(cand.v(T, pr.x) - g(pr.x)));
  return st;
}

std::vector<ProbePoint> sample_probes(std::size_t count, std::size_t dim, double T,
                                      double radius, std::uint64_t seed,
                                      std::uint64_t stream) {
  if (dim == 0) throw Error(errc::parameter, "sample_probes: dimension must be positive");
  CounterRng rng(seed, stream);
  std::vector<ProbePoint> probes(count);
  for (auto& pr : probes) {
    pr.s = T * rng.uniform();
    pr.x.resize(dim);
    double n2 = 0.0;
    for (auto& c : pr.x) {
      c = rng.normal();
      n2 += c * c;
    }
    const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
    const double scale = n2 > 0.0 ? r / std::sqrt(n2) : 0.0;
    for (auto& c : pr.x) c *= scale;
  }
  return probes;
}

ConvergenceReport check_strong_solution(const HJBCandidate& limit,
                                        std::span<const ApproxTriple> triples,
                                        const HamiltonianHandle& F,
                                        const std::function<double(const HVec&)>& g,
                                        std::size_t dim, double T,
                                        std::span<const CompactSpec> compacts,
                                        const ConvergenceThresholds& thresholds,
                                        std::uint64_t seed) {
  if (triples.size() < 3)
    throw Error(errc::parameter,
                "check_strong_solution: need at least three approximating triples");
  std::vector<const ApproxTriple*> order;
  order.reserve(triples.size());
  for (const auto& t : triples) order.push_back(&t);
  std::sort(order.begin(), order.end(),
            [](const ApproxTriple* a, const ApproxTriple* b) { return a->n < b->n; });

  ConvergenceReport report;
  report.pass = true;
  for (std::size_t ci = 0; ci < compacts.size(); ++ci) {
    const CompactSpec& compact = compacts[ci];
    // One probe mesh per compact, shared by every n so sup-errors compare.
    const auto probes =
        sample_probes(compact.mesh_points, dim, T, compact.radius, seed, stream_salt(7, ci));

    // Cache the limit data per probe; skip probes where F blows up.
    std::vector<double> lim_v(probes.size()), lim_f(probes.size()), lim_g(probes.size());
    std::vector<bool> ok(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const auto& pr = probes[i];
      const HVec p = limit.dv_dx(pr.s, pr.x);
      lim_f[i] = F(pr.s, pr.x, p);
      ok[i] = std::isfinite(lim_f[i]);
      lim_v[i] = limit.v(pr.s, pr.x);
      lim_g[i] = g(pr.x);
    }

    CompactReport cr;
    cr.compact = compact;
    for (const ApproxTriple* tp : order) {
      ConvergenceEntry e;
      e.n = tp->n;
      for (std::size_t i = 0; i < probes.size(); ++i) {
        if (!ok[i]) continue;
        const auto& pr = probes[i];
        e.sup_v = std::max(e.sup_v, std::abs(tp->v_n.v(pr.s, pr.x) - lim_v[i]));
        e.sup_h = std::max(e.sup_h, std::abs(tp->h_n(pr.s, pr.x) + lim_f[i]));
        e.sup_g = std::max(e.sup_g, std::abs(tp->g_n(pr.x) - lim_g[i]));
      }
      cr.entries.push_back(e);
    }

    const ConvergenceEntry& last = cr.entries.back();
    cr.final_below_threshold =
        last.sup_v <= thresholds.v && last.sup_h <= thresholds.h && last.sup_g <= thresholds.g;
    cr.no_backslide = true;
    cr.strictly_decreasing = true;
    for (std::size_t k = 1; k < cr.entries.size(); ++k) {
      const auto& prev = cr.entries[k - 1];
      const auto& cur = cr.entries[k];
      if (cur.sup_v > 1.10 * prev.sup_v || cur.sup_h > 1.10 * prev.sup_h ||
          cur.sup_g > 1.10 * prev.sup_g)
        cr.no_backslide = false;
      if (!(cur.sup_v < prev.sup_v && cur.sup_h < prev.sup_h && cur.sup_g < prev.sup_g))
        cr.strictly_decreasing = false;
    }
    report.pass = report.pass && cr.final_below_threshold && cr.no_backslide;
    report.compacts.push_back(std::move(cr));
  }
  return report;
}

ResidualPath decomposition_residual(const HJBCandidate& cand, const ControlledSDE& problem,
                                    const HamiltonianHandle& F, const Trajectory& traj) {
  const std::size_t n = problem.dim();
  const std::size_t M = traj.grid.steps;
  const double h = traj.grid.dt();

  ResidualPath out;
  out.t.resize(M + 1);
  out.residual.resize(M + 1);
  out.t[0] = traj.grid.node(0);
  out.residual[0] = 0.0;  // both sides are identically zero at t = s

  const double v0 = cand.v(traj.grid.node(0), traj.states[0]);
  double sum_f = 0.0, sum_b = 0.0, sum_w = 0.0;
  HVec b(n), scratch(n);
  std::vector<double> sig;
  for (std::size_t i = 0; i < M; ++i) {
    const double t = traj.grid.node(i);
    const HVec& x = traj.states[i];
    const HVec p = cand.dv_dx(t, x);
    const double fv = F(t, x, p);
    if (!std::isfinite(fv))
      throw IdentityInapplicableError(
          t, "decomposition: Hamiltonian non-finite along the trajectory at t = " +
                 std::to_string(t));
    sum_f += fv * h;
    problem.drift(t, x, traj.controls[i], b, scratch);
    sum_b += inner(p, b) * h;
    problem.noise.sigma(t, x, sig);
    for (std::size_t j = 0; j < problem.noise.d; ++j) {
      double pd = 0.0;
      for (std::size_t k = 0; k < n; ++k) pd += p[k] * sig[j * n + k];
      sum_w += pd * traj.wiener.increment(i, j);
    }
    const double tk = traj.grid.node(i + 1);
    out.t[i + 1] = tk;
    out.residual[i + 1] =
        (cand.v(tk, traj.states[i + 1]) - v0) - (-sum_f + sum_b + sum_w);
  }
  out.terminal_abs = std::abs(out.residual.back());
  return out;
}

GapReport verification_gap(const ControlledSDE& problem, const CostSpec& cost,
                           const HJBCandidate& cand, const HamiltonianHandle& F,
                           const Policy& policy, double s, const HVec& x0,
                           const TimeGrid& grid, const McConfig& mc) {
  grid.validate();
  if (grid.s != s)
    throw Error(errc::parameter, "verification_gap: grid must start at the initial time s");
  if (mc.replicas < 2)
    throw Error(errc::parameter, "verification_gap: need at least two replicas");

  const std::size_t R = mc.replicas;
  const double h = grid.dt();
  const double v0 = cand.v(s, x0);
  std::vector<double> lhs(R), rhs(R), minjump(R, kInf);

  parallel_for_indexed(R, mc.threads, [&](std::size_t r) {
    const WienerPath w = sample_wiener(problem.noise, grid, mc.seed, r);
    const Trajectory traj = simulate_mild(problem, policy, x0, grid, w);
    double cost_acc = 0.0, gap_acc = 0.0, mg = kInf;
    HVec b(problem.dim()), scratch(problem.dim());
    for (std::size_t i = 0; i < grid.steps; ++i) {
      const double t = grid.node(i);
      const HVec& x = traj.states[i];
      const double a = traj.controls[i];
      const double li = cost.l(t, x, a);
      cost_acc += li * h;
      const HVec p = cand.dv_dx(t, x);
      const double fv = F(t, x, p);
      if (!std::isfinite(fv))
        throw IdentityInapplicableError(
            t, "verification: Hamiltonian non-finite along replica " + std::to_string(r) +
                   " at t = " + std::to_string(t));
      problem.drift(t, x, a, b, scratch);
      const double fcv = inner(p, b) + li;
      const double gap = fcv - fv;
      mg = std::min(mg, gap);
      gap_acc += gap * h;
    }
    cost_acc += cost.g(traj.states.back());
    lhs[r] = cost_acc - v0;
    rhs[r] = gap_acc;
    minjump[r] = mg;
  });

  GapReport rep;
  rep.replicas = R;
  rep.min_pointwise_gap = kInf;
  double sl = 0.0, sr = 0.0, sd = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    sl += lhs[r];
    sr += rhs[r];
    sd += lhs[r] - rhs[r];
    rep.min_pointwise_gap = std::min(rep.min_pointwise_gap, minjump[r]);
  }
  const double n = static_cast<double>(R);
  rep.lhs_mean = sl / n;
  rep.rhs_mean = sr / n;
  rep.diff_mean = sd / n;
  double vl = 0.0, vr = 0.0, vd = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    vl += (lhs[r] - rep.lhs_mean) * (lhs[r] - rep.lhs_mean);
    vr += (rhs[r] - rep.rhs_mean) * (rhs[r] - rep.rhs_mean);
    const double d = (lhs[r] - rhs[r]) - rep.diff_mean;
    vd += d * d;
  }
  rep.lhs_std_error = std::sqrt(vl / (n - 1.0) / n);
  rep.rhs_std_error = std::sqrt(vr / (n - 1.0) / n);
  rep.diff_std_error = std::sqrt(vd / (n - 1.0) / n);
  return rep;
}

double gradient_check(const HJBCandidate& cand, std::span<const ProbePoint> probes,
                      const KinkSet& kinks, double fd_step) {
  double worst = 0.0;
  for (const auto& pr : probes) {
    if (kinks.excludes(pr.s, pr.x)) continue;
    const HVec an = cand.dv_dx(pr.s, pr.x);
    HVec fd(an.size());
    HVec xp = pr.x, xm = pr.x;
    for (std::size_t k = 0; k < an.size(); ++k) {
      xp[k] = pr.x[k] + fd_step;
      xm[k] = pr.x[k] - fd_step;
      fd[k] = (cand.v(pr.s, xp) - cand.v(pr.s, xm)) / (2.0 * fd_step);
      xp[k] = pr.x[k];
      xm[k] = pr.x[k];
    }
    HVec diff = an;
    axpy(-1.0, fd, diff);
    worst = std::max(worst, norm(diff) / std::max(norm(fd), 1.0));
  }
  return worst;
}

double growth_check(const HJBCandidate& cand, std::span<const ProbePoint> probes) {
  double worst = 0.0;
  for (const auto& pr : probes) {
    const double bound =
        cand.growth_M * (1.0 + std::pow(norm(pr.x), static_cast<double>(cand.growth_m)));
    worst = std::max(worst, norm(cand.dv_dx(pr.s, pr.x)) / bound);
  }
  return worst;
}

std::vector<ModulusEntry> gradient_graph_modulus(const HJBCandidate& cand,
                                                 const SpectralOperator& a, double T,
                                                 double radius,
                                                 std::span<const double> scales,
                                                 std::size_t pairs_per_scale,
                                                 std::uint64_t seed) {
  std::vector<ModulusEntry> report;
  CounterRng rng(seed, stream_salt(11, 0));
  const std::size_t n = a.dim();
  for (double scale : scales) {
    ModulusEntry entry;
    entry.scale = scale;
    for (std::size_t i = 0; i < pairs_per_scale; ++i) {
      ProbePoint base;
      base.s = T * rng.uniform();
      base.x.resize(n);
      double n2 = 0.0;
      for (auto& c : base.x) {
        c = rng.normal();
        n2 += c * c;
      }
      const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
      const double sc = n2 > 0.0 ? r / std::sqrt(n2) : 0.0;
      for (auto& c : base.x) c *= sc;

      // Perturbation of size <= scale in (s,x) jointly.
      double ds = rng.normal();
      HVec dx(n);
      double p2 = ds * ds;
      for (auto& c : dx) {
        c = rng.normal();
        p2 += c * c;
      }
      const double pr = scale * rng.uniform() / std::sqrt(p2 > 0.0 ? p2 : 1.0);
      double s2 = std::clamp(base.s + ds * pr, 0.0, T);
      HVec x2 = base.x;
      for (std::size_t k = 0; k < n; ++k) x2[k] += dx[k] * pr;

      HVec g1 = cand.dv_dx(base.s, base.x);
      const HVec g2 = cand.dv_dx(s2, x2);
      axpy(-1.0, g2, g1);
      entry.max_graph_dist =
          std::max(entry.max_graph_dist, graph_normed(a, std::move(g1)).graph_norm);
    }
    report.push_back(entry);
  }
  return report;
}

std::vector<UcpEntry> ucp_drift_pairing(const HJBCandidate& limit,
                                        std::span<const ApproxTriple> triples,
                                        const ControlledSDE& problem, const Policy& policy,
                                        const HVec& x0, const TimeGrid& grid,
                                        std::size_t paths, std::uint64_t seed) {
  std::vector<UcpEntry> report;
  for (const auto& t : triples) report.push_back({t.n, 0.0});
  const double h = grid.dt();
  HVec b(problem.dim()), scratch(problem.dim());
  for (std::size_t r = 0; r < paths; ++r) {
    const WienerPath w = sample_wiener(problem.noise, grid, seed, stream_salt(13, r));
    const Trajectory traj = simulate_mild(problem, policy, x0, grid, w);
    for (std::size_t ti = 0; ti < triples.size(); ++ti) {
      double running = 0.0, sup = 0.0;
      for (std::size_t i = 0; i < grid.steps; ++i) {
        const double t = grid.node(i);
        const HVec& x = traj.states[i];
        HVec dp = triples[ti].v_n.dv_dx(t, x);
        axpy(-1.0, limit.dv_dx(t, x), dp);
        problem.drift(t, x, traj.controls[i], b, scratch);
        running += inner(dp, b) * h;
        sup = std::max(sup, std::abs(running));
      }
      report[ti].mean_sup += sup / static_cast<double>(paths);
    }
  }
  return report;
}

}  // namespace hjbtk
