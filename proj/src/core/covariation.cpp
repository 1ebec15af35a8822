#include "covariation.hpp"

#include <algorithm>
#include <cmath>

namespace hjbtk {

namespace {

std::size_t eps_to_steps(const TimeGrid& grid, double eps) {
  const double h = grid.dt();
  const double ratio = eps / h;
  const auto m = static_cast<std::size_t>(std::llround(ratio));
  if (m < 1 || std::abs(static_cast<double>(m) - ratio) > 1e-9 * std::max(1.0, ratio))
    throw Error(errc::parameter,
                "epsilon_covariation: eps must be a positive integer multiple of the grid step");
  return m;
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b) {
  if (a.s != b.s || a.T != b.T || a.steps != b.steps)
    throw Error(errc::dimension_mismatch, "epsilon_covariation: paths live on different grids");
}

// Core recursion on the paired scalar series <u,X(t_i)>, <w,Y(t_i)>.
ScalarPath regularized(const TimeGrid& grid, const std::vector<double>& sx,
                       const std::vector<double>& sy, double eps) {
  const std::size_t m = eps_to_steps(grid, eps);
  const std::size_t M = grid.steps;
  const double scale = grid.dt() / eps;
  ScalarPath out;
  out.grid = grid;
  out.values.resize(M + 1);
  out.values[0] = 0.0;
  for (std::size_t k = 1; k <= M; ++k) {
    const std::size_t i = k - 1;
    const std::size_t fwd = std::min(i + m, M);  // constant extension past T
    const double dx = sx[fwd] - sx[i];
    const double dy = sy[fwd] - sy[i];
    out.values[k] = out.values[k - 1] + dx * dy * scale;
  }
  return out;
}

}  // namespace

ScalarPath epsilon_covariation(const VecPath& x, const VecPath& y,
                               const ChiFunctional& phi, double eps) {
  require_same_grid(x.grid, y.grid);
  const std::size_t M = x.grid.steps;
  if (x.values.size() != M + 1 || y.values.size() != M + 1)
    throw Error(errc::dimension_mismatch, "epsilon_covariation: path length does not match grid");
  std::vector<double> sx(M + 1), sy(M + 1);
  for (std::size_t i = 0; i <= M; ++i) {
    sx[i] = inner(phi.u, x.values[i]);
    sy[i] = inner(phi.w, y.values[i]);
  }
  return regularized(x.grid, sx, sy, eps);
}

ScalarPath epsilon_covariation(const ScalarPath& x, const ScalarPath& y, double eps) {
  require_same_grid(x.grid, y.grid);
  if (x.values.size() != x.grid.steps + 1 || y.values.size() != y.grid.steps + 1)
    throw Error(errc::dimension_mismatch, "epsilon_covariation: path length does not match grid");
  return regularized(x.grid, x.values, y.values, eps);
}

CovariationEstimate covariation_scan(const PathPairGenerator& gen, const ChiFunctional& phi,
                                     std::span<const double> epsilons, std::size_t replicas) {
  if (epsilons.empty()) throw Error(errc::parameter, "covariation_scan: no epsilons given");
  if (replicas < 2) throw Error(errc::parameter, "covariation_scan: need at least two replicas");

  const std::size_t E = epsilons.size();
  const std::size_t finest =
      std::min_element(epsilons.begin(), epsilons.end()) - epsilons.begin();

  CovariationEstimate est;
  est.epsilons.assign(epsilons.begin(), epsilons.end());
  std::vector<std::vector<double>> terminals(E);
  std::vector<double> supdev(E, 0.0);

  for (std::size_t r = 0; r < replicas; ++r) {
    const auto [x, y] = gen(r);
    std::vector<ScalarPath> paths(E);
    for (std::size_t e = 0; e < E; ++e) {
      paths[e] = epsilon_covariation(x, y, phi, epsilons[e]);
      terminals[e].push_back(paths[e].values.back());
    }
    for (std::size_t e = 0; e < E; ++e) {
      double sup = 0.0;
      for (std::size_t k = 0; k < paths[e].values.size(); ++k)
        sup = std::max(sup, std::abs(paths[e].values[k] - paths[finest].values[k]));
      supdev[e] += sup / static_cast<double>(replicas);
    }
    if (r == 0) est.replica0_paths = std::move(paths);
  }

  for (std::size_t e = 0; e < E; ++e) {
    double mean = 0.0;
    for (double v : terminals[e]) mean += v;
    mean /= static_cast<double>(replicas);
    double ss = 0.0;
    for (double v : terminals[e]) ss += (v - mean) * (v - mean);
    est.terminal_mean.push_back(mean);
    est.terminal_spread.push_back(std::sqrt(ss / static_cast<double>(replicas - 1)));
    est.sup_dev_from_finest.push_back(supdev[e]);
  }
  return est;
}

OrthogonalityReport orthogonality_test(std::span<const ScalarPath> a_family,
                                       std::span<const ScalarPath> n_family,
                                       std::span<const double> epsilons, double threshold) {
  if (a_family.size() != n_family.size() || a_family.size() < 2)
    throw Error(errc::parameter, "orthogonality_test: need matched families with >= 2 replicas");
  if (epsilons.empty()) throw Error(errc::parameter, "orthogonality_test: no epsilons given");

  const std::size_t R = a_family.size();
  OrthogonalityReport rep;
  rep.epsilons.assign(epsilons.begin(), epsilons.end());
  for (double eps : epsilons) {
    double mean = 0.0;
    std::vector<double> terms(R);
    for (std::size_t r = 0; r < R; ++r) {
      terms[r] = epsilon_covariation(a_family[r], n_family[r], eps).values.back();
      mean += terms[r];
    }
    mean /= static_cast<double>(R);
    double ss = 0.0;
    for (double v : terms) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(R - 1));
    rep.means.push_back(mean);
    rep.spreads.push_back(sd);
    rep.std_errors.push_back(sd / std::sqrt(static_cast<double>(R)));
  }

  // Largest-to-smallest epsilon order for the trend check.
  std::vector<std::size_t> order(epsilons.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return epsilons[a] > epsilons[b]; });
  const std::size_t finest = order.back();

  rep.threshold = threshold > 0.0 ? threshold : 3.0 * rep.std_errors[finest];
  rep.mean_within_band = std::abs(rep.means[finest]) <= rep.threshold;
  rep.trend_nonincreasing = true;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const double prev = std::abs(rep.means[order[k - 1]]);
    const double cur = std::abs(rep.means[order[k]]);
    const double slack =
        3.0 * std::hypot(rep.std_errors[order[k - 1]], rep.std_errors[order[k]]);
    if (cur > prev + slack) rep.trend_nonincreasing = false;
  }
  rep.pass = rep.mean_within_band && rep.trend_nonincreasing;
  return rep;
}

std::pair<ScalarPath, ScalarPath> weak_dirichlet_split(const HJBCandidate& cand,
                                                       const ControlledSDE& problem,
                                                       const Trajectory& traj) {
  const std::size_t n = problem.dim();
  const std::size_t M = traj.grid.steps;
  ScalarPath mart, ortho;
  mart.grid = ortho.grid = traj.grid;
  mart.values.resize(M + 1);
  ortho.values.resize(M + 1);
  mart.values[0] = cand.v(traj.grid.node(0), traj.states[0]);
  ortho.values[0] = 0.0;
  std::vector<double> sig;
  for (std::size_t i = 0; i < M; ++i) {
    const double t = traj.grid.node(i);
    const HVec& x = traj.states[i];
    const HVec p = cand.dv_dx(t, x);
    problem.noise.sigma(t, x, sig);
    double dm = 0.0;
    for (std::size_t j = 0; j < problem.noise.d; ++j) {
      double pd = 0.0;
      for (std::size_t k = 0; k < n; ++k) pd += p[k] * sig[j * n + k];
      dm += pd * traj.wiener.increment(i, j);
    }
    mart.values[i + 1] = mart.values[i] + dm;
    ortho.values[i + 1] =
        cand.v(traj.grid.node(i + 1), traj.states[i + 1]) - mart.values[i + 1];
  }
  return {std::move(mart), std::move(ortho)};
}

}  // namespace hjbtk
