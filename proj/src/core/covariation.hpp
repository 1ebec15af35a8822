#pragma once

#include <span>
#include <vector>

#include "hjb.hpp"
#include "sde.hpp"

namespace hjbtk {

// Scalar process sampled on a grid (steps + 1 values).
struct ScalarPath {
  TimeGrid grid;
  std::vector<double> values;
};

// Vector process sampled on a grid.
struct VecPath {
  TimeGrid grid;
  std::vector<HVec> values;
};

// Rank-one test functional u (x) w: the regularized covariation is evaluated
// against phi = u tensor w.
struct ChiFunctional {
  HVec u;
  HVec w;
};

// Epsilon-regularized covariation along one path pair:
//   C_eps(t_k) = sum_{t_i < t_k} <u, X(t_i+eps)-X(t_i)> <w, Y(t_i+eps)-Y(t_i)> h/eps,
// with both paths extended constantly past T. eps must be an integer multiple
// of the grid step.
ScalarPath epsilon_covariation(const VecPath& x, const VecPath& y,
                               const ChiFunctional& phi, double eps);

// Scalar convenience overload (u = w = 1).
ScalarPath epsilon_covariation(const ScalarPath& x, const ScalarPath& y, double eps);

struct CovariationEstimate {
  std::vector<double> epsilons;
  // Terminal-value statistics across replicas, one entry per epsilon.
  std::vector<double> terminal_mean;
  std::vector<double> terminal_spread;  // sample standard deviation
  // Mean over replicas of sup_t |C_eps(t) - C_eps_finest(t)|: a ucp-style
  // closeness diagnostic against the finest epsilon.
  std::vector<double> sup_dev_from_finest;
  // The full regularized paths of replica 0, one per epsilon (for plots).
  std::vector<ScalarPath> replica0_paths;
};

using PathPairGenerator = std::function<std::pair<VecPath, VecPath>(std::uint64_t replica)>;

// Runs epsilon_covariation for every epsilon and replica; replica paths come
// from the generator (which should derive them deterministically from the
// replica index).
CovariationEstimate covariation_scan(const PathPairGenerator& gen, const ChiFunctional& phi,
                                     std::span<const double> epsilons, std::size_t replicas);

struct OrthogonalityReport {
  std::vector<double> epsilons;
  std::vector<double> means;       // terminal covariation mean per epsilon
  std::vector<double> spreads;     // sample sd per epsilon
  std::vector<double> std_errors;  // spread / sqrt(replicas)
  double threshold = 0.0;          // the band actually used at the finest epsilon
  bool mean_within_band = false;
  bool trend_nonincreasing = false;  // |mean| does not grow as eps shrinks (with stderr slack)
  bool pass = false;
};

// Tests the martingale-orthogonality surrogate: the terminal regularized
// covariation of A against N should be statistically zero, tightening as
// eps decreases. threshold <= 0 means "3 standard errors at the finest eps".
OrthogonalityReport orthogonality_test(std::span<const ScalarPath> a_family,
                                       std::span<const ScalarPath> n_family,
                                       std::span<const double> epsilons, double threshold);

// Splits the observed value process v(t, X(t)) into the discrete martingale
// part R(t_k) = v(s,X_0) + sum_{i<k} <dv_dx(t_i,X_i), sigma(t_i,X_i) dW_i>
// and the remainder A = v(t,X(t)) - R (the weak-Dirichlet orthogonal part,
// A(s) = 0 by construction).
std::pair<ScalarPath, ScalarPath> weak_dirichlet_split(const HJBCandidate& cand,
                                                       const ControlledSDE& problem,
                                                       const Trajectory& traj);

}  // namespace hjbtk
