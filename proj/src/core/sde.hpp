#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "spectral.hpp"

namespace hjbtk {

// Uniform grid s = t_0 < ... < t_M = T.
struct TimeGrid {
  double s = 0.0;
  double T = 1.0;
  std::size_t steps = 1;

  double dt() const { return (T - s) / static_cast<double>(steps); }
  double node(std::size_t i) const { return s + static_cast<double>(i) * dt(); }
  void validate() const;
};

// Q-Wiener noise in the eigen-coordinates: d independent scalar Brownian
// directions with covariance weights q_j > 0, pushed into the state space by
// the dispersion field sigma(t,x), an N x d matrix (column-major in `out`).
struct NoiseModel {
  std::size_t d = 1;
  std::vector<double> q;
  std::function<void(double t, const HVec& x, std::vector<double>& out)> sigma;

  void validate(std::size_t state_dim) const;
};

// Sampled increments of the Q-Wiener coordinates: entry (i,j) ~ N(0, q_j h),
// i.e. the Q^{1/2} scaling is already absorbed into the increments. The
// (master seed, stream) pair that produced the path is kept so downstream
// estimators can reuse the exact same randomness.
struct WienerPath {
  TimeGrid grid;
  std::size_t d = 1;
  std::vector<double> increments;  // steps * d, row-major over (step, direction)
  std::uint64_t master_seed = 0;
  std::uint64_t stream = 0;

  double increment(std::size_t i, std::size_t j) const {
    return increments[i * d + j];
  }
};

WienerPath sample_wiener(const NoiseModel& noise, const TimeGrid& grid,
                         std::uint64_t master_seed, std::uint64_t stream = 0);

// Sum consecutive groups of `factor` increments: the same Brownian path seen
// on a grid coarsened by that factor. Used by step-size refinement studies so
// all resolutions share one driving path.
WienerPath coarsen(const WienerPath& fine, std::size_t factor);

// Control set descriptor: a closed interval or all of R.
struct ControlSet {
  bool bounded = false;
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double a) const { return !bounded || (a >= lo && a <= hi); }
};

// History visible to an open-loop control at step i: increments strictly
// before t_i (adaptedness by construction).
struct WienerHistory {
  const WienerPath* path = nullptr;
  std::size_t steps_available = 0;

  double increment(std::size_t i, std::size_t j) const;
};

// A control policy: either state feedback a(t,x) or open-loop a(t, W-history).
struct Policy {
  enum class Kind { feedback, open_loop };

  Kind kind = Kind::feedback;
  std::function<double(double t, const HVec& x)> feedback;
  std::function<double(double t, const WienerHistory& w)> open_loop;
  std::string label;

  double evaluate(double t, const HVec& x, const WienerHistory& w) const;
};

using DriftFn = std::function<void(double t, const HVec& x, double a, HVec& out)>;

// State equation dX = (A X + b_g(t,X) + b_i(t,X,a)) dt + sigma(t,X) dW_Q on
// the truncated space. Null drift handles mean zero.
struct ControlledSDE {
  SpectralOperator A;
  DriftFn b_g;  // control-independent part (a is ignored)
  DriftFn b_i;  // control-dependent part
  NoiseModel noise;
  ControlSet control_set;

  std::size_t dim() const { return A.dim(); }
  // out = b_g + b_i at (t,x,a); scratch must be a distinct buffer of size N.
  void drift(double t, const HVec& x, double a, HVec& out, HVec& scratch) const;
  void validate() const;
};

struct Trajectory {
  TimeGrid grid;
  std::vector<HVec> states;      // steps + 1 nodes
  std::vector<double> controls;  // steps (left endpoints)
  WienerPath wiener;
};

// States with norm beyond this are treated as numerically divergent.
constexpr double kDivergenceBound = 1e12;

// Exponential Euler for the mild formulation:
//   X_{i+1} = e^{hA} (X_i + h b(t_i, X_i, a_i) + sigma(t_i, X_i) dW_i),
// controls evaluated at the left endpoint. Throws PolicyRangeError if a
// control leaves the control set and DivergedError (with the step index) if
// the state leaves the sane region.
Trajectory simulate_mild(const ControlledSDE& problem, const Policy& policy,
                         const HVec& x0, const TimeGrid& grid,
                         const WienerPath& path);

// A point at which the standing Lipschitz/growth hypotheses are sampled.
struct CoefficientProbe {
  double t = 0.0;
  HVec x;
  HVec y;
  double a = 0.0;
};

struct HypothesisReport {
  double b_lipschitz = 0.0;      // max |b(t,x,a)-b(t,y,a)| / |x-y|
  double b_growth = 0.0;         // max |b(t,x,a)| / (1+|x|)
  double sigma_lipschitz = 0.0;  // same ratios in the L2(U_0,H) norm
  double sigma_growth = 0.0;
  double bound = 0.0;
  bool violated = false;
};

// Finite sample check of the linear-growth/Lipschitz hypotheses; flags (never
// throws) when a sampled ratio exceeds the declared bound.
HypothesisReport probe_coefficient_hypotheses(const ControlledSDE& problem,
                                              std::span<const CoefficientProbe> probes,
                                              double bound);

}  // namespace hjbtk
