#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sde.hpp"

namespace hjbtk {

// Running + terminal cost. Handles may return +/-inf; infinities propagate
// through the estimators as extended reals.
struct CostSpec {
  std::function<double(double t, const HVec& x, double a)> l;
  std::function<double(const HVec& x)> g;
};

// Finite-sample integrability diagnosis of the positive/negative cost parts.
enum class QuasiFlag {
  ok,
  positive_infinite,
  negative_infinite,
  both_infinite_suspected,
};

const char* to_string(QuasiFlag f);

struct CostEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t replicas = 0;
  double positive_part_mean = 0.0;
  double negative_part_mean = 0.0;
  QuasiFlag flag = QuasiFlag::ok;
};

struct McConfig {
  std::size_t replicas = 100;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware
};

Policy constant_policy(double a, std::string label = "");
Policy synthesize_feedback(std::function<double(double, const HVec&)> argmin,
                           std::string label);

// Monte Carlo estimate of J(s, x0; policy) over the grid (left-endpoint
// running cost plus terminal cost). Replica r always draws Wiener substream
// (mc.seed, r), so policies evaluated with the same mc share randomness
// (common random numbers).
CostEstimate evaluate_cost(const ControlledSDE& problem, const CostSpec& cost,
                           const Policy& policy, double s, const HVec& x0,
                           const TimeGrid& grid, const McConfig& mc);

// F_CV(s,x,p,a) = <p, b(s,x,a)> + l(s,x,a).
double current_value_hamiltonian(const CostSpec& cost, const ControlledSDE& problem,
                                 double s, const HVec& x, const HVec& p, double a);

// Numeric inner minimization: coarse grid scan (ties resolved toward the
// smallest control) refined by golden-section around the best interior point.
// If the minimum sits on a window edge with the values still decreasing
// outward, the infimum is reported as -inf.
struct GridScan {
  std::optional<std::pair<double, double>> window;  // defaults to the control set
  std::size_t points = 401;
  std::size_t golden_iters = 60;
};

// Hamiltonian evaluation strategy: a closed-form handle (s,x,p) -> F wins if
// present; otherwise the grid scan runs. Scanning an unbounded control set
// without an explicit window is a configuration error.
struct HamiltonianMethod {
  std::function<double(double s, const HVec& x, const HVec& p)> closed_form;
  GridScan scan;
};

double hamiltonian(const CostSpec& cost, const ControlledSDE& problem, double s,
                   const HVec& x, const HVec& p, const HamiltonianMethod& method);

struct PolicyValue {
  std::string label;
  CostEstimate estimate;
};

struct ValueEstimate {
  std::size_t best_index = 0;  // minimum mean (first on ties)
  std::vector<PolicyValue> results;
};

// Evaluates a finite policy family with common random numbers and reports the
// minimum-mean entry as the value upper envelope.
ValueEstimate estimate_value(const ControlledSDE& problem, const CostSpec& cost,
                             std::span<const Policy> family, double s, const HVec& x0,
                             const TimeGrid& grid, const McConfig& mc);

// Heuristic growth probe on per-replica positive/negative cost integrals.
// A part is suspected non-integrable if it contains an infinity or its
// running mean keeps growing through the sample.
QuasiFlag admissibility_report(std::span<const double> positive_integrals,
                               std::span<const double> negative_integrals);

}  // namespace hjbtk
