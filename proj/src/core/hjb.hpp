#pragma once

#include <span>
#include <string>
#include <vector>

#include "control.hpp"
#include "sde.hpp"

namespace hjbtk {

// A candidate solution of the backward equation, with whatever derivatives it
// can offer. d2v_dxx (row-major N x N) may be absent; operations that need it
// raise a capability error. growth_M, growth_m declare the gradient bound
// |dv_dx(s,x)| <= M (1 + |x|^m).
struct HJBCandidate {
  std::function<double(double s, const HVec& x)> v;
  std::function<double(double s, const HVec& x)> dv_ds;
  std::function<HVec(double s, const HVec& x)> dv_dx;
  std::function<std::vector<double>(double s, const HVec& x)> d2v_dxx;
  double growth_M = 1.0;
  int growth_m = 1;
};

// Points where the candidate's second derivative is unreliable; probes within
// `margin` of the set (as decided by the predicate) are excluded from
// classical checks.
struct KinkSet {
  std::function<bool(double s, const HVec& x)> near_kink;  // already margin-aware
  double margin = 1e-3;

  bool excludes(double s, const HVec& x) const { return near_kink && near_kink(s, x); }
};

struct ApproxTriple {
  int n = 0;
  HJBCandidate v_n;  // requires all derivative handles
  std::function<double(double s, const HVec& x)> h_n;
  std::function<double(const HVec& x)> g_n;
};

using HamiltonianHandle = std::function<double(double s, const HVec& x, const HVec& p)>;

struct ProbePoint {
  double s = 0.0;
  HVec x;
};

// L0 phi = d_s phi + <A* dv_dx, x> + 1/2 sum_j q_j (sigma col_j)^T d2v (sigma col_j).
double apply_L0(const HJBCandidate& cand, const ControlledSDE& problem, double s,
                const HVec& x);

struct ResidualStats {
  double max_abs = 0.0;
  double rms = 0.0;
  double terminal_max = 0.0;
  std::size_t probes_used = 0;
  std::size_t probes_flagged = 0;  // non-finite Hamiltonian values, excluded
};

// Interior residual |L0 v + F(s,x,dv_dx)| over probes plus terminal residual
// max |v(T,x) - g(x)|. Probes where F is infinite are flagged and excluded.
ResidualStats classical_residual(const HJBCandidate& cand, const ControlledSDE& problem,
                                 const HamiltonianHandle& F,
                                 const std::function<double(const HVec&)>& g, double T,
                                 std::span<const ProbePoint> probes);

struct CompactSpec {
  double radius = 2.0;
  std::size_t mesh_points = 1000;
};

struct ConvergenceEntry {
  int n = 0;
  double sup_v = 0.0;  // sup |v_n - v|
  double sup_h = 0.0;  // sup |h_n + F(.,.,dv_dx)|
  double sup_g = 0.0;  // sup |g_n - g|
};

struct ConvergenceThresholds {
  double v = 0.0;
  double h = 0.0;
  double g = 0.0;
};

struct CompactReport {
  CompactSpec compact;
  std::vector<ConvergenceEntry> entries;
  bool final_below_threshold = false;
  bool no_backslide = false;  // no >10% increase between consecutive n
  bool strictly_decreasing = false;
};

struct ConvergenceReport {
  std::vector<CompactReport> compacts;
  bool pass = false;
};

// Sup-errors of the approximating triples against the limit candidate on
// random meshes over [0,T] x {|x| <= radius}; pass iff on every compact the
// largest-n errors sit below the thresholds and no error backslides by more
// than 10% between consecutive n.
ConvergenceReport check_strong_solution(const HJBCandidate& limit,
                                        std::span<const ApproxTriple> triples,
                                        const HamiltonianHandle& F,
                                        const std::function<double(const HVec&)>& g,
                                        std::size_t dim, double T,
                                        std::span<const CompactSpec> compacts,
                                        const ConvergenceThresholds& thresholds,
                                        std::uint64_t seed);

struct ResidualPath {
  std::vector<double> t;         // grid nodes
  std::vector<double> residual;  // residual(t_k), residual(s) = 0 exactly
  double terminal_abs = 0.0;
};

// Pathwise defect of the decomposition
//   v(t,X(t)) - v(s,x) = -int F dr + int <dv_dx, b> dr + int <dv_dx, sigma dW>,
// discretized at left endpoints with the trajectory's own increments. Throws
// IdentityInapplicableError if F is non-finite at a node.
ResidualPath decomposition_residual(const HJBCandidate& cand, const ControlledSDE& problem,
                                    const HamiltonianHandle& F, const Trajectory& traj);

struct GapReport {
  double lhs_mean = 0.0;  // mean cost - v(s,x)
  double lhs_std_error = 0.0;
  double rhs_mean = 0.0;  // mean integrated gap
  double rhs_std_error = 0.0;
  double diff_mean = 0.0;  // per-replica (cost - v - gap), coupled
  double diff_std_error = 0.0;
  double min_pointwise_gap = 0.0;
  std::size_t replicas = 0;
};

// Monte Carlo check of the identity J(s,x;a) = v(s,x) + E int (F_CV - F) dr:
// both sides estimated from the same replicas. The pointwise gap integrand is
// also tracked; it should never be materially negative.
GapReport verification_gap(const ControlledSDE& problem, const CostSpec& cost,
                           const HJBCandidate& cand, const HamiltonianHandle& F,
                           const Policy& policy, double s, const HVec& x0,
                           const TimeGrid& grid, const McConfig& mc);

// Max over probes of |analytic - central difference| / max(|central|, 1),
// skipping kink-adjacent probes.
double gradient_check(const HJBCandidate& cand, std::span<const ProbePoint> probes,
                      const KinkSet& kinks, double fd_step = 1e-5);

// Max over probes of |dv_dx| / (M (1+|x|^m)); <= 1 when the declared growth
// bound holds on the sample.
double growth_check(const HJBCandidate& cand, std::span<const ProbePoint> probes);

// Report-only regularity probe: max graph-norm distance of dv_dx between
// probe pairs at separation <= scale, per scale (nested meshes).
struct ModulusEntry {
  double scale = 0.0;
  double max_graph_dist = 0.0;
};

std::vector<ModulusEntry> gradient_graph_modulus(const HJBCandidate& cand,
                                                 const SpectralOperator& a, double T,
                                                 double radius,
                                                 std::span<const double> scales,
                                                 std::size_t pairs_per_scale,
                                                 std::uint64_t seed);

// Report-only trend probe for the gradient/drift pairing along trajectories:
// mean over paths of sup_k |sum_{i<k} <dv_dx^n - dv_dx, b_i> h| per n.
struct UcpEntry {
  int n = 0;
  double mean_sup = 0.0;
};

std::vector<UcpEntry> ucp_drift_pairing(const HJBCandidate& limit,
                                        std::span<const ApproxTriple> triples,
                                        const ControlledSDE& problem, const Policy& policy,
                                        const HVec& x0, const TimeGrid& grid,
                                        std::size_t paths, std::uint64_t seed);

// Deterministic probe mesh on [0,T] x {|x| <= radius} (uniform time, ball
// sampled via normalized Gaussians with radial u^{1/N} scaling).
std::vector<ProbePoint> sample_probes(std::size_t count, std::size_t dim, double T,
                                      double radius, std::uint64_t seed,
                                      std::uint64_t stream);

}  // namespace hjbtk
