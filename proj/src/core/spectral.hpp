#pragma once

#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace hjbtk {

// Coefficient vector of a state in the truncated Hilbert space, expressed in
// the eigenbasis {e_1, ..., e_N} of the generator.
using HVec = std::vector<double>;

double inner(const HVec& x, const HVec& y);
double norm(const HVec& x);

// e_{k} for 1-based basis index k, in dimension n.
HVec basis_vector(std::size_t n, std::size_t k);

// y += a*x
void axpy(double a, const HVec& x, HVec& y);

// Diagonal generator A = diag(lambda_1, ..., lambda_N) acting on the
// truncated space. The semigroup e^{tA} and the adjoint A* (= A here, but
// kept separate so callers never assume self-adjointness) are exact.
struct SpectralOperator {
  std::vector<double> eigenvalues;

  std::size_t dim() const { return eigenvalues.size(); }
};

// lambda_1 user-set, lambda_k = -k^2 for k >= 2.
SpectralOperator default_spectrum(std::size_t n, double lambda1);

// e^{tA} x for t >= 0 (throws domain error for t < 0).
HVec semigroup_apply(const SpectralOperator& a, double t, const HVec& x);

// A* x (diagonal, so componentwise multiply).
HVec adjoint_apply(const SpectralOperator& a, const HVec& x);

// A vector tagged with its graph norm sqrt(|x|^2 + |A* x|^2); used by the
// regularity probes on gradients.
struct GraphNormed {
  HVec vec;
  double graph_norm = 0.0;
};

GraphNormed graph_normed(const SpectralOperator& a, HVec x);

namespace detail {
inline void require_same_dim(const HVec& x, const HVec& y, const char* what) {
  if (x.size() != y.size())
    throw Error(errc::dimension_mismatch, std::string(what) + ": operand dimensions differ");
}
}  // namespace detail

}  // namespace hjbtk
