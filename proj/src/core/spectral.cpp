#include "spectral.hpp"

#include <cmath>

namespace hjbtk {

double inner(const HVec& x, const HVec& y) {
  detail::require_same_dim(x, y, "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm(const HVec& x) { return std::sqrt(inner(x, x)); }

HVec basis_vector(std::size_t n, std::size_t k) {
  if (k < 1 || k > n)
    throw Error(errc::parameter, "basis_vector: index out of range");
  HVec e(n, 0.0);
  e[k - 1] = 1.0;
  return e;
}

void axpy(double a, const HVec& x, HVec& y) {
  detail::require_same_dim(x, y, "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

SpectralOperator default_spectrum(std::size_t n, double lambda1) {
  if (n == 0) throw Error(errc::parameter, "default_spectrum: dimension must be positive");
  SpectralOperator a;
  a.eigenvalues.resize(n);
  a.eigenvalues[0] = lambda1;
  for (std::size_t k = 2; k <= n; ++k)
    a.eigenvalues[k - 1] = -static_cast<double>(k) * static_cast<double>(k);
  return a;
}

HVec semigroup_apply(const SpectralOperator& a, double t, const HVec& x) {
  if (x.size() != a.dim())
    throw Error(errc::dimension_mismatch, "semigroup_apply: vector does not match operator dimension");
  if (t < 0.0)
    throw Error(errc::domain, "semigroup_apply: semigroup defined for t >= 0 only");
  HVec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = std::exp(a.eigenvalues[i] * t) * x[i];
  return out;
}

HVec adjoint_apply(const SpectralOperator& a, const HVec& x) {
  if (x.size() != a.dim())
    throw Error(errc::dimension_mismatch, "adjoint_apply: vector does not match operator dimension");
  HVec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = a.eigenvalues[i] * x[i];
  return out;
}

GraphNormed graph_normed(const SpectralOperator& a, HVec x) {
  HVec ax = adjoint_apply(a, x);
  GraphNormed g;
  g.graph_norm = std::sqrt(inner(x, x) + inner(ax, ax));
  g.vec = std::move(x);
  return g;
}

}  // namespace hjbtk
