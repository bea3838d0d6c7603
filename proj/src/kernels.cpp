#include "gnsforge/kernels.hpp"

#include <vector>

namespace gnsforge::kernels {

namespace serial {

void apply_stencil(std::span<const Real> in, std::span<const Stencil3> stencils,
                   std::span<Real> out) {
  for (std::size_t i = 0; i < stencils.size(); ++i) {
    const Stencil3& s = stencils[i];
    out[i] = s.c[0] * in[s.first] + s.c[1] * in[s.first + 1] +
             s.c[2] * in[s.first + 2];
  }
}

Real dot(std::span<const Real> a, std::span<const Real> b) {
  Real sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

Real staggered_energy(std::span<const Real> w, std::span<const Real> coeff) {
  Real sum = 0;
  for (std::size_t i = 0; i < coeff.size(); ++i) {
    const Real dw = w[i + 1] - w[i];
    sum += coeff[i] * dw * dw;
  }
  return sum;
}

}  // namespace serial

namespace parallel {

void apply_stencil(std::span<const Real> in, std::span<const Stencil3> stencils,
                   std::span<Real> out) {
  const auto n = static_cast<long>(stencils.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const Stencil3& s = stencils[i];
    out[i] = s.c[0] * in[s.first] + s.c[1] * in[s.first + 1] +
             s.c[2] * in[s.first + 2];
  }
}

Real dot(std::span<const Real> a, std::span<const Real> b) {
  const auto n = static_cast<long>(a.size());
  Real sum = 0;
#pragma omp parallel for schedule(static) reduction(+ : sum)
  for (long i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

Real staggered_energy(std::span<const Real> w, std::span<const Real> coeff) {
  const auto n = static_cast<long>(coeff.size());
  Real sum = 0;
#pragma omp parallel for schedule(static) reduction(+ : sum)
  for (long i = 0; i < n; ++i) {
    const Real dw = w[i + 1] - w[i];
    sum += coeff[i] * dw * dw;
  }
  return sum;
}

}  // namespace parallel

void solve_tridiagonal(std::span<Real> diag, std::span<const Real> off,
                       std::span<Real> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const Real factor = off[i - 1] / diag[i - 1];
    diag[i] -= factor * off[i - 1];
    rhs[i] -= factor * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
  }
}

}  // namespace gnsforge::kernels
