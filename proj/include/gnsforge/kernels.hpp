#pragma once

#include <cstddef>
#include <span>

#include "gnsforge/core.hpp"

/// Data-parallel inner loops. Every kernel exists twice: `serial` is the
/// reference implementation kept for testing and benchmarking, `parallel` is
/// the OpenMP version the library calls.
namespace gnsforge::kernels {

/// out[i] = c[0]*in[first] + c[1]*in[first+1] + c[2]*in[first+2].
/// Boundary closures (reflection ghosts, one-sided formulas) are folded into
/// `first` and the coefficients when the stencil table is built.
struct Stencil3 {
  std::size_t first = 0;
  Real c[3] = {0, 0, 0};
};

namespace serial {
void apply_stencil(std::span<const Real> in, std::span<const Stencil3> stencils,
                   std::span<Real> out);
Real dot(std::span<const Real> a, std::span<const Real> b);
/// sum_i coeff[i] * (w[i+1] - w[i])^2, coeff has size w.size() - 1.
Real staggered_energy(std::span<const Real> w, std::span<const Real> coeff);
}  // namespace serial

namespace parallel {
void apply_stencil(std::span<const Real> in, std::span<const Stencil3> stencils,
                   std::span<Real> out);
Real dot(std::span<const Real> a, std::span<const Real> b);
Real staggered_energy(std::span<const Real> w, std::span<const Real> coeff);
}  // namespace parallel

/// Solves a symmetric tridiagonal system in place (Thomas algorithm).
/// `diag` and `rhs` are overwritten; `off` holds the N-1 off-diagonals.
void solve_tridiagonal(std::span<Real> diag, std::span<const Real> off,
                       std::span<Real> rhs);

}  // namespace gnsforge::kernels
