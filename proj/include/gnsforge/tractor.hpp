#pragma once

#include <vector>

#include "gnsforge/geometry.hpp"

namespace gnsforge {

/// Eigenvalues of the Schouten tensor P = (Ric - J g)/(n-2), J = R/(2(n-1)).
struct Schouten {
  RadialField p_rad;
  RadialField p_tan;
  RadialField J;
};

Schouten schouten(const WarpedGeometry& geom);

/// Radial section (rho, omega, sigma) of the standard tractor bundle, with
/// omega = omega_r dr. All tractor operations require an arclength
/// coordinate (a = 1).
struct Tractor {
  RadialField rho;
  RadialField omega_r;
  RadialField sigma;

  /// The canonical tractor X = (1, 0, 0).
  static Tractor X(const GridPtr& grid);
};

/// Splitting operator: (-(Lap sigma + J sigma)/n, grad sigma, sigma).
Tractor split(const WarpedGeometry& geom, const RadialField& sigma);

/// Tractor metric h(I1, I2) = sigma1 rho2 + sigma2 rho1 + <omega1, omega2>.
RadialField tmetric(const Tractor& a, const Tractor& b);

/// Covariant derivative of a radial tractor. Along a unit tangential vector e
/// the derivative is (0, c e, 0) with a single scalar c.
struct TractorDerivative {
  Tractor radial;
  RadialField tangential_coeff;
};

TractorDerivative tderiv(const WarpedGeometry& geom, const Tractor& I);

/// |grad I|^2 = h(grad_r I, grad_r I) + (n-1) c^2.
RadialField grad_norm_sq(const WarpedGeometry& geom, const TractorDerivative& d);
RadialField grad_norm_sq(const WarpedGeometry& geom, const Tractor& I);

/// Largest component of grad I over the window.
Real parallel_residual(const WarpedGeometry& geom, const Tractor& I, const Window& w);
Real parallel_residual(const WarpedGeometry& geom, const Tractor& I);

/// u(x) = alpha + beta . x + gamma |x|^2 on flat R^n. On flat space L u is
/// parallel and its norm is the constant |beta|^2 - 4 alpha gamma.
struct QuadraticDensity {
  Real alpha = 0;
  std::vector<Real> beta;
  Real gamma = 0;

  /// From coordinates in the parallel frame (a_0, a_1..a_n, a_{n+1}) in which
  /// u = a_0 (1+r^2)/2 + sum a_i x^i + a_{n+1} (1-r^2)/2.
  static QuadraticDensity from_frame(const std::vector<Real>& a);
  /// The j-th frame element, j = 0..n+1, in dimension n.
  static QuadraticDensity basis(int n, int j);

  bool radial() const;
  /// Exact split tractor of a radial quadratic: (-2 gamma, 2 gamma r, u).
  Tractor split_exact(const GridPtr& grid) const;
};

Real quad_tractor_inner(const QuadraticDensity& a, const QuadraticDensity& b);
Real quad_tractor_norm(const QuadraticDensity& q);

}  // namespace gnsforge
