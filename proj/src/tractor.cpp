#include "gnsforge/tractor.hpp"

#include <algorithm>
#include <cmath>

namespace gnsforge {

namespace {

void require_arclength(const WarpedGeometry& geom) {
  if (!geom.arclength())
    fail(ErrorKind::domain, "tractor calculus needs an arclength radial coordinate");
}

}  // namespace

Schouten schouten(const WarpedGeometry& geom) {
  const Real n = static_cast<Real>(geom.n);
  const Eigen ric = ricci_eigenvalues(geom);
  const RadialField J = ric.trace(geom.n) / (2 * (n - 1));
  return {(ric.rad - J) / (n - 2), (ric.tan - J) / (n - 2), J};
}

Tractor Tractor::X(const GridPtr& grid) {
  return {RadialField::constant(grid, 1),
          RadialField::constant(grid, 0).with_parity(Parity::odd),
          RadialField::constant(grid, 0)};
}

Tractor split(const WarpedGeometry& geom, const RadialField& sigma) {
  require_arclength(geom);
  const Schouten P = schouten(geom);
  const Real n = static_cast<Real>(geom.n);
  return {-(laplacian(geom, sigma) + P.J * sigma) / n, d_dr(sigma), sigma};
}

RadialField tmetric(const Tractor& a, const Tractor& b) {
  return a.sigma * b.rho + b.sigma * a.rho + a.omega_r * b.omega_r;
}

TractorDerivative tderiv(const WarpedGeometry& geom, const Tractor& I) {
  require_arclength(geom);
  const Schouten P = schouten(geom);
  TractorDerivative d;
  d.radial.rho = d_dr(I.rho) - P.p_rad * I.omega_r;
  d.radial.omega_r = d_dr(I.omega_r) + I.sigma * P.p_rad + I.rho;
  d.radial.sigma = d_dr(I.sigma) - I.omega_r;
  // Along a unit tangential e: grad_e omega = omega_r (f'/f) e for radial
  // omega, P(e) = p_tan e, and the rho- and sigma-slots vanish since
  // g(omega, e) = 0 and rho, sigma are radial.
  d.tangential_coeff = I.omega_r * geom.df / geom.f + I.sigma * P.p_tan + I.rho;
  return d;
}

RadialField grad_norm_sq(const WarpedGeometry& geom, const TractorDerivative& d) {
  const Real n1 = static_cast<Real>(geom.n - 1);
  return tmetric(d.radial, d.radial) + n1 * square(d.tangential_coeff);
}

RadialField grad_norm_sq(const WarpedGeometry& geom, const Tractor& I) {
  return grad_norm_sq(geom, tderiv(geom, I));
}

Real parallel_residual(const WarpedGeometry& geom, const Tractor& I, const Window& w) {
  const TractorDerivative d = tderiv(geom, I);
  return std::max({sup_norm(d.radial.rho, w), sup_norm(d.radial.omega_r, w),
                   sup_norm(d.radial.sigma, w), sup_norm(d.tangential_coeff, w)});
}

Real parallel_residual(const WarpedGeometry& geom, const Tractor& I) {
  return parallel_residual(geom, I, default_window(*geom.grid()));
}

QuadraticDensity QuadraticDensity::from_frame(const std::vector<Real>& a) {
  if (a.size() < 5) fail(ErrorKind::parameter, "frame coordinates need n + 2 >= 5 entries");
  QuadraticDensity q;
  q.alpha = (a.front() + a.back()) / 2;
  q.gamma = (a.front() - a.back()) / 2;
  q.beta.assign(a.begin() + 1, a.end() - 1);
  return q;
}

QuadraticDensity QuadraticDensity::basis(int n, int j) {
  if (j < 0 || j > n + 1) fail(ErrorKind::parameter, "frame index out of range");
  std::vector<Real> a(static_cast<std::size_t>(n + 2), 0);
  a[static_cast<std::size_t>(j)] = 1;
  return from_frame(a);
}

bool QuadraticDensity::radial() const {
  return std::all_of(beta.begin(), beta.end(), [](Real b) { return b == 0; });
}

Tractor QuadraticDensity::split_exact(const GridPtr& grid) const {
  if (!radial()) fail(ErrorKind::parameter, "only radial quadratics live on a radial grid");
  const Real a = alpha, c = gamma;
  return {RadialField::constant(grid, -2 * c),
          RadialField::from(grid, [c](Real r) { return 2 * c * r; }, Parity::odd),
          RadialField::from(grid, [a, c](Real r) { return a + c * r * r; })};
}

Real quad_tractor_inner(const QuadraticDensity& a, const QuadraticDensity& b) {
  if (a.beta.size() != b.beta.size()) fail(ErrorKind::shape, "quadratics of different dimension");
  Real dot = 0;
  for (std::size_t i = 0; i < a.beta.size(); ++i) dot += a.beta[i] * b.beta[i];
  return dot - 2 * (a.alpha * b.gamma + b.alpha * a.gamma);
}

Real quad_tractor_norm(const QuadraticDensity& q) { return quad_tractor_inner(q, q); }

}  // namespace gnsforge
