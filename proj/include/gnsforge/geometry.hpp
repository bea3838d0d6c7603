#pragma once

#include <string>

#include "gnsforge/grid.hpp"

namespace gnsforge {

/// Dimension n, dimensional parameter m and exponent k.
struct GnsParams {
  int n = 3;
  Real m = 0;
  Real k = 1;

  /// Throws a parameter error unless (n, m, k) is admissible: n >= 3 and
  /// either m >= 0 with 0 < k <= (m+n+2)/2, or m <= -n-2 with
  /// 0 < k <= -2m/(n-2).
  void validate() const;
  /// The m <= -n-2 branch, whose extremals are supported on a ball.
  bool ball_branch() const { return m < 0; }
};

/// Checks n >= 3 and m + n - 2 != 0.
void validate_dimension(int n, Real m);

enum class Model { euclidean, sphere, hyperbolic, custom };

const char* to_string(Model m);
Model parse_model(const std::string& s);
const char* to_string(Domain d);
Domain parse_domain(const std::string& s);

/// Rotationally symmetric metric g = a(r)^2 dr^2 + f(r)^2 g_{S^{n-1}}.
/// The named models have a = 1 and f = r, sin r, sinh r. Conformal rescaling
/// keeps the coordinate r, so a general a is carried along explicitly.
struct WarpedGeometry {
  int n = 3;
  Model model = Model::euclidean;
  RadialField a, da;
  RadialField f, df, d2f;

  const GridPtr& grid() const { return f.grid(); }
  /// True when r is arclength (a = 1 at every node).
  bool arclength() const;
};

/// Named model on an explicit grid. The sphere needs a bounded grid with
/// scale <= pi (pole_to_pole with scale = pi for the full sphere); the
/// Euclidean and hyperbolic models cannot close at a second pole.
WarpedGeometry make_geometry(Model model, int n, const GridPtr& grid);

/// Grid conventionally paired with a model: half-line for Euclidean space,
/// pole_to_pole with scale pi for the round sphere, and the ball of radius 10
/// for hyperbolic space (e^r overflows the f^{n-1} weight on the half-line).
GridPtr default_grid(Model model, std::size_t N);

/// Custom warped metric from sampled a and f; derivatives by finite differences.
WarpedGeometry make_custom_geometry(int n, const RadialField& a, const RadialField& f);

/// Smooth metric measure space (M, g, v^m dvol).
struct SMMS {
  WarpedGeometry geom;
  RadialField v;
  Real m = 0;
  const GridPtr& grid() const { return geom.grid(); }
};

/// Validates v > 0 and, for m = 0, constant v.
SMMS make_smms(const WarpedGeometry& geom, const RadialField& v, Real m);

/// A radial symmetric 2-tensor in the orthonormal frame: one eigenvalue in the
/// radial direction and one (n-1)-fold eigenvalue tangentially.
struct Eigen {
  RadialField rad;
  RadialField tan;
  RadialField trace(int n) const { return rad + static_cast<Real>(n - 1) * tan; }
};

RadialField laplacian(const WarpedGeometry& geom, const RadialField& w);
/// Radial component of grad h in the orthonormal frame, h'/a.
RadialField unit_gradient(const WarpedGeometry& geom, const RadialField& h);
/// |grad h|^2.
RadialField grad_sq(const WarpedGeometry& geom, const RadialField& h);
Eigen hessian_eigenvalues(const WarpedGeometry& geom, const RadialField& h);

RadialField scalar_curvature(const WarpedGeometry& geom);
Eigen ricci_eigenvalues(const WarpedGeometry& geom);

/// Scalar curvature of u^{-2} g from the conformal change law
/// u^2 R + 2(n-1) u Lap u - n(n-1) |grad u|^2.
RadialField conformal_scalar_curvature(const WarpedGeometry& geom, const RadialField& u);
/// Ricci tensor of u^{-2} g evaluated on g-orthonormal frame vectors:
/// Ric + (n-2) Hess u / u + (Lap u / u - (n-1) |grad u|^2 / u^2) g.
Eigen conformal_ricci(const WarpedGeometry& geom, const RadialField& u);

RadialField weighted_laplacian(const SMMS& smms, const RadialField& w);
RadialField weighted_scalar(const SMMS& smms);
Eigen bakry_emery_eigenvalues(const SMMS& smms);

/// (g, v^m dvol) -> (e^{2s} g, (e^s v)^m dvol). For m = 0 the density is left
/// untouched so the result is again admissible (constant v).
SMMS conformal_rescale(const SMMS& smms, const RadialField& s);

/// (m+n-2) / (4(m+n-1)).
Real conformal_coefficient(int n, Real m);
RadialField weighted_conformal_laplacian(const SMMS& smms, const RadialField& w);

/// Area of the unit (n-1)-sphere.
Real sphere_area(int n);

struct Integral {
  Real value = 0;
  Real tail_fraction = 0;
};

inline constexpr Real kTailTol = 1e-9L;

/// Tail test for the unbounded end of the half-line. The radial density is
/// fitted as C r^-alpha through (ra, Ga) and (rb, Gb), a decade apart; the
/// fitted integral over (r_cut, inf) is compared with `represented`, the part
/// of the discrete sum standing in for it. Returns the discrepancy relative to
/// `total_abs`, or infinity when alpha <= 1.
Real tail_estimate(Real ra, Real Ga, Real rb, Real Gb, Real r_cut, Real represented,
                   Real total_abs);

/// tail_estimate for midpoint cell contributions on a half-line grid: the
/// outermost cell stands for everything beyond its inner edge.
Real tail_fraction(const RadialGrid& grid, std::span<const Real> cells);

/// Index of the first node with r >= r_last / 10.
std::size_t last_decade_start(const RadialGrid& grid);

/// Divergence error naming the integrand when fraction > tol.
void check_tail(Real fraction, const std::string& name, Real tol);

/// Integral of a radial function against dvol_g, with the tail test on the
/// half-line.
Integral integrate(const WarpedGeometry& geom, const RadialField& integrand,
                   const std::string& name = "integrand", Real tail_tol = kTailTol);

/// Per-node volume weights omega_{n-1} * a f^{n-1} * quad_weight.
std::vector<Real> volume_weights(const WarpedGeometry& geom);

}  // namespace gnsforge
