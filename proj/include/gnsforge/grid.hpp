#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "gnsforge/core.hpp"
#include "gnsforge/kernels.hpp"

namespace gnsforge {

/// Radial domains.
///  - half_line:    r in (0, inf), r = scale * s / (1 - s)
///  - unit_ball:    r in (0, scale), r = scale * s; the outer end is a
///                  genuine boundary (one-sided stencils, Dirichlet energy)
///  - pole_to_pole: r in (0, scale), r = scale * s; the outer end is a second
///                  pole of the rotationally symmetric metric (round sphere
///                  with scale = pi) and is closed by reflection
enum class Domain { half_line, unit_ball, pole_to_pole };

/// Reflection parity of a radial function about the poles. Smooth radial
/// scalars are even; radial vector components are odd. Fields of unknown
/// parity fall back to one-sided stencils at the origin.
enum class Parity { even, odd, mixed };

Parity flip(Parity p);
Parity product(Parity a, Parity b);
Parity sum(Parity a, Parity b);

class RadialGrid {
 public:
  Domain domain() const { return domain_; }
  std::size_t size() const { return r_.size(); }
  Real scale() const { return scale_; }
  Real h() const { return h_; }

  std::span<const Real> s() const { return s_; }
  std::span<const Real> r() const { return r_; }
  std::span<const Real> jacobian() const { return jacobian_; }
  /// Midpoint weights for integrals over dr, Jacobian included.
  std::span<const Real> quad_weight() const { return quad_weight_; }

  /// Outer radius for bounded domains; infinity for the half-line.
  Real outer_radius() const;

  std::span<const kernels::Stencil3> first_derivative(Parity p) const {
    return d1_[static_cast<std::size_t>(p)];
  }
  std::span<const kernels::Stencil3> second_derivative(Parity p) const {
    return d2_[static_cast<std::size_t>(p)];
  }

 private:
  friend std::shared_ptr<const RadialGrid> make_grid(Domain, std::size_t, Real);
  RadialGrid() = default;
  void build_stencils();

  Domain domain_ = Domain::half_line;
  Real scale_ = 1;
  Real h_ = 0;
  std::vector<Real> s_, r_, jacobian_, quad_weight_;
  std::array<std::vector<kernels::Stencil3>, 3> d1_, d2_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Midpoint nodes s_i = (i + 1/2)/N; N >= 16, scale > 0.
GridPtr make_grid(Domain domain, std::size_t N, Real scale = 1);

/// A scalar radial function sampled on a grid.
class RadialField {
 public:
  RadialField() = default;
  RadialField(GridPtr grid, std::vector<Real> values, Parity parity = Parity::even);

  static RadialField constant(const GridPtr& grid, Real c);
  static RadialField from(const GridPtr& grid, const std::function<Real(Real)>& fn,
                          Parity parity = Parity::even);
  /// The coordinate function r itself (odd).
  static RadialField radius(const GridPtr& grid);

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  Parity parity() const { return parity_; }
  RadialField with_parity(Parity p) const;

  Real operator[](std::size_t i) const { return values_[i]; }
  Real& operator[](std::size_t i) { return values_[i]; }
  std::span<const Real> values() const { return values_; }
  std::span<Real> values() { return values_; }

  RadialField& operator+=(const RadialField& o);
  RadialField& operator-=(const RadialField& o);
  RadialField& operator*=(const RadialField& o);
  RadialField& operator/=(const RadialField& o);
  RadialField& operator*=(Real c);
  RadialField& operator+=(Real c);

  RadialField operator-() const;

  /// Pointwise map; parity survives only for even inputs.
  RadialField map(const std::function<Real(Real)>& fn) const;

  bool all_finite() const;
  Real min() const;
  Real max() const;

 private:
  GridPtr grid_;
  std::vector<Real> values_;
  Parity parity_ = Parity::even;
};

void require_same_grid(const RadialField& a, const RadialField& b);

RadialField operator+(RadialField a, const RadialField& b);
RadialField operator-(RadialField a, const RadialField& b);
RadialField operator*(RadialField a, const RadialField& b);
RadialField operator/(RadialField a, const RadialField& b);
RadialField operator*(RadialField a, Real c);
RadialField operator*(Real c, RadialField a);
RadialField operator/(RadialField a, Real c);
RadialField operator/(Real c, const RadialField& a);
RadialField operator+(RadialField a, Real c);
RadialField operator+(Real c, RadialField a);
RadialField operator-(RadialField a, Real c);
RadialField operator-(Real c, const RadialField& a);

RadialField pow(const RadialField& a, Real e);
RadialField exp(const RadialField& a);
RadialField log(const RadialField& a);
RadialField sqrt(const RadialField& a);
RadialField square(const RadialField& a);

/// d/dr by three-point Lagrange stencils on the nonuniform r-nodes; exact on
/// quadratics in r, second order on smooth data.
RadialField d_dr(const RadialField& f);
RadialField d2_dr2(const RadialField& f);

/// Contiguous node range [lo, hi) used for residual norms.
struct Window {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

/// Drops the outermost 5% of nodes, where compactified stencils lose accuracy.
Window default_window(const RadialGrid& grid);
/// Nodes with rmin <= r <= rmax.
Window radial_window(const RadialGrid& grid, Real rmin, Real rmax);

Real sup_norm(const RadialField& f, const Window& w);
Real sup_norm(const RadialField& f);
/// sup |f| / sup |ref| over the default window.
Real relative_sup(const RadialField& f, const RadialField& ref);

}  // namespace gnsforge
