#include "gnsforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gnsforge {

void validate_dimension(int n, Real m) {
  if (n < 3) fail(ErrorKind::parameter, "dimension n must be at least 3");
  if (!std::isfinite(m)) fail(ErrorKind::parameter, "m must be finite");
  if (m + n - 2 == 0) fail(ErrorKind::parameter, "m + n - 2 must be nonzero");
}

void GnsParams::validate() const {
  validate_dimension(n, m);
  if (!std::isfinite(k) || !(k > 0)) fail(ErrorKind::parameter, "k must be positive");
  std::ostringstream msg;
  if (m >= 0) {
    const Real kmax = (m + n + 2) / 2;
    if (k > kmax) {
      msg << "k = " << static_cast<double>(k) << " outside (0, " << static_cast<double>(kmax)
          << "] for m >= 0";
      fail(ErrorKind::parameter, msg.str());
    }
  } else if (m <= -n - 2) {
    const Real kmax = -2 * m / (n - 2);
    if (k > kmax) {
      msg << "k = " << static_cast<double>(k) << " outside (0, " << static_cast<double>(kmax)
          << "] for m <= -n-2";
      fail(ErrorKind::parameter, msg.str());
    }
  } else {
    fail(ErrorKind::parameter, "m must satisfy m >= 0 or m <= -n-2");
  }
}

const char* to_string(Model m) {
  switch (m) {
    case Model::euclidean: return "euclidean";
    case Model::sphere: return "sphere";
    case Model::hyperbolic: return "hyperbolic";
    case Model::custom: return "custom";
  }
  return "custom";
}

Model parse_model(const std::string& s) {
  if (s == "euclidean") return Model::euclidean;
  if (s == "sphere") return Model::sphere;
  if (s == "hyperbolic") return Model::hyperbolic;
  fail(ErrorKind::parameter, "unknown model '" + s + "'");
}

const char* to_string(Domain d) {
  switch (d) {
    case Domain::half_line: return "half_line";
    case Domain::unit_ball: return "unit_ball";
    case Domain::pole_to_pole: return "pole_to_pole";
  }
  return "half_line";
}

Domain parse_domain(const std::string& s) {
  if (s == "half_line") return Domain::half_line;
  if (s == "unit_ball") return Domain::unit_ball;
  if (s == "pole_to_pole") return Domain::pole_to_pole;
  fail(ErrorKind::parameter, "unknown domain '" + s + "'");
}

bool WarpedGeometry::arclength() const {
  if (model != Model::custom) return true;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 1 || da[i] != 0) return false;
  return true;
}

WarpedGeometry make_geometry(Model model, int n, const GridPtr& grid) {
  if (n < 3) fail(ErrorKind::parameter, "dimension n must be at least 3");
  const Domain d = grid->domain();
  WarpedGeometry g;
  g.n = n;
  g.model = model;
  g.a = RadialField::constant(grid, 1);
  g.da = RadialField::constant(grid, 0).with_parity(Parity::odd);
  switch (model) {
    case Model::euclidean:
      if (d == Domain::pole_to_pole)
        fail(ErrorKind::domain, "euclidean model cannot close at a second pole");
      g.f = RadialField::radius(grid);
      g.df = RadialField::constant(grid, 1);
      g.d2f = RadialField::constant(grid, 0).with_parity(Parity::odd);
      break;
    case Model::sphere:
      if (d == Domain::half_line) fail(ErrorKind::domain, "sphere model needs a bounded grid");
      if (grid->scale() > kPi * (1 + 1e-15L))
        fail(ErrorKind::domain, "sphere model needs radius at most pi");
      if (d == Domain::pole_to_pole && std::fabs(grid->scale() - kPi) > 1e-12L)
        fail(ErrorKind::domain, "pole_to_pole sphere needs scale pi");
      g.f = RadialField::from(grid, [](Real r) { return std::sin(r); }, Parity::odd);
      g.df = RadialField::from(grid, [](Real r) { return std::cos(r); });
      g.d2f = -g.f;
      break;
    case Model::hyperbolic:
      if (d == Domain::pole_to_pole)
        fail(ErrorKind::domain, "hyperbolic model cannot close at a second pole");
      g.f = RadialField::from(grid, [](Real r) { return std::sinh(r); }, Parity::odd);
      g.df = RadialField::from(grid, [](Real r) { return std::cosh(r); });
      g.d2f = g.f;
      break;
    case Model::custom:
      fail(ErrorKind::parameter, "custom geometries are built from sampled data");
  }
  if (!g.f.all_finite() || !g.df.all_finite())
    fail(ErrorKind::domain, "warp function overflows on this grid");
  return g;
}

GridPtr default_grid(Model model, std::size_t N) {
  switch (model) {
    case Model::sphere: return make_grid(Domain::pole_to_pole, N, kPi);
    case Model::hyperbolic: return make_grid(Domain::unit_ball, N, 10);
    default: return make_grid(Domain::half_line, N, 1);
  }
}

WarpedGeometry make_custom_geometry(int n, const RadialField& a, const RadialField& f) {
  if (n < 3) fail(ErrorKind::parameter, "dimension n must be at least 3");
  require_same_grid(a, f);
  if (a.min() <= 0) fail(ErrorKind::domain, "radial metric factor must be positive");
  if (f.min() <= 0) fail(ErrorKind::domain, "warp function must be positive");
  WarpedGeometry g;
  g.n = n;
  g.model = Model::custom;
  g.a = a.with_parity(Parity::even);
  g.f = f.with_parity(Parity::odd);
  g.da = d_dr(g.a);
  g.df = d_dr(g.f);
  g.d2f = d2_dr2(g.f);
  return g;
}

SMMS make_smms(const WarpedGeometry& geom, const RadialField& v, Real m) {
  require_same_grid(geom.f, v);
  if (!v.all_finite() || v.min() <= 0) fail(ErrorKind::domain, "density v must be positive");
  if (m == 0) {
    const Real spread = v.max() - v.min();
    if (spread > 1e-12L * v.max())
      fail(ErrorKind::domain, "m = 0 requires a constant density");
  }
  return SMMS{geom, v, m};
}

RadialField unit_gradient(const WarpedGeometry& geom, const RadialField& h) {
  return d_dr(h) / geom.a;
}

RadialField grad_sq(const WarpedGeometry& geom, const RadialField& h) {
  return square(unit_gradient(geom, h));
}

RadialField laplacian(const WarpedGeometry& geom, const RadialField& w) {
  require_same_grid(geom.f, w);
  const RadialField w1 = d_dr(w);
  const RadialField w2 = d2_dr2(w);
  const Real n1 = static_cast<Real>(geom.n - 1);
  RadialField out = w2 + (n1 * geom.df / geom.f - geom.da / geom.a) * w1;
  return out / square(geom.a);
}

Eigen hessian_eigenvalues(const WarpedGeometry& geom, const RadialField& h) {
  require_same_grid(geom.f, h);
  const RadialField h1 = d_dr(h);
  const RadialField a2 = square(geom.a);
  Eigen e;
  e.rad = (d2_dr2(h) - geom.da / geom.a * h1) / a2;
  e.tan = geom.df * h1 / (a2 * geom.f);
  return e;
}

namespace {

Real model_curvature_sign(Model model) {
  switch (model) {
    case Model::sphere: return 1;
    case Model::hyperbolic: return -1;
    default: return 0;
  }
}

}  // namespace

Eigen ricci_eigenvalues(const WarpedGeometry& geom) {
  if (geom.f.min() <= 0) fail(ErrorKind::domain, "warp function must be positive");
  const auto& grid = geom.grid();
  const Real n1 = static_cast<Real>(geom.n - 1);
  if (geom.model != Model::custom) {
    const Real c = n1 * model_curvature_sign(geom.model);
    return {RadialField::constant(grid, c), RadialField::constant(grid, c)};
  }
  // Arclength derivatives of f: F_t = f'/a, F_tt = (f'' a - f' a') / a^3.
  const RadialField ft = geom.df / geom.a;
  const RadialField ftt = (geom.d2f * geom.a - geom.df * geom.da) / pow(geom.a, 3);
  Eigen e;
  e.rad = -n1 * ftt / geom.f;
  e.tan = -ftt / geom.f + static_cast<Real>(geom.n - 2) * (1 - square(ft)) / square(geom.f);
  return e;
}

RadialField scalar_curvature(const WarpedGeometry& geom) {
  if (geom.model != Model::custom) {
    if (geom.f.min() <= 0) fail(ErrorKind::domain, "warp function must be positive");
    const Real n = static_cast<Real>(geom.n);
    return RadialField::constant(geom.grid(), n * (n - 1) * model_curvature_sign(geom.model));
  }
  return ricci_eigenvalues(geom).trace(geom.n);
}

RadialField conformal_scalar_curvature(const WarpedGeometry& geom, const RadialField& u) {
  const Real n = static_cast<Real>(geom.n);
  return square(u) * scalar_curvature(geom) + 2 * (n - 1) * u * laplacian(geom, u) -
         n * (n - 1) * grad_sq(geom, u);
}

Eigen conformal_ricci(const WarpedGeometry& geom, const RadialField& u) {
  const Real n = static_cast<Real>(geom.n);
  const Eigen ric = ricci_eigenvalues(geom);
  const Eigen hess = hessian_eigenvalues(geom, u);
  const RadialField shift = laplacian(geom, u) / u - (n - 1) * grad_sq(geom, u) / square(u);
  return {ric.rad + (n - 2) * hess.rad / u + shift, ric.tan + (n - 2) * hess.tan / u + shift};
}

namespace {

RadialField log_density(const SMMS& smms) {
  if (smms.v.min() <= 0) fail(ErrorKind::domain, "density v must be positive");
  return log(smms.v);
}

void require_admissible_density(const SMMS& smms) {
  if (smms.m == 0 && smms.v.max() - smms.v.min() > 1e-12L * smms.v.max())
    fail(ErrorKind::domain, "m = 0 requires a constant density");
}

}  // namespace

RadialField weighted_laplacian(const SMMS& smms, const RadialField& w) {
  const RadialField ell = log_density(smms);
  return laplacian(smms.geom, w) +
         smms.m * d_dr(ell) * d_dr(w) / square(smms.geom.a);
}

RadialField weighted_scalar(const SMMS& smms) {
  require_admissible_density(smms);
  const RadialField R = scalar_curvature(smms.geom);
  if (smms.m == 0) return R;
  const RadialField ell = log_density(smms);
  const Real m = smms.m;
  return R - 2 * m * laplacian(smms.geom, ell) - m * (m + 1) * grad_sq(smms.geom, ell);
}

Eigen bakry_emery_eigenvalues(const SMMS& smms) {
  require_admissible_density(smms);
  Eigen ric = ricci_eigenvalues(smms.geom);
  if (smms.m == 0) return ric;
  const RadialField ell = log_density(smms);
  const Eigen hess = hessian_eigenvalues(smms.geom, ell);
  const Real m = smms.m;
  ric.rad = ric.rad - m * hess.rad - m * grad_sq(smms.geom, ell);
  ric.tan = ric.tan - m * hess.tan;
  return ric;
}

SMMS conformal_rescale(const SMMS& smms, const RadialField& s) {
  const WarpedGeometry& g = smms.geom;
  require_same_grid(g.f, s);
  const RadialField es = exp(s);
  const RadialField s1 = d_dr(s);
  const RadialField s2 = d2_dr2(s);
  WarpedGeometry out;
  out.n = g.n;
  out.model = Model::custom;
  out.a = es * g.a;
  out.da = es * (g.da + s1 * g.a);
  out.f = es * g.f;
  out.df = es * (g.df + s1 * g.f);
  out.d2f = es * (g.d2f + 2 * s1 * g.df + (s2 + square(s1)) * g.f);
  // Keep the parity bookkeeping of the original data.
  out.a = out.a.with_parity(Parity::even);
  out.da = out.da.with_parity(Parity::odd);
  out.f = out.f.with_parity(Parity::odd);
  out.df = out.df.with_parity(Parity::even);
  out.d2f = out.d2f.with_parity(Parity::odd);
  const RadialField v = smms.m == 0 ? smms.v : es * smms.v;
  return SMMS{out, v, smms.m};
}

Real conformal_coefficient(int n, Real m) {
  validate_dimension(n, m);
  if (m + n - 1 == 0) fail(ErrorKind::parameter, "m + n - 1 must be nonzero");
  return (m + n - 2) / (4 * (m + n - 1));
}

RadialField weighted_conformal_laplacian(const SMMS& smms, const RadialField& w) {
  const Real c = conformal_coefficient(smms.geom.n, smms.m);
  return c * weighted_scalar(smms) * w - weighted_laplacian(smms, w);
}

Real sphere_area(int n) {
  const Real half = static_cast<Real>(n) / 2;
  return 2 * std::pow(kPi, half) / std::tgamma(half);
}

std::vector<Real> volume_weights(const WarpedGeometry& geom) {
  const auto q = geom.grid()->quad_weight();
  const Real area = sphere_area(geom.n);
  std::vector<Real> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    out[i] = area * q[i] * geom.a[i] * std::pow(geom.f[i], static_cast<Real>(geom.n - 1));
  return out;
}

Real tail_estimate(Real ra, Real Ga, Real rb, Real Gb, Real r_cut, Real represented,
                   Real total_abs) {
  Ga = std::fabs(Ga);
  Gb = std::fabs(Gb);
  if (!(total_abs > 0) || Gb == 0) return 0;
  if (Ga == 0) return std::numeric_limits<Real>::infinity();
  const Real alpha = std::log(Ga / Gb) / std::log(rb / ra);
  if (!(alpha > 1)) return std::numeric_limits<Real>::infinity();
  const Real fitted = Gb * std::pow(rb / r_cut, alpha) * r_cut / (alpha - 1);
  return std::fabs(std::fabs(represented) - fitted) / total_abs;
}

std::size_t last_decade_start(const RadialGrid& grid) {
  const auto r = grid.r();
  const Real target = r.back() / 10;
  return static_cast<std::size_t>(std::lower_bound(r.begin(), r.end(), target) - r.begin());
}

Real tail_fraction(const RadialGrid& grid, std::span<const Real> cells) {
  const std::size_t N = cells.size();
  const auto r = grid.r();
  const auto q = grid.quad_weight();
  Real total_abs = 0;
  for (Real c : cells) total_abs += std::fabs(c);
  const std::size_t a = last_decade_start(grid), b = N - 1;
  const Real s_edge = 1 - grid.h();
  const Real r_cut = grid.scale() * s_edge / (1 - s_edge);
  return tail_estimate(r[a], cells[a] / q[a], r[b], cells[b] / q[b], r_cut, cells[b], total_abs);
}

void check_tail(Real fraction, const std::string& name, Real tol) {
  if (fraction > tol) {
    std::ostringstream msg;
    msg << "integral of " << name << " does not converge (tail fraction "
        << static_cast<double>(fraction) << ")";
    fail(ErrorKind::divergence, msg.str());
  }
}

Integral integrate(const WarpedGeometry& geom, const RadialField& integrand,
                   const std::string& name, Real tail_tol) {
  require_same_grid(geom.f, integrand);
  std::vector<Real> cells = volume_weights(geom);
  Real total = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    cells[i] *= integrand[i];
    total += cells[i];
  }
  if (!std::isfinite(total)) fail(ErrorKind::divergence, "integral of " + name + " is not finite");
  Integral out{total, 0};
  if (geom.grid()->domain() == Domain::half_line) {
    out.tail_fraction = tail_fraction(*geom.grid(), cells);
    check_tail(out.tail_fraction, name, tail_tol);
  }
  return out;
}

}  // namespace gnsforge
