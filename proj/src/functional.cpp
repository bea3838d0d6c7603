#include "gnsforge/functional.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace gnsforge {

ExponentSet exponents(const GnsParams& params) {
  params.validate();
  const Real n = params.n, m = params.m, k = params.k;
  const Real denom = 2 * m + k * (n - 2);
  if (denom == 0) fail(ErrorKind::parameter, "2m + k(n-2) vanishes; the constant power is undefined");
  ExponentSet e;
  e.p_f = 2 * m / (n * k);
  e.q_f = denom / (n * k);
  e.p_leb = 2 * (m + n - k) / (m + n - 2);
  e.q_leb = 2 * (m + n) / (m + n - 2);
  const Real sob = Real(0.5) - 1 / n;
  if (m >= 0) {
    // |w|_q <= C |grad w|^theta |w|_p^{1-theta}
    e.theta = (1 / e.q_leb - 1 / e.p_leb) / (sob - 1 / e.p_leb);
  } else {
    // On the negative branch the roles of the two Lebesgue norms swap.
    e.theta = (1 / e.p_leb - 1 / e.q_leb) / (sob - 1 / e.q_leb);
  }
  e.const_power = -(m + n - 2) * n * k / ((m + n) * denom);
  return e;
}


namespace {

// 16-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::array<Real, 16> x{}, w{};
  GaussRule() {
    constexpr int n = 16;
    for (int i = 0; i < n; ++i) {
      Real t = std::cos(kPi * (i + Real(0.75)) / (n + Real(0.5)));
      Real dp = 0;
      for (int it = 0; it < 100; ++it) {
        const Real p = std::legendre(n, t);
        dp = n * (t * p - std::legendre(n - 1, t)) / (t * t - 1);
        const Real dt = p / dp;
        t -= dt;
        if (std::fabs(dt) < 1e-19L) break;
      }
      x[i] = t;
      w[i] = 2 / ((1 - t * t) * dp * dp);
    }
  }
  template <class F>
  Real integrate(F&& f, Real a, Real b) const {
    const Real c = (a + b) / 2, h = (b - a) / 2;
    Real s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(c + h * x[i]);
    return s * h;
  }
};

const GaussRule& gauss_rule() {
  static const GaussRule rule;
  return rule;
}

}  // namespace

DiscreteFunctional::DiscreteFunctional(const SMMS& smms, Real k, Real tail_tol)
    : smms_(smms), k_(k), tail_tol_(tail_tol) {
  const WarpedGeometry& g = smms.geom;
  ex_ = exponents(GnsParams{g.n, smms.m, k});
  const RadialGrid& grid = *g.grid();
  const std::size_t N = grid.size();
  const auto r = grid.r();
  const Real area = sphere_area(g.n);
  const Real nm1 = static_cast<Real>(g.n - 1);
  const RadialField R = weighted_scalar(smms);
  const Real c = conformal_coefficient(g.n, smms.m);

  // Finite volumes: node i owns [e_{i-1}, e_i] with e_i the midpoint between
  // neighbouring nodes. The pole factor rho0 ~ f^{n-1} is integrated exactly
  // over each cell, and the smooth remainder is sampled at the node, so the
  // scheme reproduces the Laplacian of r^2 exactly next to a pole.
  const Real outer = grid.outer_radius();
  const bool two_poles = grid.domain() == Domain::pole_to_pole;
  auto rho0 = [&](Real x) {
    return std::pow(two_poles ? outer / kPi * std::sin(kPi * x / outer) : x, nm1);
  };
  mu_.resize(N);
  potential_.resize(N);
  v_pow_.resize(N);
  std::vector<Real> psi(N);  // f^{n-1} v^m / (a rho0)
  const std::vector<Real> vol = volume_weights(g);
  for (std::size_t i = 0; i < N; ++i) {
    const Real vm = std::pow(smms.v[i], smms.m);
    const Real fr = std::pow(g.f[i], nm1) / rho0(r[i]);
    psi[i] = fr * vm / g.a[i];
    potential_[i] = c * R[i];
    v_pow_[i] = std::pow(smms.v[i], -k);
    const Real lo = i == 0 ? 0 : (r[i - 1] + r[i]) / 2;
    if (i + 1 == N && grid.domain() == Domain::half_line) {
      mu_[i] = vol[i] * vm;
    } else {
      const Real hi = i + 1 == N ? outer : (r[i] + r[i + 1]) / 2;
      mu_[i] = area * g.a[i] * fr * vm * gauss_rule().integrate(rho0, lo, hi);
    }
  }
  stiff_.resize(N - 1);
  for (std::size_t i = 0; i + 1 < N; ++i)
    stiff_[i] = area * rho0((r[i] + r[i + 1]) / 2) * (psi[i] + psi[i + 1]) / 2 / (r[i + 1] - r[i]);
  if (grid.domain() == Domain::unit_ball)
    wall_ = area * rho0((r[N - 1] + outer) / 2) * psi[N - 1] / (outer - r[N - 1]);
}

Real DiscreteFunctional::energy(std::span<const Real> w) const {
  const std::size_t N = w.size();
  if (N != mu_.size()) fail(ErrorKind::shape, "profile length does not match the grid");
  const Real grad = kernels::parallel::staggered_energy(w, stiff_);
  Real pot = 0, pot_abs = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const Real t = potential_[i] * w[i] * w[i] * mu_[i];
    pot += t;
    pot_abs += std::fabs(t);
  }
  if (smms_.geom.grid()->domain() == Domain::half_line) {
    // The staggered sum stops at the last node; fit the edge density over
    // the last decade and compare with the missing piece.
    const RadialGrid& grid = *smms_.geom.grid();
    const auto r = grid.r();
    const std::size_t b = N - 2, a = std::min(last_decade_start(grid), b - 1);
    auto edge_density = [&](std::size_t i) {
      const Real dw = w[i + 1] - w[i];
      return stiff_[i] * dw * dw / (r[i + 1] - r[i]);
    };
    const Real total = grad + pot_abs;
    Real frac = tail_estimate((r[a] + r[a + 1]) / 2, edge_density(a), (r[b] + r[b + 1]) / 2,
                              edge_density(b), r[N - 1], 0, total);
    if (pot_abs > 0) {
      std::vector<Real> cells(N);
      for (std::size_t i = 0; i < N; ++i) cells[i] = potential_[i] * w[i] * w[i] * mu_[i];
      frac += tail_fraction(grid, cells) * pot_abs / total;
    }
    check_tail(frac, "energy", tail_tol_);
  }
  return grad + wall_ * w[N - 1] * w[N - 1] + pot;
}

FunctionalValue DiscreteFunctional::value(std::span<const Real> w) const {
  const std::size_t N = w.size();
  const bool tail = smms_.geom.grid()->domain() == Domain::half_line;
  for (std::size_t i = 0; i < N; ++i)
    if (!(w[i] >= 0)) fail(ErrorKind::domain, "profile must be nonnegative");
  FunctionalValue out;
  out.energy = energy(w);

  Real abs0 = 0;
  std::vector<Real> t0(N);
  for (std::size_t i = 0; i < N; ++i) t0[i] = std::pow(w[i], ex_.q_leb) * mu_[i];
  for (Real x : t0) abs0 += x;
  out.omega0 = abs0;
  if (tail) check_tail(tail_fraction(*smms_.geom.grid(), t0), "omega_0", tail_tol_);
  if (!(out.omega0 > 0)) fail(ErrorKind::domain, "omega_0 vanishes");

  Real middle = 1;
  if (ex_.p_f != 0) {
    Real absk = 0;
    std::vector<Real> tk(N);
    for (std::size_t i = 0; i < N; ++i) {
      tk[i] = std::pow(w[i], ex_.p_leb) * v_pow_[i] * mu_[i];
      absk += tk[i];
    }
    out.omegak = absk;
    if (tail) check_tail(tail_fraction(*smms_.geom.grid(), tk), "omega_k", tail_tol_);
    if (!(out.omegak > 0)) fail(ErrorKind::domain, "omega_k vanishes");
    middle = std::pow(out.omegak, ex_.p_f);
  }
  out.qk = out.energy * middle / std::pow(out.omega0, ex_.q_f);
  return out;
}

std::vector<Real> DiscreteFunctional::apply_stiffness(std::span<const Real> w) const {
  const std::size_t N = w.size();
  std::vector<Real> out(N, 0);
  for (std::size_t e = 0; e + 1 < N; ++e) {
    const Real flux = stiff_[e] * (w[e + 1] - w[e]);
    out[e] -= flux;
    out[e + 1] += flux;
  }
  out[N - 1] += wall_ * w[N - 1];
  return out;
}

std::vector<Real> DiscreteFunctional::log_gradient(std::span<const Real> w,
                                                   const FunctionalValue& val) const {
  std::vector<Real> g = apply_stiffness(w);
  for (std::size_t i = 0; i < w.size(); ++i) {
    g[i] = 2 * (g[i] + potential_[i] * w[i] * mu_[i]) / val.energy;
    g[i] -= ex_.q_f * ex_.q_leb * std::pow(w[i], ex_.q_leb - 1) * mu_[i] / val.omega0;
    if (ex_.p_f != 0)
      g[i] += ex_.p_f * ex_.p_leb * std::pow(w[i], ex_.p_leb - 1) * v_pow_[i] * mu_[i] /
              val.omegak;
  }
  return g;
}

Real energy(const SMMS& smms, const RadialField& w, Real tail_tol) {
  // Any admissible k gives the same energy; pick one inside both branches.
  const Real k = smms.m >= 0 ? 1 : Real(0.5);
  return DiscreteFunctional(smms, k, tail_tol).energy(w.values());
}

Real energy_literal(const SMMS& smms, const RadialField& w, Real tail_tol) {
  const RadialField integrand = w * weighted_conformal_laplacian(smms, w) * pow(smms.v, smms.m);
  return integrate(smms.geom, integrand, "w L w", tail_tol).value;
}

FunctionalValue qk(const SMMS& smms, Real k, const RadialField& w, Real tail_tol) {
  require_same_grid(smms.v, w);
  return DiscreteFunctional(smms, k, tail_tol).value(w.values());
}

RadialField delta_rho(const SMMS& smms, const RadialField& u, const RadialField& h) {
  const Real m = smms.m;
  const Real n = smms.geom.n;
  const RadialField drift = (2 - m - n) * d_dr(log(u)) + m * d_dr(log(smms.v));
  return laplacian(smms.geom, h) + drift * d_dr(h) / square(smms.geom.a);
}

CwmFields cwm_fields(const SMMS& smms, const RadialField& u) {
  const WarpedGeometry& g = smms.geom;
  const Real m = smms.m;
  const Real n = g.n;
  validate_dimension(g.n, m);
  require_same_grid(g.f, u);
  if (u.min() <= 0) fail(ErrorKind::domain, "conformal factor u must be positive");
  const Real N2 = m + n - 2;

  CwmFields c;
  c.u = u;
  const RadialField xi = pow(u, -N2 / 2);
  c.R_fphi = (4 * (m + n - 1) / N2) * weighted_conformal_laplacian(smms, xi) / xi;

  const RadialField lu = log(u);
  const RadialField lv = log(smms.v);
  c.beta = lu - lv;
  const Eigen ric = ricci_eigenvalues(g);
  const Eigen hu = hessian_eigenvalues(g, lu);
  const Eigen hv = hessian_eigenvalues(g, lv);
  const RadialField dlu = delta_rho(smms, u, lu);
  c.ric_fphi_rad = ric.rad + N2 * hu.rad - m * hv.rad + N2 * grad_sq(g, lu) -
                   m * grad_sq(g, lv) + dlu;
  c.ric_fphi_tan = ric.tan + N2 * hu.tan - m * hv.tan + dlu;
  c.delta_rho_beta = delta_rho(smms, u, c.beta);
  c.R_fphi_trace = c.ric_fphi_rad + (n - 1) * c.ric_fphi_tan + m * c.delta_rho_beta;
  c.drho_weight = pow(u, 2 - m - n) * pow(smms.v, m);
  c.domega_weight = pow(u, -m - n) * pow(smms.v, m);
  c.route_discrepancy = sup_norm(c.R_fphi - c.R_fphi_trace, default_window(*g.grid()));
  return c;
}

Multipliers multipliers_integral(const SMMS& smms, Real k, const CwmFields& cwm,
                                 Real tail_tol) {
  const WarpedGeometry& g = smms.geom;
  const Real m = smms.m;
  const Real n = g.n;
  const Real N2 = m + n - 2;
  // With xi = u^{-(m+n-2)/2} one has R_fphi d rho = c' xi L xi v^m dvol, so
  // the numerator is an energy and needs no second differences.
  const RadialField xi = pow(cwm.u, -N2 / 2);
  const Real IR = (4 * (m + n - 1) / N2) * energy(smms, xi, tail_tol);
  const Real Om = integrate(g, cwm.domega_weight, "d omega", tail_tol).value;
  Multipliers out;
  out.lambda = (2 * m + k * (n - 2)) * IR / (N2 * n * k * Om);
  if (m != 0) {
    const Real Ik = integrate(g, pow(cwm.u / smms.v, k) * cwm.domega_weight,
                              "(u/v)^k d omega", tail_tol).value;
    out.mu = m * IR / (N2 * n * k * Ik);
  }
  return out;
}

Multipliers multipliers_integral(const SMMS& smms, Real k, const RadialField& u,
                                 Real tail_tol) {
  return multipliers_integral(smms, k, cwm_fields(smms, u), tail_tol);
}

namespace {

// mu u^{k-2} v^{-k}
RadialField mu_term(const SMMS& smms, Real k, const RadialField& u, Real mu) {
  return mu * pow(u, k - 2) * pow(smms.v, -k);
}

}  // namespace

RadialField el_residual_conformal(const SMMS& smms, Real k, const CwmFields& cwm,
                                  const Multipliers& mult) {
  const Real mn = smms.m + smms.geom.n;
  return cwm.R_fphi + 2 * (mn - k) * mu_term(smms, k, cwm.u, mult.mu) -
         mn * mult.lambda * pow(cwm.u, -2);
}

RadialField el_residual_measure(const SMMS& smms, Real k, const CwmFields& cwm,
                                const Multipliers& mult) {
  const Real n = smms.geom.n;
  return cwm.R_fphi - smms.m * cwm.delta_rho_beta +
         n * (2 - k) * mu_term(smms, k, cwm.u, mult.mu) - n * mult.lambda * pow(cwm.u, -2);
}

Eigen el_residual_metric(const SMMS& smms, Real k, const CwmFields& cwm,
                         const Multipliers& mult) {
  const RadialField shift =
      (2 - k) * mu_term(smms, k, cwm.u, mult.mu) - mult.lambda * pow(cwm.u, -2);
  return {cwm.ric_fphi_rad + shift, cwm.ric_fphi_tan + shift};
}

RadialField el_residual_conformal(const SMMS& smms, Real k, const RadialField& u,
                                  const Multipliers& mult) {
  return el_residual_conformal(smms, k, cwm_fields(smms, u), mult);
}

RadialField el_residual_measure(const SMMS& smms, Real k, const RadialField& u,
                                const Multipliers& mult) {
  return el_residual_measure(smms, k, cwm_fields(smms, u), mult);
}

Eigen el_residual_metric(const SMMS& smms, Real k, const RadialField& u,
                         const Multipliers& mult) {
  return el_residual_metric(smms, k, cwm_fields(smms, u), mult);
}

TractorNorms tractor_norms(const WarpedGeometry& geom, const RadialField& u,
                           const RadialField& v) {
  const Tractor Lu = split(geom, u);
  const Tractor Lv = split(geom, v);
  return {tmetric(Lu, Lu), tmetric(Lu, Lv), tmetric(Lv, Lv)};
}

TractorNorms constant_norms(const GridPtr& grid, Real uu, Real uv, Real vv) {
  return {RadialField::constant(grid, uu), RadialField::constant(grid, uv),
          RadialField::constant(grid, vv)};
}

MultiplierFields tractor_multipliers(const SMMS& smms, Real k, const RadialField& u,
                                     const TractorNorms& t) {
  if (k == 0) fail(ErrorKind::parameter, "k must be nonzero");
  const Real m = smms.m;
  const Real n = smms.geom.n;
  const Real N2 = m + n - 2;
  const RadialField& v = smms.v;
  const RadialField v2 = square(v);
  const RadialField u2 = square(u);
  const RadialField uv = u * v;
  MultiplierFields out;
  out.lambda = (-k * (m + n - 1) * N2 * v2 * t.uu + m * (m - 1) * (2 - k) * u2 * t.vv +
                2 * (k - 1) * m * N2 * uv * t.uv) /
               (N2 * k * v2);
  out.mu = (-m * N2 * uv * t.uv + m * (m - 1) * u2 * t.vv) /
           (N2 * k * pow(u, k) * pow(v, 2 - k));
  return out;
}

MultiplierFields tractor_multipliers(const SMMS& smms, Real k, const RadialField& u) {
  return tractor_multipliers(smms, k, u, tractor_norms(smms.geom, u, smms.v));
}

RadialField crit_identity_residual(const SMMS& smms, Real k, const RadialField& u,
                                   const TractorNorms& t, const Multipliers& mult) {
  const Real m = smms.m;
  const Real mn = m + smms.geom.n;
  const RadialField& v = smms.v;
  const RadialField v2 = square(v);
  return mn * mult.lambda * v2 - 2 * (mn - k) * mult.mu * pow(u, k) * pow(v, 2 - k) +
         mn * (mn - 1) * v2 * t.uu - 2 * m * (mn - 1) * u * v * t.uv +
         m * (m - 1) * square(u) * t.vv;
}

RadialField crit_identity_residual(const SMMS& smms, Real k, const RadialField& u,
                                   const Multipliers& mult) {
  return crit_identity_residual(smms, k, u, tractor_norms(smms.geom, u, smms.v), mult);
}

ClosedFormExtremal closed_form_extremal(const GnsParams& params, Branch branch, const GridPtr& grid) {
  validate_dimension(params.n, params.m);
  const Real N2 = params.m + params.n - 2;
  // With t = (m+n)/(m+n-2) the profile exponent 1/(t-1) equals (m+n-2)/2.
  const Real t = (params.m + params.n) / N2;
  if (std::fabs(1 / (t - 1) - N2 / 2) > 1e-12L * std::fabs(N2))
    fail(ErrorKind::parameter, "exponent bookkeeping failed");
  ClosedFormExtremal out;
  if (branch == Branch::sphere_like) {
    if (params.m < 0) fail(ErrorKind::parameter, "the (1+r^2) family needs m >= 0");
    out.u = RadialField::from(grid, [](Real r) { return 1 + r * r; });
  } else {
    if (params.m > -params.n - 2) fail(ErrorKind::parameter, "the (1-r^2) family needs m <= -n-2");
    if (grid->domain() != Domain::unit_ball || grid->scale() != 1)
      fail(ErrorKind::domain, "the (1-r^2) family lives on the unit ball");
    out.u = RadialField::from(grid, [](Real r) { return 1 - r * r; });
  }
  out.w = pow(out.u, -N2 / 2);
  return out;
}

}  // namespace gnsforge
