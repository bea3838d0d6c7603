#include <cmath>
#include <random>

#include "doctest.h"
#include "gnsforge/functional.hpp"

using namespace gnsforge;

namespace {

constexpr Real kCoarseTail = 1e-6L;

SMMS flat(int n, Real m, std::size_t N, Domain d = Domain::half_line) {
  auto g = make_geometry(Model::euclidean, n, make_grid(d, N, 1));
  return make_smms(g, RadialField::constant(g.grid(), 1), m);
}

RadialField field(const SMMS& s, const std::function<Real(Real)>& fn) {
  return RadialField::from(s.geom.grid(), fn);
}

RadialField one_plus_r2(const SMMS& s, Real e = 1) {
  return field(s, [e](Real r) { return std::pow(1 + r * r, e); });
}

// Closed forms for w = (1+r^2)^{-1} on flat R^3 with m = k = 1.
const Real kFlatEnergy = kPi * kPi / 2;
const Real kFlatSigma = 4 * std::pow(kPi * kPi / 4, Real(2) / 3);

}  // namespace

TEST_CASE("exponent bookkeeping") {
  const ExponentSet e = exponents({3, 1, 1});
  CHECK(e.q_leb == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(e.p_leb == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(e.theta == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(e.p_f == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(e.q_f == doctest::Approx(1.0).epsilon(1e-15));

  const ExponentSet y = exponents({3, 0, 2});
  CHECK(y.p_f == 0);
  CHECK(y.q_leb == doctest::Approx(6.0).epsilon(1e-15));

  const ExponentSet b = exponents({3, -6, 1});
  CHECK(std::fabs(b.p_leb - 1.6L) < 1e-15L);
  CHECK(std::fabs(b.q_leb - 1.2L) < 1e-15L);

  for (int n : {3, 4, 5})
    for (Real m : {0.5L, 1.0L, 2.5L, 7.0L})
      for (Real k : {0.5L, 1.0L, 2.0L}) {
        const ExponentSet x = exponents({n, m, k});
        const Real N = n;
        CHECK(std::fabs(N * k * (m + N - 2) + 2 * m * (m + N - k) -
                        (m + N) * (2 * m + k * (N - 2))) < 1e-12L);
        CHECK(std::fabs(1 / x.q_leb - x.theta * (0.5L - 1 / N) - (1 - x.theta) / x.p_leb) <
              1e-12L);
      }
  CHECK_THROWS_AS(exponents({4, -1, 1}), Error);
}

TEST_CASE("energy: closed forms and the literal cross-check") {
  auto sg = make_geometry(Model::sphere, 3, default_grid(Model::sphere, 1024));
  SMMS sphere = make_smms(sg, RadialField::constant(sg.grid(), 1), 0);
  const RadialField one = RadialField::constant(sg.grid(), 1);
  CHECK(energy(sphere, one) == doctest::Approx(1.5 * kPi * kPi).epsilon(1e-12));
  const FunctionalValue y = qk(sphere, 1, one);
  CHECK(y.qk == doctest::Approx(1.5 * kPi * kPi / std::cbrt(2 * kPi * kPi)).epsilon(1e-12));

  // A compact bump on flat space: the energy is the Dirichlet integral.
  SMMS ball = flat(3, 1, 2048, Domain::unit_ball);
  const RadialField bump = field(ball, [](Real r) { return std::pow(1 - r * r, 3); });
  // int_0^1 |6r(1-r^2)^2|^2 4 pi r^2 dr = 144 pi B(5/2, 5) / 2
  CHECK(energy(ball, bump) == doctest::Approx(144 * kPi * 128 / 15015).epsilon(1e-5));

  SMMS s = flat(3, 1, 8192);
  const RadialField w = one_plus_r2(s, -1);
  const Real ibp = energy(s, w), lit = energy_literal(s, w);
  CHECK(std::fabs(ibp - kFlatEnergy) / kFlatEnergy < 1e-6L);
  CHECK(std::fabs(ibp - lit) / ibp < 1e-6L);
}

TEST_CASE("Q_k on the flat closed-form extremal") {
  SMMS s2 = flat(3, 1, 2048), s4 = flat(3, 1, 4096);
  const Real q2 = qk(s2, 1, one_plus_r2(s2, -1), kCoarseTail).qk;
  const Real q4 = qk(s4, 1, one_plus_r2(s4, -1)).qk;
  CHECK(std::fabs(q2 - q4) / q4 < 1e-5L);
  CHECK(std::fabs(q4 - kFlatSigma) / kFlatSigma < 1e-5L);

  const RadialField w = one_plus_r2(s4, -1);
  for (Real c : {0.1L, 7.0L}) {
    const Real qc = qk(s4, 1, c * w).qk;
    CHECK(std::fabs(qc - q4) / q4 < 1e-10L);
  }
}

TEST_CASE("divergent integrals are named") {
  SMMS s = flat(3, 1, 1024);
  try {
    (void)qk(s, 1, one_plus_r2(s, -0.5L));
    FAIL("expected a divergence error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::divergence);
  }
}

TEST_CASE("conformal invariance of Q_k") {
  // The weight integrands transform pointwise; the energy only after an
  // integration by parts, so its discrete error is O(h^2).
  std::vector<Real> err;
  for (std::size_t N : {1024u, 2048u, 4096u}) {
    SMMS s = flat(3, 1, N);
    const RadialField w = one_plus_r2(s, -1);
    const RadialField sc = field(s, [](Real r) { return 0.3L * (1 + r) * std::exp(-r * r); });
    const SMMS t = conformal_rescale(s, sc);
    const RadialField wt = w * exp(sc * Real(-1));
    const FunctionalValue a = qk(s, 1, w, kCoarseTail), b = qk(t, 1, wt, kCoarseTail);
    CHECK(std::fabs(a.omega0 - b.omega0) / a.omega0 < 1e-12L);
    CHECK(std::fabs(a.omegak - b.omegak) / a.omegak < 1e-12L);
    err.push_back(std::fabs(a.qk - b.qk) / a.qk);
  }
  CHECK(err[2] < 1e-6L);
  const Real order = std::log2(err[1] / err[2]);
  CHECK(order > 1.8L);
  CHECK(order < 2.2L);
}

TEST_CASE("flat dilation invariance") {
  SMMS s = flat(3, 1, 4096);
  const Real q = qk(s, 1, one_plus_r2(s, -1)).qk;
  for (Real c : {0.5L, 2.0L}) {
    const RadialField wc = field(s, [c](Real r) { return 1 / (1 + c * c * r * r); });
    CHECK(std::fabs(qk(s, 1, wc).qk - q) / q < 1e-6L);
  }
}

TEST_CASE("cwm fields") {
  SMMS s = flat(3, 1, 4096);
  const RadialField u = one_plus_r2(s);
  const CwmFields c = cwm_fields(s, u);
  const RadialField exact = 48 * pow(u, -2) - 12 / u;
  CHECK(relative_sup(c.R_fphi - exact, exact) < 1e-6L);
  CHECK(relative_sup(c.R_fphi_trace - exact, exact) < 1e-6L);
  const RadialField drb = 4 * 3 * pow(u, -2) - 2 * 3 / u;
  CHECK(relative_sup(c.delta_rho_beta - drb, drb) < 1e-6L);
  CHECK(sup_norm(c.beta - log(u)) < 1e-15L);

  // Both routes converge to each other at second order.
  SMMS s1 = flat(3, 1, 1024), s2 = flat(3, 1, 2048);
  const Real d1 = cwm_fields(s1, one_plus_r2(s1)).route_discrepancy;
  const Real d2 = cwm_fields(s2, one_plus_r2(s2)).route_discrepancy;
  CHECK(std::log2(d1 / d2) > 1.8L);

  const RadialField v = one_plus_r2(s, 0.5L);
  SMMS sv = make_smms(s.geom, v, 1);
  CHECK(sup_norm(cwm_fields(sv, v).beta) == 0);

  auto sg = make_geometry(Model::sphere, 3, default_grid(Model::sphere, 512));
  SMMS sphere = make_smms(sg, RadialField::constant(sg.grid(), 1), 0);
  CHECK(sup_norm(cwm_fields(sphere, RadialField::constant(sg.grid(), 1)).R_fphi - 6) < 1e-9L);

  CHECK_THROWS_AS(cwm_fields(s, u - 2), Error);
}

TEST_CASE("multipliers and Euler-Lagrange residuals at the closed-form extremal") {
  SMMS s = flat(3, 1, 4096);
  const RadialField u = one_plus_r2(s);
  const CwmFields c = cwm_fields(s, u);
  const Multipliers m = multipliers_integral(s, 1, c);
  CHECK(std::fabs(m.lambda - 12) < 1e-4L);
  CHECK(std::fabs(m.mu - 2) < 1e-4L);

  const Multipliers exact{12, 2};
  const RadialField u2 = pow(u, -2);
  CHECK(relative_sup(el_residual_conformal(s, 1, c, exact), 4 * 12 * u2) < 1e-6L);
  CHECK(relative_sup(el_residual_measure(s, 1, c, exact), 3 * 12 * u2) < 1e-6L);
  const Eigen q = el_residual_metric(s, 1, c, exact);
  CHECK(relative_sup(q.rad, 12 * u2) < 1e-6L);
  CHECK(relative_sup(q.tan, 12 * u2) < 1e-6L);

  // Rescaling u by a constant is absorbed by the multipliers.
  const RadialField u3 = 3 * u;
  const CwmFields c3 = cwm_fields(s, u3);
  const Multipliers m3 = multipliers_integral(s, 1, c3);
  CHECK(relative_sup(el_residual_conformal(s, 1, c3, m3), 4 * m3.lambda * pow(u3, -2)) < 1e-5L);
}

TEST_CASE("residuals detect non-critical profiles") {
  SMMS s = flat(3, 1, 2048);
  const RadialField u = one_plus_r2(s, 1.1L);
  const CwmFields c = cwm_fields(s, u);
  const Multipliers m = multipliers_integral(s, 1, c, kCoarseTail);
  CHECK(sup_norm(el_residual_conformal(s, 1, c, m), default_window(*s.geom.grid())) >= 0.05L);

  const RadialField dd = one_plus_r2(s);
  const CwmFields cd = cwm_fields(s, dd);
  const Multipliers m2 = multipliers_integral(s, 2, cd, kCoarseTail);
  CHECK(relative_sup(el_residual_measure(s, 2, cd, m2), pow(dd, -2)) > 1e-2L);

  const Eigen q = el_residual_metric(s, 1, one_plus_r2(s, 2), Multipliers{12, 2});
  CHECK(sup_norm(q.rad - q.tan, default_window(*s.geom.grid())) > 1e-2L);
}

TEST_CASE("n kcsc - (m+n) kmu does not depend on lambda") {
  SMMS s = flat(4, 2.5L, 1024);
  const RadialField u = field(s, [](Real r) { return 1 + r * r + 0.2L * std::exp(-r * r); });
  const CwmFields c = cwm_fields(s, u);
  auto combo = [&](Real lambda) {
    const Multipliers m{lambda, 0.7L};
    return 4 * el_residual_conformal(s, 1.5L, c, m) - 6.5L * el_residual_measure(s, 1.5L, c, m);
  };
  const RadialField a = combo(1), b = combo(40);
  CHECK(sup_norm(a - b) < 1e-9L * sup_norm(a));
}

TEST_CASE("identity cases on the round sphere") {
  auto sg = make_geometry(Model::sphere, 3, default_grid(Model::sphere, 512));
  SMMS s = make_smms(sg, RadialField::constant(sg.grid(), 1), 0);
  const RadialField one = RadialField::constant(sg.grid(), 1);
  const Multipliers m = multipliers_integral(s, 1, one);
  CHECK(m.lambda == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(m.mu == 0);
  CHECK(sup_norm(el_residual_conformal(s, 1, one, m)) < 1e-8L);
  const Eigen q = el_residual_metric(s, 1, one, m);
  CHECK(sup_norm(q.rad) < 1e-8L);
  CHECK(sup_norm(q.tan) < 1e-8L);
  CHECK(sup_norm(crit_identity_residual(s, 1, one, m)) < 1e-8L);
}

TEST_CASE("tractor multipliers") {
  SMMS s = flat(3, 1, 4096);
  const RadialField u = one_plus_r2(s);
  const Window w = default_window(*s.geom.grid());
  const MultiplierFields f = tractor_multipliers(s, 1, u);
  CHECK(sup_norm(f.lambda - 12, w) < 1e-6L);
  CHECK(sup_norm(f.mu - 2, w) < 1e-6L);

  // v = (1-r^2)/2, u = (1+r^2)/2 on the unit ball: <Lu,Lv> = 0.
  auto bg = make_geometry(Model::euclidean, 3, make_grid(Domain::unit_ball, 2048, 1));
  const RadialField v = RadialField::from(bg.grid(), [](Real r) { return (1 - r * r) / 2; });
  const RadialField ub = RadialField::from(bg.grid(), [](Real r) { return (1 + r * r) / 2; });
  SMMS sb = make_smms(bg, v, 3);
  const MultiplierFields cf = tractor_multipliers(sb, 2, ub, constant_norms(bg.grid(), -1, 0, 1));
  CHECK(sup_norm(cf.lambda - 5) < 1e-12L);
  CHECK(sup_norm(cf.mu - 0.75L) < 1e-12L);
  const MultiplierFields nf = tractor_multipliers(sb, 2, ub);
  const Window wb = default_window(*bg.grid());
  CHECK(sup_norm(nf.lambda - 5, wb) < 1e-6L);
  CHECK(sup_norm(nf.mu - 0.75L, wb) < 1e-6L);

  CHECK_THROWS_AS(tractor_multipliers(s, 0, u), Error);
}

TEST_CASE("criticality identity") {
  SMMS s = flat(3, 1, 1024);
  const RadialField u = one_plus_r2(s);
  const RadialField closed =
      crit_identity_residual(s, 1, u, constant_norms(s.geom.grid(), -4, -2, 0), {12, 2});
  CHECK(sup_norm(closed) < 1e-10L);
  const Window w = default_window(*s.geom.grid());
  CHECK(sup_norm(crit_identity_residual(s, 1, u, {12, 2}), w) < 1e-6L);

  // Linear response to a perturbation of u.
  const RadialField bump = field(s, [](Real r) { return std::exp(-r * r); });
  const Real r1 = sup_norm(crit_identity_residual(s, 1, u + 1e-3L * bump, {12, 2}), w);
  const Real r2 = sup_norm(crit_identity_residual(s, 1, u + 2e-3L * bump, {12, 2}), w);
  CHECK(r1 > 1e-4L);
  CHECK(r2 / r1 == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("closed-form extremals") {
  auto grid = make_grid(Domain::half_line, 256, 1);
  const ClosedFormExtremal a = closed_form_extremal({3, 1, 1}, Branch::sphere_like, grid);
  CHECK(sup_norm(a.w - RadialField::from(grid, [](Real r) { return 1 / (1 + r * r); })) < 1e-15L);
  const ClosedFormExtremal c = closed_form_extremal({4, 0, 1}, Branch::sphere_like, grid);
  CHECK(sup_norm(c.w - RadialField::from(grid, [](Real r) { return 1 / (1 + r * r); })) < 1e-15L);

  auto ball = make_grid(Domain::unit_ball, 256, 1);
  const ClosedFormExtremal b = closed_form_extremal({3, -6, 1}, Branch::ball_like, ball);
  CHECK(sup_norm(b.w - RadialField::from(ball, [](Real r) { return std::pow(1 - r * r, 2.5L); })) <
        1e-15L);

  CHECK_THROWS_AS(closed_form_extremal({3, -6, 1}, Branch::sphere_like, ball), Error);
  CHECK_THROWS_AS(closed_form_extremal({3, 1, 1}, Branch::ball_like, ball), Error);
  CHECK_THROWS_AS(closed_form_extremal({3, -6, 1}, Branch::ball_like, grid), Error);
}
