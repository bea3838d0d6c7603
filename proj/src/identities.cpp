#include "gnsforge/identities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gnsforge {

namespace {

void require_arclength(const WarpedGeometry& geom, const char* what) {
  if (!geom.arclength())
    fail(ErrorKind::domain, std::string(what) + " needs an arclength radial coordinate");
}

Real window_mean(const RadialField& f, const Window& w) {
  Real s = 0;
  for (std::size_t i = w.lo; i < w.hi; ++i) s += f[i];
  return s / static_cast<Real>(w.hi - w.lo);
}

// Trace-free eigenvalues of a radial symmetric tensor.
Eigen trace_free(const Eigen& e, int n) {
  const RadialField t = e.trace(n) / static_cast<Real>(n);
  return {e.rad - t, e.tan - t};
}

}  // namespace

RadialField divergence(const WarpedGeometry& geom, const RadialField& y) {
  require_arclength(geom, "divergence");
  return d_dr(y) + static_cast<Real>(geom.n - 1) * (geom.df / geom.f) * y;
}

Real covariance_check(const SMMS& smms, const RadialField& s, const RadialField& w) {
  const Real N2 = smms.m + smms.geom.n - 2;
  const SMMS hat = conformal_rescale(smms, s);
  const RadialField lhs = weighted_conformal_laplacian(hat, exp(s * (-N2 / 2)) * w);
  const RadialField rhs = exp(s * (-(N2 + 4) / 2)) * weighted_conformal_laplacian(smms, w);
  return relative_sup(lhs - rhs, rhs);
}

SmmsTractorResiduals smms_tractor_check(const SMMS& smms, const RadialField& u) {
  const WarpedGeometry& g = smms.geom;
  require_arclength(g, "smms_tractor_check");
  const Real m = smms.m;
  const Real n = g.n;
  const RadialField& v = smms.v;
  const CwmFields c = cwm_fields(smms, u);
  const TractorNorms t = tractor_norms(g, u, v);

  const TractorDerivative du = tderiv(g, split(g, u));
  const TractorDerivative dv = tderiv(g, split(g, v));
  const RadialField uv = u * v;
  const Eigen rhs1 = trace_free(
      {((m + n - 2) * v * du.radial.omega_r - m * u * dv.radial.omega_r) / uv,
       ((m + n - 2) * v * du.tangential_coeff - m * u * dv.tangential_coeff) / uv},
      g.n);
  const Eigen lhs1 = trace_free({c.ric_fphi_rad, c.ric_fphi_tan}, g.n);

  SmmsTractorResiduals out;
  out.res1_rad = lhs1.rad - rhs1.rad;
  out.res1_tan = lhs1.tan - rhs1.tan;
  out.res2 = c.R_fphi - m * c.delta_rho_beta -
             (-(m + n - 1) * n * t.uu / square(u) + m * n * t.uv / uv);
  out.res3 = c.R_fphi - (m + n) * c.delta_rho_beta -
             (-(m + n - 2) * n * t.uv / uv + (m - 1) * n * t.vv / square(v));
  return out;
}

ObataResidual obata_identity_residual(const WarpedGeometry& geom, const RadialField& u,
                                      const RadialField& v, Real parallel_tol) {
  require_arclength(geom, "obata_identity_residual");
  const Tractor Lv = split(geom, v);
  const Real pres = parallel_residual(geom, Lv);
  if (pres > parallel_tol)
    fail(ErrorKind::precondition,
         "Lv is not parallel (residual " + std::to_string(static_cast<double>(pres)) + ")");
  const Tractor Lu = split(geom, u);
  const Real n = geom.n;
  const RadialField uv = tmetric(Lu, Lv);
  const RadialField uu = tmetric(Lu, Lu);
  const RadialField lhs =
      pow(u, n - 2) * divergence(geom, pow(u, 2 - n) * d_dr(uv)) -
      pow(v, n - 1) / (2 * u) * divergence(geom, pow(v, 2 - n) * d_dr(uu));
  ObataResidual out;
  out.rhs = -(v / u) * grad_norm_sq(geom, Lu);
  out.residual = lhs - out.rhs;
  return out;
}

RadialField obata_tensorial_residual(const WarpedGeometry& geom, Real lambda_e,
                                     const RadialField& u, Real einstein_tol) {
  require_arclength(geom, "obata_tensorial_residual");
  const Real n = geom.n;
  const Eigen ric = ricci_eigenvalues(geom);
  const Real target = (n - 1) * lambda_e;
  if (sup_norm(ric.rad - target) > einstein_tol || sup_norm(ric.tan - target) > einstein_tol)
    fail(ErrorKind::precondition, "background is not Einstein with the given constant");

  const Eigen ric0 = trace_free(conformal_ricci(geom, u), geom.n);
  const RadialField lhs =
      (square(ric0.rad) + (n - 1) * square(ric0.tan)) / ((n - 2) * (n - 2));
  const RadialField q = laplacian(geom, u) + n * lambda_e * u;
  const RadialField Rhat = conformal_scalar_curvature(geom, u);
  const RadialField rhs = pow(u, n - 3) * divergence(geom, pow(u, 2 - n) * d_dr(q)) / n -
                          laplacian(geom, Rhat) / (2 * n * (n - 1) * square(u));
  return lhs - rhs;
}

const char* to_string(Trichotomy t) {
  switch (t) {
    case Trichotomy::ratio_constant: return "ratio_constant";
    case Trichotomy::k1_scalar_flat: return "k1_scalar_flat";
    case Trichotomy::k2_orthogonal: return "k2_orthogonal";
    case Trichotomy::none: return "none";
  }
  return "none";
}

TrichotomyReport qe_trichotomy(const SMMS& smms, Real k, const RadialField& u, Real tol) {
  const WarpedGeometry& g = smms.geom;
  require_arclength(g, "qe_trichotomy");
  const Real m = smms.m;
  const Real n = g.n;
  const Window w = default_window(*g.grid());
  TrichotomyReport rep;

  rep.parallel_u = parallel_residual(g, split(g, u));
  rep.parallel_v = parallel_residual(g, split(g, smms.v));
  if (rep.parallel_v > tol) rep.note += "Lv not parallel; ";
  if (rep.parallel_u > tol) rep.note += "Lu not parallel; ";

  const TractorNorms t = tractor_norms(g, u, smms.v);
  rep.lu_sq = window_mean(t.uu, w);
  rep.lu_lv = window_mean(t.uv, w);
  rep.lv_sq = window_mean(t.vv, w);
  rep.norm_spread = std::max({sup_norm(t.uu - rep.lu_sq, w), sup_norm(t.uv - rep.lu_lv, w),
                              sup_norm(t.vv - rep.lv_sq, w)});
  if (rep.norm_spread > tol) rep.note += "inner products not constant; ";

  rep.lambda = window_mean(tractor_multipliers(smms, k, u, t).lambda, w);
  rep.a = m * (m - 1) * (2 - k) * rep.lv_sq;
  rep.b = m * (m + n - 2) * (k - 1) * rep.lu_lv;
  rep.c = (m + n - 2) * k * (rep.lambda + (m + n - 1) * rep.lu_sq);

  const RadialField x = u / smms.v;
  rep.quad_residual = sup_norm(rep.a * square(x) + 2 * rep.b * x - rep.c, w);
  const Real xm = window_mean(x, w);
  rep.ratio_variation = sup_norm(x - xm, w) / std::fabs(xm);

  const bool ratio = rep.ratio_variation <= tol;
  const bool k1 = std::fabs(k - 1) <= tol && std::fabs(rep.lv_sq) <= tol;
  const bool k2 = std::fabs(k - 2) <= tol && std::fabs(rep.lu_lv) <= tol;
  rep.matches = int(ratio) + int(k1) + int(k2);
  const Real quad_scale = 1 + std::fabs((m + n - 2) * k * rep.lambda);
  if (rep.matches == 1 && rep.quad_residual <= tol * quad_scale)
    rep.classification = ratio ? Trichotomy::ratio_constant
                         : k1  ? Trichotomy::k1_scalar_flat
                               : Trichotomy::k2_orthogonal;
  else if (rep.matches > 1)
    rep.note += "several cases matched; ";
  else if (rep.matches == 1)
    rep.note += "quadratic relation fails; ";
  return rep;
}

VRigidReport v_rigid_check(const SMMS& smms, Real k, const RadialField& u,
                           const Multipliers& mult, Real flat_tol) {
  const WarpedGeometry& g = smms.geom;
  require_arclength(g, "v_rigid_check");
  const Real m = smms.m;
  const Real n = g.n;
  const RadialField& v = smms.v;
  const Window w = default_window(*g.grid());
  const Eigen ric = conformal_ricci(g, v);
  if (sup_norm(ric.rad, w) > flat_tol || sup_norm(ric.tan, w) > flat_tol)
    fail(ErrorKind::precondition, "v^{-2} g is not Ricci flat");
  if (m == 0) fail(ErrorKind::parameter, "the measure variation needs m != 0");

  const TractorNorms t = tractor_norms(g, u, v);
  const RadialField x = u / v;
  VRigidReport rep;
  rep.norm_res1 = -2 * (k - 1) * mult.mu * pow(x, k) - mult.lambda - (m + n - 1) * t.uu;
  rep.norm_res2 = -k * mult.mu * pow(x, k - 1) - m * t.uv;

  const Real C = k * (k - 1) * mult.mu / (m * (m + n - 1));
  const RadialField X = v * d_dr(u) - u * d_dr(v);
  const RadialField div_term =
      C * pow(u, m + n - 2) * pow(v, -m) * divergence(g, pow(u, k - m - n) * pow(v, m - k) * X);
  const RadialField lhs = -(v / u) * grad_norm_sq(g, split(g, u));
  const RadialField weight = pow(u, 2 - m - n) * pow(v, m) * pow(x, 1 - k);
  const Integral I = integrate(g, (lhs - div_term) * weight, "divergence identity",
                               std::numeric_limits<Real>::infinity());
  rep.divergence_integral = I.value;
  rep.tail_fraction = I.tail_fraction;
  return rep;
}

}  // namespace gnsforge
