#pragma once

#include <string>

#include "gnsforge/functional.hpp"
#include "gnsforge/tractor.hpp"

namespace gnsforge {

/// Divergence of the radial vector field y dr on an arclength geometry:
/// f^{1-n} (f^{n-1} y)'.
RadialField divergence(const WarpedGeometry& geom, const RadialField& y);

/// sup |L[hat](e^{-(m+n-2)s/2} w) - e^{-(m+n+2)s/2} L w| relative to the sup
/// of the second term, over the default window.
Real covariance_check(const SMMS& smms, const RadialField& s, const RadialField& w);

/// Residuals of the three tractor expressions for the weighted curvature of
/// (u^{-2} g, (v/u)^m dvol). The first compares trace-free eigenvalues of
/// Ric_{f,phi}^m with (uv)^{-1} times the metric slot of
/// (m+n-2) v grad Lu - m u grad Lv.
struct SmmsTractorResiduals {
  RadialField res1_rad, res1_tan, res2, res3;
};

SmmsTractorResiduals smms_tractor_check(const SMMS& smms, const RadialField& u);

/// Left minus right side of the divergence identity
///   u^{n-2} div(u^{2-n} grad <Lu,Lv>) - v^{n-1}/(2u) div(v^{2-n} grad |Lu|^2)
///     = -(v/u) |grad Lu|^2.
/// Throws a precondition error unless Lv is parallel to within tol.
struct ObataResidual {
  RadialField residual;
  RadialField rhs;
};

ObataResidual obata_identity_residual(const WarpedGeometry& geom, const RadialField& u,
                                      const RadialField& v, Real parallel_tol = 1e-6L);

/// Tensorial form on an Einstein background Ric = (n-1) lambda g, norms in g:
///   |Ric(u^{-2} g)_0|^2 / (n-2)^2
///     = (1/n) u^{n-3} div(u^{2-n} grad(Lap u + n lambda u))
///       - Lap R[u^{-2} g] / (2n(n-1) u^2).
RadialField obata_tensorial_residual(const WarpedGeometry& geom, Real lambda_e,
                                     const RadialField& u, Real einstein_tol = 1e-8L);

enum class Trichotomy { ratio_constant, k1_scalar_flat, k2_orthogonal, none };

const char* to_string(Trichotomy t);

struct TrichotomyReport {
  /// a (u/v)^2 + 2 b (u/v) - c with the constants below.
  Real a = 0, b = 0, c = 0;
  Real quad_residual = 0;
  Trichotomy classification = Trichotomy::none;
  /// How many of the three cases matched; more than one is reported as none.
  int matches = 0;
  Real lambda = 0;
  /// Window means of |Lu|^2, <Lu,Lv>, |Lv|^2 and their largest deviation.
  Real lu_sq = 0, lu_lv = 0, lv_sq = 0, norm_spread = 0;
  Real parallel_u = 0, parallel_v = 0;
  /// sup |u/v - mean| / mean.
  Real ratio_variation = 0;
  std::string note;
};

TrichotomyReport qe_trichotomy(const SMMS& smms, Real k, const RadialField& u,
                               Real tol = 1e-6L);

struct VRigidReport {
  RadialField norm_res1, norm_res2;
  /// Integral of -(v/u)|grad Lu|^2 - C u^{m+n-2} v^{-m} div(u^{k-m-n} v^{m-k} X)
  /// against u^{2-m-n} v^m (u/v)^{1-k} dvol, X = v grad u - u grad v.
  Real divergence_integral = 0;
  Real tail_fraction = 0;
};

VRigidReport v_rigid_check(const SMMS& smms, Real k, const RadialField& u,
                           const Multipliers& mult, Real flat_tol = 1e-6L);

}  // namespace gnsforge
