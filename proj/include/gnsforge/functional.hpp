#pragma once

#include <vector>

#include "gnsforge/geometry.hpp"
#include "gnsforge/tractor.hpp"

namespace gnsforge {

/// Exponent bookkeeping for the conformal GNS quotient
///   Q_k(w) = E(w) * omega_k(w)^p_f / omega_0(w)^q_f,
///   omega_0 = int w^q_leb v^m,  omega_k = int w^p_leb v^{m-k},
/// and for the flat inequality |w|_q <= C |grad w|_2^theta |w|_p^{1-theta}
/// with C = sigma^const_power.
struct ExponentSet {
  Real p_f = 0;
  Real q_f = 0;
  Real p_leb = 0;
  Real q_leb = 0;
  Real theta = 0;
  Real const_power = 0;
};

ExponentSet exponents(const GnsParams& params);

struct FunctionalValue {
  Real energy = 0;
  Real omega0 = 0;
  /// Left at zero when p_f = 0: the middle factor of Q_k is then 1.
  Real omegak = 0;
  Real qk = 0;
};

/// Q_k on a fixed SMMS, discretized once. The Dirichlet energy uses a
/// staggered (edge-based) form so that it is a positive quadratic form in the
/// nodal values; all three integrals share the same nodal measure.
class DiscreteFunctional {
 public:
  DiscreteFunctional(const SMMS& smms, Real k, Real tail_tol = kTailTol);

  const SMMS& smms() const { return smms_; }
  Real k() const { return k_; }
  const ExponentSet& ex() const { return ex_; }
  std::size_t size() const { return mu_.size(); }

  /// Nodal weights omega_{n-1} * quad_weight * a f^{n-1} v^m.
  std::span<const Real> measure() const { return mu_; }
  /// Edge weights of the gradient term; edge i joins nodes i and i+1.
  std::span<const Real> stiffness() const { return stiff_; }
  /// Weight of the Dirichlet closure w = 0 at the outer wall (unit_ball only).
  Real wall() const { return wall_; }
  /// c(m,n) R_phi^m at the nodes.
  std::span<const Real> potential() const { return potential_; }

  /// Energy with the tail test applied on the half-line.
  Real energy(std::span<const Real> w) const;
  FunctionalValue value(std::span<const Real> w) const;
  /// d log Q_k / d w_i.
  std::vector<Real> log_gradient(std::span<const Real> w, const FunctionalValue& val) const;
  /// (K w)_i where E(w) = w.K w + sum potential w^2 measure.
  std::vector<Real> apply_stiffness(std::span<const Real> w) const;

 private:
  SMMS smms_;
  Real k_;
  ExponentSet ex_;
  std::vector<Real> mu_, stiff_, potential_, v_pow_;  // v_pow_ = v^{-k}
  Real wall_ = 0;
  Real tail_tol_;
};

/// Integrated-by-parts energy int (|grad w|^2 + c R_phi^m w^2) v^m dvol.
Real energy(const SMMS& smms, const RadialField& w, Real tail_tol = kTailTol);
/// Literal form int w L_phi^m w v^m dvol.
Real energy_literal(const SMMS& smms, const RadialField& w, Real tail_tol = kTailTol);
FunctionalValue qk(const SMMS& smms, Real k, const RadialField& w, Real tail_tol = kTailTol);

/// Quantities attached to the conformal factor u, with f = (m+n-2) log u and
/// phi = -m log v.
struct CwmFields {
  RadialField u;
  RadialField beta;
  /// Scalar curvature, covariant route (stored value).
  RadialField R_fphi;
  /// Trace of the tensor plus m Delta_rho beta.
  RadialField R_fphi_trace;
  RadialField ric_fphi_rad, ric_fphi_tan;
  RadialField delta_rho_beta;
  RadialField drho_weight, domega_weight;
  /// sup |R_fphi - R_fphi_trace| over the default window.
  Real route_discrepancy = 0;
};

CwmFields cwm_fields(const SMMS& smms, const RadialField& u);

/// Laplacian of the measure u^{2-m-n} v^m dvol.
RadialField delta_rho(const SMMS& smms, const RadialField& u, const RadialField& h);

struct Multipliers {
  Real lambda = 0;
  Real mu = 0;
};

Multipliers multipliers_integral(const SMMS& smms, Real k, const RadialField& u,
                                 Real tail_tol = kTailTol);
Multipliers multipliers_integral(const SMMS& smms, Real k, const CwmFields& cwm,
                                 Real tail_tol = kTailTol);

RadialField el_residual_conformal(const SMMS& smms, Real k, const CwmFields& cwm,
                                  const Multipliers& mult);
RadialField el_residual_measure(const SMMS& smms, Real k, const CwmFields& cwm,
                                const Multipliers& mult);
Eigen el_residual_metric(const SMMS& smms, Real k, const CwmFields& cwm,
                         const Multipliers& mult);

RadialField el_residual_conformal(const SMMS& smms, Real k, const RadialField& u,
                                  const Multipliers& mult);
RadialField el_residual_measure(const SMMS& smms, Real k, const RadialField& u,
                                const Multipliers& mult);
Eigen el_residual_metric(const SMMS& smms, Real k, const RadialField& u,
                         const Multipliers& mult);

/// |Lu|^2, <Lu, Lv>, |Lv|^2 as fields.
struct TractorNorms {
  RadialField uu, uv, vv;
};

TractorNorms tractor_norms(const WarpedGeometry& geom, const RadialField& u,
                           const RadialField& v);
/// Constant norms, e.g. from the closed-form quadratic backend.
TractorNorms constant_norms(const GridPtr& grid, Real uu, Real uv, Real vv);

struct MultiplierFields {
  RadialField lambda;
  RadialField mu;
};

/// lambda and mu solved pointwise from the tractor expressions.
MultiplierFields tractor_multipliers(const SMMS& smms, Real k, const RadialField& u);
MultiplierFields tractor_multipliers(const SMMS& smms, Real k, const RadialField& u,
                                     const TractorNorms& norms);

RadialField crit_identity_residual(const SMMS& smms, Real k, const RadialField& u,
                                   const Multipliers& mult);
RadialField crit_identity_residual(const SMMS& smms, Real k, const RadialField& u,
                                   const TractorNorms& norms, const Multipliers& mult);

enum class Branch { sphere_like, ball_like };

struct ClosedFormExtremal {
  RadialField u;
  RadialField w;
};

/// u = 1 + r^2 (m >= 0) or u = 1 - r^2 on the unit ball (m <= -n-2), and
/// w = u^{-(m+n-2)/2}.
ClosedFormExtremal closed_form_extremal(const GnsParams& params, Branch branch, const GridPtr& grid);

}  // namespace gnsforge
