#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gnsforge/functional.hpp"

namespace gnsforge {

struct SolverOptions {
  int max_iters = 4000;
  /// Stop when the preconditioned dual norm of d log Q drops below this.
  Real grad_tol = 1e-8L;
  Real step0 = 1;
  Real backtrack_factor = 0.5L;
  /// Armijo sufficient-decrease constant.
  Real armijo = 1e-4L;
  unsigned seed = 1;
  Real tail_tol = kTailTol;
  /// Start from the closed-form extremal instead of the cold start.
  bool warm_start = false;

  void validate() const;
};

struct ResidualReport {
  Multipliers integral;
  /// Window means of the pointwise tractor multiplier fields.
  Multipliers tractor;
  /// sup of each residual over the default window, divided by the sup of
  /// its lambda u^{-2} term.
  Real conformal = 0, measure = 0, metric = 0;
};

struct MinimizeResult {
  RadialField w_star;
  Real sigma = 0;
  Real initial_q = 0;
  int iterations = 0;
  Real grad_norm = 0;
  bool converged = false;
  std::string message;
  /// Q after every accepted step, starting with the initial iterate.
  std::vector<Real> history;
  std::optional<ResidualReport> residuals;
  std::string residual_error;
};

/// Default initial iterate, times a small seeded smooth perturbation:
/// exp(-r^2/4) + 0.05 (1+r^2)^{-3(m+n-2)/4} on the half-line, a bump even
/// about the equator on the sphere, and (1-r^2)^{-(m+n-2)/2} on the ball.
RadialField cold_start(const SMMS& smms, Real k, unsigned seed);

/// Preconditioned descent for Q_k. log w is the free variable, or psi with
/// w = psi^2 when the measure exponent is negative.
MinimizeResult minimize(const SMMS& smms, Real k, const SolverOptions& opts = {});
MinimizeResult minimize(const SMMS& smms, Real k, const RadialField& w0,
                        const SolverOptions& opts = {});

/// Where the solver fixes a gauge (amplitude and dilation on flat space),
/// the part of the relative perturbation phi that keeps omega_0 and the mass
/// inside the half-mass radius fixed to first order. Identity otherwise.
RadialField gauge_slice_tangent(const SMMS& smms, Real k, const RadialField& w,
                                const RadialField& phi);

/// Residuals and multipliers at a profile w.
ResidualReport residual_report(const SMMS& smms, Real k, const RadialField& w,
                               Real tail_tol = kTailTol);

struct SweepRow {
  Real k = 0;
  std::optional<MinimizeResult> result;
  std::string error;
  ErrorKind error_kind = ErrorKind::parameter;
};

/// Independent minimize runs, concurrently across rows. The thread count is
/// capped by GNS_FORGE_THREADS when set.
std::vector<SweepRow> sweep(const SMMS& smms, const std::vector<Real>& ks,
                            const SolverOptions& opts = {});

}  // namespace gnsforge
