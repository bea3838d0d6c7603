#include "gnsforge/solver.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>

#include "gnsforge/kernels.hpp"

namespace gnsforge {

void SolverOptions::validate() const {
  if (max_iters < 1) fail(ErrorKind::parameter, "max_iters must be at least 1");
  if (!(backtrack_factor > 0 && backtrack_factor < 1))
    fail(ErrorKind::parameter, "backtrack_factor must lie in (0, 1)");
  if (!(step0 > 0)) fail(ErrorKind::parameter, "step0 must be positive");
  if (!(grad_tol >= 0)) fail(ErrorKind::parameter, "grad_tol must be nonnegative");
  if (!(armijo > 0 && armijo < 1)) fail(ErrorKind::parameter, "armijo must lie in (0, 1)");
}

RadialField cold_start(const SMMS& smms, Real k, unsigned seed) {
  const GridPtr& grid = smms.grid();
  GnsParams{smms.geom.n, smms.m, k}.validate();
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::array<Real, 4> a{};
  for (Real& x : a) x = coef(gen);
  auto wiggle = [&](Real r) {
    Real s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * std::cos((j + 1) * std::atan(r));
    return 1 + Real(0.02) * s;
  };
  if (smms.m < 0) {
    // A Dirichlet bump, vanishing linearly at the wall in the solver chart.
    const Real R = grid->outer_radius();
    const Real beta = -(smms.m + smms.geom.n - 2) / 2;
    return RadialField::from(grid, [&](Real r) {
      return std::pow((1 - (r / R) * (r / R)) * wiggle(r), beta);
    });
  }
  if (grid->domain() == Domain::pole_to_pole) {
    // Even about the equator: the conformal motions of the round sphere move
    // mass towards one pole and stay out of reach of symmetric iterates.
    const Real R = grid->outer_radius();
    return RadialField::from(grid, [&](Real r) {
      const Real x = r - R / 2;
      Real s = 0;
      for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * std::cos(2 * (j + 1) * kPi * r / R);
      return std::exp(-x * x / 2) * (1 + Real(0.02) * s);
    });
  }
  const Real decay = -3 * (smms.m + smms.geom.n - 2) / 4;
  return RadialField::from(grid, [&](Real r) {
    return (std::exp(-r * r / 4) + Real(0.05) * std::pow(1 + r * r, decay)) * wiggle(r);
  });
}

namespace {

// Q is dilation invariant on flat space with constant v, for profiles
// supported in the ball as well.
bool has_dilation_mode(const SMMS& smms) {
  const Domain d = smms.grid()->domain();
  if (smms.geom.model != Model::euclidean || d == Domain::pole_to_pole) return false;
  if (d == Domain::unit_ball && smms.m >= 0) return false;
  return smms.m == 0 || smms.v.max() == smms.v.min();
}

// The free variable x is log w, or psi with w = psi^beta on the ball branch.
// There beta = -(m+n-2)/2 makes the expected extremal linear in psi at the wall.
struct Chart {
  Real beta = 0;  // 0 selects log w
  bool power() const { return beta != 0; }
  Real w(Real x) const { return power() ? std::pow(std::fabs(x), beta) : std::exp(x); }
  Real x(Real w) const { return power() ? std::pow(w, 1 / beta) : std::log(w); }
  /// dw/dx
  Real jac(Real x, Real w) const {
    return power() ? beta * std::pow(std::fabs(x), beta - 1) * (x < 0 ? -1 : 1) : w;
  }
  /// d^2 (w^p) / dx^2
  Real curv(Real p, Real x, Real w) const {
    if (!power()) return p * p * std::pow(w, p);
    const Real e = beta * p;
    return e * (e - 1) * std::pow(std::fabs(x), e - 2);
  }
  std::vector<Real> to_w(std::span<const Real> xs) const {
    std::vector<Real> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = w(xs[i]);
    return out;
  }
  std::vector<Real> from_w(std::span<const Real> ws) const {
    std::vector<Real> out(ws.size());
    for (std::size_t i = 0; i < ws.size(); ++i) out[i] = x(ws[i]);
    return out;
  }
};

// Tridiagonal approximation of the Hessian of log Q in the chart: the
// Gauss-Newton energy block plus the convex parts of the two Lebesgue terms.
void preconditioner(const DiscreteFunctional& F, const Chart& chart, std::span<const Real> x,
                    std::span<const Real> w, const FunctionalValue& val,
                    std::vector<Real>& diag, std::vector<Real>& off) {
  const std::size_t N = w.size();
  const ExponentSet& ex = F.ex();
  const auto stiff = F.stiffness();
  const auto mu = F.measure();
  const auto pot = F.potential();
  const std::span<const Real> v = F.smms().v.values();
  diag.assign(N, 0);
  off.assign(N - 1, 0);
  // dw/dx
  std::vector<Real> J(N);
  for (std::size_t i = 0; i < N; ++i) J[i] = chart.jac(x[i], w[i]);
  const Real e2 = 2 / val.energy;
  for (std::size_t i = 0; i + 1 < N; ++i) {
    diag[i] += e2 * stiff[i] * J[i] * J[i];
    diag[i + 1] += e2 * stiff[i] * J[i + 1] * J[i + 1];
    off[i] = -e2 * stiff[i] * J[i] * J[i + 1];
  }
  diag[N - 1] += e2 * F.wall() * J[N - 1] * J[N - 1];

  auto curvature = [&](Real p, std::size_t i) { return chart.curv(p, x[i], w[i]); };
  const Real c0 = std::max(-ex.q_f, Real(0));
  const Real ck = std::max(ex.p_f, Real(0));
  Real scale = 0;
  for (std::size_t i = 0; i < N; ++i) {
    diag[i] += e2 * std::max(pot[i], Real(0)) * mu[i] * J[i] * J[i];
    if (c0 > 0) diag[i] += c0 * std::max(curvature(ex.q_leb, i), Real(0)) * mu[i] / val.omega0;
    if (ck > 0 && ex.p_f != 0)
      diag[i] += ck * std::max(curvature(ex.p_leb, i), Real(0)) * std::pow(v[i], -F.k()) *
                 mu[i] / val.omegak;
    scale = std::max(scale, diag[i]);
  }
  // Rows far out in the tail can be negligibly small; keep the system regular.
  const Real floor = scale * 1e-14L;
  for (Real& d : diag) d = std::max(d, floor);
}

Real dot(std::span<const Real> a, std::span<const Real> b) {
  Real s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Rows of the linearized gauge constraints in the log w chart: omega_0 and
// the part of omega_0 inside the current half-mass radius stay fixed.
std::array<std::vector<Real>, 2> gauge_rows(std::span<const Real> w, std::span<const Real> mu,
                                            Real q) {
  const std::size_t N = w.size();
  std::array<std::vector<Real>, 2> c{std::vector<Real>(N), std::vector<Real>(N, 0)};
  Real total = 0;
  for (std::size_t i = 0; i < N; ++i) {
    c[0][i] = std::pow(w[i], q) * mu[i];
    total += c[0][i];
  }
  Real acc = 0;
  for (std::size_t i = 0; i < N && acc < total / 2; ++i) {
    c[1][i] = c[0][i];
    acc += c[0][i];
  }
  return c;
}

// Solves A d = -g subject to c_j . d = 0 through the 2x2 Schur complement.
void constrained_direction(std::span<const Real> diag, std::span<const Real> off,
                           std::span<const Real> g, const std::array<std::vector<Real>, 2>& c,
                           std::vector<Real>& d) {
  const std::size_t N = g.size();
  auto solve = [&](std::vector<Real> rhs) {
    std::vector<Real> dg(diag.begin(), diag.end());
    kernels::solve_tridiagonal(dg, off, rhs);
    return rhs;
  };
  d.assign(g.begin(), g.end());
  for (Real& x : d) x = -x;
  d = solve(std::move(d));
  const std::vector<Real> z0 = solve(c[0]), z1 = solve(c[1]);
  const Real m00 = dot(c[0], z0), m01 = dot(c[0], z1), m11 = dot(c[1], z1);
  const Real b0 = dot(c[0], d), b1 = dot(c[1], d);
  const Real det = m00 * m11 - m01 * m01;
  if (!(std::fabs(det) > 0)) return;
  const Real l0 = (b0 * m11 - b1 * m01) / det;
  const Real l1 = (b1 * m00 - b0 * m01) / det;
  for (std::size_t i = 0; i < N; ++i) d[i] -= l0 * z0[i] + l1 * z1[i];
}

}  // namespace

RadialField gauge_slice_tangent(const SMMS& smms, Real k, const RadialField& w,
                                const RadialField& phi) {
  require_same_grid(w, phi);
  if (!has_dilation_mode(smms)) return phi;
  const DiscreteFunctional F(smms, k, std::numeric_limits<Real>::infinity());
  const std::size_t N = w.size();
  const auto r = smms.grid()->r();
  const auto c = gauge_rows(w.values(), F.measure(), F.ex().q_leb);
  std::vector<Real> one(N, 1), t(N);
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1, hi = i + 1 == N ? N - 1 : i + 1;
    t[i] = r[i] * std::log(w[hi] / w[lo]) / (r[hi] - r[lo]);
  }
  // phi - a - b t annihilated by both constraint rows.
  const Real m00 = dot(c[0], one), m01 = dot(c[0], t), m10 = dot(c[1], one), m11 = dot(c[1], t);
  const Real f0 = dot(c[0], phi.values()), f1 = dot(c[1], phi.values());
  const Real det = m00 * m11 - m01 * m10;
  const Real a = (f0 * m11 - f1 * m01) / det;
  const Real b = (f1 * m00 - f0 * m10) / det;
  RadialField out = phi;
  for (std::size_t i = 0; i < N; ++i) out[i] -= a + b * t[i];
  return out;
}

ResidualReport residual_report(const SMMS& smms, Real k, const RadialField& w, Real tail_tol) {
  const Real N2 = smms.m + smms.geom.n - 2;
  const Real n = smms.geom.n;
  const RadialField u = pow(w, -2 / N2);
  const CwmFields c = cwm_fields(smms, u);
  ResidualReport rep;
  rep.integral = multipliers_integral(smms, k, c, tail_tol);
  const MultiplierFields tf = tractor_multipliers(smms, k, u);
  const Window win = default_window(*smms.grid());
  Real sl = 0, sm = 0;
  for (std::size_t i = win.lo; i < win.hi; ++i) {
    sl += tf.lambda[i];
    sm += tf.mu[i];
  }
  rep.tractor = {sl / static_cast<Real>(win.hi - win.lo), sm / static_cast<Real>(win.hi - win.lo)};

  const RadialField lam = rep.integral.lambda * pow(u, -2);
  rep.conformal = relative_sup(el_residual_conformal(smms, k, c, rep.integral), (n + smms.m) * lam);
  rep.measure = relative_sup(el_residual_measure(smms, k, c, rep.integral), n * lam);
  const Eigen q = el_residual_metric(smms, k, c, rep.integral);
  rep.metric = std::max(relative_sup(q.rad, lam), relative_sup(q.tan, lam));
  return rep;
}

MinimizeResult minimize(const SMMS& smms, Real k, const SolverOptions& opts) {
  GnsParams params{smms.geom.n, smms.m, k};
  params.validate();
  RadialField w0;
  if (opts.warm_start) {
    const Branch b = params.ball_branch() ? Branch::ball_like : Branch::sphere_like;
    w0 = closed_form_extremal(params, b, smms.grid()).w;
  } else {
    w0 = cold_start(smms, k, opts.seed);
  }
  return minimize(smms, k, w0, opts);
}

MinimizeResult minimize(const SMMS& smms, Real k, const RadialField& w0,
                        const SolverOptions& opts) {
  opts.validate();
  require_same_grid(smms.v, w0);
  const DiscreteFunctional F(smms, k, opts.tail_tol);
  const std::size_t N = F.size();
  const Chart chart{smms.m < 0 ? -(smms.m + smms.geom.n - 2) / 2 : Real(0)};
  const bool gauge = has_dilation_mode(smms);
  const Real q_leb = F.ex().q_leb;
  if (!chart.power() && w0.min() <= 0)
    fail(ErrorKind::domain, "initial iterate must be positive");

  // Normalize omega_0 = 1; Q is invariant under this rescaling.
  auto normalize = [&](std::vector<Real>& w, FunctionalValue& val) {
    const Real c = std::pow(val.omega0, -1 / q_leb);
    for (Real& x : w) x *= c;
    val = F.value(w);
  };

  std::vector<Real> w(w0.values().begin(), w0.values().end());
  FunctionalValue val = F.value(w);
  MinimizeResult res;
  res.initial_q = val.qk;
  normalize(w, val);
  std::vector<Real> x = chart.from_w(w);
  res.history.push_back(val.qk);

  std::vector<Real> diag, off, d(N), gx(N), xt(N);
  Real t = opts.step0;
  const Real t_max = opts.step0;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    const std::vector<Real> gw = F.log_gradient(w, val);
    for (std::size_t i = 0; i < N; ++i) gx[i] = gw[i] * chart.jac(x[i], w[i]);
    preconditioner(F, chart, x, w, val, diag, off);
    if (gauge) {
      constrained_direction(diag, off, gx, gauge_rows(w, F.measure(), q_leb), d);
    } else {
      for (std::size_t i = 0; i < N; ++i) d[i] = -gx[i];
      kernels::solve_tridiagonal(diag, off, d);
    }
    const Real slope = dot(gx, d);
    res.grad_norm = std::sqrt(std::max(-slope, Real(0)));
    if (res.grad_norm <= opts.grad_tol) {
      res.converged = true;
      break;
    }

    const Real logq = std::log(val.qk);
    bool accepted = false;
    for (; t > 1e-20L; t *= opts.backtrack_factor) {
      for (std::size_t i = 0; i < N; ++i) xt[i] = x[i] + t * d[i];
      std::vector<Real> wt = chart.to_w(xt);
      FunctionalValue vt;
      try {
        vt = F.value(wt);
      } catch (const Error&) {
        continue;  // blown-up or tail-failing trial
      }
      if (!std::isfinite(vt.qk) || vt.qk <= 0) continue;
      if (std::log(vt.qk) <= logq + opts.armijo * t * slope) {
        if (vt.qk > val.qk)
          fail(ErrorKind::nonconvergence, "accepted step increased Q");
        w = std::move(wt);
        val = vt;
        normalize(w, val);
        x = chart.from_w(w);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.message = "line search failed";
      break;
    }
    res.history.push_back(val.qk);
    t = std::min(t / opts.backtrack_factor, t_max);
  }
  res.iterations = it;
  if (!res.converged && res.message.empty()) res.message = "max_iters reached";
  if (res.converged) res.message = "converged";

  res.w_star = RadialField(smms.grid(), w);
  res.sigma = val.qk;
  try {
    res.residuals = residual_report(smms, k, res.w_star, opts.tail_tol);
  } catch (const Error& e) {
    res.residual_error = e.what();
  }
  return res;
}

std::vector<SweepRow> sweep(const SMMS& smms, const std::vector<Real>& ks,
                            const SolverOptions& opts) {
  std::vector<SweepRow> rows(ks.size());
  int threads = omp_get_max_threads();
  if (const char* env = std::getenv("GNS_FORGE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) threads = std::min(threads, cap);
  }
  threads = std::max(1, std::min<int>(threads, static_cast<int>(ks.size())));
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::size_t i = 0; i < ks.size(); ++i) {
    rows[i].k = ks[i];
    try {
      rows[i].result = minimize(smms, ks[i], opts);
    } catch (const Error& e) {
      rows[i].error = e.what();
      rows[i].error_kind = e.kind();
    } catch (const std::exception& e) {
      rows[i].error = e.what();
      rows[i].error_kind = ErrorKind::nonconvergence;
    }
  }
  return rows;
}

}  // namespace gnsforge
