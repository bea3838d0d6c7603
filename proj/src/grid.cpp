#include "gnsforge/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gnsforge {

Parity flip(Parity p) {
  switch (p) {
    case Parity::even: return Parity::odd;
    case Parity::odd: return Parity::even;
    default: return Parity::mixed;
  }
}

Parity product(Parity a, Parity b) {
  if (a == Parity::mixed || b == Parity::mixed) return Parity::mixed;
  return a == b ? Parity::even : Parity::odd;
}

Parity sum(Parity a, Parity b) { return a == b ? a : Parity::mixed; }

namespace {

struct Weights {
  Real d1[3];
  Real d2[3];
};

// Lagrange derivative weights at x for nodes x0, x1, x2.
Weights lagrange(Real x, Real x0, Real x1, Real x2) {
  const Real xs[3] = {x0, x1, x2};
  Weights w{};
  for (int j = 0; j < 3; ++j) {
    const Real a = xs[(j + 1) % 3];
    const Real b = xs[(j + 2) % 3];
    const Real den = (xs[j] - a) * (xs[j] - b);
    w.d1[j] = (2 * x - a - b) / den;
    w.d2[j] = 2 / den;
  }
  return w;
}

}  // namespace

namespace {

// Derivative stencils applied to constants must give exactly zero; fold the
// rounding of the Lagrange weights into the diagonal coefficient.
void zero_row_sums(std::vector<kernels::Stencil3>& table, bool skip_ends) {
  const std::size_t n = table.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (skip_ends && (i == 0 || i + 1 == n)) continue;
    kernels::Stencil3& s = table[i];
    const std::size_t d = i - s.first;
    Real others = 0;
    for (std::size_t j = 0; j < 3; ++j)
      if (j != d) others += s.c[j];
    s.c[d] = -others;
  }
}

}  // namespace

Real RadialGrid::outer_radius() const {
  if (domain_ == Domain::half_line) return std::numeric_limits<Real>::infinity();
  return scale_;
}

void RadialGrid::build_stencils() {
  const std::size_t n = r_.size();
  for (auto& t : d1_) t.assign(n, {});
  for (auto& t : d2_) t.assign(n, {});

  auto put = [&](std::size_t i, std::size_t p, std::size_t first, const Real* c1,
                 const Real* c2) {
    d1_[p][i].first = first;
    d2_[p][i].first = first;
    for (int j = 0; j < 3; ++j) {
      d1_[p][i].c[j] = c1[j];
      d2_[p][i].c[j] = c2[j];
    }
  };

  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Weights w = lagrange(r_[i], r_[i - 1], r_[i], r_[i + 1]);
    for (std::size_t p = 0; p < 3; ++p) put(i, p, i - 1, w.d1, w.d2);
  }

  // Origin: ghost node at -r0 carrying parity * f0.
  {
    const Weights g = lagrange(r_[0], -r_[0], r_[0], r_[1]);
    for (int sign : {1, -1}) {
      const std::size_t p = sign == 1 ? 0 : 1;
      const Real c1[3] = {g.d1[1] + sign * g.d1[0], g.d1[2], 0};
      const Real c2[3] = {g.d2[1] + sign * g.d2[0], g.d2[2], 0};
      put(0, p, 0, c1, c2);
    }
    const Weights o = lagrange(r_[0], r_[0], r_[1], r_[2]);
    put(0, 2, 0, o.d1, o.d2);
  }

  const std::size_t last = n - 1;
  const Weights one_sided = lagrange(r_[last], r_[last - 2], r_[last - 1], r_[last]);
  if (domain_ == Domain::pole_to_pole) {
    const Real ghost = 2 * scale_ - r_[last];
    const Weights g = lagrange(r_[last], r_[last - 1], r_[last], ghost);
    for (int sign : {1, -1}) {
      const std::size_t p = sign == 1 ? 0 : 1;
      const Real c1[3] = {0, g.d1[0], g.d1[1] + sign * g.d1[2]};
      const Real c2[3] = {0, g.d2[0], g.d2[1] + sign * g.d2[2]};
      put(last, p, last - 2, c1, c2);
    }
    put(last, 2, last - 2, one_sided.d1, one_sided.d2);
  } else {
    for (std::size_t p = 0; p < 3; ++p) put(last, p, last - 2, one_sided.d1, one_sided.d2);
  }

  for (std::size_t p = 0; p < 3; ++p) {
    const bool odd = p == static_cast<std::size_t>(Parity::odd);
    zero_row_sums(d1_[p], odd);
    zero_row_sums(d2_[p], odd);
  }
}

GridPtr make_grid(Domain domain, std::size_t N, Real scale) {
  if (N < 16) fail(ErrorKind::parameter, "grid needs at least 16 nodes");
  if (!(scale > 0) || !std::isfinite(scale))
    fail(ErrorKind::parameter, "grid scale must be positive and finite");

  std::shared_ptr<RadialGrid> g(new RadialGrid());
  g->domain_ = domain;
  g->scale_ = scale;
  g->h_ = Real(1) / static_cast<Real>(N);
  g->s_.resize(N);
  g->r_.resize(N);
  g->jacobian_.resize(N);
  g->quad_weight_.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const Real s = (static_cast<Real>(i) + Real(0.5)) * g->h_;
    g->s_[i] = s;
    if (domain == Domain::half_line) {
      g->r_[i] = scale * s / (1 - s);
      g->jacobian_[i] = scale / ((1 - s) * (1 - s));
    } else {
      g->r_[i] = scale * s;
      g->jacobian_[i] = scale;
    }
    g->quad_weight_[i] = g->h_ * g->jacobian_[i];
  }
  g->build_stencils();
  return g;
}

RadialField::RadialField(GridPtr grid, std::vector<Real> values, Parity parity)
    : grid_(std::move(grid)), values_(std::move(values)), parity_(parity) {
  if (!grid_) fail(ErrorKind::shape, "field without a grid");
  if (values_.size() != grid_->size())
    fail(ErrorKind::shape, "field length does not match its grid");
}

RadialField RadialField::constant(const GridPtr& grid, Real c) {
  return RadialField(grid, std::vector<Real>(grid->size(), c), Parity::even);
}

RadialField RadialField::from(const GridPtr& grid, const std::function<Real(Real)>& fn,
                              Parity parity) {
  std::vector<Real> v(grid->size());
  const auto r = grid->r();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(r[i]);
  return RadialField(grid, std::move(v), parity);
}

RadialField RadialField::radius(const GridPtr& grid) {
  const auto r = grid->r();
  return RadialField(grid, std::vector<Real>(r.begin(), r.end()), Parity::odd);
}

RadialField RadialField::with_parity(Parity p) const {
  RadialField out = *this;
  out.parity_ = p;
  return out;
}

void require_same_grid(const RadialField& a, const RadialField& b) {
  if (a.grid() != b.grid()) fail(ErrorKind::shape, "fields live on different grids");
}

RadialField& RadialField::operator+=(const RadialField& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  parity_ = sum(parity_, o.parity_);
  return *this;
}

RadialField& RadialField::operator-=(const RadialField& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  parity_ = sum(parity_, o.parity_);
  return *this;
}

RadialField& RadialField::operator*=(const RadialField& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= o.values_[i];
  parity_ = product(parity_, o.parity_);
  return *this;
}

RadialField& RadialField::operator/=(const RadialField& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] /= o.values_[i];
  parity_ = product(parity_, o.parity_);
  return *this;
}

RadialField& RadialField::operator*=(Real c) {
  for (auto& x : values_) x *= c;
  return *this;
}

RadialField& RadialField::operator+=(Real c) {
  for (auto& x : values_) x += c;
  if (c != 0) parity_ = sum(parity_, Parity::even);
  return *this;
}

RadialField RadialField::operator-() const {
  RadialField out = *this;
  for (auto& x : out.values_) x = -x;
  return out;
}

RadialField RadialField::map(const std::function<Real(Real)>& fn) const {
  RadialField out = *this;
  for (auto& x : out.values_) x = fn(x);
  out.parity_ = parity_ == Parity::even ? Parity::even : Parity::mixed;
  return out;
}

bool RadialField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](Real x) { return std::isfinite(x); });
}

Real RadialField::min() const { return *std::min_element(values_.begin(), values_.end()); }
Real RadialField::max() const { return *std::max_element(values_.begin(), values_.end()); }

RadialField operator+(RadialField a, const RadialField& b) { return a += b; }
RadialField operator-(RadialField a, const RadialField& b) { return a -= b; }
RadialField operator*(RadialField a, const RadialField& b) { return a *= b; }
RadialField operator/(RadialField a, const RadialField& b) { return a /= b; }
RadialField operator*(RadialField a, Real c) { return a *= c; }
RadialField operator*(Real c, RadialField a) { return a *= c; }
RadialField operator/(RadialField a, Real c) { return a *= 1 / c; }
RadialField operator/(Real c, const RadialField& a) {
  RadialField out = a.map([c](Real x) { return c / x; });
  if (a.parity() != Parity::mixed) out = out.with_parity(a.parity());
  return out;
}
RadialField operator+(RadialField a, Real c) { return a += c; }
RadialField operator+(Real c, RadialField a) { return a += c; }
RadialField operator-(RadialField a, Real c) { return a += -c; }
RadialField operator-(Real c, const RadialField& a) { return (-a) += c; }

RadialField pow(const RadialField& a, Real e) {
  return a.map([e](Real x) { return std::pow(x, e); });
}
RadialField exp(const RadialField& a) {
  return a.map([](Real x) { return std::exp(x); });
}
RadialField log(const RadialField& a) {
  return a.map([](Real x) { return std::log(x); });
}
RadialField sqrt(const RadialField& a) {
  return a.map([](Real x) { return std::sqrt(x); });
}
RadialField square(const RadialField& a) { return a * a; }

RadialField d_dr(const RadialField& f) {
  std::vector<Real> out(f.size());
  kernels::parallel::apply_stencil(f.values(), f.grid()->first_derivative(f.parity()), out);
  return RadialField(f.grid(), std::move(out), flip(f.parity()));
}

RadialField d2_dr2(const RadialField& f) {
  std::vector<Real> out(f.size());
  kernels::parallel::apply_stencil(f.values(), f.grid()->second_derivative(f.parity()), out);
  return RadialField(f.grid(), std::move(out), f.parity());
}

Window default_window(const RadialGrid& grid) {
  const std::size_t n = grid.size();
  const auto drop = static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(n)));
  return {0, n - drop};
}

Window radial_window(const RadialGrid& grid, Real rmin, Real rmax) {
  const auto r = grid.r();
  Window w{r.size(), 0};
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] >= rmin && r[i] <= rmax) {
      w.lo = std::min(w.lo, i);
      w.hi = i + 1;
    }
  }
  if (w.hi <= w.lo) fail(ErrorKind::parameter, "radial window contains no nodes");
  return w;
}

Real sup_norm(const RadialField& f, const Window& w) {
  Real m = 0;
  for (std::size_t i = w.lo; i < w.hi; ++i) m = std::max(m, std::fabs(f[i]));
  return m;
}

Real sup_norm(const RadialField& f) { return sup_norm(f, Window{0, f.size()}); }

Real relative_sup(const RadialField& f, const RadialField& ref) {
  require_same_grid(f, ref);
  const Window w = default_window(*f.grid());
  const Real scale = sup_norm(ref, w);
  if (!(scale > 0)) fail(ErrorKind::domain, "reference field vanishes on the window");
  return sup_norm(f, w) / scale;
}

}  // namespace gnsforge
