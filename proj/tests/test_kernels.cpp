#include <random>
#include <vector>

#include "doctest.h"
#include "gnsforge/grid.hpp"
#include "gnsforge/kernels.hpp"

using namespace gnsforge;

namespace {

std::vector<Real> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1, 1);
  std::vector<Real> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace

TEST_CASE("parallel kernels agree with the serial reference") {
  auto grid = make_grid(Domain::half_line, 1 << 12, 1);
  const auto in = random_vector(grid->size(), 7);
  for (Parity p : {Parity::even, Parity::odd, Parity::mixed}) {
    std::vector<Real> a(in.size()), b(in.size());
    kernels::serial::apply_stencil(in, grid->second_derivative(p), a);
    kernels::parallel::apply_stencil(in, grid->second_derivative(p), b);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }
  const auto x = random_vector(5000, 1);
  const auto y = random_vector(5000, 2);
  const Real ds = kernels::serial::dot(x, y);
  const Real dp = kernels::parallel::dot(x, y);
  CHECK(std::fabs(ds - dp) <= 1e-15L * 5000);

  std::vector<Real> coeff(x.begin(), x.end() - 1);
  for (auto& c : coeff) c = std::fabs(c);
  const Real es = kernels::serial::staggered_energy(y, coeff);
  const Real ep = kernels::parallel::staggered_energy(y, coeff);
  CHECK(std::fabs(es - ep) <= 1e-15L * es);
}

TEST_CASE("tridiagonal solve reproduces a known solution") {
  const std::size_t n = 200;
  const auto x = random_vector(n, 3);
  std::vector<Real> diag(n, 4), off(n - 1, -1), rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    rhs[i] = 4 * x[i];
    if (i > 0) rhs[i] -= x[i - 1];
    if (i + 1 < n) rhs[i] -= x[i + 1];
  }
  kernels::solve_tridiagonal(diag, off, rhs);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(rhs[i] - x[i]) < 1e-15L);
}

TEST_CASE("stencils differentiate quadratics exactly") {
  for (Domain d : {Domain::half_line, Domain::unit_ball, Domain::pole_to_pole}) {
    auto grid = make_grid(d, 64, 2);
    // r^2 is even about the origin; on pole_to_pole it is not even about the
    // far pole, so use the one-sided (mixed) stencils there.
    const Parity p = d == Domain::pole_to_pole ? Parity::mixed : Parity::even;
    RadialField q = RadialField::from(grid, [](Real r) { return 3 + r * r; }, p);
    const RadialField dq = d_dr(q);
    const RadialField d2q = d2_dr2(q);
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const Real r = grid->r()[i];
      CHECK(std::fabs(dq[i] - 2 * r) <= 1e-12L * (1 + r));
      CHECK(std::fabs(d2q[i] - 2) <= 1e-9L);
    }
  }
}
