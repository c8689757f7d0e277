#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "flowsmp/counter_rng.hpp"
#include "flowsmp/model.hpp"

using namespace flowsmp;

namespace {

LqParams desk_lq() {
  LqParams p;
  p.A = 0.3;
  p.B = -0.2;
  p.C = 0.7;
  p.D = 0.15;
  p.F = 0.1;
  p.H = 0.25;
  p.Q = 0.4;
  p.S = 0.3;
  p.R = 1.5;
  p.phi_kind = PhiKind::mode0;
  p.nu = dirac(1.0);
  return p;
}

DiscreteMeasure random_measure(std::uint64_t seed, std::uint64_t id, std::size_t n) {
  std::vector<double> atoms(n);
  for (std::size_t i = 0; i < n; ++i)
    atoms[i] = 4.0 * rng::uniform(seed, id, i, 0) - 2.0;
  return uniform_atoms(atoms);
}

bool close_rel(double a, double b, double rel, double abs_floor = 1e-8) {
  return std::abs(a - b) <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}

// central difference in a scalar slot
template <typename Fn>
double fd(Fn&& f, double at, double h = 1e-6) {
  return (f(at + h) - f(at - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("LqParams validation") {
  LqParams p;
  p.R = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.R = 1.0;
  p.Q = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("zero LQ coefficients leave only the control cost") {
  LqParams p;  // all zero except R = 1
  const auto set = lq_coefficients(p);
  const auto mu = random_measure(1, 0, 3);
  CHECK(set.b(0.1, 0.5, mu, 2.0) == 0.0);
  CHECK(set.s(0.1, 0.5, mu, 2.0) == 0.0);
  CHECK(set.f(0.1, mu, 2.0) == doctest::Approx(0.5 * 2.0 * 2.0));
}

TEST_CASE("LQ partials match finite differences") {
  const auto set = lq_coefficients(desk_lq());
  const auto basis = make_basis(BasisKind::hermite, 4, 1.0);
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const double t = rng::uniform(7, trial, 0, 0);
    const double x = 4.0 * rng::uniform(7, trial, 1, 0) - 2.0;
    const double a = 4.0 * rng::uniform(7, trial, 2, 0) - 2.0;
    const auto mu = random_measure(7, 1000 + trial, 4);

    CHECK(close_rel(set.b_x(t, x, mu, a),
                    fd([&](double v) { return set.b(t, v, mu, a); }, x), 1e-6));
    CHECK(close_rel(set.b_alpha(t, x, mu, a),
                    fd([&](double v) { return set.b(t, x, mu, v); }, a), 1e-6));
    CHECK(close_rel(set.s_x(t, x, mu, a),
                    fd([&](double v) { return set.s(t, v, mu, a); }, x), 1e-6));
    CHECK(close_rel(set.s_alpha(t, x, mu, a),
                    fd([&](double v) { return set.s(t, x, mu, v); }, a), 1e-6));
    CHECK(close_rel(set.f_alpha(t, mu, a),
                    fd([&](double v) { return set.f(t, mu, v); }, a), 1e-6));

    // mu-partials through the lifted finite difference
    std::vector<double> dir(mu.size());
    for (std::size_t i = 0; i < dir.size(); ++i)
      dir[i] = 2.0 * rng::uniform(7, 2000 + trial, i, 0) - 1.0;

    auto check_mu = [&](auto&& value, auto&& deriv) {
      LiftedFn lifted = [&](std::span<const double> xs, std::span<const double> ws) {
        return value(DiscreteMeasure(std::vector<double>(xs.begin(), xs.end()),
                                     std::vector<double>(ws.begin(), ws.end())));
      };
      double pairing = 0.0;
      for (std::size_t i = 0; i < mu.size(); ++i)
        pairing += mu.weights[i] * deriv(mu.atoms[i]) * dir[i];
      CHECK(close_rel(lions_fd(lifted, mu, dir, 1e-5), pairing, 1e-5));
    };
    check_mu([&](const DiscreteMeasure& m) { return set.b(t, x, m, a); },
             [&](double v) { return set.b_mu(t, x, mu, a, v); });
    check_mu([&](const DiscreteMeasure& m) { return set.s(t, x, m, a); },
             [&](double v) { return set.s_mu(t, x, mu, a, v); });
    check_mu([&](const DiscreteMeasure& m) { return set.f(t, m, a); },
             [&](double v) { return set.f_mu(t, mu, a, v); });
    check_mu([&](const DiscreteMeasure& m) { return set.g(m); },
             [&](double v) { return set.g_mu(mu, v); });
  }
}

TEST_CASE("LQ adjoint driver pieces have the linear/quadratic structure") {
  const auto p = desk_lq();
  const auto set = lq_coefficients(p);
  const auto mu = random_measure(11, 0, 4);
  const double t = 0.4, x = 0.8, a = -0.3, v = 1.1;
  CHECK(set.b_mu(t, x, mu, a, v) == p.B);
  CHECK(set.s_mu(t, x, mu, a, v) == p.F);
  CHECK(set.f_mu(t, mu, a, v) == doctest::Approx(p.Q * v + p.S * mu.mean()));
  CHECK(set.g_mu(mu, v) == doctest::Approx(4.0 * (mu.mean() - p.nu.mean())));
}

TEST_CASE("self-spread terminal matches the remark's derivative") {
  auto p = desk_lq();
  p.terminal_kind = TerminalKind::self_spread;
  const auto set = lq_coefficients(p);
  const auto mu = random_measure(13, 0, 4);
  for (std::size_t i = 0; i < mu.size(); ++i)
    CHECK(set.g_mu(mu, mu.atoms[i]) ==
          doctest::Approx(4.0 * (mu.atoms[i] - mu.mean())));
  // and against the lifted finite difference
  std::vector<double> dir(mu.size());
  for (std::size_t i = 0; i < dir.size(); ++i)
    dir[i] = 2.0 * rng::uniform(13, 1, i, 0) - 1.0;
  LiftedFn lifted = [&](std::span<const double> xs, std::span<const double> ws) {
    return set.g(DiscreteMeasure(std::vector<double>(xs.begin(), xs.end()),
                                 std::vector<double>(ws.begin(), ws.end())));
  };
  double pairing = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    pairing += mu.weights[i] * set.g_mu(mu, mu.atoms[i]) * dir[i];
  CHECK(lions_fd(lifted, mu, dir, 1e-5) == doctest::Approx(pairing).epsilon(1e-6));
}

TEST_CASE("kernel family: values and Lions derivative") {
  const auto set = kernel_coefficients(1.0, 0.5);
  const double x = 0.4, a = 1.2;

  // single atom at x: b = K(0) + c a = 1 + c a
  CHECK(set.b(0.0, x, dirac(x), a) == doctest::Approx(1.0 + 0.5 * a));

  // b_mu matches the lifted finite difference within 1e-5
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const auto mu = random_measure(17, trial, 4);
    const double u = 4.0 * rng::uniform(17, 500 + trial, 0, 0) - 2.0;
    std::vector<double> dir(mu.size());
    for (std::size_t i = 0; i < dir.size(); ++i)
      dir[i] = 2.0 * rng::uniform(17, 1000 + trial, i, 0) - 1.0;
    LiftedFn lifted = [&](std::span<const double> xs, std::span<const double> ws) {
      return set.b(0.0, u, DiscreteMeasure(std::vector<double>(xs.begin(), xs.end()),
                                           std::vector<double>(ws.begin(), ws.end())),
                   a);
    };
    double pairing = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
      pairing += mu.weights[i] * set.b_mu(0.0, u, mu, a, mu.atoms[i]) * dir[i];
    CHECK(close_rel(lions_fd(lifted, mu, dir, 1e-5), pairing, 1e-5));
  }
}

TEST_CASE("kernel family: noise covariance rate between frozen particles") {
  const auto set = kernel_coefficients(1.0, 0.0);
  const auto basis = make_basis(BasisKind::hermite, 12, 1.0);
  const auto mu = DiscreteMeasure({0.2, 0.9}, {0.5, 0.5});
  std::vector<double> gu(basis.size), gv(basis.size);
  set.sigma_loadings(0.0, mu.atoms[0], mu, 0.0, basis, gu);
  set.sigma_loadings(0.0, mu.atoms[1], mu, 0.0, basis, gv);
  double rate = 0.0;
  for (std::size_t k = 0; k < basis.size; ++k) rate += gu[k] * gv[k];
  const double d = mu.atoms[0] - mu.atoms[1];
  // int exp(-(u-r)^2) exp(-(v-r)^2) dr = sqrt(pi/2) exp(-(u-v)^2/2)
  const double expect = std::sqrt(M_PI / 2.0) * std::exp(-0.5 * d * d);
  CHECK(rate == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("kernel sigma_x loadings: derivative recurrence vs quadrature") {
  const auto set = kernel_coefficients(1.0, 0.0);
  const auto basis = make_basis(BasisKind::hermite, 8, 1.0);
  const auto mu = dirac(0.0);
  for (double x : {-0.9, 0.0, 0.6}) {
    std::vector<double> analytic(basis.size);
    set.sigma_x_loadings(0.0, x, mu, 0.0, basis, analytic);
    const auto quad = project_loading(
        [x](double r) { return -2.0 * (x - r) * std::exp(-(x - r) * (x - r)); },
        basis);
    for (std::size_t k = 0; k < basis.size; ++k)
      CHECK(analytic[k] == doctest::Approx(quad.g[k]).epsilon(1e-6));

    // d/dx of the value loadings by finite difference
    std::vector<double> plus(basis.size), minus(basis.size);
    set.sigma_loadings(0.0, x + 1e-6, mu, 0.0, basis, plus);
    set.sigma_loadings(0.0, x - 1e-6, mu, 0.0, basis, minus);
    for (std::size_t k = 0; k < basis.size; ++k)
      CHECK(analytic[k] == doctest::Approx((plus[k] - minus[k]) / 2e-6).epsilon(1e-4));
  }
}

TEST_CASE("linear growth probe") {
  const auto basis = make_basis(BasisKind::hermite, 6, 1.0);
  for (const auto* name : {"lq", "kernel"}) {
    const auto set = std::string(name) == "lq" ? lq_coefficients(desk_lq())
                                               : kernel_coefficients(1.0, 0.5);
    std::vector<double> sig(basis.size);
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
      const double t = rng::uniform(19, trial, 0, 0);
      const double x = 8.0 * rng::uniform(19, trial, 1, 0) - 4.0;
      const double a = 4.0 * rng::uniform(19, trial, 2, 0) - 2.0;
      const auto mu = random_measure(19, 3000 + trial, 3);
      set.sigma_loadings(t, x, mu, a, basis, sig);
      double sig_norm = 0.0;
      for (double v : sig) sig_norm += v * v;
      const double lhs = std::abs(set.b(t, x, mu, a)) + std::sqrt(sig_norm);
      const double rhs =
          set.declared_lipschitz * (1.0 + std::abs(x) + w2(mu, dirac(0.0)));
      CHECK(lhs <= rhs + 1e-9);
    }
  }
}

TEST_CASE("lipschitz probe estimates") {
  const auto basis = make_basis(BasisKind::hermite, 6, 1.0);
  CHECK_THROWS_AS(lipschitz_probe(lq_coefficients(LqParams{}), basis, 1, 0),
                  std::invalid_argument);

  // zero coefficients -> 0 (f still has R alpha^2 but b, sigma vanish)
  LqParams zero;
  zero.R = 1.0;
  CHECK(lipschitz_probe(lq_coefficients(zero), basis, 50, 1) == 0.0);

  const auto p = desk_lq();
  const double est = lipschitz_probe(lq_coefficients(p), basis, 200, 2);
  CHECK(est >= std::max({std::abs(p.A), std::abs(p.B), std::abs(p.C)}) - 1e-9);
  CHECK(std::isfinite(est));
  // analytic bound for the linear family (phi = e_0 has unit norm)
  const double lq_bound = std::abs(p.A) + std::abs(p.B) + std::abs(p.C) +
                          std::abs(p.D) + std::abs(p.F) + std::abs(p.H);
  CHECK(est <= lq_bound + 1e-9);

  // kernel family: sup|K'| + c for the drift plus the analytic norm of the
  // x-derivative of the diffusion bump
  const double width = 1.0, gain = 0.5;
  const double kest = lipschitz_probe(kernel_coefficients(width, gain), basis, 200, 3);
  const double kernel_bound = std::exp(-0.5) / width + gain + std::pow(M_PI / 2.0, 0.25);
  CHECK(kest <= kernel_bound + 1e-6);
  CHECK(kest > 0.0);
}
