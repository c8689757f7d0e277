#include "flowsmp/model.hpp"

#include <cmath>
#include <stdexcept>

#include "flowsmp/counter_rng.hpp"

namespace flowsmp {

double CoefficientSet::sigma_loadings(double t, double x, const DiscreteMeasure& mu,
                                      double a, const BasisSet& basis,
                                      std::span<double> out) const {
  if (sigma_is_factored) {
    phi_loadings(t, basis, out);
    double phi_sq = 0.0;
    for (double v : out) phi_sq += v * v;
    const double sv = s(t, x, mu, a);
    for (auto& v : out) v *= sv;
    return phi_norm_sq > 0.0 ? phi_sq / phi_norm_sq : 1.0;
  }
  return sigma_fn(t, x, mu, a, basis, out);
}

double CoefficientSet::sigma_x_loadings(double t, double x, const DiscreteMeasure& mu,
                                        double a, const BasisSet& basis,
                                        std::span<double> out) const {
  if (sigma_is_factored) {
    phi_loadings(t, basis, out);
    double phi_sq = 0.0;
    for (double v : out) phi_sq += v * v;
    const double sv = s_x(t, x, mu, a);
    for (auto& v : out) v *= sv;
    return phi_norm_sq > 0.0 ? phi_sq / phi_norm_sq : 1.0;
  }
  return sigma_x_fn(t, x, mu, a, basis, out);
}

double CoefficientSet::sigma_alpha_loadings(double t, double x,
                                            const DiscreteMeasure& mu, double a,
                                            const BasisSet& basis,
                                            std::span<double> out) const {
  if (sigma_is_factored) {
    phi_loadings(t, basis, out);
    double phi_sq = 0.0;
    for (double v : out) phi_sq += v * v;
    const double sv = s_alpha(t, x, mu, a);
    for (auto& v : out) v *= sv;
    return phi_norm_sq > 0.0 ? phi_sq / phi_norm_sq : 1.0;
  }
  return sigma_alpha_fn(t, x, mu, a, basis, out);
}

void CoefficientSet::sigma_mu_loadings(double t, double x, const DiscreteMeasure& mu,
                                       double a, double v, const BasisSet& basis,
                                       std::span<double> out) const {
  if (sigma_is_factored) {
    phi_loadings(t, basis, out);
    const double sv = s_mu(t, x, mu, a, v);
    for (auto& w : out) w *= sv;
    return;
  }
  sigma_mu_fn(t, x, mu, a, v, basis, out);
}

void LqParams::validate() const {
  if (!(R > 0.0)) throw std::invalid_argument("LqParams: R must be positive");
  if (Q < 0.0 || S < 0.0) throw std::invalid_argument("LqParams: Q, S must be nonnegative");
}

namespace {

void fill_phi(PhiKind kind, const BasisSet& basis, std::span<double> out) {
  if (kind == PhiKind::mode0) {
    for (auto& v : out) v = 0.0;
    out[0] = 1.0;
    return;
  }
  // phi(r) = exp(-r^2), projected
  if (basis.kind == BasisKind::hermite && basis.scale == 1.0) {
    gaussian_bump_loadings(0.0, 1.0, basis, out);
    return;
  }
  const Loadings l = project_loading(GaussianBump{0.0, 1.0}, basis);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = l.g[k];
}

}  // namespace

CoefficientSet lq_coefficients(const LqParams& params) {
  params.validate();
  const LqParams p = params;
  CoefficientSet set;
  set.family = "lq";

  set.b = [p](double, double x, const DiscreteMeasure& mu, double a) {
    return p.A * x + p.B * mu.mean() + p.C * a;
  };
  set.b_x = [p](double, double, const DiscreteMeasure&, double) { return p.A; };
  set.b_alpha = [p](double, double, const DiscreteMeasure&, double) { return p.C; };
  set.b_mu = [p](double, double, const DiscreteMeasure&, double, double) { return p.B; };

  set.sigma_is_factored = true;
  set.phi_loadings = [p](double, const BasisSet& basis, std::span<double> out) {
    fill_phi(p.phi_kind, basis, out);
  };
  set.phi_norm_sq = p.phi_kind == PhiKind::mode0 ? 1.0 : std::sqrt(M_PI / 2.0);
  set.s = [p](double, double x, const DiscreteMeasure& mu, double a) {
    return p.D * x + p.F * mu.mean() + p.H * a;
  };
  set.s_x = [p](double, double, const DiscreteMeasure&, double) { return p.D; };
  set.s_alpha = [p](double, double, const DiscreteMeasure&, double) { return p.H; };
  set.s_mu = [p](double, double, const DiscreteMeasure&, double, double) { return p.F; };

  set.f = [p](double, const DiscreteMeasure& mu, double a) {
    const double m = mu.mean();
    return 0.5 * (p.Q * mu.second_moment() + p.S * m * m + p.R * a * a);
  };
  set.f_alpha = [p](double, const DiscreteMeasure&, double a) { return p.R * a; };
  set.f_mu = [p](double, const DiscreteMeasure& mu, double, double v) {
    return p.Q * v + p.S * mu.mean();
  };

  if (p.terminal_kind == TerminalKind::target_rho) {
    const DiscreteMeasure nu = p.nu;
    set.g = [nu](const DiscreteMeasure& mu) { return rho_sq(mu, nu); };
    set.g_mu = [nu](const DiscreteMeasure& mu, double) {
      return rho_grad_quadratic(mu, nu);
    };
  } else {
    set.g = [](const DiscreteMeasure& mu) {
      const double m = mu.mean();
      return 2.0 * (mu.second_moment() - m * m);
    };
    set.g_mu = [](const DiscreteMeasure& mu, double v) {
      return 4.0 * (v - mu.mean());
    };
  }

  const double phi_norm = std::sqrt(set.phi_norm_sq);
  set.declared_lipschitz =
      std::abs(p.A) + std::abs(p.B) + 2.0 * std::abs(p.C) +
      phi_norm * (std::abs(p.D) + std::abs(p.F) + 2.0 * std::abs(p.H));
  return set;
}

void gaussian_bump_loadings_dx(double center, double amplitude,
                               const BasisSet& basis, std::span<double> out) {
  const std::size_t K = out.size();
  if (K == 0) return;
  std::vector<double> value(K);
  gaussian_bump_loadings(center, amplitude, basis, value);
  const double c = center;
  out[0] = -(2.0 * c / 3.0) * value[0];
  if (K == 1) return;
  out[1] = (2.0 / 3.0) * std::sqrt(2.0) * (value[0] + c * out[0]);
  for (std::size_t k = 1; k + 1 < K; ++k) {
    const double kk = static_cast<double>(k);
    out[k + 1] = (2.0 / 3.0) * std::sqrt(2.0 / (kk + 1.0)) * (value[k] + c * out[k]) -
                 (1.0 / 3.0) * std::sqrt(kk / (kk + 1.0)) * out[k - 1];
  }
}

CoefficientSet kernel_coefficients(double kernel_width, double control_gain) {
  if (!(kernel_width > 0.0))
    throw std::invalid_argument("kernel_coefficients: width must be positive");
  const double w2inv = 1.0 / (kernel_width * kernel_width);
  const double c = control_gain;
  auto kern = [w2inv](double y) { return std::exp(-0.5 * y * y * w2inv); };
  auto kern_d = [w2inv, kern](double y) { return -y * w2inv * kern(y); };

  CoefficientSet set;
  set.family = "kernel";
  set.b = [kern, c](double, double x, const DiscreteMeasure& mu, double a) {
    double acc = 0.0;
    for (std::size_t l = 0; l < mu.size(); ++l)
      acc += mu.weights[l] * kern(x - mu.atoms[l]);
    return acc + c * a;
  };
  set.b_x = [kern_d](double, double x, const DiscreteMeasure& mu, double) {
    double acc = 0.0;
    for (std::size_t l = 0; l < mu.size(); ++l)
      acc += mu.weights[l] * kern_d(x - mu.atoms[l]);
    return acc;
  };
  set.b_alpha = [c](double, double, const DiscreteMeasure&, double) { return c; };
  set.b_mu = [kern_d](double, double x, const DiscreteMeasure&, double, double v) {
    return -kern_d(x - v);
  };

  set.sigma_is_factored = false;
  const double bump_norm_sq = std::sqrt(M_PI / 2.0);  // int exp(-2u^2) du
  set.sigma_fn = [bump_norm_sq](double, double x, const DiscreteMeasure&, double,
                                const BasisSet& basis, std::span<double> out) {
    if (basis.kind == BasisKind::hermite && basis.scale == 1.0)
      gaussian_bump_loadings(x, 1.0, basis, out);
    else {
      const Loadings l = project_loading(GaussianBump{x, 1.0}, basis);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = l.g[k];
    }
    double g_sq = 0.0;
    for (double v : out) g_sq += v * v;
    return g_sq / bump_norm_sq;
  };
  set.sigma_x_fn = [bump_norm_sq](double, double x, const DiscreteMeasure&, double,
                                  const BasisSet& basis, std::span<double> out) {
    if (basis.kind == BasisKind::hermite && basis.scale == 1.0)
      gaussian_bump_loadings_dx(x, 1.0, basis, out);
    else {
      const Loadings l = project_loading(
          [x](double r) { return -2.0 * (x - r) * std::exp(-(x - r) * (x - r)); },
          basis);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = l.g[k];
    }
    double g_sq = 0.0;
    for (double v : out) g_sq += v * v;
    return g_sq / bump_norm_sq;  // int (d/dx exp(-(x-r)^2))^2 dr = sqrt(pi/2)
  };
  set.sigma_alpha_fn = [](double, double, const DiscreteMeasure&, double,
                          const BasisSet&, std::span<double> out) {
    for (auto& v : out) v = 0.0;
    return 1.0;
  };
  set.sigma_mu_fn = [](double, double, const DiscreteMeasure&, double, double,
                       const BasisSet&, std::span<double> out) {
    for (auto& v : out) v = 0.0;
  };

  set.f = [](double, const DiscreteMeasure&, double a) { return 0.5 * a * a; };
  set.f_alpha = [](double, const DiscreteMeasure&, double a) { return a; };
  set.f_mu = [](double, const DiscreteMeasure&, double, double) { return 0.0; };
  set.g = [](const DiscreteMeasure&) { return 0.0; };
  set.g_mu = [](const DiscreteMeasure&, double) { return 0.0; };

  const double sup_kern_d = std::exp(-0.5) / kernel_width;
  set.declared_lipschitz =
      1.0 + 2.0 * std::abs(c) + sup_kern_d + 2.0 * std::pow(M_PI / 2.0, 0.25);
  return set;
}

double lipschitz_probe(const CoefficientSet& set, const BasisSet& basis,
                       std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("lipschitz_probe: need samples >= 2");
  auto draw_input = [&](std::uint64_t i, std::uint64_t slot, double& t, double& x,
                        DiscreteMeasure& mu, double& a) {
    t = rng::uniform(seed, i, slot, 0);
    x = 4.0 * rng::uniform(seed, i, slot, 1) - 2.0;
    a = 4.0 * rng::uniform(seed, i, slot, 2) - 2.0;
    std::vector<double> atoms(3);
    for (std::size_t k = 0; k < atoms.size(); ++k)
      atoms[k] = 4.0 * rng::uniform(seed, i, slot, 3 + k) - 2.0;
    mu = uniform_atoms(atoms);
  };

  std::vector<double> sig1(basis.size), sig2(basis.size);
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    double t1, x1, a1, t2, x2, a2;
    DiscreteMeasure mu1, mu2;
    draw_input(i, 0, t1, x1, mu1, a1);
    draw_input(i, 1, t2, x2, mu2, a2);
    t2 = t1;  // the Lipschitz condition is per fixed time

    // joint pair plus axis-aligned variants so single-slot sensitivities
    // are represented
    struct Pair {
      double x2, a2;
      const DiscreteMeasure* mu2;
    };
    const Pair pairs[] = {{x2, a2, &mu2}, {x2, a1, &mu1}, {x1, a2, &mu1}, {x1, a1, &mu2}};
    for (const Pair& pr : pairs) {
      const double db = std::abs(set.b(t1, x1, mu1, a1) - set.b(t1, pr.x2, *pr.mu2, pr.a2));
      set.sigma_loadings(t1, x1, mu1, a1, basis, sig1);
      set.sigma_loadings(t1, pr.x2, *pr.mu2, pr.a2, basis, sig2);
      double dsig_sq = 0.0;
      for (std::size_t k = 0; k < basis.size; ++k) {
        const double d = sig1[k] - sig2[k];
        dsig_sq += d * d;
      }
      const double denom = std::abs(x1 - pr.x2) + w2(mu1, *pr.mu2) + std::abs(a1 - pr.a2);
      if (denom < 1e-12) continue;
      worst = std::max(worst, (db + std::sqrt(dsig_sq)) / denom);
    }
  }
  return worst;
}

}  // namespace flowsmp
