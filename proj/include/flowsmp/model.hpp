#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "flowsmp/basis.hpp"
#include "flowsmp/measure.hpp"

namespace flowsmp {

// Coefficient bundle (b, sigma, f, g) with every partial the maximum
// principle needs. The diffusion is handled in loading space: families
// either factor sigma(t,x,mu,a,r) = phi(t,r) * s(t,x,mu,a) and share one
// spatial profile per step, or supply per-state loadings directly.
struct CoefficientSet {
  std::string family;

  using ScalarFn =
      std::function<double(double, double, const DiscreteMeasure&, double)>;
  using MeasureDerivFn = std::function<double(double, double,
                                              const DiscreteMeasure&, double, double)>;
  using LoadingFn = std::function<double(double, double, const DiscreteMeasure&,
                                         double, const BasisSet&, std::span<double>)>;
  using MeasureLoadingFn =
      std::function<void(double, double, const DiscreteMeasure&, double, double,
                         const BasisSet&, std::span<double>)>;

  ScalarFn b, b_x, b_alpha;
  MeasureDerivFn b_mu;  // Lions derivative of b evaluated at point v

  bool sigma_is_factored = false;
  // factored form: loadings of phi(t, .) and the scalar factor with partials
  std::function<void(double, const BasisSet&, std::span<double>)> phi_loadings;
  ScalarFn s, s_x, s_alpha;
  MeasureDerivFn s_mu;
  double phi_norm_sq = 1.0;  // int phi(t,r)^2 dr (time-independent profiles)

  // direct loading form; returns the captured fraction sum g^2 / int f^2
  LoadingFn sigma_fn, sigma_x_fn, sigma_alpha_fn;
  MeasureLoadingFn sigma_mu_fn;

  std::function<double(double, const DiscreteMeasure&, double)> f, f_alpha;
  std::function<double(double, const DiscreteMeasure&, double, double)> f_mu;
  std::function<double(const DiscreteMeasure&)> g;
  std::function<double(const DiscreteMeasure&, double)> g_mu;

  double declared_lipschitz = 0.0;

  // Uniform accessors over both diffusion representations; each returns the
  // captured fraction of the projected profile (1 when exact in the basis).
  double sigma_loadings(double t, double x, const DiscreteMeasure& mu, double a,
                        const BasisSet& basis, std::span<double> out) const;
  double sigma_x_loadings(double t, double x, const DiscreteMeasure& mu, double a,
                          const BasisSet& basis, std::span<double> out) const;
  double sigma_alpha_loadings(double t, double x, const DiscreteMeasure& mu,
                              double a, const BasisSet& basis,
                              std::span<double> out) const;
  void sigma_mu_loadings(double t, double x, const DiscreteMeasure& mu, double a,
                         double v, const BasisSet& basis,
                         std::span<double> out) const;
};

enum class PhiKind { mode0, gauss };
enum class TerminalKind { target_rho, self_spread };

// Constants of the linear-quadratic model: dynamics
//   dX = (A X + B Xbar + C a) dt + int phi(t,r)(D X + F Xbar + H a) W(dt,dr),
// running cost (1/2)(Q int x^2 mu + S Xbar^2 + R a^2), terminal cost either
// rho^2(mu_T, nu) or the self-spread functional.
struct LqParams {
  double A = 0, B = 0, C = 0, D = 0, F = 0, H = 0;
  double Q = 0, S = 0, R = 1;
  PhiKind phi_kind = PhiKind::mode0;
  TerminalKind terminal_kind = TerminalKind::target_rho;
  DiscreteMeasure nu = dirac(0.0);

  void validate() const;
};

CoefficientSet lq_coefficients(const LqParams& params);

// Interaction through a Gaussian kernel: drift int K(x-v) mu(dv) + c a with
// K(y) = exp(-y^2 / (2 width^2)), diffusion profile exp(-(x-r)^2).
CoefficientSet kernel_coefficients(double kernel_width, double control_gain);

// Sampled Lipschitz ratio of (b, sigma) over random input pairs, W2 on the
// measure slot. Diagnostic only.
double lipschitz_probe(const CoefficientSet& set, const BasisSet& basis,
                       std::size_t samples, std::uint64_t seed);

// d/dx of the gaussian-bump projection, used for the kernel family's
// sigma_x loadings.
void gaussian_bump_loadings_dx(double center, double amplitude,
                               const BasisSet& basis, std::span<double> out);

}  // namespace flowsmp
