#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace flowsmp {

enum class BasisKind { hermite };

// Orthonormal basis e_k of L2(R) with a quadrature rule for integrals
// against it. Hermite functions scaled by `scale`:
//   e_k(r) = psi_k(r/scale) / sqrt(scale),
// psi_k the standard Hermite functions. Quadrature is Gauss-Hermite with
// 4K nodes, carrying modified weights so that sum_i w_i f(x_i) ~ int f dr.
struct BasisSet {
  BasisKind kind = BasisKind::hermite;
  std::size_t size = 0;  // number of modes K
  double scale = 1.0;
  std::vector<double> qnodes;    // scaled nodes, ascending
  std::vector<double> qweights;  // modified weights for int . dr

  double eval(std::size_t k, double r) const;
  // fills out[0..K-1] with e_k(r); out.size() must equal size
  void eval_all(double r, std::span<double> out) const;
  double support_radius() const { return qnodes.empty() ? 0.0 : qnodes.back(); }
};

BasisSet make_basis(BasisKind kind, std::size_t modes, double scale);

// Projection g_k = int f(r) e_k(r) dr plus the resolution diagnostic
// sum_k g_k^2 / int f^2 dr (1 when f lies in the span of the basis).
struct Loadings {
  std::vector<double> g;
  double captured_fraction = 1.0;
};

Loadings project_loading(const std::function<double(double)>& f,
                         const BasisSet& basis);

// f(r) = amplitude * exp(-(center - r)^2); closed form against the
// unit-scale Hermite basis, quadrature otherwise.
struct GaussianBump {
  double center = 0.0;
  double amplitude = 1.0;
};

Loadings project_loading(const GaussianBump& f, const BasisSet& basis);

void gaussian_bump_loadings(double center, double amplitude,
                            const BasisSet& basis, std::span<double> out);

// Loadings g_k(t_j) of a time-indexed spatial integrand, row-major K x M.
struct LoadingPath {
  std::size_t modes = 0;
  std::size_t steps = 0;
  std::vector<double> g;

  LoadingPath() = default;
  LoadingPath(std::size_t K, std::size_t M) : modes(K), steps(M), g(K * M, 0.0) {}
  double& at(std::size_t k, std::size_t j) { return g[k * steps + j]; }
  double at(std::size_t k, std::size_t j) const { return g[k * steps + j]; }
};

}  // namespace flowsmp
