#include "flowsmp/basis.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace flowsmp {

namespace {

constexpr double kPiQuarterInv = 0.7511255444649424828587;  // pi^(-1/4)

// Hermite functions psi_0..psi_{n} at x via the stable upward recurrence
// psi_{k+1} = sqrt(2/(k+1)) x psi_k - sqrt(k/(k+1)) psi_{k-1}.
void hermite_functions(double x, std::span<double> out) {
  const std::size_t n = out.size();
  if (n == 0) return;
  out[0] = kPiQuarterInv * std::exp(-0.5 * x * x);
  if (n == 1) return;
  out[1] = std::sqrt(2.0) * x * out[0];
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double kk = static_cast<double>(k);
    out[k + 1] = std::sqrt(2.0 / (kk + 1.0)) * x * out[k] -
                 std::sqrt(kk / (kk + 1.0)) * out[k - 1];
  }
}

// Golub-Welsch nodes for the n-point Gauss-Hermite rule (zeros of H_n),
// polished by Newton steps on psi_n. Modified weights w_i*exp(x_i^2) are
// 1/(n psi_{n-1}(x_i)^2), which evaluates without overflow.
void gauss_hermite(std::size_t n, std::vector<double>& nodes,
                   std::vector<double>& mod_weights) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                 static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) {
    const double off = std::sqrt(static_cast<double>(k) / 2.0);
    jacobi(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = off;
    jacobi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("gauss_hermite: eigensolver failed");

  nodes.resize(n);
  mod_weights.resize(n);
  std::vector<double> psi(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    double x = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    for (int it = 0; it < 2; ++it) {
      hermite_functions(x, psi);
      // psi_n'(x) = sqrt(2n) psi_{n-1}(x) - x psi_n(x)
      const double d = std::sqrt(2.0 * static_cast<double>(n)) * psi[n - 1] -
                       x * psi[n];
      if (d != 0.0) x -= psi[n] / d;
    }
    hermite_functions(x, psi);
    nodes[i] = x;
    mod_weights[i] = 1.0 / (static_cast<double>(n) * psi[n - 1] * psi[n - 1]);
  }
}

}  // namespace

double BasisSet::eval(std::size_t k, double r) const {
  std::vector<double> buf(k + 1);
  hermite_functions(r / scale, buf);
  return buf[k] / std::sqrt(scale);
}

void BasisSet::eval_all(double r, std::span<double> out) const {
  hermite_functions(r / scale, out);
  const double norm = 1.0 / std::sqrt(scale);
  for (auto& v : out) v *= norm;
}

BasisSet make_basis(BasisKind kind, std::size_t modes, double scale) {
  if (modes == 0) throw std::invalid_argument("make_basis: need at least one mode");
  if (!(scale > 0.0)) throw std::invalid_argument("make_basis: scale must be positive");
  BasisSet basis;
  basis.kind = kind;
  basis.size = modes;
  basis.scale = scale;
  std::vector<double> nodes, weights;
  gauss_hermite(4 * modes, nodes, weights);
  basis.qnodes.resize(nodes.size());
  basis.qweights.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    basis.qnodes[i] = scale * nodes[i];
    basis.qweights[i] = scale * weights[i];
  }
  return basis;
}

Loadings project_loading(const std::function<double(double)>& f,
                         const BasisSet& basis) {
  const std::size_t K = basis.size;
  Loadings result;
  result.g.assign(K, 0.0);
  double f_sq = 0.0;
  std::vector<double> ek(K);
  for (std::size_t i = 0; i < basis.qnodes.size(); ++i) {
    const double r = basis.qnodes[i];
    const double w = basis.qweights[i];
    const double fv = f(r);
    basis.eval_all(r, ek);
    for (std::size_t k = 0; k < K; ++k) result.g[k] += w * fv * ek[k];
    f_sq += w * fv * fv;
  }
  double g_sq = 0.0;
  for (double v : result.g) {
    if (!std::isfinite(v))
      throw std::runtime_error("project_loading: non-finite quadrature result");
    g_sq += v * v;
  }
  result.captured_fraction = f_sq > 0.0 ? g_sq / f_sq : 1.0;
  return result;
}

void gaussian_bump_loadings(double center, double amplitude,
                            const BasisSet& basis, std::span<double> out) {
  // I_k = int exp(-(center-r)^2) psi_k(r) dr obeys a two-term recurrence
  // obtained from the psi recurrence and integration by parts:
  //   I_{k+1} = (2/3) sqrt(2/(k+1)) c I_k - (1/3) sqrt(k/(k+1)) I_{k-1}
  const std::size_t K = out.size();
  if (K == 0) return;
  const double c = center;
  const double i0 = amplitude * kPiQuarterInv *
                    std::sqrt(2.0 * M_PI / 3.0) * std::exp(-c * c / 3.0);
  out[0] = i0;
  if (K == 1) return;
  out[1] = (2.0 / 3.0) * std::sqrt(2.0) * c * i0;
  for (std::size_t k = 1; k + 1 < K; ++k) {
    const double kk = static_cast<double>(k);
    out[k + 1] = (2.0 / 3.0) * std::sqrt(2.0 / (kk + 1.0)) * c * out[k] -
                 (1.0 / 3.0) * std::sqrt(kk / (kk + 1.0)) * out[k - 1];
  }
}

Loadings project_loading(const GaussianBump& f, const BasisSet& basis) {
  if (basis.kind == BasisKind::hermite && basis.scale == 1.0) {
    Loadings result;
    result.g.resize(basis.size);
    gaussian_bump_loadings(f.center, f.amplitude, basis, result.g);
    double g_sq = 0.0;
    for (double v : result.g) g_sq += v * v;
    // int f^2 dr = amplitude^2 sqrt(pi/2)
    const double f_sq = f.amplitude * f.amplitude * std::sqrt(M_PI / 2.0);
    result.captured_fraction = g_sq / f_sq;
    return result;
  }
  const double c = f.center;
  const double a = f.amplitude;
  return project_loading(
      [c, a](double r) { return a * std::exp(-(c - r) * (c - r)); }, basis);
}

}  // namespace flowsmp
