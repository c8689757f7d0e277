#include "flowsmp/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace flowsmp {

DiscreteMeasure::DiscreteMeasure(std::vector<double> a, std::vector<double> w)
    : atoms(std::move(a)), weights(std::move(w)) {
  if (atoms.empty() || atoms.size() != weights.size())
    throw std::invalid_argument("DiscreteMeasure: need equal-length atoms/weights, size >= 1");
  double total = 0.0;
  for (double wi : weights) {
    if (!(wi >= 0.0)) throw std::invalid_argument("DiscreteMeasure: negative weight");
    total += wi;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("DiscreteMeasure: weights must sum to 1");
  for (double x : atoms)
    if (!std::isfinite(x)) throw std::invalid_argument("DiscreteMeasure: non-finite atom");
}

double DiscreteMeasure::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) m += weights[i] * atoms[i];
  return m;
}

double DiscreteMeasure::second_moment() const {
  double m = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) m += weights[i] * atoms[i] * atoms[i];
  return m;
}

DiscreteMeasure dirac(double at) { return DiscreteMeasure({at}, {1.0}); }

DiscreteMeasure uniform_atoms(std::span<const double> atoms) {
  const double w = 1.0 / static_cast<double>(atoms.size());
  std::vector<double> a(atoms.begin(), atoms.end());
  std::vector<double> ws(atoms.size(), w);
  return DiscreteMeasure(std::move(a), std::move(ws));
}

double Coupling::cost_sq(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
  double c = 0.0;
  for (const Entry& e : entries) {
    const double d = mu.atoms[e.from] - nu.atoms[e.to];
    c += e.mass * d * d;
  }
  return c;
}

double Coupling::marginal_error(const DiscreteMeasure& mu,
                                const DiscreteMeasure& nu) const {
  std::vector<double> row(mu.size(), 0.0), col(nu.size(), 0.0);
  for (const Entry& e : entries) {
    row[e.from] += e.mass;
    col[e.to] += e.mass;
  }
  double err = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i)
    err = std::max(err, std::abs(row[i] - mu.weights[i]));
  for (std::size_t j = 0; j < col.size(); ++j)
    err = std::max(err, std::abs(col[j] - nu.weights[j]));
  return err;
}

DiscreteMeasure pushforward(const DiscreteMeasure& mu,
                            const std::function<double(double)>& map) {
  DiscreteMeasure out;
  out.weights = mu.weights;
  out.atoms.resize(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double y = map(mu.atoms[i]);
    if (!std::isfinite(y))
      throw std::runtime_error("pushforward: non-finite image at atom " + std::to_string(i));
    out.atoms[i] = y;
  }
  return out;
}

namespace {

std::vector<std::size_t> sorted_order(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return idx;
}

}  // namespace

Coupling monotone_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const auto ox = sorted_order(mu.atoms);
  const auto oy = sorted_order(nu.atoms);
  Coupling plan;
  std::size_t i = 0, j = 0;
  double a = mu.weights[ox[0]];
  double b = nu.weights[oy[0]];
  while (i < ox.size() && j < oy.size()) {
    const double mass = std::min(a, b);
    if (mass > 0.0) plan.entries.push_back({ox[i], oy[j], mass});
    a -= mass;
    b -= mass;
    if (a <= 0.0) {
      ++i;
      if (i < ox.size()) a = mu.weights[ox[i]];
    }
    if (b <= 0.0) {
      ++j;
      if (j < oy.size()) b = nu.weights[oy[j]];
    }
  }
  return plan;
}

double w2(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const auto ox = sorted_order(mu.atoms);
  const auto oy = sorted_order(nu.atoms);
  double cost = 0.0;
  std::size_t i = 0, j = 0;
  double a = mu.weights[ox[0]];
  double b = nu.weights[oy[0]];
  while (i < ox.size() && j < oy.size()) {
    const double mass = std::min(a, b);
    const double d = mu.atoms[ox[i]] - nu.atoms[oy[j]];
    cost += mass * d * d;
    a -= mass;
    b -= mass;
    if (a <= 0.0) {
      ++i;
      if (i < ox.size()) a = mu.weights[ox[i]];
    }
    if (b <= 0.0) {
      ++j;
      if (j < oy.size()) b = nu.weights[oy[j]];
    }
  }
  return std::sqrt(cost);
}

double rho_sq(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
              const std::function<double(double)>& kernel) {
  // rho^2 = -int int Gamma(u-v) eta(du) eta(dv) with eta = mu - nu.
  const std::size_t n = mu.size(), m = nu.size();
  std::vector<double> pos(n + m), sgn(n + m);
  for (std::size_t i = 0; i < n; ++i) {
    pos[i] = mu.atoms[i];
    sgn[i] = mu.weights[i];
  }
  for (std::size_t j = 0; j < m; ++j) {
    pos[n + j] = nu.atoms[j];
    sgn[n + j] = -nu.weights[j];
  }
  double acc = 0.0;
  for (std::size_t a = 0; a < pos.size(); ++a)
    for (std::size_t b = 0; b < pos.size(); ++b)
      acc += sgn[a] * sgn[b] * kernel(pos[a] - pos[b]);
  return -acc;
}

double rho_sq(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return rho_sq(mu, nu, [](double d) { return d * d; });
}

double rho_grad_quadratic(const DiscreteMeasure& mu_star,
                          const DiscreteMeasure& nu) {
  return 4.0 * (mu_star.mean() - nu.mean());
}

double rho_grad_self(const DiscreteMeasure& mu_star, std::size_t u_index) {
  if (u_index >= mu_star.size())
    throw std::out_of_range("rho_grad_self: atom index out of range");
  return 4.0 * (mu_star.atoms[u_index] - mu_star.mean());
}

double lions_fd(const LiftedFn& h, const DiscreteMeasure& mu,
                std::span<const double> direction, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("lions_fd: eps must be positive");
  if (direction.size() != mu.size())
    throw std::invalid_argument("lions_fd: direction size mismatch");
  std::vector<double> plus(mu.atoms), minus(mu.atoms);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    plus[i] += eps * direction[i];
    minus[i] -= eps * direction[i];
  }
  const double hp = h(plus, mu.weights);
  const double hm = h(minus, mu.weights);
  if (!std::isfinite(hp) || !std::isfinite(hm))
    throw std::runtime_error("lions_fd: non-finite lifted value");
  return (hp - hm) / (2.0 * eps);
}

bool measures_equal(const DiscreteMeasure& a, const DiscreteMeasure& b,
                    double tol) {
  auto canonical = [tol](const DiscreteMeasure& m) {
    const auto order = sorted_order(m.atoms);
    std::vector<std::pair<double, double>> merged;
    for (std::size_t idx : order) {
      if (!merged.empty() && std::abs(merged.back().first - m.atoms[idx]) <= tol)
        merged.back().second += m.weights[idx];
      else
        merged.emplace_back(m.atoms[idx], m.weights[idx]);
    }
    return merged;
  };
  const auto ca = canonical(a), cb = canonical(b);
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i)
    if (std::abs(ca[i].first - cb[i].first) > tol ||
        std::abs(ca[i].second - cb[i].second) > tol)
      return false;
  return true;
}

void write_measure_csv(const std::string& file, const DiscreteMeasure& mu) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("write_measure_csv: cannot open " + file);
  out << "atom,weight\n";
  char buf[64];
  for (std::size_t i = 0; i < mu.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", mu.atoms[i], mu.weights[i]);
    out << buf;
  }
}

DiscreteMeasure read_measure_csv(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("read_measure_csv: cannot open " + file);
  std::string line;
  if (!std::getline(in, line) || line != "atom,weight")
    throw std::runtime_error("read_measure_csv: bad header in " + file);
  std::vector<double> atoms, weights;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("read_measure_csv: bad row in " + file);
    atoms.push_back(std::stod(line.substr(0, comma)));
    weights.push_back(std::stod(line.substr(comma + 1)));
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

}  // namespace flowsmp
