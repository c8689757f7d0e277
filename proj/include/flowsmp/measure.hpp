#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace flowsmp {

// Weighted atoms on the line. Atom identity is preserved across maps
// (coincident images are never merged) because the flow and the Lions
// pairing both match atom i across measures.
struct DiscreteMeasure {
  std::vector<double> atoms;
  std::vector<double> weights;

  DiscreteMeasure() = default;
  DiscreteMeasure(std::vector<double> a, std::vector<double> w);

  std::size_t size() const { return atoms.size(); }
  double mean() const;
  double second_moment() const;
};

DiscreteMeasure dirac(double at);
DiscreteMeasure uniform_atoms(std::span<const double> atoms);

// Transport plan between two measures; entries are (i, j, mass).
struct Coupling {
  struct Entry {
    std::size_t from, to;
    double mass;
  };
  std::vector<Entry> entries;

  double cost_sq(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const;
  // max marginal defect against the two measures
  double marginal_error(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const;
};

DiscreteMeasure pushforward(const DiscreteMeasure& mu,
                            const std::function<double(double)>& map);

// Monotone (sorted-quantile) coupling; optimal for convex costs in 1-D.
Coupling monotone_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

double w2(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// rho^2(mu, nu) = int int Gamma(u-v) [mu-nu](du) [nu-mu](dv) for a
// symmetric kernel Gamma; default Gamma(d) = d^2.
double rho_sq(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
              const std::function<double(double)>& kernel);
double rho_sq(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Lions derivative of h(mu) = rho^2(mu, nu) with the quadratic kernel:
// constant in the atom argument, 4(mean(mu) - mean(nu)).
double rho_grad_quadratic(const DiscreteMeasure& mu_star,
                          const DiscreteMeasure& nu);

// Lions derivative of h(mu) = int int (u-v)^2 mu(du) mu(dv) at atom u_index:
// 4(x_u - mean(mu)).
double rho_grad_self(const DiscreteMeasure& mu_star, std::size_t u_index);

// Central finite difference of a lifted functional h(atom positions, weights)
// along a per-atom direction; the instrument for validating analytic Lions
// derivatives.
using LiftedFn =
    std::function<double(std::span<const double>, std::span<const double>)>;

double lions_fd(const LiftedFn& h, const DiscreteMeasure& mu,
                std::span<const double> direction, double eps = 1e-4);

// Equality as measures (sorts atoms, merges coincident ones) -- distinct
// from identity of the indexed atom families.
bool measures_equal(const DiscreteMeasure& a, const DiscreteMeasure& b,
                    double tol = 1e-12);

void write_measure_csv(const std::string& file, const DiscreteMeasure& mu);
DiscreteMeasure read_measure_csv(const std::string& file);

}  // namespace flowsmp
