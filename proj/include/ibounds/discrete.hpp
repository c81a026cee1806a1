#pragma once

#include <utility>
#include <vector>

#include "ibounds/sample.hpp"
#include "ibounds/types.hpp"

namespace ibounds {

// Finite-support fit: theta(v) = sum_j gamma_j 1(v = v_j), gamma_j the cell
// means of the transformed outcome.
struct DiscreteFit {
  std::vector<double> support_points;
  std::vector<double> gamma_hat;
  std::vector<double> omega_diag;   // diagonal of Omega-hat, variance of sqrt(n)(gamma-hat - gamma)
  std::vector<std::size_t> cell_counts;
  std::size_t n = 0;
};

// Cell means and diagonal covariance. Every support cell must contain at
// least two observations.
DiscreteFit fit_discrete(const Sample& sample, const std::vector<double>& support);

std::pair<BoundCurve, InfluenceWeights> discrete_curve(const DiscreteFit& fit,
                                                       Side side = Side::Upper);

}  // namespace ibounds
