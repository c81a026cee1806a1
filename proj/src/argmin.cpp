#include "ibounds/argmin.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ibounds {

ArgminSet estimate_Veps(const BoundCurve& curve, double epsilon, ArgminMode mode) {
  if (epsilon < 0.0) throw std::invalid_argument("estimate_Veps: epsilon < 0");
  if (curve.n < 2) throw std::invalid_argument("estimate_Veps: need n >= 2");
  const double log_n = std::log(static_cast<double>(curve.n));
  const double sup_s = *std::max_element(curve.se.begin(), curve.se.end());
  const double ell_n = 2.0 * std::sqrt(log_n) * sup_s;
  const double c_n = mode == ArgminMode::Parametric ? 1.0 : std::sqrt(log_n);
  const double slack = ell_n * c_n + epsilon;

  ArgminSet set;
  set.epsilon = epsilon;
  set.ell_n = ell_n;
  set.c_n = c_n;
  if (curve.side == Side::Upper) {
    const double opt = *std::min_element(curve.theta_hat.begin(), curve.theta_hat.end());
    set.threshold = opt + slack;
    for (std::size_t i = 0; i < curve.theta_hat.size(); ++i)
      if (curve.theta_hat[i] <= set.threshold) set.indices.push_back(i);
  } else {
    const double opt = *std::max_element(curve.theta_hat.begin(), curve.theta_hat.end());
    set.threshold = opt - slack;
    for (std::size_t i = 0; i < curve.theta_hat.size(); ++i)
      if (curve.theta_hat[i] >= set.threshold) set.indices.push_back(i);
  }
  return set;
}

double set_measure(const ArgminSet& set, const EvaluationGrid& grid) {
  return static_cast<double>(set.indices.size()) * grid.spacing();
}

}  // namespace ibounds
