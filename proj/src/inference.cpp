#include "ibounds/inference.hpp"

#include <cmath>
#include <stdexcept>

#include "ibounds/stats.hpp"

namespace ibounds {

OneSidedResult precision_corrected_bound(const BoundCurve& curve, const ArgminSet& set,
                                         const CriticalValue& k) {
  if (set.indices.empty())
    throw std::invalid_argument("precision_corrected_bound: empty set");
  if (!std::isfinite(k.k))
    throw std::invalid_argument("precision_corrected_bound: non-finite k");
  const double sign = curve.side == Side::Upper ? 1.0 : -1.0;
  OneSidedResult res;
  res.p = k.p;
  res.side = curve.side;
  res.k_used = k;
  res.set_used = set;
  bool first = true;
  for (std::size_t i : set.indices) {
    if (i >= curve.theta_hat.size())
      throw std::invalid_argument("precision_corrected_bound: set index out of range");
    const double corrected = curve.theta_hat[i] + sign * k.k * curve.se[i];
    const bool better =
        first || (curve.side == Side::Upper ? corrected < res.theta_p
                                            : corrected > res.theta_p);
    if (better) {
      res.theta_p = corrected;
      res.argopt_index = i;
    }
    first = false;
  }
  return res;
}

OneSidedResult half_median_unbiased(const BoundCurve& curve, const ArgminSet& set,
                                    const CvFn& cv) {
  return precision_corrected_bound(curve, set, cv(0.5));
}

TwoSidedInterval ci_identified_set(const OneSidedResult& lower,
                                   const OneSidedResult& upper) {
  if (lower.side != Side::Lower || upper.side != Side::Upper)
    throw std::invalid_argument("ci_identified_set: sides mismatched");
  if (lower.p != upper.p)
    throw std::invalid_argument("ci_identified_set: one-sided levels differ");
  TwoSidedInterval iv;
  iv.kind = IntervalKind::IdentifiedSet;
  iv.lo = lower.theta_p;
  iv.hi = upper.theta_p;
  iv.p_lower = lower.p;
  iv.p_upper = upper.p;
  iv.level = 1.0 - 2.0 * (1.0 - lower.p);  // p = 1 - alpha/2
  iv.crossed = iv.lo > iv.hi;
  return iv;
}

TwoSidedInterval ci_parameter(const BoundCurve& lower_curve, const ArgminSet& lower_set,
                              const CvFn& cv_lower, const BoundCurve& upper_curve,
                              const ArgminSet& upper_set, const CvFn& cv_upper,
                              double alpha, TauRule rule) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("ci_parameter: alpha outside (0,1)");
  if (lower_curve.side != Side::Lower || upper_curve.side != Side::Upper)
    throw std::invalid_argument("ci_parameter: curve sides mismatched");
  if (lower_curve.n != upper_curve.n)
    throw std::invalid_argument("ci_parameter: curves from different samples");

  auto lower_at = [&](double p) {
    return precision_corrected_bound(lower_curve, lower_set, cv_lower(p)).theta_p;
  };
  auto upper_at = [&](double p) {
    return precision_corrected_bound(upper_curve, upper_set, cv_upper(p)).theta_p;
  };

  const double delta = upper_at(0.5) - lower_at(0.5);
  const double delta_plus = std::max(delta, 0.0);

  double tau;
  std::optional<double> sigma_n;
  if (rule == TauRule::SigmaRule) {
    const double sig = std::max(upper_at(0.75) - upper_at(0.25),
                                lower_at(0.75) - lower_at(0.25));
    if (sig > 0.0) {
      sigma_n = sig;
      tau = 1.0 / (sig * std::log(static_cast<double>(lower_curve.n)));
    } else {
      tau = std::log(static_cast<double>(lower_curve.n));  // degenerate spread
    }
  } else {
    tau = std::log(static_cast<double>(lower_curve.n));
  }

  const double p_hat = 1.0 - stats::norm_cdf(tau * delta_plus) * alpha;

  TwoSidedInterval iv;
  iv.kind = IntervalKind::Parameter;
  iv.lo = lower_at(p_hat);
  iv.hi = upper_at(p_hat);
  iv.level = 1.0 - alpha;
  iv.p_lower = iv.p_upper = p_hat;
  iv.crossed = iv.lo > iv.hi;
  iv.delta_hat = delta;
  iv.p_hat_n = p_hat;
  iv.tau_n = tau;
  iv.sigma_n = sigma_n;
  return iv;
}

NonnegativityTest test_nonnegativity(const BoundCurve& curve, const ArgminSet& set,
                                     double alpha, const CvFn& cv) {
  if (curve.side != Side::Upper)
    throw std::invalid_argument("test_nonnegativity: curve must be Upper-side");
  const OneSidedResult res =
      precision_corrected_bound(curve, set, cv(1.0 - alpha));
  // Weak inequality: theta_alpha = 0 is not a rejection.
  return {res.theta_p < 0.0, res.theta_p};
}

}  // namespace ibounds
