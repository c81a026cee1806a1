#pragma once

#include <functional>
#include <optional>

#include "ibounds/types.hpp"

namespace ibounds {

// Produces the critical value k(p) for a fixed curve/weight/set context.
using CvFn = std::function<CriticalValue(double p)>;

struct OneSidedResult {
  double p = 0.0;
  double theta_p = 0.0;
  Side side = Side::Upper;
  CriticalValue k_used;
  ArgminSet set_used;
  std::size_t argopt_index = 0;
};

enum class IntervalKind { IdentifiedSet, Parameter };

struct TwoSidedInterval {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.0;  // 1 - alpha
  IntervalKind kind = IntervalKind::IdentifiedSet;
  double p_lower = 0.0;  // one-sided level used for the lower endpoint
  double p_upper = 0.0;
  bool crossed = false;  // lo > hi; reported, not fixed
  std::optional<double> delta_hat;
  std::optional<double> p_hat_n;
  std::optional<double> tau_n;
  std::optional<double> sigma_n;
};

// Optimum of the precision-corrected curve over the member set:
// Upper: min [theta_hat + k s], Lower: max [theta_hat - k s].
OneSidedResult precision_corrected_bound(const BoundCurve& curve, const ArgminSet& set,
                                         const CriticalValue& k);

// The p = 1/2 corrected bound (half-median-unbiased estimator).
OneSidedResult half_median_unbiased(const BoundCurve& curve, const ArgminSet& set,
                                    const CvFn& cv);

// Bonferroni interval for the identified set from two one-sided bands at
// level 1 - alpha/2 each.
TwoSidedInterval ci_identified_set(const OneSidedResult& lower,
                                   const OneSidedResult& upper);

enum class TauRule { LogN, SigmaRule };

// Adaptive interval for the parameter: level p_hat_n = 1 - Phi(tau_n Delta+) alpha.
TwoSidedInterval ci_parameter(const BoundCurve& lower_curve, const ArgminSet& lower_set,
                              const CvFn& cv_lower, const BoundCurve& upper_curve,
                              const ArgminSet& upper_set, const CvFn& cv_upper,
                              double alpha, TauRule rule = TauRule::SigmaRule);

struct NonnegativityTest {
  bool reject = false;
  double theta_alpha = 0.0;  // corrected infimum used for the decision
};

// Conditional-moment-inequality test of H0: theta(v) >= 0 for all v;
// rejects when the corrected infimum is strictly negative.
NonnegativityTest test_nonnegativity(const BoundCurve& curve, const ArgminSet& set,
                                     double alpha, const CvFn& cv);

}  // namespace ibounds
