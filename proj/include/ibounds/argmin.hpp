#pragma once

#include "ibounds/types.hpp"

namespace ibounds {

enum class ArgminMode { Parametric, Nonparametric };

// Estimated epsilon-argmin set (argmax for Lower-side curves):
//   Upper: { v : theta_hat(v) <= min theta_hat + ell_n c_n + eps }
//   Lower: { v : theta_hat(v) >= max theta_hat - ell_n c_n - eps }
// with ell_n = 2 sqrt(log n) sup_v s(v), c_n = 1 (parametric) or
// sqrt(log n) (nonparametric).
ArgminSet estimate_Veps(const BoundCurve& curve, double epsilon, ArgminMode mode);

// Lebesgue measure of the member set: (member count) * (grid spacing).
double set_measure(const ArgminSet& set, const EvaluationGrid& grid);

}  // namespace ibounds
