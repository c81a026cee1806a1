#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ibounds/sample.hpp"
#include "ibounds/types.hpp"

namespace ibounds {

// Quartic (biweight) kernel, the only kernel used here.
inline double quartic_kernel(double s) {
  if (s < -1.0 || s > 1.0) return 0.0;
  const double t = 1.0 - s * s;
  return 15.0 / 16.0 * t * t;
}

// Closed-form kernel constants; verified against the integration oracle in tests.
inline constexpr double kQuarticIntK2 = 5.0 / 7.0;  // integral of K^2
inline constexpr double kQuarticLambda = 3.0;       // -int K K'' / int K^2

struct RotBandwidth {
  double h = 0.0;
  // Set when the quartic-fit curvature vanished and the fallback
  // h = s_v * n^{-2/7} was used instead.
  bool curvature_fallback = false;
};

// Rule-of-thumb bandwidth with the n^{1/5} * n^{-2/7} undersmoothing factor.
RotBandwidth rot_bandwidth(const Sample& sample);

// Local linear regression of y on v at each point, quartic kernel.
std::vector<double> local_linear_fit(const Sample& sample, double h,
                                     std::span<const double> points);

struct KernelFit {
  double h = 0.0;
  std::vector<double> theta_hat;    // on the grid
  std::vector<double> f_hat;        // density estimate on the grid, floored
  std::vector<double> sigma2_hat;   // conditional variance on the grid, floored
  std::size_t n = 0;
};

// KDE and Nadaraya-Watson regression of squared local-linear residuals,
// both with the same bandwidth and floored at 1e-10.
std::pair<std::vector<double>, std::vector<double>> kde_and_condvar(
    const Sample& sample, double h, const EvaluationGrid& grid);

KernelFit fit_local_linear(const Sample& sample, double h, const EvaluationGrid& grid);

std::pair<BoundCurve, InfluenceWeights> kernel_curve(const KernelFit& fit,
                                                     const Sample& sample,
                                                     const EvaluationGrid& grid,
                                                     Side side = Side::Upper);

}  // namespace ibounds
