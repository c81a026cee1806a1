#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "ibounds/sample.hpp"
#include "ibounds/types.hpp"

namespace ibounds {

// Cubic B-spline basis with interior knots at equally spaced sample
// quantiles and clamped boundary knots.
struct SplineBasisSpec {
  int degree = 3;
  std::vector<double> interior_knots;  // strictly inside (boundary_lo, boundary_hi)
  double boundary_lo = 0.0;
  double boundary_hi = 0.0;

  std::size_t K() const { return interior_knots.size() + static_cast<std::size_t>(degree) + 1; }
  std::vector<double> full_knots() const;
  void validate() const;
};

// Basis spec with K functions; interior knots at equally spaced quantiles of v.
SplineBasisSpec spline_spec_from_quantiles(std::span<const double> v, std::size_t K,
                                           int degree = 3);

// All K basis values at v (Cox-de Boor). Nonnegative, sums to one.
Eigen::VectorXd bspline_basis(double v, const SplineBasisSpec& spec);

struct SeriesFit {
  SplineBasisSpec basis;
  Eigen::VectorXd beta_hat;
  Eigen::MatrixXd omega_hat;  // asymptotic covariance of sqrt(n)(beta_hat - beta)
  std::vector<double> residuals;
  std::size_t n = 0;
};

struct SeriesOptions {
  std::vector<std::size_t> cv_candidates = {5, 6, 7, 8, 9};
};

// Undersmoothed term count: floor(K_cv * n^{3/35}), K_cv the leave-one-out
// CV minimizer over the candidate set.
std::size_t select_K(const Sample& sample, const SeriesOptions& opts = {});

// OLS fit with Eicker-White (HC0) sandwich covariance.
SeriesFit fit_series(const Sample& sample, std::size_t K);

std::pair<BoundCurve, InfluenceWeights> series_curve(const SeriesFit& fit,
                                                     const EvaluationGrid& grid,
                                                     Side side = Side::Upper);

// Symmetric PSD square root via eigendecomposition; eigenvalues below
// 1e-12 * lambda_max are clipped to zero.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

}  // namespace ibounds
