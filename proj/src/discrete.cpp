#include "ibounds/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ibounds {

DiscreteFit fit_discrete(const Sample& sample, const std::vector<double>& support) {
  if (support.empty()) throw std::invalid_argument("fit_discrete: empty support");
  if (sample.d() != 1) throw std::invalid_argument("fit_discrete: only d = 1 is supported");
  {
    std::vector<double> s = support;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw std::invalid_argument("fit_discrete: duplicate support points");
  }
  const std::size_t J = support.size();
  DiscreteFit fit;
  fit.support_points = support;
  fit.gamma_hat.assign(J, 0.0);
  fit.omega_diag.assign(J, 0.0);
  fit.cell_counts.assign(J, 0);
  fit.n = sample.n();

  std::vector<std::vector<double>> cells(J);
  const std::vector<double> v = sample.v1();
  for (std::size_t i = 0; i < sample.n(); ++i) {
    auto it = std::find(support.begin(), support.end(), v[i]);
    if (it == support.end())
      throw std::invalid_argument("fit_discrete: observation outside support");
    cells[static_cast<std::size_t>(it - support.begin())].push_back(sample.y[i]);
  }
  for (std::size_t j = 0; j < J; ++j) {
    if (cells[j].empty()) throw std::invalid_argument("fit_discrete: empty cell");
    if (cells[j].size() < 2)
      throw std::invalid_argument("fit_discrete: singleton cell (variance undefined)");
    fit.cell_counts[j] = cells[j].size();
    fit.gamma_hat[j] = stats::mean(cells[j]);
    // Var of sqrt(n)(gamma_hat_j - gamma_j): n * s_j^2 / n_j, unbiased divisor.
    fit.omega_diag[j] = static_cast<double>(fit.n) * stats::variance(cells[j]) /
                        static_cast<double>(fit.cell_counts[j]);
  }
  return fit;
}

std::pair<BoundCurve, InfluenceWeights> discrete_curve(const DiscreteFit& fit, Side side) {
  const std::size_t J = fit.support_points.size();
  std::vector<std::size_t> order(J);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fit.support_points[a] < fit.support_points[b];
  });

  std::vector<double> pts(J), theta(J), se(J);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(J),
                                            static_cast<Eigen::Index>(J));
  for (std::size_t r = 0; r < J; ++r) {
    const std::size_t j = order[r];
    pts[r] = fit.support_points[j];
    theta[r] = fit.gamma_hat[j];
    se[r] = std::sqrt(fit.omega_diag[j] / static_cast<double>(fit.n));
    // g(v_j) = e_j' Omega^{1/2}; Omega diagonal, so a single entry.
    W(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
        std::sqrt(fit.omega_diag[j]);
  }
  const double span = J > 1 ? pts.back() - pts.front() : 0.0;
  // Counting-measure convention for point support; only used for reporting.
  EvaluationGrid grid(pts, pts.front(), pts.back(),
                      span > 0.0 ? span : static_cast<double>(J));
  BoundCurve curve(std::move(grid), std::move(theta), std::move(se), side, fit.n,
                   Smoothing::none(), EstimatorKind::Discrete);
  InfluenceWeights w;
  w.vectors = std::move(W);
  w.norm_consistency.assign(J, 1.0);
  for (std::size_t r = 0; r < J; ++r) {
    const double nrm = w.vectors.row(static_cast<Eigen::Index>(r)).norm();
    const double scaled = std::sqrt(static_cast<double>(fit.n)) * curve.se[r];
    w.norm_consistency[r] = scaled > 0.0 ? nrm / scaled : 0.0;
  }
  return {std::move(curve), std::move(w)};
}

}  // namespace ibounds
