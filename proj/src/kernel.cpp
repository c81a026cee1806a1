#include "ibounds/kernel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ibounds {

namespace {
constexpr double kFloor = 1e-10;
}

RotBandwidth rot_bandwidth(const Sample& sample) {
  if (sample.d() != 1) throw std::invalid_argument("rot_bandwidth: only d = 1");
  const std::size_t n = sample.n();
  if (n < 10) throw std::invalid_argument("rot_bandwidth: sample too small");
  const std::vector<double> v = sample.v1();
  const double s_v = stats::sd(v);
  if (!(s_v > 0.0)) throw std::invalid_argument("rot_bandwidth: degenerate v");
  const double v_mean = stats::mean(v);

  // Global quartic fit of y on studentized v.
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), 5);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (v[i] - v_mean) / s_v;
    double pw = 1.0;
    for (int j = 0; j < 5; ++j) {
      X(static_cast<Eigen::Index>(i), j) = pw;
      pw *= t;
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < 5)
    throw std::runtime_error("rot_bandwidth: quartic design is rank deficient");
  Eigen::Map<const Eigen::VectorXd> y(sample.y.data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd b = qr.solve(y);
  const Eigen::VectorXd resid = y - X * b;
  const double sigma2 = resid.squaredNorm() / static_cast<double>(n);

  std::vector<double> vt(n);
  for (std::size_t i = 0; i < n; ++i) vt[i] = (v[i] - v_mean) / s_v;
  std::vector<double> vts = vt;
  std::sort(vts.begin(), vts.end());
  const double q10 = stats::quantile_sorted(vts, 0.10);
  const double q90 = stats::quantile_sorted(vts, 0.90);

  double denom = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (vt[i] < q10 || vt[i] > q90) continue;
    const double d2 = 2.0 * b(2) + 6.0 * b(3) * vt[i] + 12.0 * b(4) * vt[i] * vt[i];
    denom += d2 * d2;
  }
  denom /= static_cast<double>(n);

  const double under = std::pow(static_cast<double>(n), 1.0 / 5.0 - 2.0 / 7.0);
  // Negligible relative to the outcome scale means effectively zero; exact
  // zeros never survive floating point.
  const double y_scale = (y.array() - y.mean()).square().mean();
  if (!(y_scale > 0.0) || !(denom > 1e-12 * y_scale) || !(sigma2 > 1e-12 * y_scale)) {
    // Zero curvature or noiseless fit: fall back to a scale-based bandwidth.
    return {s_v * std::pow(static_cast<double>(n), -2.0 / 7.0), true};
  }
  const double h_rot = 2.036 * std::pow(sigma2 / denom, 0.2) *
                       std::pow(static_cast<double>(n), -0.2);
  return {h_rot * s_v * under, false};
}

std::vector<double> local_linear_fit(const Sample& sample, double h,
                                     std::span<const double> points) {
  if (!(h > 0.0)) throw std::invalid_argument("local_linear_fit: h must be positive");
  if (sample.d() != 1) throw std::invalid_argument("local_linear_fit: only d = 1");
  const std::vector<double> v = sample.v1();
  const std::size_t n = sample.n();
  std::vector<double> out(points.size());
  for (std::size_t g = 0; g < points.size(); ++g) {
    const double p = points[g];
    double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
    std::size_t in_window = 0;
    double first_v = 0.0;
    bool distinct = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = quartic_kernel((p - v[i]) / h);
      if (w <= 0.0) continue;
      if (in_window == 0) first_v = v[i];
      else if (v[i] != first_v) distinct = true;
      ++in_window;
      const double dv = v[i] - p;
      s0 += w;
      s1 += w * dv;
      s2 += w * dv * dv;
      t0 += w * sample.y[i];
      t1 += w * dv * sample.y[i];
    }
    const double det = s0 * s2 - s1 * s1;
    if (in_window < 2 || !distinct || !(det > 0.0))
      throw std::runtime_error(
          "local_linear_fit: fewer than 2 distinct observations within bandwidth of v = " +
          std::to_string(p) + " (increase h or trim the grid)");
    out[g] = (s2 * t0 - s1 * t1) / det;
  }
  return out;
}

namespace {

std::vector<double> nw_condvar(const std::vector<double>& v,
                               const std::vector<double>& resid2, double h,
                               std::span<const double> points) {
  std::vector<double> out(points.size());
  for (std::size_t g = 0; g < points.size(); ++g) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double w = quartic_kernel((points[g] - v[i]) / h);
      num += w * resid2[i];
      den += w;
    }
    out[g] = den > 0.0 ? std::max(num / den, kFloor) : kFloor;
  }
  return out;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> kde_and_condvar(
    const Sample& sample, double h, const EvaluationGrid& grid) {
  const std::vector<double> v = sample.v1();
  const std::size_t n = sample.n();

  std::vector<double> f_hat(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += quartic_kernel((grid.points[g] - v[i]) / h);
    f_hat[g] = std::max(s / (static_cast<double>(n) * h), kFloor);
  }

  const std::vector<double> theta_at_data = local_linear_fit(sample, h, v);
  std::vector<double> resid2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = sample.y[i] - theta_at_data[i];
    resid2[i] = e * e;
  }
  return {std::move(f_hat), nw_condvar(v, resid2, h, grid.points)};
}

KernelFit fit_local_linear(const Sample& sample, double h, const EvaluationGrid& grid) {
  KernelFit fit;
  fit.h = h;
  fit.n = sample.n();
  fit.theta_hat = local_linear_fit(sample, h, grid.points);
  auto [f, s2] = kde_and_condvar(sample, h, grid);
  fit.f_hat = std::move(f);
  fit.sigma2_hat = std::move(s2);
  return fit;
}

std::pair<BoundCurve, InfluenceWeights> kernel_curve(const KernelFit& fit,
                                                     const Sample& sample,
                                                     const EvaluationGrid& grid,
                                                     Side side) {
  if (fit.theta_hat.size() != grid.size())
    throw std::invalid_argument("kernel_curve: fit/grid mismatch");
  const std::size_t n = sample.n();
  const std::size_t m = grid.size();
  const double h = fit.h;
  const std::vector<double> v = sample.v1();
  const double nh = static_cast<double>(n) * h;

  // sigma-hat at the data points for the influence-weight vectors.
  const std::vector<double> theta_at_data = local_linear_fit(sample, h, v);
  std::vector<double> resid2(n), sigma_at_data(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = sample.y[i] - theta_at_data[i];
    resid2[i] = e * e;
  }
  {
    std::vector<double> s2d(n);
    for (std::size_t i = 0; i < n; ++i) {
      double num = 0.0, den = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double w = quartic_kernel((v[i] - v[j]) / h);
        num += w * resid2[j];
        den += w;
      }
      s2d[i] = den > 0.0 ? std::max(num / den, 0.0) : 0.0;
      sigma_at_data[i] = std::sqrt(s2d[i]);
    }
  }

  std::vector<double> theta = fit.theta_hat;
  std::vector<double> se(m);
  Eigen::MatrixXd W(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  const double sqrt_nh = std::sqrt(nh);
  for (std::size_t g = 0; g < m; ++g) {
    se[g] = std::sqrt(fit.sigma2_hat[g] * kQuarticIntK2 / (nh * fit.f_hat[g]));
    for (std::size_t i = 0; i < n; ++i)
      W(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(i)) =
          sigma_at_data[i] * quartic_kernel((grid.points[g] - v[i]) / h) /
          (sqrt_nh * fit.f_hat[g]);
  }
  BoundCurve curve(grid, std::move(theta), std::move(se), side, n,
                   Smoothing::bandwidth(h), EstimatorKind::LocalLinear);
  InfluenceWeights w;
  w.vectors = std::move(W);
  w.norm_consistency.assign(m, 0.0);
  for (std::size_t g = 0; g < m; ++g) {
    const double scaled = sqrt_nh * curve.se[g];
    w.norm_consistency[g] =
        scaled > 0.0 ? w.vectors.row(static_cast<Eigen::Index>(g)).norm() / scaled : 0.0;
  }
  return {std::move(curve), std::move(w)};
}

}  // namespace ibounds
