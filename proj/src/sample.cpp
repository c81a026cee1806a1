#include "ibounds/sample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ibounds {

Sample::Sample(std::vector<double> y_, std::vector<double> z_, Eigen::MatrixXd v_)
    : y(std::move(y_)), z(std::move(z_)), v(std::move(v_)) {
  if (y.empty()) throw std::invalid_argument("Sample: empty");
  if (z.size() != y.size() || static_cast<std::size_t>(v.rows()) != y.size())
    throw std::invalid_argument("Sample: row count mismatch");
  if (v.cols() < 1) throw std::invalid_argument("Sample: covariate dimension must be >= 1");
  if (!stats::all_finite(y) || !stats::all_finite(z) || !v.allFinite())
    throw std::invalid_argument("Sample: non-finite values");
}

std::vector<double> Sample::v1() const {
  std::vector<double> out(n());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v(static_cast<Eigen::Index>(i), 0);
  return out;
}

Sample transform_outcome(const Sample& sample, const TransformSpec& spec) {
  if (spec.y0 > spec.y1) throw std::invalid_argument("transform_outcome: y0 > y1");
  const bool lower = spec.target == BoundTarget::LowerBound;
  const double fill = lower ? spec.y0 : spec.y1;
  std::vector<double> ty(sample.n());
  for (std::size_t i = 0; i < sample.n(); ++i) {
    bool keep;
    if (spec.form == TransformForm::RealizedTreatment) {
      keep = sample.z[i] == spec.t;
    } else {
      keep = lower ? spec.t >= sample.z[i] : spec.t <= sample.z[i];
    }
    ty[i] = keep ? sample.y[i] : fill;
  }
  return Sample(std::move(ty), sample.z, sample.v);
}

EvaluationGrid build_grid(const Sample& sample, std::size_t G, double trim_lo_pct,
                          std::optional<double> hi) {
  if (G < 2) throw std::invalid_argument("build_grid: need G >= 2");
  if (sample.d() != 1) throw std::invalid_argument("build_grid: only d = 1 is supported");
  std::vector<double> v = sample.v1();
  std::sort(v.begin(), v.end());
  if (v.front() == v.back()) throw std::invalid_argument("build_grid: degenerate v (all equal)");
  const double lo = stats::quantile_sorted(v, trim_lo_pct / 100.0);
  const double up = hi ? *hi : stats::quantile_sorted(v, 1.0 - trim_lo_pct / 100.0);
  if (!(up > lo)) throw std::invalid_argument("build_grid: empty working domain");
  std::vector<double> pts(G);
  for (std::size_t i = 0; i < G; ++i)
    pts[i] = lo + (up - lo) * static_cast<double>(i) / static_cast<double>(G - 1);
  pts.back() = up;
  return EvaluationGrid(std::move(pts), lo, up, up - lo);
}

}  // namespace ibounds
