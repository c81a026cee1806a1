#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "ibounds/types.hpp"

namespace ibounds {

// Observations (y_i, z_i, v_i), v_i of dimension d >= 1.
struct Sample {
  std::vector<double> y;
  std::vector<double> z;
  Eigen::MatrixXd v;  // n x d

  Sample() = default;
  Sample(std::vector<double> y_, std::vector<double> z_, Eigen::MatrixXd v_);

  std::size_t n() const { return y.size(); }
  std::size_t d() const { return static_cast<std::size_t>(v.cols()); }

  // First covariate column as a vector (the scalar-v common case).
  std::vector<double> v1() const;
};

enum class BoundTarget { LowerBound, UpperBound };

// Which indicator generates the transformed outcome:
//   RealizedTreatment: 1{z = t}   (MIV bound form)
//   MonotoneResponse:  1{t >= z}  for the lower bound, 1{t <= z} for the upper
enum class TransformForm { RealizedTreatment, MonotoneResponse };

struct TransformSpec {
  double t = 0.0;
  double y0 = 0.0;  // left support endpoint
  double y1 = 0.0;  // right support endpoint
  BoundTarget target = BoundTarget::LowerBound;
  TransformForm form = TransformForm::RealizedTreatment;
};

// Replaces y by the bound-generating outcome Y^l or Y^u.
Sample transform_outcome(const Sample& sample, const TransformSpec& spec);

// G equally spaced points from the trim_lo_pct empirical percentile of v to
// `hi` (or to the symmetric upper percentile when hi is unset). d=1 only.
EvaluationGrid build_grid(const Sample& sample, std::size_t G, double trim_lo_pct,
                          std::optional<double> hi);

}  // namespace ibounds
