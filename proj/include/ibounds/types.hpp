#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ibounds/stats.hpp"

namespace ibounds {

// Which side of the identified set a bound-generating function describes.
// Upper: the bound is the infimum of the curve. Lower: the supremum.
enum class Side { Upper, Lower };

enum class EstimatorKind { Discrete, Series, LocalLinear };

// Evaluation grid over the working domain V. All infima/suprema and set
// estimates are taken over these points. d=1: strictly increasing points.
struct EvaluationGrid {
  std::vector<double> points;
  double domain_lo = 0.0;
  double domain_hi = 0.0;
  double measure = 0.0;  // Lebesgue measure of the working domain

  EvaluationGrid() = default;
  EvaluationGrid(std::vector<double> pts, double lo, double hi, double mes)
      : points(std::move(pts)), domain_lo(lo), domain_hi(hi), measure(mes) {
    validate();
  }

  void validate() const {
    if (points.empty()) throw std::invalid_argument("EvaluationGrid: empty");
    if (!(measure > 0.0)) throw std::invalid_argument("EvaluationGrid: measure must be positive");
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!std::isfinite(points[i]) || points[i] < domain_lo - 1e-12 ||
          points[i] > domain_hi + 1e-12)
        throw std::invalid_argument("EvaluationGrid: point outside domain");
      if (i > 0 && !(points[i] > points[i - 1]))
        throw std::invalid_argument("EvaluationGrid: points must be strictly increasing");
    }
  }

  std::size_t size() const { return points.size(); }
  double spacing() const {
    return points.size() > 1 ? (points.back() - points.front()) /
                                   static_cast<double>(points.size() - 1)
                             : measure;
  }
};

struct Smoothing {
  enum class Kind { None, SeriesTerms, Bandwidth };
  Kind kind = Kind::None;
  double value = 0.0;

  static Smoothing none() { return {}; }
  static Smoothing series_terms(std::size_t k) {
    return {Kind::SeriesTerms, static_cast<double>(k)};
  }
  static Smoothing bandwidth(double h) { return {Kind::Bandwidth, h}; }
};

// An estimated bound-generating function on a grid, with pointwise
// standard errors.
struct BoundCurve {
  EvaluationGrid grid;
  std::vector<double> theta_hat;
  std::vector<double> se;
  Side side = Side::Upper;
  std::size_t n = 0;
  Smoothing smoothing;
  EstimatorKind estimator_kind = EstimatorKind::Discrete;

  BoundCurve() = default;
  BoundCurve(EvaluationGrid g, std::vector<double> th, std::vector<double> s,
             Side sd, std::size_t n_, Smoothing sm, EstimatorKind ek)
      : grid(std::move(g)),
        theta_hat(std::move(th)),
        se(std::move(s)),
        side(sd),
        n(n_),
        smoothing(sm),
        estimator_kind(ek) {
    if (theta_hat.size() != grid.size() || se.size() != grid.size())
      throw std::invalid_argument("BoundCurve: length mismatch with grid");
    if (n == 0) throw std::invalid_argument("BoundCurve: n must be positive");
    for (double s_i : se)
      if (!(s_i >= 0.0)) throw std::invalid_argument("BoundCurve: negative or NaN se");
    if (!stats::all_finite(theta_hat))
      throw std::invalid_argument("BoundCurve: non-finite theta_hat");
  }

  // Index of the grid optimum of the raw curve: min for Upper, max for Lower.
  std::size_t argopt() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < theta_hat.size(); ++i) {
      const bool better = side == Side::Upper ? theta_hat[i] < theta_hat[best]
                                              : theta_hat[i] > theta_hat[best];
      if (better) best = i;
    }
    return best;
  }
};

// Per grid point, the vector whose normalized inner product with a standard
// Gaussian approximates the studentized process. Rows index grid points.
struct InfluenceWeights {
  Eigen::MatrixXd vectors;                 // m x L (L = K for series, n for kernel)
  std::vector<double> norm_consistency;    // ||vector_i|| / (scale * se_i), 0 where se_i = 0
};

// Estimated epsilon-argmin (argmax for Lower side) subset of the grid.
struct ArgminSet {
  std::vector<std::size_t> indices;
  double threshold = 0.0;
  double epsilon = 0.0;
  double ell_n = 0.0;
  double c_n = 0.0;

  bool contains(std::size_t i) const {
    for (std::size_t j : indices)
      if (j == i) return true;
    return false;
  }
};

enum class CvMethod {
  Simulated,
  SeriesExponential,
  KernelGumbel,
  KernelGumbelApprox,
  KernelHardleLinton,
};

inline std::string to_string(CvMethod m) {
  switch (m) {
    case CvMethod::Simulated: return "simulated";
    case CvMethod::SeriesExponential: return "series-exponential";
    case CvMethod::KernelGumbel: return "gumbel";
    case CvMethod::KernelGumbelApprox: return "gumbel-approx";
    case CvMethod::KernelHardleLinton: return "hardle-linton";
  }
  return "?";
}

struct CriticalValue {
  double p = 0.0;
  double k = 0.0;
  CvMethod method = CvMethod::Simulated;
  std::optional<double> a_n;
  std::optional<double> b_n;
  std::optional<std::size_t> draws;
  std::optional<std::uint64_t> seed;
};

}  // namespace ibounds
