#include "ibounds/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ibounds {

void SplineBasisSpec::validate() const {
  if (degree < 0) throw std::invalid_argument("SplineBasisSpec: negative degree");
  if (!(boundary_hi > boundary_lo))
    throw std::invalid_argument("SplineBasisSpec: empty boundary interval");
  double prev = boundary_lo;
  for (double k : interior_knots) {
    if (!(k > boundary_lo) || !(k < boundary_hi))
      throw std::invalid_argument("SplineBasisSpec: interior knot outside boundary");
    if (k < prev) throw std::invalid_argument("SplineBasisSpec: knots not sorted");
    prev = k;
  }
}

std::vector<double> SplineBasisSpec::full_knots() const {
  std::vector<double> t;
  t.reserve(K() + static_cast<std::size_t>(degree) + 1);
  for (int i = 0; i <= degree; ++i) t.push_back(boundary_lo);
  t.insert(t.end(), interior_knots.begin(), interior_knots.end());
  for (int i = 0; i <= degree; ++i) t.push_back(boundary_hi);
  return t;
}

SplineBasisSpec spline_spec_from_quantiles(std::span<const double> v, std::size_t K,
                                           int degree) {
  if (K < static_cast<std::size_t>(degree) + 1)
    throw std::invalid_argument("spline_spec_from_quantiles: K too small for degree");
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  SplineBasisSpec spec;
  spec.degree = degree;
  spec.boundary_lo = sorted.front();
  spec.boundary_hi = sorted.back();
  const std::size_t m = K - static_cast<std::size_t>(degree) - 1;
  for (std::size_t j = 1; j <= m; ++j)
    spec.interior_knots.push_back(stats::quantile_sorted(
        sorted, static_cast<double>(j) / static_cast<double>(m + 1)));
  // Coincident quantiles would make the design rank deficient downstream;
  // keep them but let the rank check in fit_series report it.
  spec.validate();
  return spec;
}

Eigen::VectorXd bspline_basis(double v, const SplineBasisSpec& spec) {
  spec.validate();
  if (v < spec.boundary_lo || v > spec.boundary_hi)
    throw std::invalid_argument("bspline_basis: v outside boundary knots");
  const int p = spec.degree;
  const std::size_t K = spec.K();
  const std::vector<double> t = spec.full_knots();

  // Knot span containing v, clamped to the last nondegenerate interval.
  std::size_t span = static_cast<std::size_t>(p);
  while (span + 1 < K && v >= t[span + 1]) ++span;

  // de Boor: values of the p+1 basis functions that are nonzero on the span.
  std::vector<double> N(static_cast<std::size_t>(p) + 1, 0.0);
  std::vector<double> left(static_cast<std::size_t>(p) + 1, 0.0);
  std::vector<double> right(static_cast<std::size_t>(p) + 1, 0.0);
  N[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[static_cast<std::size_t>(j)] = v - t[span + 1 - static_cast<std::size_t>(j)];
    right[static_cast<std::size_t>(j)] = t[span + static_cast<std::size_t>(j)] - v;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double den = right[static_cast<std::size_t>(r + 1)] +
                         left[static_cast<std::size_t>(j - r)];
      const double temp = den != 0.0 ? N[static_cast<std::size_t>(r)] / den : 0.0;
      N[static_cast<std::size_t>(r)] =
          saved + right[static_cast<std::size_t>(r + 1)] * temp;
      saved = left[static_cast<std::size_t>(j - r)] * temp;
    }
    N[static_cast<std::size_t>(j)] = saved;
  }

  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K));
  for (int j = 0; j <= p; ++j)
    out(static_cast<Eigen::Index>(span - static_cast<std::size_t>(p) +
                                  static_cast<std::size_t>(j))) =
        N[static_cast<std::size_t>(j)];
  return out;
}

namespace {

Eigen::MatrixXd design_matrix(std::span<const double> v, const SplineBasisSpec& spec) {
  Eigen::MatrixXd P(static_cast<Eigen::Index>(v.size()),
                    static_cast<Eigen::Index>(spec.K()));
  for (std::size_t i = 0; i < v.size(); ++i)
    P.row(static_cast<Eigen::Index>(i)) = bspline_basis(v[i], spec).transpose();
  return P;
}

}  // namespace

std::size_t select_K(const Sample& sample, const SeriesOptions& opts) {
  const std::size_t n = sample.n();
  if (n <= 9) throw std::invalid_argument("select_K: need n > 9");
  if (opts.cv_candidates.empty()) throw std::invalid_argument("select_K: no candidates");
  const std::vector<double> v = sample.v1();
  Eigen::Map<const Eigen::VectorXd> y(sample.y.data(), static_cast<Eigen::Index>(n));

  double best_score = std::numeric_limits<double>::infinity();
  std::size_t best_K = 0;
  for (std::size_t Kc : opts.cv_candidates) {
    SplineBasisSpec spec;
    try {
      spec = spline_spec_from_quantiles(v, Kc);
    } catch (const std::invalid_argument&) {
      continue;
    }
    const Eigen::MatrixXd P = design_matrix(v, spec);
    const Eigen::MatrixXd PtP = P.transpose() * P;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(PtP);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) continue;
    const Eigen::VectorXd beta = ldlt.solve(P.transpose() * y);
    const Eigen::VectorXd resid = y - P * beta;
    // Leave-one-out shortcut: e_i / (1 - h_ii) with h_ii the hat diagonal.
    double score = 0.0;
    bool ok = true;
    const Eigen::MatrixXd PtPinvPt = ldlt.solve(P.transpose());
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
      const double hii = P.row(i).dot(PtPinvPt.col(i));
      const double denom = 1.0 - hii;
      if (!(std::abs(denom) > 1e-12)) { ok = false; break; }
      const double e = resid(i) / denom;
      score += e * e;
    }
    score /= static_cast<double>(n);
    if (!ok || !std::isfinite(score)) continue;
    if (score < best_score) {  // ties break toward smaller K (candidates ascend)
      best_score = score;
      best_K = Kc;
    }
  }
  if (best_K == 0) throw std::runtime_error("select_K: all CV candidates failed");
  const double factor = std::pow(static_cast<double>(n), 3.0 / 35.0);
  return static_cast<std::size_t>(std::floor(static_cast<double>(best_K) * factor));
}

SeriesFit fit_series(const Sample& sample, std::size_t K) {
  const std::size_t n = sample.n();
  const std::vector<double> v = sample.v1();
  SeriesFit fit;
  fit.basis = spline_spec_from_quantiles(v, K);
  fit.n = n;

  const Eigen::MatrixXd P = design_matrix(v, fit.basis);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(P);
  if (static_cast<std::size_t>(qr.rank()) < K)
    throw std::runtime_error("fit_series: rank-deficient design for K = " +
                             std::to_string(K));
  Eigen::Map<const Eigen::VectorXd> y(sample.y.data(), static_cast<Eigen::Index>(n));
  fit.beta_hat = qr.solve(y);
  const Eigen::VectorXd resid = y - P * fit.beta_hat;
  fit.residuals.assign(resid.data(), resid.data() + resid.size());

  const Eigen::MatrixXd PtP = P.transpose() * P;
  const Eigen::MatrixXd meat =
      P.transpose() * resid.array().square().matrix().asDiagonal() * P;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(PtP);
  const Eigen::MatrixXd bread = ldlt.solve(Eigen::MatrixXd::Identity(
      static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K)));
  Eigen::MatrixXd omega = static_cast<double>(n) * bread * meat * bread;
  fit.omega_hat = 0.5 * (omega + omega.transpose());
  return fit;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("psd_sqrt: eigendecomposition failed");
  Eigen::VectorXd ev = es.eigenvalues();
  const double lmax = ev.size() > 0 ? ev.maxCoeff() : 0.0;
  const double clip = 1e-12 * std::max(lmax, 0.0);
  const double floor_neg = -1e-8 * std::max(m.trace(), 0.0) - 1e-12;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < floor_neg)
      throw std::runtime_error("psd_sqrt: matrix has a substantially negative eigenvalue");
    ev(i) = ev(i) > clip ? std::sqrt(ev(i)) : 0.0;
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

std::pair<BoundCurve, InfluenceWeights> series_curve(const SeriesFit& fit,
                                                     const EvaluationGrid& grid,
                                                     Side side) {
  if (grid.domain_lo < fit.basis.boundary_lo - 1e-12 ||
      grid.domain_hi > fit.basis.boundary_hi + 1e-12)
    throw std::invalid_argument("series_curve: grid outside boundary knots");
  const std::size_t m = grid.size();
  const std::size_t K = fit.basis.K();
  const Eigen::MatrixXd root = psd_sqrt(fit.omega_hat);
  const double sqrt_n = std::sqrt(static_cast<double>(fit.n));

  std::vector<double> theta(m), se(m);
  Eigen::MatrixXd W(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(K));
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::VectorXd p = bspline_basis(grid.points[i], fit.basis);
    theta[i] = p.dot(fit.beta_hat);
    W.row(static_cast<Eigen::Index>(i)) = (p.transpose() * root);
    se[i] = W.row(static_cast<Eigen::Index>(i)).norm() / sqrt_n;
  }
  BoundCurve curve(grid, std::move(theta), std::move(se), side, fit.n,
                   Smoothing::series_terms(K), EstimatorKind::Series);
  InfluenceWeights w;
  w.vectors = std::move(W);
  w.norm_consistency.assign(m, 1.0);
  return {std::move(curve), std::move(w)};
}

}  // namespace ibounds
