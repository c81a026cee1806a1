#include "ibounds/critical_values.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ibounds/kernel.hpp"
#include "ibounds/rng.hpp"

namespace ibounds {

namespace {

constexpr std::size_t kBlock = 256;  // draws per RNG substream

void check_level(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("critical value: p must lie in (0,1)");
}

double order_stat_quantile(std::vector<double>& sims, double p) {
  std::sort(sims.begin(), sims.end());
  const auto idx = static_cast<std::size_t>(
      std::ceil(p * static_cast<double>(sims.size())));
  return sims[std::max<std::size_t>(idx, 1) - 1];
}

// Member rows normalized to unit length. Throws on a zero-norm member.
Eigen::MatrixXd unit_member_rows(const InfluenceWeights& weights, const ArgminSet& set) {
  if (set.indices.empty()) throw std::invalid_argument("critical value: empty set");
  Eigen::MatrixXd A(static_cast<Eigen::Index>(set.indices.size()), weights.vectors.cols());
  for (std::size_t r = 0; r < set.indices.size(); ++r) {
    const auto row = weights.vectors.row(static_cast<Eigen::Index>(set.indices[r]));
    const double nrm = row.norm();
    if (!(nrm > 0.0))
      throw std::runtime_error(
          "critical value: zero-norm influence vector inside the set (degenerate se)");
    A.row(static_cast<Eigen::Index>(r)) = row / nrm;
  }
  return A;
}

std::vector<double> simulate_maxima(const Eigen::MatrixXd& A, std::size_t R,
                                    std::uint64_t seed) {
  const Eigen::Index L = A.cols();
  std::vector<double> sims;
  sims.reserve(R);
  Eigen::MatrixXd Z(L, static_cast<Eigen::Index>(kBlock));
  std::normal_distribution<double> normal;
  for (std::size_t start = 0, block = 0; start < R; start += kBlock, ++block) {
    const auto cols = static_cast<Eigen::Index>(std::min(kBlock, R - start));
    auto eng = rng::engine(rng::substream(seed, block));
    normal.reset();
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index l = 0; l < L; ++l) Z(l, c) = normal(eng);
    const Eigen::MatrixXd vals = A * Z.leftCols(cols);
    for (Eigen::Index c = 0; c < cols; ++c) sims.push_back(vals.col(c).maxCoeff());
  }
  return sims;
}

}  // namespace

std::vector<CriticalValue> simulate_k_levels(const InfluenceWeights& weights,
                                             const ArgminSet& set,
                                             std::span<const double> levels,
                                             std::size_t R, std::uint64_t seed) {
  for (double p : levels) check_level(p);
  if (R < 1000) throw std::invalid_argument("simulate_k: need R >= 1000");
  const Eigen::MatrixXd A = unit_member_rows(weights, set);
  std::vector<double> sims = simulate_maxima(A, R, seed);
  std::sort(sims.begin(), sims.end());
  std::vector<CriticalValue> out;
  out.reserve(levels.size());
  for (double p : levels) {
    const auto idx =
        static_cast<std::size_t>(std::ceil(p * static_cast<double>(R)));
    CriticalValue cv;
    cv.p = p;
    cv.k = sims[std::max<std::size_t>(idx, 1) - 1];
    cv.method = CvMethod::Simulated;
    cv.draws = R;
    cv.seed = seed;
    out.push_back(cv);
  }
  return out;
}

CriticalValue simulate_k(const InfluenceWeights& weights, const ArgminSet& set,
                         double p, std::size_t R, std::uint64_t seed) {
  return simulate_k_levels(weights, set, std::span<const double>(&p, 1), R, seed)[0];
}

CriticalValue analytic_series_k(const InfluenceWeights& weights, const ArgminSet& set,
                                const EvaluationGrid& grid, double p,
                                std::size_t fallback_R, std::uint64_t seed) {
  check_level(p);
  if (set.indices.size() < 2)
    return simulate_k(weights, set, p, fallback_R, seed);

  // alpha_n(v) = g(v)/||g(v)|| on the full grid; gradient by finite
  // differences, central where both neighbors are usable.
  const Eigen::Index m = weights.vectors.rows();
  std::vector<double> norms(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) norms[static_cast<std::size_t>(i)] =
      weights.vectors.row(i).norm();
  auto alpha = [&](Eigen::Index i) -> Eigen::RowVectorXd {
    return weights.vectors.row(i) / norms[static_cast<std::size_t>(i)];
  };
  const double dx = grid.spacing();
  auto grad_norm = [&](std::size_t i) -> double {
    const auto ii = static_cast<Eigen::Index>(i);
    const bool has_lo = i > 0 && norms[i - 1] > 0.0;
    const bool has_hi = i + 1 < static_cast<std::size_t>(m) && norms[i + 1] > 0.0;
    if (norms[i] <= 0.0) return 0.0;
    if (has_lo && has_hi) return (alpha(ii + 1) - alpha(ii - 1)).norm() / (2.0 * dx);
    if (has_hi) return (alpha(ii + 1) - alpha(ii)).norm() / dx;
    if (has_lo) return (alpha(ii) - alpha(ii - 1)).norm() / dx;
    return 0.0;
  };

  // Trapezoid over contiguous runs of member indices.
  double kappa = 0.0;
  const auto& idx = set.indices;
  std::size_t run_start = 0;
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const bool run_end = r + 1 == idx.size() || idx[r + 1] != idx[r] + 1;
    if (!run_end) continue;
    if (r == run_start) {
      kappa += grad_norm(idx[r]) * dx;  // singleton run
    } else {
      for (std::size_t s = run_start; s < r; ++s)
        kappa += 0.5 * (grad_norm(idx[s]) + grad_norm(idx[s + 1])) * dx;
    }
    run_start = r + 1;
  }

  const double arg = kappa / (2.0 * std::numbers::pi);
  if (!(arg > 1.0)) return simulate_k(weights, set, p, fallback_R, seed);
  const double a_n = std::sqrt(2.0 * std::log(arg));
  CriticalValue cv;
  cv.p = p;
  cv.k = a_n - std::log(1.0 - p) / a_n;
  cv.method = CvMethod::SeriesExponential;
  cv.a_n = a_n;
  cv.b_n = a_n;
  return cv;
}

double kernel_a_n(double V_measure, double h, int d) {
  if (!(V_measure > 0.0)) throw std::invalid_argument("kernel_a_n: mes(V) must be > 0");
  if (!(h > 0.0)) throw std::invalid_argument("kernel_a_n: h must be > 0");
  if (d < 1) throw std::invalid_argument("kernel_a_n: d must be >= 1");
  const double two_pi = 2.0 * std::numbers::pi;
  if (d == 1) {
    const double arg = (V_measure / h) * std::sqrt(kQuarticLambda) / two_pi;
    return arg > 1.0 ? std::sqrt(2.0 * std::log(arg)) : 0.0;
  }
  // Largest root of mes h^{-d} lambda^{d/2} (2pi)^{-(d+1)/2} a^{d-1} e^{-a^2/2} = 1
  // on the decreasing branch a > sqrt(d-1); log form for stability.
  const double c = std::log(V_measure) - d * std::log(h) +
                   0.5 * d * std::log(kQuarticLambda) -
                   0.5 * (d + 1) * std::log(two_pi);
  auto f = [&](double a) { return c + (d - 1) * std::log(a) - 0.5 * a * a; };
  double lo = std::max(1.0, std::sqrt(static_cast<double>(d - 1)));
  double hi = 100.0;
  if (f(lo) < 0.0 || f(hi) > 0.0) return 0.0;  // no root in bracket -> caller falls back
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) >= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

CriticalValue analytic_kernel_k(double a_n, double p, KernelCvVariant variant,
                                double h, double V_measure) {
  check_level(p);
  const double c_inf = -std::log(-std::log(p));  // Gumbel p-quantile
  CriticalValue cv;
  cv.p = p;
  switch (variant) {
    case KernelCvVariant::Gumbel: {
      if (!(a_n > 0.0)) throw std::invalid_argument("analytic_kernel_k: a_n must be > 0");
      cv.k = a_n + c_inf / a_n;
      cv.method = CvMethod::KernelGumbel;
      cv.a_n = a_n;
      cv.b_n = a_n;
      return cv;
    }
    case KernelCvVariant::GumbelApprox: {
      if (!(a_n > 0.0)) throw std::invalid_argument("analytic_kernel_k: a_n must be > 0");
      const double under = a_n * a_n + 2.0 * c_inf;
      if (under < 0.0)
        return analytic_kernel_k(a_n, p, KernelCvVariant::Gumbel, h, V_measure);
      cv.k = std::sqrt(under);
      cv.method = CvMethod::KernelGumbelApprox;
      cv.a_n = a_n;
      cv.b_n = a_n;
      return cv;
    }
    case KernelCvVariant::HardleLinton: {
      const double arg = V_measure / h;
      if (!(arg > 1.0))
        return analytic_kernel_k(a_n, p, KernelCvVariant::Gumbel, h, V_measure);
      const double a = std::sqrt(2.0 * std::log(arg));
      const double b = a + std::log(std::sqrt(kQuarticLambda /
                                              (2.0 * std::numbers::pi) / a));
      cv.k = b + c_inf / a;
      cv.method = CvMethod::KernelHardleLinton;
      cv.a_n = a;
      cv.b_n = b;
      return cv;
    }
  }
  throw std::logic_error("analytic_kernel_k: unknown variant");
}

Eigen::MatrixXd weights_correlation(const InfluenceWeights& weights, const ArgminSet& set) {
  const Eigen::MatrixXd A = unit_member_rows(weights, set);
  Eigen::MatrixXd C = A * A.transpose();
  C.diagonal().setOnes();
  return C;
}

double bruteforce_sup_quantile(const Eigen::MatrixXd& correlation, double p,
                               std::size_t draws, std::uint64_t seed) {
  check_level(p);
  if (correlation.rows() != correlation.cols())
    throw std::invalid_argument("bruteforce_sup_quantile: non-square matrix");
  const Eigen::Index m = correlation.rows();
  if (m < 1 || m > 50)
    throw std::invalid_argument("bruteforce_sup_quantile: set size must be in [1,50]");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(correlation);
  Eigen::VectorXd ev = es.eigenvalues();
  const double lmax = ev.maxCoeff();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (ev(i) < -1e-8 * std::max(lmax, 1.0))
      throw std::invalid_argument("bruteforce_sup_quantile: matrix is not PSD");
    ev(i) = std::max(ev(i), 0.0);
  }
  const Eigen::MatrixXd factor =
      es.eigenvectors() * ev.cwiseSqrt().asDiagonal();

  std::vector<double> sims(draws);
  auto eng = rng::engine(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(m);
  for (std::size_t r = 0; r < draws; ++r) {
    for (Eigen::Index i = 0; i < m; ++i) z(i) = normal(eng);
    sims[r] = (factor * z).maxCoeff();
  }
  return order_stat_quantile(sims, p);
}

}  // namespace ibounds
