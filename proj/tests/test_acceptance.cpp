// Acceptance gate: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are pinned here, not tuned at run time.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ibounds/argmin.hpp"
#include "ibounds/critical_values.hpp"
#include "ibounds/inference.hpp"
#include "ibounds/kernel.hpp"
#include "ibounds/montecarlo.hpp"
#include "ibounds/rng.hpp"
#include "ibounds/series.hpp"
#include "ibounds/stats.hpp"

using namespace ibounds;

namespace {

constexpr std::uint64_t kSeed = 20260823;

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

bool within(double value, double target, double tol, std::string& log,
            const char* name) {
  char buf[160];
  const bool ok = std::abs(value - target) <= tol;
  std::snprintf(buf, sizeof(buf), "%s=%.4f (target %.3f +- %.3f)%s ", name, value,
                target, tol, ok ? "" : " OUT");
  log += buf;
  return ok;
}

McConfig base_config(int dgp, std::size_t n, McEstimator est, bool estV,
                     std::size_t reps, std::uint64_t salt) {
  McConfig c;
  c.dgp.kind = dgp;
  c.dgp.n = n;
  c.estimator = est;
  c.estimate_V = estV;
  c.reps = reps;
  c.R = 1000;
  c.seed = rng::substream(kSeed, salt);
  return c;
}

// --- replication-study gates ------------------------------------------------

void criterion1() {
  const McMetrics m =
      run_experiment(base_config(1, 500, McEstimator::Series, false, 1000, 1));
  std::string log;
  bool ok = within(m.corrected.mean_bias, 0.007, 0.02, log, "new_bias");
  ok &= within(m.coverage[1], 0.958, 0.02, log, "cov95");
  ok &= within(m.analog.mean_bias, 0.255, 0.03, log, "analog_bias");
  report(1, ok, "series estimator, flat design, n=500: " + log);
}

void criterion2() {
  const McMetrics m =
      run_experiment(base_config(1, 500, McEstimator::LocalLinear, false, 1000, 2));
  std::string log;
  bool ok = within(m.analog.mean_bias, 0.208, 0.03, log, "analog_bias");
  ok &= within(m.corrected.mean_bias, 0.012, 0.02, log, "new_bias");
  ok &= within(m.coverage[1], 0.943, 0.02, log, "cov95");
  ok &= within(m.avg_smoothing, 0.584, 0.05, log, "avg_h");
  report(2, ok, "local linear estimator, flat design, n=500: " + log);
}

void criterion3() {
  const McMetrics m =
      run_experiment(base_config(2, 1000, McEstimator::Series, true, 1000, 3));
  std::string log;
  bool ok = within(m.corrected.rmse, 0.189, 0.03, log, "new_rmse");
  ok &= within(m.analog.rmse, 0.217, 0.03, log, "analog_rmse");
  const bool strict = m.corrected.rmse < m.analog.rmse;
  if (!strict) log += "corrected rmse not strictly smaller ";
  report(3, ok && strict,
         "series estimator, kinked design, n=1000, estimated set: " + log);
}

void criterion4() {
  const auto start = std::chrono::steady_clock::now();
  std::string log;
  bool ok = true;
  for (const McConfig& c : table1_configs(200, 1000, rng::substream(kSeed, 4))) {
    const McMetrics m = run_experiment(c);
    const double cov = m.coverage[1];
    if (cov < 0.90 || cov > 1.00) {
      ok = false;
      char buf[128];
      std::snprintf(buf, sizeof(buf), "[%s cov95=%.3f OUT] ", mc_row_label(c).c_str(), cov);
      log += buf;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char buf[96];
  std::snprintf(buf, sizeof(buf), "16 configurations x 200 reps in %.0fs", secs);
  if (secs >= 600.0) {
    ok = false;
    log += "over the 10 minute budget ";
  }
  report(4, ok, std::string(buf) + "; one-sided 95% coverage all in [0.90,1.00] " + log);
}

// --- critical-value oracles -------------------------------------------------

void criterion5() {
  auto eng = rng::engine(rng::substream(kSeed, 5));
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> msize(2, 50), ldim(2, 12);
  bool ok = true;
  std::string log;
  double worst = 0.0;
  for (int f = 0; f < 20; ++f) {
    const int m = msize(eng), L = ldim(eng);
    Eigen::MatrixXd W(m, L);
    for (Eigen::Index i = 0; i < W.size(); ++i) W(i / L, i % L) = normal(eng);
    InfluenceWeights w;
    w.vectors = W;
    w.norm_consistency.assign(static_cast<std::size_t>(m), 1.0);
    ArgminSet set;
    for (int i = 0; i < m; ++i) set.indices.push_back(static_cast<std::size_t>(i));
    const Eigen::MatrixXd corr = weights_correlation(w, set);

    // Three replicates per method; compare means within 3 x the Monte Carlo
    // standard error of the difference.
    std::vector<double> sim, bf;
    for (int r = 0; r < 3; ++r) {
      sim.push_back(simulate_k(w, set, 0.95, 50000, rng::substream(kSeed, 50 + f, r)).k);
      bf.push_back(bruteforce_sup_quantile(corr, 0.95, 50000,
                                           rng::substream(kSeed, 80 + f, r)));
    }
    const double diff = std::abs(stats::mean(sim) - stats::mean(bf));
    const double se = std::sqrt(stats::variance(sim) / 3.0 + stats::variance(bf) / 3.0);
    const double tol = 3.0 * se + 0.005;
    worst = std::max(worst, diff - tol);
    if (diff > tol) {
      ok = false;
      char buf[96];
      std::snprintf(buf, sizeof(buf), "[fixture %d: |diff|=%.4f > %.4f] ", f, diff, tol);
      log += buf;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "20 random fixtures, worst slack %.4f", worst);
  report(5, ok, "simulated k vs direct max-of-Gaussian quantile: " + std::string(buf) +
                    " " + log);
}

double simpson(const std::function<double(double)>& f, double a, double b, int m) {
  double s = f(a) + f(b);
  const double h = (b - a) / m;
  for (int i = 1; i < m; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

void criterion6() {
  bool ok = true;
  std::string log;

  const double int_k2 = simpson([](double s) {
    const double k = quartic_kernel(s);
    return k * k;
  }, -1.0, 1.0, 20000);
  const double int_kp2 = simpson([](double s) {
    const double kp = -15.0 / 4.0 * s * (1.0 - s * s);
    return kp * kp;
  }, -1.0, 1.0, 20000);
  ok &= within(kQuarticIntK2, int_k2, 1e-6, log, "intK2");
  ok &= within(kQuarticLambda, int_kp2 / int_k2, 1e-6, log, "lambda");

  // Quantile mappings are exact arithmetic.
  for (double p : {0.5, 0.9, 0.95, 0.99}) {
    const double c = -std::log(-std::log(p));
    for (double a : {1.2, 2.0, 4.0}) {
      if (std::abs(analytic_kernel_k(a, p, KernelCvVariant::Gumbel, 0.1, 1.0).k -
                   (a + c / a)) > 1e-12)
        ok = false;
      const CriticalValue ga = analytic_kernel_k(a, p, KernelCvVariant::GumbelApprox, 0.1, 1.0);
      if (ga.method == CvMethod::KernelGumbelApprox &&
          std::abs(ga.k - std::sqrt(a * a + 2.0 * c)) > 1e-12)
        ok = false;
    }
  }
  // Exponential-majorant mapping, checked through the reported a_n.
  {
    Eigen::MatrixXd rot(40, 2);
    std::vector<double> pts(40);
    for (int i = 0; i < 40; ++i) {
      const double ang = 30.0 * i / 39.0;
      rot(i, 0) = std::cos(ang);
      rot(i, 1) = std::sin(ang);
      pts[static_cast<std::size_t>(i)] = i / 39.0;
    }
    InfluenceWeights w;
    w.vectors = rot;
    w.norm_consistency.assign(40, 1.0);
    ArgminSet set;
    for (std::size_t i = 0; i < 40; ++i) set.indices.push_back(i);
    const EvaluationGrid grid(pts, 0.0, 1.0, 1.0);
    for (double p : {0.5, 0.95, 0.99}) {
      const CriticalValue cv = analytic_series_k(w, set, grid, p, 5000, 1);
      if (cv.method != CvMethod::SeriesExponential ||
          std::abs(cv.k - (*cv.a_n - std::log(1.0 - p) / *cv.a_n)) > 1e-12)
        ok = false;
    }
  }
  report(6, ok, "kernel constants vs integration oracle, quantile formulas exact: " + log);
}

// --- invariant battery ------------------------------------------------------

void criterion7() {
  bool ok = true;
  std::string log;
  auto flag = [&](bool cond, const char* what) {
    if (!cond) {
      ok = false;
      log += std::string("[") + what + "] ";
    }
  };

  auto eng = rng::engine(rng::substream(kSeed, 7));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal;

  // Spline basis: partition of unity.
  {
    SplineBasisSpec spec;
    spec.boundary_lo = 0.0;
    spec.boundary_hi = 1.0;
    spec.interior_knots = {0.25, 0.5, 0.75};
    for (int i = 0; i < 1000; ++i) {
      const Eigen::VectorXd b = bspline_basis(i / 999.0, spec);
      if (std::abs(b.sum() - 1.0) > 1e-10 || b.minCoeff() < -1e-14)
        flag(false, "partition of unity");
    }
  }

  // Local linear regression reproduces affine data exactly.
  {
    const std::size_t n = 150;
    std::vector<double> v(n), y(n), z(n, 1.0);
    Eigen::MatrixXd vm(static_cast<Eigen::Index>(n), 1);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = unif(eng);
      vm(static_cast<Eigen::Index>(i), 0) = v[i];
      y[i] = 1.5 - 0.8 * v[i];
    }
    const Sample s(y, z, vm);
    const std::vector<double> fit = local_linear_fit(s, 0.5, std::vector<double>{0.3, 0.6});
    flag(std::abs(fit[0] - (1.5 - 0.8 * 0.3)) < 1e-10 &&
             std::abs(fit[1] - (1.5 - 0.8 * 0.6)) < 1e-10,
         "local linear affine exactness");
  }

  // Series fit satisfies the normal equations.
  {
    const std::size_t n = 200;
    std::vector<double> v(n), y(n), z(n, 1.0);
    Eigen::MatrixXd vm(static_cast<Eigen::Index>(n), 1);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = unif(eng);
      vm(static_cast<Eigen::Index>(i), 0) = v[i];
      y[i] = std::sin(3.0 * v[i]) + 0.3 * normal(eng);
    }
    const Sample s(y, z, vm);
    const SeriesFit fit = fit_series(s, 6);
    Eigen::MatrixXd P(static_cast<Eigen::Index>(n), 6);
    for (std::size_t i = 0; i < n; ++i)
      P.row(static_cast<Eigen::Index>(i)) = bspline_basis(v[i], fit.basis).transpose();
    Eigen::Map<const Eigen::VectorXd> ym(s.y.data(), static_cast<Eigen::Index>(n));
    flag((P.transpose() * (ym - P * fit.beta_hat)).cwiseAbs().maxCoeff() < 1e-8,
         "series normal equations");
  }

  // Critical values are monotone in p (shared draws).
  {
    Eigen::MatrixXd W(5, 3);
    for (Eigen::Index i = 0; i < W.size(); ++i) W(i / 3, i % 3) = normal(eng);
    InfluenceWeights w;
    w.vectors = W;
    w.norm_consistency.assign(5, 1.0);
    ArgminSet set;
    for (std::size_t i = 0; i < 5; ++i) set.indices.push_back(i);
    const std::vector<double> ps = {0.2, 0.5, 0.8, 0.95};
    const auto ks = simulate_k_levels(w, set, ps, 20000, 3);
    for (std::size_t i = 1; i < ks.size(); ++i)
      flag(ks[i].k >= ks[i - 1].k, "k monotone in p");
  }

  // Argmin set: monotone in epsilon and contains the optimizer.
  {
    const EvaluationGrid grid({0.0, 1.0, 2.0, 3.0}, 0.0, 3.0, 3.0);
    const BoundCurve curve(grid, {0.3, 0.0, 0.9, 2.0}, {0.05, 0.05, 0.05, 0.05},
                           Side::Upper, 400, Smoothing::none(), EstimatorKind::Discrete);
    std::vector<std::size_t> prev;
    for (double eps : {0.0, 0.3, 1.0, 5.0}) {
      const ArgminSet set = estimate_Veps(curve, eps, ArgminMode::Nonparametric);
      flag(set.contains(curve.argopt()), "set contains optimizer");
      flag(std::includes(set.indices.begin(), set.indices.end(), prev.begin(), prev.end()),
           "set monotone in epsilon");
      prev = set.indices;
    }
  }

  // Adaptive interval level stays in [1-alpha, 1-alpha/2].
  {
    const EvaluationGrid g({0.0}, 0.0, 1.0, 1.0);
    CvFn cv = [](double p) {
      CriticalValue c;
      c.p = p;
      c.k = p;
      return c;
    };
    for (int rep = 0; rep < 25; ++rep) {
      const double delta = -0.5 + 2.5 * unif(eng);
      const BoundCurve lo(g, {0.0}, {0.1}, Side::Lower, 300, Smoothing::none(),
                          EstimatorKind::Discrete);
      const BoundCurve up(g, {delta}, {0.1}, Side::Upper, 300, Smoothing::none(),
                          EstimatorKind::Discrete);
      ArgminSet one;
      one.indices = {0};
      const auto iv = ci_parameter(lo, one, cv, up, one, cv, 0.1, TauRule::SigmaRule);
      flag(*iv.p_hat_n >= 0.9 - 1e-12 && *iv.p_hat_n <= 0.95 + 1e-12, "p_hat_n range");
    }
  }

  // Corrected bound is location equivariant.
  {
    const EvaluationGrid g({0.0, 1.0}, 0.0, 1.0, 1.0);
    const BoundCurve a(g, {0.4, 0.9}, {0.2, 0.1}, Side::Upper, 100, Smoothing::none(),
                       EstimatorKind::Discrete);
    const BoundCurve b(g, {5.4, 5.9}, {0.2, 0.1}, Side::Upper, 100, Smoothing::none(),
                       EstimatorKind::Discrete);
    ArgminSet set;
    set.indices = {0, 1};
    CriticalValue k;
    k.p = 0.95;
    k.k = 1.7;
    flag(std::abs(precision_corrected_bound(b, set, k).theta_p -
                  precision_corrected_bound(a, set, k).theta_p - 5.0) < 1e-12,
         "corrected bound location equivariance");
  }

  // Replication harness is bit-reproducible across thread counts.
  {
    McConfig c = base_config(1, 100, McEstimator::Series, false, 8, 77);
    c.grid_points = 50;
    c.threads = 1;
    const McMetrics m1 = run_experiment(c);
    c.threads = 3;
    const McMetrics m3 = run_experiment(c);
    flag(m1.analog.mean_bias == m3.analog.mean_bias &&
             m1.corrected.rmse == m3.corrected.rmse && m1.coverage == m3.coverage,
         "thread-count bit reproducibility");
  }

  report(7, ok, ok ? "invariant battery (8 suites) all hold" : "violations: " + log);
}

void criterion8() {
  bool ok = true;
  std::string log;
  double worst = 0.0;
  for (int f = 0; f < 10; ++f) {
    DgpSpec dgp;
    dgp.kind = f % 2 ? 2 : 1;
    dgp.n = 300 + 100 * (f % 3);
    const Sample raw = dgp_sample(dgp, rng::substream(kSeed, 800 + f));
    TransformSpec tspec;
    tspec.t = 1.0;
    tspec.y0 = dgp.y0;
    tspec.y1 = 0.0;
    tspec.target = BoundTarget::LowerBound;
    const Sample s = transform_outcome(raw, tspec);
    const EvaluationGrid grid = build_grid(s, 100, 5.0, dgp.domain_hi);
    const auto [curve, w] = series_curve(fit_series(s, 6 + f % 4), grid, Side::Lower);
    const ArgminSet set = estimate_Veps(curve, 1e-6, ArgminMode::Nonparametric);

    const CriticalValue analytic =
        analytic_series_k(w, set, grid, 0.95, 50000, rng::substream(kSeed, 900 + f));
    std::vector<double> sim;
    for (int r = 0; r < 3; ++r)
      sim.push_back(simulate_k(w, set, 0.95, 50000, rng::substream(kSeed, 910 + f, r)).k);
    const double floor =
        stats::mean(sim) - 3.0 * std::sqrt(stats::variance(sim) / 3.0) - 0.005;
    worst = std::max(worst, floor - analytic.k);
    if (analytic.k < floor) {
      ok = false;
      char buf[96];
      std::snprintf(buf, sizeof(buf), "[fixture %d: %.3f < %.3f] ", f, analytic.k, floor);
      log += buf;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "10 fixtures, worst margin %.4f", -worst);
  report(8, ok, "exponential-majorant k(0.95) never undercuts simulation: " +
                    std::string(buf) + " " + log);
}

}  // namespace

int main() {
  criterion6();
  criterion7();
  criterion5();
  criterion8();
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  if (g_failures == 0) {
    std::printf("all acceptance criteria hold\n");
  } else {
    std::printf("%d acceptance criteria failed\n", g_failures);
  }
  return g_failures;
}
