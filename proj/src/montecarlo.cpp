#include "ibounds/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ibounds/argmin.hpp"
#include "ibounds/critical_values.hpp"
#include "ibounds/kernel.hpp"
#include "ibounds/rng.hpp"
#include "ibounds/series.hpp"
#include "ibounds/stats.hpp"

namespace ibounds {

void DgpSpec::validate() const {
  if (kind != 1 && kind != 2) throw std::invalid_argument("DgpSpec: kind must be 1 or 2");
  if (n < 50) throw std::invalid_argument("DgpSpec: need n >= 50");
}

namespace {

double phi0(int kind, double v) {
  if (kind == 1) return 0.0;
  return v <= 1.0 ? v : 1.0;
}

double mu0(int kind, double v) { return kind == 1 ? 0.0 : 2.0 * phi0(2, v); }

}  // namespace

Sample dgp_sample(const DgpSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t n = spec.n;
  auto eng = rng::engine(seed);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  std::normal_distribution<double> normal;
  std::vector<double> v(n), eps(n), eta(n);
  for (auto& x : v) x = unif(eng);
  for (auto& x : eps) x = normal(eng);
  for (auto& x : eta) x = normal(eng);

  std::vector<double> y(n), z(n);
  Eigen::MatrixXd vm(static_cast<Eigen::Index>(n), 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = std::clamp(eta[i], -1.96, 1.96);
    z[i] = phi0(spec.kind, v[i]) + eps[i] > 0.0 ? 1.0 : 0.0;
    y[i] = mu0(spec.kind, v[i]) + std::abs(v[i]) * u;
    vm(static_cast<Eigen::Index>(i), 0) = v[i];
  }
  return Sample(std::move(y), std::move(z), std::move(vm));
}

double true_theta_l(const DgpSpec& spec, double v) {
  const double p = phi0(spec.kind, v);
  return mu0(spec.kind, v) * stats::norm_cdf(p) + spec.y0 * stats::norm_cdf(-p);
}

double true_lower_bound(const DgpSpec& spec) {
  // theta_l is nondecreasing for both designs; the sup sits at the right end.
  return true_theta_l(spec, spec.domain_hi);
}

namespace {

struct RepResult {
  bool ok = false;
  std::string error;
  double analog = 0.0;
  double smoothing = 0.0;
  std::vector<double> theta_p;  // one per p level
};

RepResult run_one_rep(const McConfig& cfg, std::size_t rep) {
  RepResult out;
  try {
    const std::uint64_t sample_seed = rng::substream(cfg.seed, rep, 0);
    const std::uint64_t cv_seed = rng::substream(cfg.seed, rep, 1);
    const Sample raw = dgp_sample(cfg.dgp, sample_seed);
    TransformSpec tspec;
    tspec.t = 1.0;
    tspec.y0 = cfg.dgp.y0;
    tspec.y1 = 0.0;  // unused for the lower bound
    tspec.target = BoundTarget::LowerBound;
    tspec.form = TransformForm::RealizedTreatment;
    const Sample sample = transform_outcome(raw, tspec);
    const EvaluationGrid grid =
        build_grid(sample, cfg.grid_points, cfg.trim_pct, cfg.dgp.domain_hi);

    BoundCurve curve;
    InfluenceWeights weights;
    if (cfg.estimator == McEstimator::Series) {
      const std::size_t K = select_K(sample);
      auto [c, w] = series_curve(fit_series(sample, K), grid, Side::Lower);
      curve = std::move(c);
      weights = std::move(w);
      out.smoothing = static_cast<double>(K);
    } else {
      const RotBandwidth rb = rot_bandwidth(sample);
      auto [c, w] =
          kernel_curve(fit_local_linear(sample, rb.h, grid), sample, grid, Side::Lower);
      curve = std::move(c);
      weights = std::move(w);
      out.smoothing = rb.h;
    }

    ArgminSet set;
    if (cfg.estimate_V) {
      set = estimate_Veps(curve, cfg.epsilon, ArgminMode::Nonparametric);
    } else {
      set.indices.resize(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) set.indices[i] = i;
      set.epsilon = cfg.epsilon;
    }

    const std::vector<CriticalValue> ks =
        simulate_k_levels(weights, set, cfg.p_levels, cfg.R, cv_seed);

    out.analog = *std::max_element(curve.theta_hat.begin(), curve.theta_hat.end());
    out.theta_p.reserve(ks.size());
    for (const CriticalValue& k : ks) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i : set.indices)
        best = std::max(best, curve.theta_hat[i] - k.k * curve.se[i]);
      out.theta_p.push_back(best);
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

MethodMetrics summarize(const std::vector<double>& est, double theta_0) {
  MethodMetrics m;
  const auto N = static_cast<double>(est.size());
  std::vector<double> bias(est.size());
  double sum = 0.0, sum_abs = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    bias[i] = est[i] - theta_0;
    sum += bias[i];
    sum_abs += std::abs(bias[i]);
    sum_sq += bias[i] * bias[i];
  }
  m.mean_bias = sum / N;
  m.median_bias = stats::median(bias);
  m.mad = sum_abs / N;
  m.rmse = std::sqrt(sum_sq / N);
  const double var = sum_sq / N - m.mean_bias * m.mean_bias;
  m.sd = std::sqrt(std::max(var, 0.0));
  return m;
}

}  // namespace

McMetrics run_experiment(const McConfig& cfg) {
  if (cfg.reps < 1) throw std::invalid_argument("run_experiment: reps >= 1 required");
  cfg.dgp.validate();
  std::vector<RepResult> results(cfg.reps);

  std::size_t n_threads = cfg.threads != 0 ? cfg.threads
                                           : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<std::size_t>(n_threads, cfg.reps);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t rep = next.fetch_add(1);
      if (rep >= cfg.reps) break;
      results[rep] = run_one_rep(cfg, rep);
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<double> analog, corrected, smoothing;
  std::vector<std::vector<double>> theta_p(cfg.p_levels.size());
  std::size_t failures = 0;
  std::string first_error;
  for (const RepResult& r : results) {
    if (!r.ok) {
      ++failures;
      if (first_error.empty()) first_error = r.error;
      continue;
    }
    analog.push_back(r.analog);
    smoothing.push_back(r.smoothing);
    for (std::size_t j = 0; j < cfg.p_levels.size(); ++j)
      theta_p[j].push_back(r.theta_p[j]);
  }
  if (failures * 100 > cfg.reps)
    throw std::runtime_error("run_experiment: more than 1% of replications failed; first error: " +
                             first_error);
  if (analog.empty()) throw std::runtime_error("run_experiment: no successful replications");

  // The "New" estimator is the p = 1/2 entry; it must be present.
  std::size_t half_idx = cfg.p_levels.size();
  for (std::size_t j = 0; j < cfg.p_levels.size(); ++j)
    if (cfg.p_levels[j] == 0.5) half_idx = j;
  if (half_idx == cfg.p_levels.size())
    throw std::invalid_argument("run_experiment: p_levels must include 0.5");
  corrected = theta_p[half_idx];

  McMetrics m;
  m.theta_0 = true_lower_bound(cfg.dgp);
  m.analog = summarize(analog, m.theta_0);
  m.corrected = summarize(corrected, m.theta_0);
  m.avg_smoothing = stats::mean(smoothing);
  m.reps_done = analog.size();
  m.failures = failures;
  m.single_rep_sd_flag = analog.size() == 1;
  m.coverage.resize(cfg.p_levels.size());
  for (std::size_t j = 0; j < cfg.p_levels.size(); ++j) {
    std::size_t hits = 0;
    for (double t : theta_p[j])
      if (t <= m.theta_0) ++hits;
    m.coverage[j] = static_cast<double>(hits) / static_cast<double>(theta_p[j].size());
  }
  return m;
}

std::string mc_row_label(const McConfig& cfg) {
  std::ostringstream os;
  os << "DGP" << cfg.dgp.kind << " n=" << cfg.dgp.n << " "
     << (cfg.estimator == McEstimator::Series ? "series" : "local-linear")
     << " estV=" << (cfg.estimate_V ? "yes" : "no");
  return os.str();
}

namespace {

std::size_t level_index(const McConfig& cfg, double p) {
  for (std::size_t j = 0; j < cfg.p_levels.size(); ++j)
    if (std::abs(cfg.p_levels[j] - p) < 1e-12) return j;
  return cfg.p_levels.size();
}

}  // namespace

std::string mc_table_text(const std::vector<std::pair<McConfig, McMetrics>>& rows) {
  std::ostringstream os;
  os << "DGP  n     Smooth  EstV  Method  MeanBias  MedBias      SD     MAD    RMSE  Cov50  Cov95\n";
  auto line = [&](const McConfig& c, const McMetrics& m, bool corrected) {
    const MethodMetrics& mm = corrected ? m.corrected : m.analog;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%3d  %-5zu %6.3f  %-4s  %-6s  %8.3f %8.3f %7.3f %7.3f %7.3f",
                  c.dgp.kind, c.dgp.n, m.avg_smoothing, c.estimate_V ? "yes" : "no",
                  corrected ? "New" : "Analog", mm.mean_bias, mm.median_bias, mm.sd,
                  mm.mad, mm.rmse);
    os << buf;
    if (corrected) {
      const std::size_t i50 = level_index(c, 0.5), i95 = level_index(c, 0.95);
      char cov[64];
      std::snprintf(cov, sizeof(cov), "  %5.3f  %5.3f",
                    i50 < m.coverage.size() ? m.coverage[i50] : -1.0,
                    i95 < m.coverage.size() ? m.coverage[i95] : -1.0);
      os << cov;
    }
    os << "\n";
  };
  McEstimator last = McEstimator::Series;
  bool first = true;
  for (const auto& [c, m] : rows) {
    if (first || c.estimator != last) {
      os << (c.estimator == McEstimator::Series ? "-- Series Estimation --\n"
                                                : "-- Local Linear Estimation --\n");
      last = c.estimator;
      first = false;
    }
    line(c, m, false);
    line(c, m, true);
  }
  return os.str();
}

std::string mc_table_csv(const std::vector<std::pair<McConfig, McMetrics>>& rows) {
  std::ostringstream os;
  os << "estimator,dgp,n,avg_smoothing,estimate_V,method,mean_bias,median_bias,sd,mad,"
        "rmse,coverage_50,coverage_95,reps,failures\n";
  for (const auto& [c, m] : rows) {
    const std::size_t i50 = level_index(c, 0.5), i95 = level_index(c, 0.95);
    for (int corrected = 0; corrected < 2; ++corrected) {
      const MethodMetrics& mm = corrected ? m.corrected : m.analog;
      os << (c.estimator == McEstimator::Series ? "series" : "local-linear") << ","
         << c.dgp.kind << "," << c.dgp.n << "," << m.avg_smoothing << ","
         << (c.estimate_V ? 1 : 0) << "," << (corrected ? "new" : "analog") << ","
         << mm.mean_bias << "," << mm.median_bias << "," << mm.sd << "," << mm.mad
         << "," << mm.rmse << ",";
      if (corrected && i50 < m.coverage.size()) os << m.coverage[i50];
      os << ",";
      if (corrected && i95 < m.coverage.size()) os << m.coverage[i95];
      os << "," << m.reps_done << "," << m.failures << "\n";
    }
  }
  return os.str();
}

std::vector<McConfig> table1_configs(std::size_t reps, std::size_t R,
                                     std::uint64_t seed) {
  std::vector<McConfig> out;
  std::uint64_t stream = 0;
  for (McEstimator est : {McEstimator::Series, McEstimator::LocalLinear})
    for (int dgp : {1, 2})
      for (std::size_t n : {std::size_t{500}, std::size_t{1000}})
        for (bool estV : {false, true}) {
          McConfig c;
          c.dgp.kind = dgp;
          c.dgp.n = n;
          c.estimator = est;
          c.estimate_V = estV;
          c.reps = reps;
          c.R = R;
          c.seed = rng::substream(seed, 0xC0FFEE, stream++);
          out.push_back(c);
        }
  return out;
}

}  // namespace ibounds
