// Command-line driver: estimation and inference on intersection bounds, the
// Monte Carlo harness, and standalone critical-value diagnostics.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ibounds/argmin.hpp"
#include "ibounds/critical_values.hpp"
#include "ibounds/csv.hpp"
#include "ibounds/discrete.hpp"
#include "ibounds/inference.hpp"
#include "ibounds/kernel.hpp"
#include "ibounds/montecarlo.hpp"
#include "ibounds/rng.hpp"
#include "ibounds/series.hpp"
#include "ibounds/stats.hpp"

namespace {

using nlohmann::json;
using namespace ibounds;

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

std::string fmt(double x, int prec = 6) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(prec);
  os << x;
  return os.str();
}

std::vector<double> parse_levels(const std::string& s) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw CLI::ValidationError("--p: no levels given");
  for (double p : out)
    if (!(p > 0.0) || !(p < 1.0)) throw CLI::ValidationError("--p: levels must be in (0,1)");
  return out;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOptions {
  std::string input;
  std::string side = "lower";
  std::string estimator = "series";
  std::string transform = "miv";
  std::string cv = "simulate";
  std::string ci = "none";
  std::string tau_rule = "sigma";
  double t = 1.0;
  std::optional<double> y0, y1, hi, h_override;
  std::optional<std::size_t> K_override;
  std::size_t grid_points = 200;
  double trim_pct = 5.0;
  double epsilon = 1e-6;
  bool estimate_v = true;
  std::size_t R = 10000;
  double alpha = 0.1;
  std::string p_list = "0.5,0.95";
  std::uint64_t seed = 1;
  std::string emit_curve, emit_weights, out, config_path;
};

struct SideRun {
  BoundCurve curve;
  InfluenceWeights weights;
  ArgminSet set;
  CvFn cv;
  double h = 0.0;  // bandwidth when the kernel estimator was used
  std::vector<OneSidedResult> results;
};

// The closure owns copies of its inputs; it outlives the SideRun moves below.
CvFn make_cv_fn(const EstimateOptions& o, const SideRun& run, std::uint64_t seed) {
  InfluenceWeights w = run.weights;
  ArgminSet set = run.set;
  EvaluationGrid grid = run.curve.grid;
  if (o.cv == "simulate")
    return [w = std::move(w), set = std::move(set), R = o.R, seed](double p) {
      return simulate_k(w, set, p, R, seed);
    };
  if (o.cv == "series-exp")
    return [w = std::move(w), set = std::move(set), grid = std::move(grid), R = o.R,
            seed](double p) { return analytic_series_k(w, set, grid, p, R, seed); };
  KernelCvVariant variant = KernelCvVariant::Gumbel;
  if (o.cv == "gumbel-approx") variant = KernelCvVariant::GumbelApprox;
  if (o.cv == "hardle-linton") variant = KernelCvVariant::HardleLinton;
  const double h = run.h;
  const double mes = set_measure(set, grid);
  return [w = std::move(w), set = std::move(set), variant, h, mes, R = o.R,
          seed](double p) {
    const double a_n = kernel_a_n(mes, h, 1);
    if (!(a_n > 0.0)) return simulate_k(w, set, p, R, seed);  // no admissible root
    return analytic_kernel_k(a_n, p, variant, h, mes);
  };
}

SideRun run_side(const EstimateOptions& o, const Sample& raw, Side side,
                 const std::vector<double>& levels, std::uint64_t seed) {
  TransformSpec tspec;
  tspec.t = o.t;
  tspec.y0 = o.y0 ? *o.y0 : *std::min_element(raw.y.begin(), raw.y.end());
  tspec.y1 = o.y1 ? *o.y1 : *std::max_element(raw.y.begin(), raw.y.end());
  tspec.target = side == Side::Lower ? BoundTarget::LowerBound : BoundTarget::UpperBound;
  tspec.form = o.transform == "mtr" ? TransformForm::MonotoneResponse
                                    : TransformForm::RealizedTreatment;
  const Sample sample = transform_outcome(raw, tspec);

  SideRun run;
  if (o.estimator == "series") {
    const EvaluationGrid grid = build_grid(sample, o.grid_points, o.trim_pct, o.hi);
    const std::size_t K = o.K_override ? *o.K_override : select_K(sample);
    auto [c, w] = series_curve(fit_series(sample, K), grid, side);
    run.curve = std::move(c);
    run.weights = std::move(w);
  } else if (o.estimator == "local-linear") {
    const EvaluationGrid grid = build_grid(sample, o.grid_points, o.trim_pct, o.hi);
    const double h = o.h_override ? *o.h_override : rot_bandwidth(sample).h;
    auto [c, w] = kernel_curve(fit_local_linear(sample, h, grid), sample, grid, side);
    run.curve = std::move(c);
    run.weights = std::move(w);
    run.h = h;
  } else {  // discrete
    std::vector<double> support = sample.v1();
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    auto [c, w] = discrete_curve(fit_discrete(sample, support), side);
    run.curve = std::move(c);
    run.weights = std::move(w);
  }

  const ArgminMode mode =
      o.estimator == "discrete" ? ArgminMode::Parametric : ArgminMode::Nonparametric;
  const double eps = o.estimator == "discrete" ? 0.0 : o.epsilon;
  if (o.estimate_v) {
    run.set = estimate_Veps(run.curve, eps, mode);
  } else {
    run.set.indices.resize(run.curve.grid.size());
    for (std::size_t i = 0; i < run.set.indices.size(); ++i) run.set.indices[i] = i;
    run.set.epsilon = eps;
  }
  run.cv = make_cv_fn(o, run, seed);
  for (double p : levels)
    run.results.push_back(precision_corrected_bound(run.curve, run.set, run.cv(p)));
  return run;
}

void emit_curve_csv(const std::string& path, const SideRun& run,
                    const std::vector<double>& levels) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "v,theta_hat,se";
  for (double p : levels) out << ",corrected_p" << fmt(p, 3);
  out << ",in_Veps\n";
  const double sign = run.curve.side == Side::Upper ? 1.0 : -1.0;
  for (std::size_t i = 0; i < run.curve.grid.size(); ++i) {
    out << fmt(run.curve.grid.points[i], 8) << "," << fmt(run.curve.theta_hat[i], 8)
        << "," << fmt(run.curve.se[i], 8);
    for (std::size_t j = 0; j < levels.size(); ++j)
      out << ","
          << fmt(run.curve.theta_hat[i] +
                     sign * run.results[j].k_used.k * run.curve.se[i],
                 8);
    out << "," << (run.set.contains(i) ? 1 : 0) << "\n";
  }
}

void emit_weights_json(const std::string& path, const SideRun& run,
                       const std::string& estimator) {
  json j;
  j["version"] = kVersion;
  j["kind"] = estimator;
  j["n"] = run.curve.n;
  j["side"] = run.curve.side == Side::Lower ? "lower" : "upper";
  if (run.h > 0.0) j["h"] = run.h;
  j["grid"] = {{"points", run.curve.grid.points},
               {"lo", run.curve.grid.domain_lo},
               {"hi", run.curve.grid.domain_hi},
               {"measure", run.curve.grid.measure}};
  j["theta_hat"] = run.curve.theta_hat;
  j["se"] = run.curve.se;
  j["set"] = run.set.indices;
  std::vector<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < run.weights.vectors.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(run.weights.vectors.cols()));
    for (Eigen::Index c = 0; c < run.weights.vectors.cols(); ++c)
      r[static_cast<std::size_t>(c)] = run.weights.vectors(i, c);
    rows.push_back(std::move(r));
  }
  j["weights"] = rows;
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

std::map<std::string, std::string> estimate_manifest(const EstimateOptions& o) {
  std::map<std::string, std::string> m;
  m["command"] = "estimate";
  m["version"] = kVersion;
  m["input"] = o.input;
  m["side"] = o.side;
  m["estimator"] = o.estimator;
  m["transform"] = o.transform;
  m["cv_method"] = o.cv;
  m["ci"] = o.ci;
  m["tau_rule"] = o.tau_rule;
  m["t"] = fmt(o.t, 10);
  if (o.y0) m["y0"] = fmt(*o.y0, 10);
  if (o.y1) m["y1"] = fmt(*o.y1, 10);
  if (o.hi) m["hi"] = fmt(*o.hi, 10);
  if (o.h_override) m["h"] = fmt(*o.h_override, 10);
  if (o.K_override) m["K"] = std::to_string(*o.K_override);
  m["grid_points"] = std::to_string(o.grid_points);
  m["trim_pct"] = fmt(o.trim_pct, 6);
  m["epsilon"] = fmt(o.epsilon, 12);
  m["estimate_v"] = o.estimate_v ? "1" : "0";
  m["R"] = std::to_string(o.R);
  m["alpha"] = fmt(o.alpha, 6);
  m["p"] = o.p_list;
  m["seed"] = std::to_string(o.seed);
  return m;
}

void apply_estimate_config(const std::map<std::string, std::string>& kv,
                           EstimateOptions& o, const CLI::App& app) {
  auto unset = [&](const std::string& flag) {
    const CLI::Option* opt = app.get_option_no_throw(flag);
    return opt == nullptr || opt->count() == 0;
  };
  auto get = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  if (auto v = get("input"); v && o.input.empty()) o.input = *v;
  if (auto v = get("side"); v && unset("--side")) o.side = *v;
  if (auto v = get("estimator"); v && unset("--estimator")) o.estimator = *v;
  if (auto v = get("transform"); v && unset("--transform")) o.transform = *v;
  if (auto v = get("cv_method"); v && unset("--cv")) o.cv = *v;
  if (auto v = get("ci"); v && unset("--ci")) o.ci = *v;
  if (auto v = get("tau_rule"); v && unset("--tau-rule")) o.tau_rule = *v;
  if (auto v = get("t"); v && unset("--t")) o.t = std::stod(*v);
  if (auto v = get("y0"); v && unset("--y0")) o.y0 = std::stod(*v);
  if (auto v = get("y1"); v && unset("--y1")) o.y1 = std::stod(*v);
  if (auto v = get("hi"); v && unset("--hi")) o.hi = std::stod(*v);
  if (auto v = get("h"); v && unset("--bandwidth")) o.h_override = std::stod(*v);
  if (auto v = get("K"); v && unset("--K")) o.K_override = std::stoul(*v);
  if (auto v = get("grid_points"); v && unset("--grid-points"))
    o.grid_points = std::stoul(*v);
  if (auto v = get("trim_pct"); v && unset("--trim-pct")) o.trim_pct = std::stod(*v);
  if (auto v = get("epsilon"); v && unset("--epsilon")) o.epsilon = std::stod(*v);
  if (auto v = get("estimate_v"); v && unset("--estimate-v")) o.estimate_v = *v == "1";
  if (auto v = get("R"); v && unset("--R")) o.R = std::stoul(*v);
  if (auto v = get("alpha"); v && unset("--alpha")) o.alpha = std::stod(*v);
  if (auto v = get("p"); v && unset("--p")) o.p_list = *v;
  if (auto v = get("seed"); v && unset("--seed")) o.seed = std::stoull(*v);
}

int cmd_estimate(const EstimateOptions& o_in, const CLI::App& app) {
  EstimateOptions o = o_in;
  if (!o.config_path.empty())
    apply_estimate_config(read_config_file(o.config_path), o, app);
  if (o.input.empty()) {
    std::cerr << "estimate: no input CSV given\n";
    return kExitUsage;
  }

  Sample raw;
  try {
    raw = read_sample_csv_file(o.input);
  } catch (const std::exception& e) {
    std::cerr << "estimate: " << e.what() << "\n";
    return kExitData;
  }

  std::vector<double> levels = parse_levels(o.p_list);
  const double p_ci = 1.0 - o.alpha / 2.0;
  if (o.ci == "set" &&
      std::none_of(levels.begin(), levels.end(),
                   [&](double p) { return std::abs(p - p_ci) < 1e-12; }))
    levels.push_back(p_ci);
  if (std::none_of(levels.begin(), levels.end(),
                   [](double p) { return p == 0.5; }))
    levels.push_back(0.5);

  std::ostringstream report;
  try {
    std::map<Side, SideRun> runs;
    std::vector<Side> sides;
    if (o.side == "lower" || o.side == "both") sides.push_back(Side::Lower);
    if (o.side == "upper" || o.side == "both") sides.push_back(Side::Upper);
    if (sides.empty()) {
      std::cerr << "estimate: --side must be lower, upper, or both\n";
      return kExitUsage;
    }

    for (Side s : sides) {
      const std::uint64_t seed =
          rng::substream(o.seed, s == Side::Lower ? 0x10 : 0x20);
      runs.emplace(s, run_side(o, raw, s, levels, seed));
    }

    report << "# intersection-bounds estimate (version " << kVersion << ")\n";
    report << "input=" << o.input << " n=" << raw.n() << " estimator=" << o.estimator
           << " cv=" << o.cv << " seed=" << o.seed << "\n\n";
    for (Side s : sides) {
      const SideRun& run = runs.at(s);
      const char* nm = s == Side::Lower ? "lower" : "upper";
      report << "side=" << nm << "  analog="
             << fmt(s == Side::Lower
                        ? *std::max_element(run.curve.theta_hat.begin(),
                                            run.curve.theta_hat.end())
                        : *std::min_element(run.curve.theta_hat.begin(),
                                            run.curve.theta_hat.end()))
             << "  V_eps: " << run.set.indices.size() << " points, measure="
             << fmt(set_measure(run.set, run.curve.grid)) << ", v in ["
             << fmt(run.curve.grid.points[run.set.indices.front()]) << ", "
             << fmt(run.curve.grid.points[run.set.indices.back()]) << "]";
      if (run.h > 0.0) report << ", h=" << fmt(run.h);
      if (run.curve.smoothing.kind == Smoothing::Kind::SeriesTerms)
        report << ", K=" << static_cast<std::size_t>(run.curve.smoothing.value);
      report << "\n";
      report << "  p        theta_p      k          method            a_n        b_n\n";
      for (const OneSidedResult& r : run.results) {
        report << "  " << fmt(r.p, 4) << "  " << fmt(r.theta_p, 6) << "  "
               << fmt(r.k_used.k, 6) << "  ";
        report.width(16);
        report << std::left << to_string(r.k_used.method) << std::right;
        report << "  " << (r.k_used.a_n ? fmt(*r.k_used.a_n) : "-") << "  "
               << (r.k_used.b_n ? fmt(*r.k_used.b_n) : "-") << "\n";
      }
      report << "\n";
    }

    if (o.ci == "set" || o.ci == "parameter") {
      if (sides.size() != 2) {
        std::cerr << "estimate: --ci " << o.ci << " requires --side both\n";
        return kExitUsage;
      }
      const SideRun& lo = runs.at(Side::Lower);
      const SideRun& up = runs.at(Side::Upper);
      if (o.ci == "set") {
        auto at = [&](const SideRun& r, double p) {
          return precision_corrected_bound(r.curve, r.set, r.cv(p));
        };
        const TwoSidedInterval iv = ci_identified_set(at(lo, p_ci), at(up, p_ci));
        report << "CI for identified set, level " << fmt(iv.level, 3) << ": ["
               << fmt(iv.lo) << ", " << fmt(iv.hi) << "]"
               << (iv.crossed ? "  (endpoints crossed; interval empty)" : "") << "\n";
      } else {
        const TwoSidedInterval iv = ci_parameter(
            lo.curve, lo.set, lo.cv, up.curve, up.set, up.cv, o.alpha,
            o.tau_rule == "logn" ? TauRule::LogN : TauRule::SigmaRule);
        report << "CI for parameter, level " << fmt(iv.level, 3) << ": [" << fmt(iv.lo)
               << ", " << fmt(iv.hi) << "]  p_hat_n=" << fmt(*iv.p_hat_n)
               << " Delta_hat=" << fmt(*iv.delta_hat) << " tau_n=" << fmt(*iv.tau_n)
               << (iv.crossed ? "  (endpoints crossed; interval empty)" : "") << "\n";
      }
    }

    for (Side s : sides) {
      const SideRun& run = runs.at(s);
      const std::string suffix = sides.size() == 2
                                     ? std::string(".") +
                                           (s == Side::Lower ? "lower" : "upper")
                                     : std::string();
      if (!o.emit_curve.empty()) emit_curve_csv(o.emit_curve + suffix, run, levels);
      if (!o.emit_weights.empty())
        emit_weights_json(o.emit_weights + suffix, run, o.estimator);
    }
  } catch (const std::exception& e) {
    std::cerr << "estimate: " << e.what() << "\n";
    return kExitNumeric;
  }

  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) {
      std::cerr << "estimate: cannot write " << o.out << "\n";
      return kExitData;
    }
    f << report.str();
    write_config_file(o.out + ".manifest", estimate_manifest(o));
  } else {
    std::cout << report.str();
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// mc

struct McOptions {
  int dgp = 1;
  std::size_t n = 500;
  std::string estimator = "series";
  bool estimate_v = false;
  bool table1 = false;
  std::size_t reps = 1000;
  std::size_t R = 1000;
  std::uint64_t seed = 7;
  std::size_t threads = 0;
  std::string out;
};

int cmd_mc(const McOptions& o) {
  std::vector<McConfig> configs;
  if (o.table1) {
    configs = table1_configs(o.reps, o.R, o.seed);
    for (auto& c : configs) c.threads = o.threads;
  } else {
    McConfig c;
    c.dgp.kind = o.dgp;
    c.dgp.n = o.n;
    c.estimator = o.estimator == "local-linear" ? McEstimator::LocalLinear
                                                : McEstimator::Series;
    c.estimate_V = o.estimate_v;
    c.reps = o.reps;
    c.R = o.R;
    c.seed = o.seed;
    c.threads = o.threads;
    configs.push_back(c);
  }

  std::vector<std::pair<McConfig, McMetrics>> rows;
  try {
    for (const McConfig& c : configs) {
      std::cerr << "running " << mc_row_label(c) << " reps=" << c.reps << "...\n";
      rows.emplace_back(c, run_experiment(c));
    }
  } catch (const std::exception& e) {
    std::cerr << "mc: " << e.what() << "\n";
    return kExitNumeric;
  }

  const std::string text = mc_table_text(rows);
  if (!o.out.empty()) {
    std::ofstream t(o.out + ".txt"), c(o.out + ".csv");
    if (!t || !c) {
      std::cerr << "mc: cannot write outputs at prefix " << o.out << "\n";
      return kExitData;
    }
    t << text;
    c << mc_table_csv(rows);
    std::map<std::string, std::string> m;
    m["command"] = "mc";
    m["version"] = kVersion;
    m["dgp"] = std::to_string(o.dgp);
    m["n"] = std::to_string(o.n);
    m["estimator"] = o.estimator;
    m["estimate_v"] = o.estimate_v ? "1" : "0";
    m["table1"] = o.table1 ? "1" : "0";
    m["reps"] = std::to_string(o.reps);
    m["R"] = std::to_string(o.R);
    m["seed"] = std::to_string(o.seed);
    write_config_file(o.out + ".manifest", m);
  }
  std::cout << text;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// cv

struct CvOptions {
  std::string artifact;
  std::string demo;
  std::string p_list = "0.5,0.95";
  std::size_t R = 100000;
  std::uint64_t seed = 1;
};

int cmd_cv(const CvOptions& o) {
  InfluenceWeights weights;
  ArgminSet set;
  EvaluationGrid grid;
  std::optional<double> h;

  try {
    if (!o.demo.empty()) {
      if (o.demo == "singleton") {
        weights.vectors = Eigen::MatrixXd::Identity(1, 1);
        set.indices = {0};
        grid = EvaluationGrid({0.0}, 0.0, 0.0 + 1.0, 1.0);
      } else if (o.demo == "pair") {
        weights.vectors = Eigen::MatrixXd::Identity(2, 2);
        set.indices = {0, 1};
        grid = EvaluationGrid({0.0, 1.0}, 0.0, 1.0, 1.0);
      } else {
        std::cerr << "cv: unknown demo fixture '" << o.demo << "'\n";
        return kExitUsage;
      }
    } else if (!o.artifact.empty()) {
      std::ifstream in(o.artifact);
      if (!in) {
        std::cerr << "cv: cannot open " << o.artifact << "\n";
        return kExitData;
      }
      json j;
      in >> j;
      const auto pts = j.at("grid").at("points").get<std::vector<double>>();
      grid = EvaluationGrid(pts, j.at("grid").at("lo").get<double>(),
                            j.at("grid").at("hi").get<double>(),
                            j.at("grid").at("measure").get<double>());
      const auto rows = j.at("weights").get<std::vector<std::vector<double>>>();
      weights.vectors.resize(static_cast<Eigen::Index>(rows.size()),
                             static_cast<Eigen::Index>(rows.empty() ? 0 : rows[0].size()));
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < rows[i].size(); ++c)
          weights.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
              rows[i][c];
      set.indices = j.at("set").get<std::vector<std::size_t>>();
      if (j.contains("h")) h = j.at("h").get<double>();
    } else {
      std::cerr << "cv: give --artifact FILE or --demo NAME\n";
      return kExitUsage;
    }

    const std::vector<double> levels = parse_levels(o.p_list);
    std::cout << "p        simulated   series-exp";
    if (h) std::cout << "   gumbel      gumbel-approx  hardle-linton";
    std::cout << "\n";
    for (double p : levels) {
      std::cout << fmt(p, 4) << "   "
                << fmt(simulate_k(weights, set, p, o.R, o.seed).k) << "    "
                << fmt(analytic_series_k(weights, set, grid, p, o.R, o.seed).k);
      if (h) {
        const double mes = set_measure(set, grid);
        const double a_n = kernel_a_n(mes, *h, 1);
        if (a_n > 0.0) {
          std::cout << "    "
                    << fmt(analytic_kernel_k(a_n, p, KernelCvVariant::Gumbel, *h, mes).k)
                    << "    "
                    << fmt(analytic_kernel_k(a_n, p, KernelCvVariant::GumbelApprox, *h,
                                             mes).k)
                    << "       "
                    << fmt(analytic_kernel_k(a_n, p, KernelCvVariant::HardleLinton, *h,
                                             mes).k);
        } else {
          std::cout << "    (a_n undefined; simulation only)";
        }
      }
      std::cout << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "cv: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimation and inference on intersection bounds"};
  app.require_subcommand(1);

  EstimateOptions eo;
  CLI::App* est = app.add_subcommand("estimate", "Estimate bounds from a y,z,v CSV");
  est->add_option("input", eo.input, "Input CSV (header y,z,v)");
  est->add_option("--config", eo.config_path, "key=value config file (flags override)");
  est->add_option("--side", eo.side)->check(CLI::IsMember({"lower", "upper", "both"}));
  est->add_option("--estimator", eo.estimator)
      ->check(CLI::IsMember({"series", "local-linear", "discrete"}));
  est->add_option("--transform", eo.transform)->check(CLI::IsMember({"miv", "mtr"}));
  est->add_option("--cv", eo.cv)
      ->check(CLI::IsMember({"simulate", "series-exp", "gumbel", "gumbel-approx",
                             "hardle-linton"}));
  est->add_option("--ci", eo.ci)->check(CLI::IsMember({"none", "set", "parameter"}));
  est->add_option("--tau-rule", eo.tau_rule)->check(CLI::IsMember({"sigma", "logn"}));
  est->add_option("--t", eo.t, "Treatment value");
  est->add_option("--y0", eo.y0, "Left support endpoint (default: sample min)");
  est->add_option("--y1", eo.y1, "Right support endpoint (default: sample max)");
  est->add_option("--hi", eo.hi, "Right end of the working domain");
  est->add_option("--grid-points", eo.grid_points);
  est->add_option("--trim-pct", eo.trim_pct);
  est->add_option("--epsilon", eo.epsilon);
  est->add_flag("--estimate-v,!--no-estimate-v", eo.estimate_v,
                "Estimate the eps-argmin set (default on)");
  est->add_option("--R", eo.R, "Critical-value simulation draws");
  est->add_option("--alpha", eo.alpha);
  est->add_option("--p", eo.p_list, "Comma-separated one-sided levels");
  est->add_option("--seed", eo.seed);
  est->add_option("--K", eo.K_override, "Series terms (overrides the CV rule)");
  est->add_option("--bandwidth", eo.h_override,
                  "Bandwidth (overrides the rule of thumb)");
  est->add_option("--emit-curve", eo.emit_curve, "Write grid/curve CSV here");
  est->add_option("--emit-weights", eo.emit_weights, "Write weights artifact (JSON)");
  est->add_option("--out", eo.out, "Write the report here (plus .manifest)");

  McOptions mo;
  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo replication harness");
  mc->add_option("--dgp", mo.dgp)->check(CLI::IsMember({1, 2}));
  mc->add_option("--n", mo.n);
  mc->add_option("--estimator", mo.estimator)
      ->check(CLI::IsMember({"series", "local-linear"}));
  mc->add_flag("--estimate-v", mo.estimate_v);
  mc->add_flag("--table1", mo.table1, "Run all 16 configurations");
  mc->add_option("--reps", mo.reps);
  mc->add_option("--R", mo.R);
  mc->add_option("--seed", mo.seed);
  mc->add_option("--threads", mo.threads);
  mc->add_option("--out", mo.out, "Output prefix (.txt, .csv, .manifest)");

  CvOptions co;
  CLI::App* cv = app.add_subcommand("cv", "Critical-value diagnostics");
  cv->add_option("--artifact", co.artifact, "Weights artifact from estimate --emit-weights");
  cv->add_option("--demo", co.demo, "Built-in fixture: singleton | pair");
  cv->add_option("--p", co.p_list);
  cv->add_option("--R", co.R);
  cv->add_option("--seed", co.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  if (est->parsed()) return cmd_estimate(eo, *est);
  if (mc->parsed()) return cmd_mc(mo);
  if (cv->parsed()) return cmd_cv(co);
  return kExitUsage;
}
