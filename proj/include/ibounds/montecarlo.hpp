#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ibounds/sample.hpp"
#include "ibounds/types.hpp"

namespace ibounds {

// The two simulation designs. V ~ Unif[-2,2], Z = 1{phi0(V) + eps > 0},
// Y = mu0(V) + |V| * U with U a N(0,1) truncated to [-1.96, 1.96].
struct DgpSpec {
  int kind = 1;  // 1 or 2
  std::size_t n = 500;
  double domain_lo = -2.0;
  double domain_hi = 1.5;  // right end of the working domain V
  double y0 = -1.96;

  void validate() const;
};

Sample dgp_sample(const DgpSpec& spec, std::uint64_t seed);

// Bound-generating function theta_l(v) = mu0(v) Phi(phi0(v)) - 1.96 Phi(-phi0(v)).
double true_theta_l(const DgpSpec& spec, double v);

// theta_0 = sup_{u <= domain_hi} theta_l(u).
double true_lower_bound(const DgpSpec& spec);

enum class McEstimator { Series, LocalLinear };

struct McConfig {
  DgpSpec dgp;
  McEstimator estimator = McEstimator::Series;
  bool estimate_V = false;
  std::size_t reps = 1000;
  std::size_t R = 1000;  // critical-value simulation draws per replication
  std::size_t grid_points = 200;
  double trim_pct = 5.0;
  double epsilon = 1e-6;
  std::vector<double> p_levels = {0.5, 0.95};
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0 = hardware concurrency
};

struct MethodMetrics {
  double mean_bias = 0.0;
  double median_bias = 0.0;
  double sd = 0.0;   // population (1/N) divisor, so rmse^2 = mean_bias^2 + sd^2
  double mad = 0.0;  // mean absolute deviation from theta_0
  double rmse = 0.0;
};

struct McMetrics {
  MethodMetrics analog;    // sup of the raw curve
  MethodMetrics corrected; // half-median-unbiased estimator ("New")
  std::vector<double> coverage;  // per p_levels entry: frac(theta_p <= theta_0)
  double avg_smoothing = 0.0;    // K for series, h for local linear
  double theta_0 = 0.0;
  std::size_t reps_done = 0;
  std::size_t failures = 0;
  bool single_rep_sd_flag = false;  // sd reported as 0 from a single replication
};

McMetrics run_experiment(const McConfig& config);

// Tabular report helpers.
std::string mc_row_label(const McConfig& config);
std::string mc_table_text(const std::vector<std::pair<McConfig, McMetrics>>& rows);
std::string mc_table_csv(const std::vector<std::pair<McConfig, McMetrics>>& rows);

// All 16 study configurations (design x n x estimator x set estimation) with
// `reps` replications each.
std::vector<McConfig> table1_configs(std::size_t reps, std::size_t R,
                                     std::uint64_t seed);

}  // namespace ibounds
