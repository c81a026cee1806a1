#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "ibounds/types.hpp"

namespace ibounds {

// p-quantile (order statistic at ceil(p*R)) of R simulated values of
// max over the member set of g(v)'Z / ||g(v)||, Z standard normal.
// The same k serves both sides by symmetry of the normal distribution.
CriticalValue simulate_k(const InfluenceWeights& weights, const ArgminSet& set,
                         double p, std::size_t R, std::uint64_t seed);

// Same simulation, several levels from one set of draws.
std::vector<CriticalValue> simulate_k_levels(const InfluenceWeights& weights,
                                             const ArgminSet& set,
                                             std::span<const double> levels,
                                             std::size_t R, std::uint64_t seed);

// Series exponential-majorant critical value (d = 1):
//   k = a_n + (-log(1-p)) / a_n,  a_n = sqrt(2 log(kappa_n / 2pi)),
// kappa_n the integral of ||grad alpha_n|| over the member set, alpha_n the
// normalized weight vectors, gradient by finite differences on the grid.
// Falls back to simulate_k when a_n is not defined.
CriticalValue analytic_series_k(const InfluenceWeights& weights, const ArgminSet& set,
                                const EvaluationGrid& grid, double p,
                                std::size_t fallback_R, std::uint64_t seed);

// Largest solution a_n of
//   mes(V) h^{-d} lambda^{d/2} (2pi)^{-(d+1)/2} a^{d-1} exp(-a^2/2) = 1
// (closed form for d = 1). Returns a value <= 0 when no admissible root
// exists; callers fall back to simulation in that case.
double kernel_a_n(double V_measure, double h, int d);

enum class KernelCvVariant { Gumbel, GumbelApprox, HardleLinton };

// Analytic kernel critical values. HardleLinton recomputes its own
// a_n/b_n constants from h and the set measure; the other variants use the
// supplied a_n.
CriticalValue analytic_kernel_k(double a_n, double p, KernelCvVariant variant,
                                double h, double V_measure);

// Test oracle: p-quantile of the max of a multivariate normal with the given
// correlation matrix, sampled directly via Cholesky (with PSD repair).
double bruteforce_sup_quantile(const Eigen::MatrixXd& correlation, double p,
                               std::size_t draws, std::uint64_t seed);

// Correlation matrix implied by influence weights on a member set.
Eigen::MatrixXd weights_correlation(const InfluenceWeights& weights,
                                    const ArgminSet& set);

}  // namespace ibounds
