#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pmax/baselines.hpp"
#include "pmax/graph.hpp"
#include "pmax/rmg.hpp"

namespace pmax {

/// One sweep: every algorithm at every budget, all evaluated by the same
/// independent MC estimate.
struct ExperimentSpec {
  std::string dataset = "dataset";
  std::vector<Money> budgets;
  /// Subset of rmg, random, greedy_mc, pmce; run in this order.
  std::vector<std::string> algorithms{"rmg", "random", "greedy_mc", "pmce"};
  std::size_t eval_trials = 10000;
  /// MC trials per marginal for greedy_mc and PMCE.
  std::size_t baseline_trials = kDefaultBaselineTrials;
  std::uint64_t seed = 0;
  RmgConfig rmg;
  /// Record wall-clock milliseconds; otherwise wall_ms is written as 0.
  bool timing = false;
};

/// Throws ValidationError for unknown algorithms, non-increasing or
/// non-positive budgets, or zero trial counts.
void validate(const ExperimentSpec& spec);

struct ProfitRow {
  std::string dataset;
  std::string algorithm;
  Money budget = 0.0;
  double profit = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
};

/// How one algorithm split its budget over products at one B.
struct DistributionRow {
  std::string dataset;
  std::string algorithm;
  Money budget = 0.0;
  std::size_t product = 0;
  std::size_t seeds = 0;
  Money spent = 0.0;
  double profit = 0.0;
  std::uint64_t seed = 0;
};

struct OptBoundRow {
  std::string dataset;
  Money budget = 0.0;
  double u_star = 0.0;
  double u_double_star = 0.0;
  double u_prime = 0.0;
  std::uint64_t seed = 0;
};

struct SweepResult {
  std::vector<ProfitRow> profits;
  std::vector<DistributionRow> distribution;
  std::vector<OptBoundRow> opt_bounds;
  /// Selected assignments, parallel to `profits`.
  std::vector<SeedAssignment> assignments;
};

/// Rows come out in (budget, algorithm) order.  A budget below the
/// cheapest product yields zero rows for every algorithm and a warning.
SweepResult run_sweep(const Graph& g, const ProductCatalog& cat, const ExperimentSpec& spec);

void write_profit_csv(std::ostream& out, const std::vector<ProfitRow>& rows);
void write_distribution_csv(std::ostream& out, const std::vector<DistributionRow>& rows);
void write_opt_bound_csv(std::ostream& out, const std::vector<OptBoundRow>& rows);

/// Directed G(n, p) with p = avg_degree / (n - 1): each node draws its
/// out-degree from Binomial(n - 1, p) and distinct targets uniformly, then
/// edges get weighted-cascade probabilities.
Graph gen_synthetic(std::size_t n, double avg_degree, std::uint64_t seed);

struct FailureExponents {
  double l = 1.0;
  double l_prime = 1.0;
};

/// l and l' for an overall success probability 1 - delta, splitting delta
/// evenly between the sampling term (nq)^-l and the bound term 3q n^-l'.
/// delta defaults to 1/n.
FailureExponents failure_exponents(std::size_t n, std::size_t q, double delta = 0.0);

}  // namespace pmax
