#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "pmax/graph.hpp"
#include "pmax/optbound.hpp"
#include "pmax/ris.hpp"

namespace pmax {

enum class GreedyMode {
  /// Size-1/2 enumeration plus a greedy completion of every feasible size-3 start.
  exact,
  /// Size-1/2 enumeration plus a single greedy run from the empty set.
  fast,
};

std::string to_string(GreedyMode mode);
/// "exact" or "fast"; anything else throws ValidationError.
GreedyMode parse_greedy_mode(const std::string& text);

struct GreedyOptions {
  GreedyMode mode = GreedyMode::fast;
  /// Priority-queue marginal evaluation; false scans every candidate each step.
  bool lazy = true;
  /// When set and larger than the collection, a warning is emitted.
  std::optional<std::uint64_t> required_theta;
};

/// Modified greedy over rho-hat on a fixed collection.  The result never
/// costs more than `budget`; ties go to the lower (component, node).
SeedAssignment modified_greedy(const RRCollection& rc, const ProductCatalog& cat, Money budget,
                               const GreedyOptions& options = {});
SeedAssignment modified_greedy(const CompactCoverage& cc, const ProductCatalog& cat, Money budget,
                               const GreedyOptions& options = {});

struct RmgConfig {
  double eps = 0.1;
  double eps_prime = 0.1;
  double eps_bar = 0.1;
  double l = 1.0;
  double l_prime = 1.0;
  GreedyMode mode = GreedyMode::fast;
  std::uint64_t theta_cap = 100000000;
  MatrixMode matrix_mode = MatrixMode::prefix;
  std::size_t theta_eval = kDefaultThetaEval;
  /// MC trials for the independent profit re-estimate; 0 skips it.
  std::size_t eval_trials = 10000;
};

struct RmgReport {
  GreedyMode mode = GreedyMode::fast;
  double u_star = 0.0;
  double u_double_star = 0.0;
  double u_prime = 0.0;
  double lambda = 0.0;
  std::uint64_t theta_required = 0;
  std::uint64_t theta = 0;
  bool capped = false;
  double rho_hat = 0.0;
  double mc_profit = 0.0;
  double mc_stderr = 0.0;
  Money cost = 0.0;
  double ms_bound = 0.0;
  double ms_sampling = 0.0;
  double ms_greedy = 0.0;
  double ms_eval = 0.0;

  /// "key=value" lines.
  void write_text(std::ostream& out) const;
  static std::string csv_header();
  std::string csv_row() const;
};

struct RmgResult {
  SeedAssignment assignment;
  RmgReport report;
};

/// Copy graph, refined OPT bound, theta = ceil(lambda / u') (capped),
/// sampling, modified greedy and an MC re-estimate of the chosen profit.
RmgResult rmg_pipeline(const Graph& g, const ProductCatalog& cat, Money budget,
                       const RmgConfig& config, std::uint64_t seed);

}  // namespace pmax
