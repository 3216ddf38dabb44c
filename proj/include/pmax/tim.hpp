#pragma once

#include <cstdint>
#include <vector>

#include "pmax/graph.hpp"
#include "pmax/ris.hpp"

namespace pmax {

/// Inputs of one TIM+ run on a single graph.
struct TimParams {
  std::size_t k = 1;
  double eps_prime = 0.1;
  double eps_bar = 0.1;
  double l_prime = 1.0;
};

struct TimResult {
  /// Greedy order; seeds[0..j) is the size-j prefix.
  std::vector<NodeId> seeds;
  /// n * (fraction of the theta' sets covered by seeds).
  double spread_estimate = 0.0;
  /// prefix_spread[j-1] = n * coverage of the first j seeds, same collection.
  std::vector<double> prefix_spread;
  double kpt_star = 1.0;
  double kpt_prime = 0.0;
  double kpt_plus = 1.0;
  std::uint64_t theta_bar = 0;
  std::uint64_t theta_prime = 0;
};

/// kappa(R) = 1 - (1 - w(R)/m)^k; zero on an edgeless graph.
double kappa(std::uint64_t width, std::size_t m, std::size_t k);

struct KptStar {
  double value = 1.0;
  /// RR sets of the last batch drawn (reused by refine_kpt).
  RRCollection last_batch;
};

/// Geometric search for a lower bound of the optimal k-spread.  Batch i has
/// c_i = ceil((6 l' ln n + 6 ln log2 n) 2^i) sets; the search stops at the
/// first batch whose mean kappa exceeds 2^-i and returns max(1, n*sum/(2 c_i)),
/// otherwise 1.  Requires n >= 2.
KptStar estimate_kpt_star(const Graph& g, std::size_t k, double l_prime, std::uint64_t seed);

struct GreedyCoverage {
  std::vector<NodeId> seeds;
  /// covered[j-1] = sets covered by the first j seeds.
  std::vector<std::size_t> covered;
};

/// Max-coverage greedy on component 0 of `rc`: k rounds, each picking the
/// node that hits the most uncovered sets, ties to the lowest node id.
GreedyCoverage greedy_max_coverage(const RRCollection& rc, std::size_t k);

struct KptRefinement {
  double kpt_prime = 0.0;
  double kpt_plus = 1.0;
  std::uint64_t theta_bar = 0;
};

/// KPT+ = max(KPT', KPT*) with KPT' = f n / (1 + eps_bar), f measured on
/// ceil(lambda_bar / KPT*) fresh sets, lambda_bar = (2 + eps_bar) l' n ln n / eps_bar^2.
KptRefinement refine_kpt(const Graph& g, std::size_t k, double kpt_star,
                         const RRCollection& last_batch, double eps_bar, double l_prime,
                         std::uint64_t seed);

/// theta' = ceil(lambda' / KPT+) with
/// lambda' = (8 + 2 eps') n (l' ln n + ln 2 + ln C(n,k)) / eps'^2, then greedy.
TimResult tim_node_selection(const Graph& g, std::size_t k, double kpt_plus, double eps_prime,
                             double l_prime, std::uint64_t seed);

/// The three phases composed.  k > n is clamped to n with a warning; a
/// one-node graph short-circuits to {0} with spread 1.
TimResult tim_plus(const Graph& g, const TimParams& params, std::uint64_t seed);

}  // namespace pmax
