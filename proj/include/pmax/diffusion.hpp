#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pmax/graph.hpp"
#include "pmax/random.hpp"

namespace pmax {

struct DiffusionOutcome {
  /// Active nodes in activation order.
  std::vector<NodeId> activated;
  /// round[v] = activation round (seeds are round 1), 0 when never activated.
  std::vector<std::uint32_t> round;
};

/// One IC cascade.  Rounds expand the frontier in ascending node id, and each
/// node tries its out-edges in ascending target id, so a fixed stream gives a
/// reproducible trace.  Seeds outside [0,n) throw ContractViolation.
DiffusionOutcome simulate_ic(const Graph& g, std::span<const NodeId> seeds, Rng& rng);

/// Live-edge worlds derived from a 64-bit key.  Edge e of world t is live iff
/// hash(key, t, e) < p(e); worlds are mutually independent and any process
/// can regenerate world t without touching the others.
class WorldSampler {
 public:
  WorldSampler(const Graph& g, std::uint64_t key) : g_(&g), key_(key) {}

  const Graph& graph() const noexcept { return *g_; }
  std::uint64_t key() const noexcept { return key_; }

  bool live(std::uint64_t world, std::size_t edge_id, double p) const noexcept {
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    return unit_double(hash_key(key_, world, edge_id)) < p;
  }

  /// Count of nodes reachable from `from` in world t, skipping (and not
  /// counting) nodes already marked in `active`.  Newly reached nodes are
  /// marked when `commit` is true, otherwise the marks are rolled back.
  std::size_t expand(std::uint64_t world, std::span<const NodeId> from, std::span<char> active,
                     std::vector<NodeId>& stack, bool commit) const;

 private:
  const Graph* g_;
  std::uint64_t key_;
};

/// Mean cascade size over r independent cascades.  Draws one key from rng
/// and evaluates worlds 0..r-1 of it.
double mc_expected_spread(const Graph& g, std::span<const NodeId> seeds, std::size_t r, Rng& rng);

/// Per-world cascade sizes for worlds 0..r-1 of `key` (parallel, deterministic).
std::vector<std::uint32_t> mc_spread_samples(const Graph& g, std::span<const NodeId> seeds,
                                             std::size_t r, std::uint64_t key);

struct ProfitEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sum over products of p_i times the MC spread of S^(i); each component
/// uses its own independent worlds.
double mc_expected_profit(const CopyGraph& cg, const ProductCatalog& cat, const SeedAssignment& s,
                          std::size_t r, Rng& rng);

/// Profit per trial t = sum_i p_i * I_t(S^(i)); mean and standard error over
/// r trials.  Everything is a pure function of `key`.
ProfitEstimate mc_profit_with_stderr(const CopyGraph& cg, const ProductCatalog& cat,
                                     const SeedAssignment& s, std::size_t r, std::uint64_t key);

inline constexpr std::size_t kExactEdgeCutoff = 22;

/// Exact sigma(S) by enumerating all 2^m live-edge subgraphs.  Throws
/// InfeasibleInstance when m > kExactEdgeCutoff.
double exact_spread(const Graph& g, std::span<const NodeId> seeds);

/// Precomputed reachability over every live-edge world, for many exact
/// spread queries on one tiny graph (n <= 64).
class SpreadOracle {
 public:
  explicit SpreadOracle(const Graph& g);

  std::size_t n() const noexcept { return n_; }
  double spread(std::span<const NodeId> seeds) const;
  double spread_mask(std::uint64_t seed_mask) const;

  /// Best k-subset by exhaustive search; ties go to the lexicographically
  /// smallest node list.
  std::pair<std::vector<NodeId>, double> best_of_size(std::size_t k) const;

 private:
  std::size_t n_;
  std::vector<double> weight_;         // per world
  std::vector<std::uint64_t> reach_;   // world * n + v
};

struct ExactOptimum {
  SeedAssignment assignment;
  double opt = 0.0;
};

inline constexpr double kExactOptCombinationLimit = 1e7;

/// Exhaustive PM optimum under cost <= budget.  Profit separates over
/// products, so the search runs over maximal affordable count profiles and
/// the best k-subset per product.  Throws InfeasibleInstance when the
/// instance is beyond the oracle's limits.
ExactOptimum exact_opt(const CopyGraph& cg, const ProductCatalog& cat, Money budget);
ExactOptimum exact_opt(const SpreadOracle& oracle, const ProductCatalog& cat, Money budget);

/// Exact rho(S) = sum_i p_i sigma(S^(i)).
double exact_profit(const SpreadOracle& oracle, const ProductCatalog& cat, const SeedAssignment& s);

}  // namespace pmax
