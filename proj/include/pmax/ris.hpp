#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pmax/graph.hpp"
#include "pmax/random.hpp"

namespace pmax {

/// A seed candidate on the copy graph: base node `node` in component `component`.
struct CopyNode {
  std::uint32_t component;
  NodeId node;
  friend auto operator<=>(const CopyNode&, const CopyNode&) = default;
};

/// Reverse-reachable set: the base nodes that reach `root` in one sampled
/// live-edge subgraph of component `component`.
struct RRSet {
  std::uint32_t component = 0;
  NodeId root = 0;
  std::vector<NodeId> nodes;  // root first, then BFS order
  std::uint64_t width = 0;    // sum of in-degrees over nodes
};

struct RRSetView {
  std::uint32_t component;
  NodeId root;
  std::span<const NodeId> nodes;
  std::uint64_t width;
};

/// theta RR sets in flat storage plus the inverted index
/// (component, node) -> ascending ids of the sets containing it.
class RRCollection {
 public:
  RRCollection() = default;
  /// Test hook and deserialisation path; validates ranges and builds the index.
  static RRCollection from_sets(std::size_t n, std::size_t q, std::span<const RRSet> sets);

  std::size_t n() const noexcept { return n_; }
  std::size_t q() const noexcept { return q_; }
  std::size_t theta() const noexcept { return component_.size(); }
  bool empty() const noexcept { return component_.empty(); }

  RRSetView set(std::size_t j) const noexcept {
    return {component_[j], root_[j],
            {nodes_.data() + offsets_[j], nodes_.data() + offsets_[j + 1]}, width_[j]};
  }
  std::span<const std::uint32_t> covering(std::size_t component, NodeId v) const noexcept {
    const std::size_t key = component * n_ + v;
    return {index_.data() + index_offsets_[key], index_.data() + index_offsets_[key + 1]};
  }

  std::uint64_t total_width() const noexcept;
  std::size_t total_nodes() const noexcept { return nodes_.size(); }

  void save(const std::filesystem::path& path) const;
  static RRCollection load(const std::filesystem::path& path);

 private:
  friend RRCollection generate_collection(const CopyGraph&, std::size_t, std::uint64_t);
  void build_index();

  std::size_t n_ = 0;
  std::size_t q_ = 0;
  std::vector<std::uint32_t> component_;
  std::vector<NodeId> root_;
  std::vector<std::uint64_t> width_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> nodes_;
  std::vector<std::size_t> index_offsets_;
  std::vector<std::uint32_t> index_;
};

/// Random RR set on the copy graph: uniform copy-node root, then a reverse
/// BFS that flips each examined in-edge once with its probability.
RRSet generate_rr_set(const CopyGraph& cg, Rng& rng);
/// Same with the root pinned (test hook for distributional checks).
RRSet generate_rr_set_rooted(const Graph& g, std::uint32_t component, NodeId root, Rng& rng);

/// theta independent RR sets.  Sets are produced in fixed-size batches, batch
/// b drawing from make_stream(seed, b), so the result does not depend on the
/// worker count.  theta == 0 throws ContractViolation.
RRCollection generate_collection(const CopyGraph& cg, std::size_t theta, std::uint64_t seed);
RRCollection generate_collection(const CopyGraph& cg, std::size_t theta, Rng& rng);

/// Number of sets of `component` hit by `nodes`.
std::size_t covered_count(const RRCollection& rc, std::size_t component,
                          std::span<const NodeId> nodes);

/// covered_count / theta.
double coverage_fraction(const RRCollection& rc, std::size_t component,
                         std::span<const NodeId> nodes);

/// rho-hat(S) = sum_i n q p_i F_R(S^(i)).  Throws ContractViolation when the
/// collection, catalog and assignment disagree on q.
double profit_estimate(const RRCollection& rc, const ProductCatalog& cat, const SeedAssignment& s);

/// Caller-owned scratch tracking which sets the current assignment covers,
/// so marginal gains cost O(|index(v)|).
class CoverageState {
 public:
  explicit CoverageState(const RRCollection& rc);

  const SeedAssignment& assignment() const noexcept { return assignment_; }
  /// Uncovered sets of `v`'s component that v would newly cover.
  std::size_t gain_count(CopyNode v) const;
  void add(CopyNode v);
  std::size_t covered(std::size_t component) const { return covered_per_component_[component]; }

 private:
  const RRCollection* rc_;
  std::vector<char> covered_;
  std::vector<std::size_t> covered_per_component_;
  SeedAssignment assignment_;
};

/// rho-hat(S + v) - rho-hat(S) from the scratch state.
double marginal_gain(const RRCollection& rc, const ProductCatalog& cat, const CoverageState& state,
                     CopyNode v);

/// ln C(n, k) as a sum of logs; -inf when k > n.
double log_binomial(std::size_t n, std::size_t k);

struct ThetaBound {
  double lambda = 0.0;
  std::uint64_t theta = 0;
};

/// lambda = (8q + 2 eps) n q^2 p_max (l ln(nq) + ln(2 q k*) + ln C(nq, k*)) / eps^2
/// and theta = ceil(lambda / u).  k* is clamped to nq.  Throws
/// ValidationError for u <= 0 or parameters out of range and
/// InfeasibleInstance when k* = 0.
ThetaBound required_theta(std::size_t n, std::size_t q, const ProductCatalog& cat, Money budget,
                          double eps, double l, double u);

/// RR sets with identical (component, node set) merged into one weighted
/// item.  Coverage values are the same integers as on the raw collection.
class CompactCoverage {
 public:
  explicit CompactCoverage(const RRCollection& rc);

  std::size_t n() const noexcept { return n_; }
  std::size_t q() const noexcept { return q_; }
  std::size_t theta() const noexcept { return theta_; }
  std::size_t items() const noexcept { return weight_.size(); }
  std::uint32_t weight(std::size_t item) const noexcept { return weight_[item]; }
  std::uint32_t item_component(std::size_t item) const noexcept { return component_[item]; }
  std::span<const NodeId> item_nodes(std::size_t item) const noexcept {
    return {nodes_.data() + offsets_[item], nodes_.data() + offsets_[item + 1]};
  }
  std::span<const std::uint32_t> covering(CopyNode v) const noexcept {
    const std::size_t key = v.component * n_ + v.node;
    return {index_.data() + index_offsets_[key], index_.data() + index_offsets_[key + 1]};
  }

 private:
  std::size_t n_ = 0;
  std::size_t q_ = 0;
  std::size_t theta_ = 0;
  std::vector<std::uint32_t> weight_;
  std::vector<std::uint32_t> component_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> nodes_;
  std::vector<std::size_t> index_offsets_;
  std::vector<std::uint32_t> index_;
};

}  // namespace pmax
