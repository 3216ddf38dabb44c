#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pmax {

using NodeId = std::uint32_t;
using Money = double;

struct Edge {
  NodeId source;
  NodeId target;
  double prob;
};

/// One end of an adjacency entry: the neighbour and the edge probability.
struct Arc {
  NodeId node;
  double prob;
};

/// Directed graph with IC edge probabilities.  Immutable after construction;
/// both adjacency directions are stored as CSR arrays.
class Graph {
 public:
  Graph() = default;
  /// Builds from an edge multiset.  Throws ValidationError for a node id
  /// out of range or a probability outside [0,1].
  Graph(std::size_t n, std::span<const Edge> edges);

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return out_arcs_.size(); }

  std::span<const Arc> out(NodeId u) const noexcept {
    return {out_arcs_.data() + out_offsets_[u], out_arcs_.data() + out_offsets_[u + 1]};
  }
  std::span<const Arc> in(NodeId v) const noexcept {
    return {in_arcs_.data() + in_offsets_[v], in_arcs_.data() + in_offsets_[v + 1]};
  }
  std::size_t in_degree(NodeId v) const noexcept { return in_offsets_[v + 1] - in_offsets_[v]; }
  std::size_t out_degree(NodeId u) const noexcept { return out_offsets_[u + 1] - out_offsets_[u]; }

  /// Position of edge (u, k-th out arc) in [0, m); stable edge ids for hashing.
  std::size_t out_edge_id(NodeId u, std::size_t k) const noexcept { return out_offsets_[u] + k; }

  /// Edge list in out-CSR order.
  std::vector<Edge> edges() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<Arc> out_arcs_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<Arc> in_arcs_;
};

/// q disjoint copies of a base graph.  Never materialised: a copy node is
/// (component, base node) and every edge stays inside its component.
class CopyGraph {
 public:
  CopyGraph(const Graph& base, std::size_t q);

  const Graph& base() const noexcept { return *base_; }
  std::size_t q() const noexcept { return q_; }
  std::size_t node_count() const noexcept { return base_->n() * q_; }
  std::size_t edge_count() const noexcept { return base_->m() * q_; }

  /// Path query over edges with p > 0.  Always false across components.
  bool reachable(std::size_t from_component, NodeId from, std::size_t to_component,
                 NodeId to) const;

 private:
  const Graph* base_;
  std::size_t q_;
};

/// Product i of the catalog, 0-based everywhere in code.
struct Product {
  Money profit;
  Money cost;
};

class ProductCatalog {
 public:
  ProductCatalog() = default;
  /// Throws ValidationError unless every profit and cost is > 0 and q >= 1.
  explicit ProductCatalog(std::vector<Product> products);

  std::size_t q() const noexcept { return products_.size(); }
  const Product& operator[](std::size_t i) const { return products_[i]; }
  Money profit(std::size_t i) const { return products_[i].profit; }
  Money cost(std::size_t i) const { return products_[i].cost; }

  Money p_min() const noexcept;
  Money p_max() const noexcept;
  Money c_min() const noexcept;

  /// Largest k with k * c_i <= budget under double arithmetic.
  std::size_t affordable(std::size_t i, Money budget) const;
  /// max_i affordable(i, budget), i.e. seeds of the cheapest product.
  std::size_t max_seeds(Money budget) const;

 private:
  std::vector<Product> products_;
};

/// Per-product seed sets S^(1..q) over base-node ids.  A node may be seeded
/// for several products but at most once per product.
class SeedAssignment {
 public:
  SeedAssignment() = default;
  explicit SeedAssignment(std::size_t q) : sets_(q) {}

  std::size_t q() const noexcept { return sets_.size(); }
  /// Sorted node ids seeded for product i.
  const std::vector<NodeId>& seeds(std::size_t i) const { return sets_.at(i); }
  bool contains(std::size_t i, NodeId v) const;
  /// Returns false when v is already seeded for product i.
  bool add(std::size_t i, NodeId v);
  std::size_t total_seeds() const noexcept;
  bool empty() const noexcept { return total_seeds() == 0; }

  friend bool operator==(const SeedAssignment&, const SeedAssignment&) = default;

 private:
  std::vector<std::vector<NodeId>> sets_;
};

/// Sum over products of c_i * |S^(i)|.  Throws ContractViolation when the
/// assignment has more products than the catalog.
Money assignment_cost(const SeedAssignment& s, const ProductCatalog& cat);

inline bool within_budget(const SeedAssignment& s, const ProductCatalog& cat, Money budget) {
  return assignment_cost(s, cat) <= budget;
}

struct LoadedGraph {
  Graph graph;
  /// original_id[dense id] = id as written in the file.
  std::vector<std::uint64_t> original_id;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_collapsed = 0;
  /// True when any line carried an explicit probability column.
  bool has_probabilities = false;
};

/// Reads "u v [p]" lines; '#' lines and blank lines are skipped.  Node ids
/// are compacted to [0,n) in order of first appearance.  Without a
/// probability column edges get p = 1 (callers normally follow with
/// assign_wc_probabilities).  Undirected input adds both directions.
LoadedGraph load_edge_list(const std::filesystem::path& path, bool directed);
LoadedGraph parse_edge_list(std::istream& in, bool directed);

/// p(u,v) = 1 / in_degree(v) for every edge.
Graph assign_wc_probabilities(const Graph& g);

/// One "profit cost" pair per non-comment line.
ProductCatalog load_catalog(const std::filesystem::path& path);
ProductCatalog parse_catalog(std::istream& in);

void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace pmax
