#pragma once

#include <random>
#include <vector>

#include "pmax/graph.hpp"

namespace pmax::testing {

// a=0, b=1, c=2: a -> b -> c, both p = 0.5.
inline Graph tg1() {
  const std::vector<Edge> edges{{0, 1, 0.5}, {1, 2, 0.5}};
  return Graph(3, edges);
}

/// Random simple digraph with exactly m edges (m <= n(n-1)), optionally
/// re-weighted to 1/in_degree.
inline Graph random_graph(std::size_t n, std::size_t m, std::uint64_t seed, bool wc = true) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<NodeId, NodeId>> all;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = 0; v < n; ++v)
      if (u != v) all.emplace_back(u, v);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min(m, all.size()));
  std::uniform_real_distribution<double> p(0.05, 0.95);
  std::vector<Edge> edges;
  for (auto [u, v] : all) edges.push_back({u, v, p(rng)});
  Graph g(n, edges);
  return wc ? assign_wc_probabilities(g) : g;
}

inline ProductCatalog catalog(std::initializer_list<Product> products) {
  return ProductCatalog(std::vector<Product>(products));
}

}  // namespace pmax::testing
