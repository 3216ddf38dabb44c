#include "pmax/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "pmax/error.hpp"

namespace pmax {

Graph::Graph(std::size_t n, std::span<const Edge> edges) : n_(n) {
  out_offsets_.assign(n + 1, 0);
  in_offsets_.assign(n + 1, 0);
  for (const Edge& e : edges) {
    if (e.source >= n || e.target >= n)
      throw ValidationError("edge endpoint out of range: " + std::to_string(e.source) + "->" +
                            std::to_string(e.target));
    if (!(e.prob >= 0.0 && e.prob <= 1.0))
      throw ValidationError("edge probability outside [0,1]: " + std::to_string(e.prob));
    ++out_offsets_[e.source + 1];
    ++in_offsets_[e.target + 1];
  }
  for (std::size_t v = 0; v < n; ++v) {
    out_offsets_[v + 1] += out_offsets_[v];
    in_offsets_[v + 1] += in_offsets_[v];
  }
  out_arcs_.resize(edges.size());
  in_arcs_.resize(edges.size());
  std::vector<std::size_t> out_pos(out_offsets_.begin(), out_offsets_.end() - 1);
  std::vector<std::size_t> in_pos(in_offsets_.begin(), in_offsets_.end() - 1);
  for (const Edge& e : edges) {
    out_arcs_[out_pos[e.source]++] = {e.target, e.prob};
    in_arcs_[in_pos[e.target]++] = {e.source, e.prob};
  }
  // Ascending neighbour order makes simulation traces independent of input order.
  auto by_node = [](const Arc& a, const Arc& b) { return a.node < b.node; };
  for (std::size_t v = 0; v < n; ++v) {
    std::stable_sort(out_arcs_.begin() + out_offsets_[v], out_arcs_.begin() + out_offsets_[v + 1],
                     by_node);
    std::stable_sort(in_arcs_.begin() + in_offsets_[v], in_arcs_.begin() + in_offsets_[v + 1],
                     by_node);
  }
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> result;
  result.reserve(m());
  for (NodeId u = 0; u < n_; ++u)
    for (const Arc& a : out(u)) result.push_back({u, a.node, a.prob});
  return result;
}

CopyGraph::CopyGraph(const Graph& base, std::size_t q) : base_(&base), q_(q) {
  if (q == 0) throw ValidationError("copy graph needs at least one component");
}

bool CopyGraph::reachable(std::size_t from_component, NodeId from, std::size_t to_component,
                          NodeId to) const {
  if (from_component >= q_ || to_component >= q_ || from >= base_->n() || to >= base_->n())
    throw ContractViolation("copy node out of range");
  if (from_component != to_component) return false;
  std::vector<char> seen(base_->n(), 0);
  std::vector<NodeId> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    if (u == to) return true;
    for (const Arc& a : base_->out(u))
      if (a.prob > 0.0 && !seen[a.node]) {
        seen[a.node] = 1;
        stack.push_back(a.node);
      }
  }
  return false;
}

ProductCatalog::ProductCatalog(std::vector<Product> products) : products_(std::move(products)) {
  if (products_.empty()) throw ValidationError("catalog has no products");
  for (const Product& p : products_) {
    if (!(p.profit > 0.0) || !std::isfinite(p.profit))
      throw ValidationError("product profit must be positive");
    if (!(p.cost > 0.0) || !std::isfinite(p.cost))
      throw ValidationError("product cost must be positive");
  }
}

Money ProductCatalog::p_min() const noexcept {
  Money best = products_.front().profit;
  for (const Product& p : products_) best = std::min(best, p.profit);
  return best;
}

Money ProductCatalog::p_max() const noexcept {
  Money best = products_.front().profit;
  for (const Product& p : products_) best = std::max(best, p.profit);
  return best;
}

Money ProductCatalog::c_min() const noexcept {
  Money best = products_.front().cost;
  for (const Product& p : products_) best = std::min(best, p.cost);
  return best;
}

std::size_t ProductCatalog::affordable(std::size_t i, Money budget) const {
  const Money c = products_.at(i).cost;
  if (!(budget >= c)) return 0;
  auto k = static_cast<std::size_t>(std::floor(budget / c));
  while (k > 0 && static_cast<double>(k) * c > budget) --k;
  while (static_cast<double>(k + 1) * c <= budget) ++k;
  return k;
}

std::size_t ProductCatalog::max_seeds(Money budget) const {
  std::size_t best = 0;
  for (std::size_t i = 0; i < q(); ++i) best = std::max(best, affordable(i, budget));
  return best;
}

bool SeedAssignment::contains(std::size_t i, NodeId v) const {
  const auto& s = sets_.at(i);
  return std::binary_search(s.begin(), s.end(), v);
}

bool SeedAssignment::add(std::size_t i, NodeId v) {
  auto& s = sets_.at(i);
  auto it = std::lower_bound(s.begin(), s.end(), v);
  if (it != s.end() && *it == v) return false;
  s.insert(it, v);
  return true;
}

std::size_t SeedAssignment::total_seeds() const noexcept {
  std::size_t total = 0;
  for (const auto& s : sets_) total += s.size();
  return total;
}

Money assignment_cost(const SeedAssignment& s, const ProductCatalog& cat) {
  if (s.q() > cat.q())
    throw ContractViolation("assignment has " + std::to_string(s.q()) +
                            " products, catalog only " + std::to_string(cat.q()));
  Money total = 0.0;
  for (std::size_t i = 0; i < s.q(); ++i)
    total += cat.cost(i) * static_cast<double>(s.seeds(i).size());
  return total;
}

namespace {

bool skippable(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#' || line[pos] == '%';
}

std::uint64_t parse_id(const std::string& tok, std::size_t line_no) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError("expected a nonnegative integer node id, got '" + tok + "'", line_no);
  try {
    return std::stoull(tok);
  } catch (const std::exception&) {
    throw ParseError("node id out of range: '" + tok + "'", line_no);
  }
}

double parse_number(const std::string& tok, std::size_t line_no) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + tok + "'", line_no);
  }
  if (used != tok.size()) throw ParseError("expected a number, got '" + tok + "'", line_no);
  return value;
}

}  // namespace

LoadedGraph parse_edge_list(std::istream& in, bool directed) {
  LoadedGraph result;
  std::unordered_map<std::uint64_t, NodeId> dense;
  auto id_of = [&](std::uint64_t raw) {
    auto [it, inserted] = dense.try_emplace(raw, static_cast<NodeId>(result.original_id.size()));
    if (inserted) result.original_id.push_back(raw);
    return it->second;
  };

  // (u,v) -> probability; last line wins.
  std::map<std::pair<NodeId, NodeId>, double> arcs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.size() < 2 || tok.size() > 3)
      throw ParseError("expected 'u v' or 'u v p'", line_no);
    const std::uint64_t ru = parse_id(tok[0], line_no);
    const std::uint64_t rv = parse_id(tok[1], line_no);
    double p = 1.0;
    if (tok.size() == 3) {
      p = parse_number(tok[2], line_no);
      if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("probability " + tok[2] + " outside [0,1] on line " +
                              std::to_string(line_no));
      result.has_probabilities = true;
    }
    const NodeId u = id_of(ru);
    const NodeId v = id_of(rv);
    if (u == v) {
      ++result.self_loops_dropped;
      continue;
    }
    auto put = [&](NodeId a, NodeId b) {
      auto [it, inserted] = arcs.insert_or_assign({a, b}, p);
      if (!inserted) ++result.duplicates_collapsed;
    };
    put(u, v);
    if (!directed) put(v, u);
  }

  std::vector<Edge> edges;
  edges.reserve(arcs.size());
  for (const auto& [uv, p] : arcs) edges.push_back({uv.first, uv.second, p});
  result.graph = Graph(result.original_id.size(), edges);
  return result;
}

LoadedGraph load_edge_list(const std::filesystem::path& path, bool directed) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open edge list " + path.string());
  return parse_edge_list(in, directed);
}

Graph assign_wc_probabilities(const Graph& g) {
  std::vector<Edge> edges = g.edges();
  for (Edge& e : edges) e.prob = 1.0 / static_cast<double>(g.in_degree(e.target));
  return Graph(g.n(), edges);
}

ProductCatalog parse_catalog(std::istream& in) {
  std::vector<Product> products;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.size() != 2) throw ParseError("expected 'profit cost'", line_no);
    const double profit = parse_number(tok[0], line_no);
    const double cost = parse_number(tok[1], line_no);
    if (!(profit > 0.0) || !(cost > 0.0))
      throw ValidationError("profit and cost must be positive on line " + std::to_string(line_no));
    products.push_back({profit, cost});
  }
  return ProductCatalog(std::move(products));
}

ProductCatalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open catalog " + path.string());
  return parse_catalog(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes " << g.n() << " edges " << g.m() << '\n';
  out.precision(17);
  for (const Edge& e : g.edges()) out << e.source << ' ' << e.target << ' ' << e.prob << '\n';
}

}  // namespace pmax
