#include "pmax/ris.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "pmax/error.hpp"

namespace pmax {

namespace {

constexpr std::size_t kBatch = 1024;

/// Reverse BFS scratch; epoch stamps avoid clearing the visited array.
class ReverseSampler {
 public:
  explicit ReverseSampler(const Graph& g) : g_(g), stamp_(g.n(), 0) {}

  /// Appends the RR set of `root` to `out`; returns its width.
  std::uint64_t sample(NodeId root, Rng& rng, std::vector<NodeId>& out) {
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
    const std::size_t start = out.size();
    out.push_back(root);
    stamp_[root] = epoch_;
    std::uint64_t width = 0;
    for (std::size_t head = start; head < out.size(); ++head) {
      const NodeId v = out[head];
      const auto arcs = g_.in(v);
      width += arcs.size();
      for (const Arc& a : arcs) {
        if (stamp_[a.node] == epoch_) continue;
        const bool live = a.prob >= 1.0 || (a.prob > 0.0 && unit_double(rng()) < a.prob);
        if (!live) continue;
        stamp_[a.node] = epoch_;
        out.push_back(a.node);
      }
    }
    return width;
  }

 private:
  const Graph& g_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
};

std::pair<std::uint32_t, NodeId> draw_root(const CopyGraph& cg, Rng& rng) {
  std::uniform_int_distribution<std::uint64_t> pick(0, cg.node_count() - 1);
  const std::uint64_t copy = pick(rng);
  const std::size_t n = cg.base().n();
  return {static_cast<std::uint32_t>(copy / n), static_cast<NodeId>(copy % n)};
}

struct Batch {
  std::vector<std::uint32_t> component;
  std::vector<NodeId> root;
  std::vector<std::uint64_t> width;
  std::vector<std::uint32_t> length;
  std::vector<NodeId> nodes;
};

}  // namespace

RRSet generate_rr_set_rooted(const Graph& g, std::uint32_t component, NodeId root, Rng& rng) {
  if (root >= g.n()) throw ContractViolation("RR root outside graph");
  ReverseSampler sampler(g);
  RRSet r;
  r.component = component;
  r.root = root;
  r.width = sampler.sample(root, rng, r.nodes);
  return r;
}

RRSet generate_rr_set(const CopyGraph& cg, Rng& rng) {
  if (cg.base().n() == 0) throw ContractViolation("RR sampling on an empty graph");
  const auto [component, root] = draw_root(cg, rng);
  return generate_rr_set_rooted(cg.base(), component, root, rng);
}

RRCollection generate_collection(const CopyGraph& cg, std::size_t theta, std::uint64_t seed) {
  if (theta == 0) throw ContractViolation("generate_collection needs theta >= 1");
  if (cg.base().n() == 0) throw ContractViolation("RR sampling on an empty graph");
  if (theta > std::numeric_limits<std::uint32_t>::max())
    throw ContractViolation("theta exceeds 32-bit set ids");
  const Graph& g = cg.base();
  const std::size_t batches = (theta + kBatch - 1) / kBatch;
  std::vector<Batch> parts(batches);

#pragma omp parallel
  {
    ReverseSampler sampler(g);
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(batches); ++b) {
      Rng rng = make_stream(hash_key(seed, stream_tag::kRrBatch), static_cast<std::uint64_t>(b));
      Batch& part = parts[b];
      const std::size_t count = std::min(kBatch, theta - static_cast<std::size_t>(b) * kBatch);
      part.component.reserve(count);
      part.root.reserve(count);
      part.width.reserve(count);
      part.length.reserve(count);
      for (std::size_t j = 0; j < count; ++j) {
        const auto [component, root] = draw_root(cg, rng);
        const std::size_t before = part.nodes.size();
        part.width.push_back(sampler.sample(root, rng, part.nodes));
        part.component.push_back(component);
        part.root.push_back(root);
        part.length.push_back(static_cast<std::uint32_t>(part.nodes.size() - before));
      }
    }
  }

  RRCollection rc;
  rc.n_ = g.n();
  rc.q_ = cg.q();
  std::size_t total_nodes = 0;
  for (const Batch& part : parts) total_nodes += part.nodes.size();
  rc.component_.reserve(theta);
  rc.root_.reserve(theta);
  rc.width_.reserve(theta);
  rc.offsets_.reserve(theta + 1);
  rc.nodes_.reserve(total_nodes);
  for (Batch& part : parts) {
    rc.component_.insert(rc.component_.end(), part.component.begin(), part.component.end());
    rc.root_.insert(rc.root_.end(), part.root.begin(), part.root.end());
    rc.width_.insert(rc.width_.end(), part.width.begin(), part.width.end());
    for (auto len : part.length) rc.offsets_.push_back(rc.offsets_.back() + len);
    rc.nodes_.insert(rc.nodes_.end(), part.nodes.begin(), part.nodes.end());
    part = Batch{};
  }
  rc.build_index();
  return rc;
}

RRCollection generate_collection(const CopyGraph& cg, std::size_t theta, Rng& rng) {
  return generate_collection(cg, theta, rng());
}

void RRCollection::build_index() {
  const std::size_t keys = n_ * q_;
  index_offsets_.assign(keys + 1, 0);
  for (std::size_t j = 0; j < theta(); ++j)
    for (std::size_t k = offsets_[j]; k < offsets_[j + 1]; ++k)
      ++index_offsets_[component_[j] * n_ + nodes_[k] + 1];
  for (std::size_t key = 0; key < keys; ++key) index_offsets_[key + 1] += index_offsets_[key];
  index_.resize(nodes_.size());
  std::vector<std::size_t> pos(index_offsets_.begin(), index_offsets_.end() - 1);
  for (std::size_t j = 0; j < theta(); ++j)
    for (std::size_t k = offsets_[j]; k < offsets_[j + 1]; ++k)
      index_[pos[component_[j] * n_ + nodes_[k]]++] = static_cast<std::uint32_t>(j);
}

RRCollection RRCollection::from_sets(std::size_t n, std::size_t q, std::span<const RRSet> sets) {
  RRCollection rc;
  rc.n_ = n;
  rc.q_ = q;
  for (const RRSet& s : sets) {
    if (s.component >= q) throw ContractViolation("RR set component out of range");
    if (s.nodes.empty()) throw ContractViolation("RR set without nodes");
    std::vector<NodeId> sorted = s.nodes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ContractViolation("RR set lists a node twice");
    for (NodeId v : s.nodes)
      if (v >= n) throw ContractViolation("RR set node out of range");
    rc.component_.push_back(s.component);
    rc.root_.push_back(s.root);
    rc.width_.push_back(s.width);
    rc.nodes_.insert(rc.nodes_.end(), s.nodes.begin(), s.nodes.end());
    rc.offsets_.push_back(rc.nodes_.size());
  }
  rc.build_index();
  return rc;
}

std::uint64_t RRCollection::total_width() const noexcept {
  std::uint64_t total = 0;
  for (auto w : width_) total += w;
  return total;
}

namespace {

constexpr char kMagic[8] = {'P', 'M', 'A', 'X', 'R', 'R', 'S', '\0'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ParseError("truncated RR collection file", 0);
  return value;
}

}  // namespace

// Layout: magic[8], u32 version, u64 n, u32 q, u64 theta, then per set
// u32 component, u32 root, u64 width, u32 length, u32 nodes[length].
// Host byte order.
void RRCollection::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, n_);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(q_));
  put<std::uint64_t>(out, theta());
  for (std::size_t j = 0; j < theta(); ++j) {
    put<std::uint32_t>(out, component_[j]);
    put<std::uint32_t>(out, root_[j]);
    put<std::uint64_t>(out, width_[j]);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(offsets_[j + 1] - offsets_[j]));
    out.write(reinterpret_cast<const char*>(nodes_.data() + offsets_[j]),
              static_cast<std::streamsize>((offsets_[j + 1] - offsets_[j]) * sizeof(NodeId)));
  }
  if (!out) throw ValidationError("failed writing " + path.string());
}

RRCollection RRCollection::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw ParseError("not an RR collection file: " + path.string(), 0);
  if (get<std::uint32_t>(in) != kVersion) throw ParseError("unsupported RR collection version", 0);
  RRCollection rc;
  rc.n_ = get<std::uint64_t>(in);
  rc.q_ = get<std::uint32_t>(in);
  const auto theta = get<std::uint64_t>(in);
  rc.component_.reserve(theta);
  for (std::uint64_t j = 0; j < theta; ++j) {
    const auto component = get<std::uint32_t>(in);
    const auto root = get<std::uint32_t>(in);
    const auto width = get<std::uint64_t>(in);
    const auto length = get<std::uint32_t>(in);
    if (component >= rc.q_ || root >= rc.n_ || length == 0 || length > rc.n_)
      throw ParseError("corrupt RR set record " + std::to_string(j), 0);
    const std::size_t at = rc.nodes_.size();
    rc.nodes_.resize(at + length);
    in.read(reinterpret_cast<char*>(rc.nodes_.data() + at),
            static_cast<std::streamsize>(length * sizeof(NodeId)));
    if (!in) throw ParseError("truncated RR collection file", 0);
    for (std::size_t k = at; k < rc.nodes_.size(); ++k)
      if (rc.nodes_[k] >= rc.n_) throw ParseError("corrupt RR set node", 0);
    rc.component_.push_back(component);
    rc.root_.push_back(root);
    rc.width_.push_back(width);
    rc.offsets_.push_back(rc.nodes_.size());
  }
  rc.build_index();
  return rc;
}

std::size_t covered_count(const RRCollection& rc, std::size_t component,
                          std::span<const NodeId> nodes) {
  if (component >= rc.q()) throw ContractViolation("component out of range");
  std::vector<std::uint32_t> ids;
  for (NodeId v : nodes) {
    if (v >= rc.n()) throw ContractViolation("node out of range");
    const auto list = rc.covering(component, v);
    ids.insert(ids.end(), list.begin(), list.end());
  }
  std::sort(ids.begin(), ids.end());
  return static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
}

double coverage_fraction(const RRCollection& rc, std::size_t component,
                         std::span<const NodeId> nodes) {
  if (rc.empty()) throw ContractViolation("coverage on an empty collection");
  return static_cast<double>(covered_count(rc, component, nodes)) /
         static_cast<double>(rc.theta());
}

double profit_estimate(const RRCollection& rc, const ProductCatalog& cat, const SeedAssignment& s) {
  if (rc.q() != cat.q() || s.q() != cat.q())
    throw ContractViolation("collection, catalog and assignment must share q");
  const double nq = static_cast<double>(rc.n() * rc.q());
  double total = 0.0;
  for (std::size_t i = 0; i < s.q(); ++i) {
    if (s.seeds(i).empty()) continue;
    total += nq * cat.profit(i) * coverage_fraction(rc, i, s.seeds(i));
  }
  return total;
}

CoverageState::CoverageState(const RRCollection& rc)
    : rc_(&rc), covered_(rc.theta(), 0), covered_per_component_(rc.q(), 0), assignment_(rc.q()) {}

std::size_t CoverageState::gain_count(CopyNode v) const {
  std::size_t fresh = 0;
  for (std::uint32_t id : rc_->covering(v.component, v.node)) fresh += covered_[id] == 0;
  return fresh;
}

void CoverageState::add(CopyNode v) {
  if (!assignment_.add(v.component, v.node)) return;
  for (std::uint32_t id : rc_->covering(v.component, v.node)) {
    if (covered_[id]) continue;
    covered_[id] = 1;
    ++covered_per_component_[v.component];
  }
}

double marginal_gain(const RRCollection& rc, const ProductCatalog& cat, const CoverageState& state,
                     CopyNode v) {
  const double nq = static_cast<double>(rc.n() * rc.q());
  return nq * cat.profit(v.component) * static_cast<double>(state.gain_count(v)) /
         static_cast<double>(rc.theta());
}

double log_binomial(std::size_t n, std::size_t k) {
  if (k > n) return -INFINITY;
  k = std::min(k, n - k);
  double acc = 0.0;
  for (std::size_t j = 1; j <= k; ++j)
    acc += std::log(static_cast<double>(n - j + 1) / static_cast<double>(j));
  return acc;
}

ThetaBound required_theta(std::size_t n, std::size_t q, const ProductCatalog& cat, Money budget,
                          double eps, double l, double u) {
  if (!(u > 0.0)) throw ValidationError("OPT lower bound u must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps must lie in (0,1)");
  if (!(l > 0.0)) throw ValidationError("l must be positive");
  const std::size_t nq = n * q;
  const std::size_t k_star = std::min(cat.max_seeds(budget), nq);
  if (k_star == 0) throw InfeasibleInstance("budget below the cheapest product (k* = 0)");
  const double dq = static_cast<double>(q);
  ThetaBound b;
  b.lambda = (8.0 * dq + 2.0 * eps) * static_cast<double>(n) * dq * dq * cat.p_max() *
             (l * std::log(static_cast<double>(nq)) +
              std::log(2.0 * dq * static_cast<double>(k_star)) + log_binomial(nq, k_star)) /
             (eps * eps);
  const double theta = std::ceil(b.lambda / u);
  b.theta = theta >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max()
                            : static_cast<std::uint64_t>(theta);
  return b;
}

CompactCoverage::CompactCoverage(const RRCollection& rc)
    : n_(rc.n()), q_(rc.q()), theta_(rc.theta()) {
  // Sorted copy of every set, then a hash-ordered pass that merges equal ones.
  const std::size_t theta = rc.theta();
  std::vector<std::size_t> start(theta + 1, 0);
  std::vector<NodeId> sorted;
  sorted.reserve(rc.total_nodes());
  std::vector<std::uint64_t> hash(theta);
  for (std::size_t j = 0; j < theta; ++j) {
    const RRSetView s = rc.set(j);
    sorted.insert(sorted.end(), s.nodes.begin(), s.nodes.end());
    std::sort(sorted.begin() + static_cast<std::ptrdiff_t>(start[j]), sorted.end());
    start[j + 1] = sorted.size();
    std::uint64_t h = hash_key(s.component, s.nodes.size());
    for (std::size_t k = start[j]; k < start[j + 1]; ++k) h = hash_key(h, sorted[k]);
    hash[j] = h;
  }
  const auto same = [&](std::size_t a, std::size_t b) {
    return rc.set(a).component == rc.set(b).component &&
           std::equal(sorted.begin() + static_cast<std::ptrdiff_t>(start[a]),
                      sorted.begin() + static_cast<std::ptrdiff_t>(start[a + 1]),
                      sorted.begin() + static_cast<std::ptrdiff_t>(start[b]),
                      sorted.begin() + static_cast<std::ptrdiff_t>(start[b + 1]));
  };
  std::vector<std::uint32_t> order(theta);
  for (std::size_t j = 0; j < theta; ++j) order[j] = static_cast<std::uint32_t>(j);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return hash[a] != hash[b] ? hash[a] < hash[b] : a < b;
  });
  // representative[j] = first set equal to j.
  std::vector<std::uint32_t> representative(theta);
  std::vector<std::uint32_t> group;
  for (std::size_t g = 0; g < theta;) {
    std::size_t end = g;
    while (end < theta && hash[order[end]] == hash[order[g]]) ++end;
    group.clear();
    for (std::size_t k = g; k < end; ++k) {
      const std::uint32_t j = order[k];
      std::uint32_t rep = j;
      for (std::uint32_t r : group)
        if (same(r, j)) {
          rep = r;
          break;
        }
      if (rep == j) group.push_back(j);
      representative[j] = rep;
    }
    g = end;
  }
  std::vector<std::uint32_t> item_of(theta);
  for (std::size_t j = 0; j < theta; ++j) {
    const std::uint32_t rep = representative[j];
    if (rep == j) {
      item_of[j] = static_cast<std::uint32_t>(weight_.size());
      weight_.push_back(1);
      component_.push_back(rc.set(j).component);
      nodes_.insert(nodes_.end(), sorted.begin() + static_cast<std::ptrdiff_t>(start[j]),
                    sorted.begin() + static_cast<std::ptrdiff_t>(start[j + 1]));
      offsets_.push_back(nodes_.size());
    } else {
      ++weight_[item_of[rep]];
    }
  }
  const std::size_t keys = n_ * q_;
  index_offsets_.assign(keys + 1, 0);
  for (std::size_t item = 0; item < items(); ++item)
    for (NodeId v : item_nodes(item)) ++index_offsets_[component_[item] * n_ + v + 1];
  for (std::size_t k = 0; k < keys; ++k) index_offsets_[k + 1] += index_offsets_[k];
  index_.resize(nodes_.size());
  std::vector<std::size_t> pos(index_offsets_.begin(), index_offsets_.end() - 1);
  for (std::size_t item = 0; item < items(); ++item)
    for (NodeId v : item_nodes(item))
      index_[pos[component_[item] * n_ + v]++] = static_cast<std::uint32_t>(item);
}

}  // namespace pmax
