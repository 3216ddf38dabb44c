#include "pmax/diffusion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "pmax/error.hpp"

namespace pmax {

namespace {

void check_seeds(const Graph& g, std::span<const NodeId> seeds) {
  for (NodeId s : seeds)
    if (s >= g.n())
      throw ContractViolation("seed " + std::to_string(s) + " outside [0," +
                              std::to_string(g.n()) + ")");
}

}  // namespace

DiffusionOutcome simulate_ic(const Graph& g, std::span<const NodeId> seeds, Rng& rng) {
  check_seeds(g, seeds);
  DiffusionOutcome out;
  out.round.assign(g.n(), 0);
  std::vector<NodeId> frontier;
  for (NodeId s : seeds) {
    if (out.round[s] != 0) continue;
    out.round[s] = 1;
    frontier.push_back(s);
  }
  std::sort(frontier.begin(), frontier.end());
  out.activated = frontier;

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<NodeId> next;
  for (std::uint32_t t = 1; !frontier.empty(); ++t) {
    next.clear();
    for (NodeId u : frontier) {
      for (const Arc& a : g.out(u)) {
        // Every attempt consumes one draw, active target or not.
        const bool success = coin(rng) < a.prob;
        if (success && out.round[a.node] == 0) {
          out.round[a.node] = t + 1;
          next.push_back(a.node);
        }
      }
    }
    std::sort(next.begin(), next.end());
    out.activated.insert(out.activated.end(), next.begin(), next.end());
    frontier.swap(next);
  }
  return out;
}

std::size_t WorldSampler::expand(std::uint64_t world, std::span<const NodeId> from,
                                 std::span<char> active, std::vector<NodeId>& stack,
                                 bool commit) const {
  const Graph& g = *g_;
  stack.clear();
  for (NodeId s : from) {
    if (active[s]) continue;
    active[s] = 1;
    stack.push_back(s);
  }
  for (std::size_t head = 0; head < stack.size(); ++head) {
    const NodeId u = stack[head];
    const auto arcs = g.out(u);
    for (std::size_t k = 0; k < arcs.size(); ++k) {
      const NodeId v = arcs[k].node;
      if (active[v]) continue;
      if (!live(world, g.out_edge_id(u, k), arcs[k].prob)) continue;
      active[v] = 1;
      stack.push_back(v);
    }
  }
  const std::size_t reached = stack.size();
  if (!commit)
    for (NodeId v : stack) active[v] = 0;
  return reached;
}

std::vector<std::uint32_t> mc_spread_samples(const Graph& g, std::span<const NodeId> seeds,
                                             std::size_t r, std::uint64_t key) {
  check_seeds(g, seeds);
  std::vector<std::uint32_t> sizes(r, 0);
  if (seeds.empty() || r == 0) return sizes;
  const WorldSampler worlds(g, key);
  const auto trials = static_cast<std::int64_t>(r);
#pragma omp parallel
  {
    std::vector<char> active(g.n(), 0);
    std::vector<NodeId> stack;
#pragma omp for schedule(static)
    for (std::int64_t t = 0; t < trials; ++t) {
      sizes[t] = static_cast<std::uint32_t>(
          worlds.expand(static_cast<std::uint64_t>(t), seeds, active, stack, false));
    }
  }
  return sizes;
}

double mc_expected_spread(const Graph& g, std::span<const NodeId> seeds, std::size_t r, Rng& rng) {
  if (r == 0) throw ContractViolation("mc_expected_spread needs r >= 1");
  const std::uint64_t key = rng();
  const auto sizes = mc_spread_samples(g, seeds, r, key);
  std::uint64_t total = 0;
  for (auto s : sizes) total += s;
  return static_cast<double>(total) / static_cast<double>(r);
}

double mc_expected_profit(const CopyGraph& cg, const ProductCatalog& cat, const SeedAssignment& s,
                          std::size_t r, Rng& rng) {
  if (s.q() > cat.q()) throw ContractViolation("assignment has more products than the catalog");
  double total = 0.0;
  for (std::size_t i = 0; i < s.q(); ++i) {
    // Draw regardless of emptiness so component streams do not shift.
    const double spread = mc_expected_spread(cg.base(), s.seeds(i), r, rng);
    total += cat.profit(i) * spread;
  }
  return total;
}

ProfitEstimate mc_profit_with_stderr(const CopyGraph& cg, const ProductCatalog& cat,
                                     const SeedAssignment& s, std::size_t r, std::uint64_t key) {
  if (r == 0) throw ContractViolation("profit evaluation needs r >= 1");
  if (s.q() > cat.q()) throw ContractViolation("assignment has more products than the catalog");
  std::vector<double> per_trial(r, 0.0);
  for (std::size_t i = 0; i < s.q(); ++i) {
    if (s.seeds(i).empty()) continue;
    const auto sizes =
        mc_spread_samples(cg.base(), s.seeds(i), r, hash_key(key, stream_tag::kComponent, i));
    for (std::size_t t = 0; t < r; ++t) per_trial[t] += cat.profit(i) * sizes[t];
  }
  ProfitEstimate est;
  double sum = 0.0;
  for (double v : per_trial) sum += v;
  est.mean = sum / static_cast<double>(r);
  if (r > 1) {
    double ss = 0.0;
    for (double v : per_trial) ss += (v - est.mean) * (v - est.mean);
    est.std_error = std::sqrt(ss / static_cast<double>(r - 1) / static_cast<double>(r));
  }
  return est;
}

double exact_spread(const Graph& g, std::span<const NodeId> seeds) {
  check_seeds(g, seeds);
  if (seeds.empty()) return 0.0;
  const std::size_t m = g.m();
  if (m > kExactEdgeCutoff)
    throw InfeasibleInstance("exact_spread enumerates 2^m worlds; m=" + std::to_string(m) +
                             " exceeds the cutoff " + std::to_string(kExactEdgeCutoff));
  const std::vector<Edge> edges = g.edges();
  // Out-CSR order matches Graph::out_edge_id, so bit e of the mask is edge e.
  std::vector<std::size_t> first(g.n() + 1, 0);
  for (NodeId u = 0; u < g.n(); ++u) first[u + 1] = first[u] + g.out_degree(u);

  std::vector<char> active(g.n(), 0);
  std::vector<NodeId> stack;
  double expected = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    double w = 1.0;
    for (std::size_t e = 0; e < m && w > 0.0; ++e)
      w *= (mask >> e & 1U) ? edges[e].prob : 1.0 - edges[e].prob;
    if (w == 0.0) continue;
    std::fill(active.begin(), active.end(), 0);
    stack.clear();
    for (NodeId s : seeds)
      if (!active[s]) {
        active[s] = 1;
        stack.push_back(s);
      }
    for (std::size_t head = 0; head < stack.size(); ++head) {
      const NodeId u = stack[head];
      for (std::size_t e = first[u]; e < first[u + 1]; ++e) {
        const NodeId v = edges[e].target;
        if ((mask >> e & 1U) && !active[v]) {
          active[v] = 1;
          stack.push_back(v);
        }
      }
    }
    expected += w * static_cast<double>(stack.size());
  }
  return expected;
}

SpreadOracle::SpreadOracle(const Graph& g) : n_(g.n()) {
  const std::size_t m = g.m();
  if (n_ > 64) throw InfeasibleInstance("SpreadOracle supports n <= 64");
  if (m > kExactEdgeCutoff)
    throw InfeasibleInstance("SpreadOracle: m=" + std::to_string(m) + " exceeds cutoff");
  const std::uint64_t worlds = std::uint64_t{1} << m;
  if (worlds * std::max<std::size_t>(n_, 1) > (std::uint64_t{1} << 25))
    throw InfeasibleInstance("SpreadOracle: reachability table too large");
  const std::vector<Edge> edges = g.edges();
  weight_.reserve(worlds);
  reach_.reserve(worlds * n_);
  std::vector<std::uint64_t> reach(n_);
  for (std::uint64_t mask = 0; mask < worlds; ++mask) {
    double w = 1.0;
    for (std::size_t e = 0; e < m; ++e)
      w *= (mask >> e & 1U) ? edges[e].prob : 1.0 - edges[e].prob;
    if (w == 0.0) continue;
    // Transitive closure by relaxation; n <= 64 so at most n passes.
    for (std::size_t v = 0; v < n_; ++v) reach[v] = std::uint64_t{1} << v;
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t e = 0; e < m; ++e) {
        if (!(mask >> e & 1U)) continue;
        const std::uint64_t merged = reach[edges[e].source] | reach[edges[e].target];
        if (merged != reach[edges[e].source]) {
          reach[edges[e].source] = merged;
          changed = true;
        }
      }
    }
    weight_.push_back(w);
    reach_.insert(reach_.end(), reach.begin(), reach.end());
  }
}

double SpreadOracle::spread_mask(std::uint64_t seed_mask) const {
  if (seed_mask == 0) return 0.0;
  double expected = 0.0;
  for (std::size_t w = 0; w < weight_.size(); ++w) {
    std::uint64_t covered = 0;
    const std::uint64_t* row = reach_.data() + w * n_;
    for (std::uint64_t bits = seed_mask; bits; bits &= bits - 1)
      covered |= row[std::countr_zero(bits)];
    expected += weight_[w] * std::popcount(covered);
  }
  return expected;
}

double SpreadOracle::spread(std::span<const NodeId> seeds) const {
  std::uint64_t mask = 0;
  for (NodeId s : seeds) {
    if (s >= n_) throw ContractViolation("seed outside graph");
    mask |= std::uint64_t{1} << s;
  }
  return spread_mask(mask);
}

std::pair<std::vector<NodeId>, double> SpreadOracle::best_of_size(std::size_t k) const {
  k = std::min(k, n_);
  std::vector<NodeId> best;
  if (k == 0) return {best, 0.0};
  // Lexicographic k-combinations of [0,n).
  std::vector<NodeId> comb(k);
  for (std::size_t j = 0; j < k; ++j) comb[j] = static_cast<NodeId>(j);
  double best_value = -1.0;
  while (true) {
    std::uint64_t mask = 0;
    for (NodeId v : comb) mask |= std::uint64_t{1} << v;
    const double value = spread_mask(mask);
    if (value > best_value) {
      best_value = value;
      best = comb;
    }
    std::size_t j = k;
    while (j > 0 && comb[j - 1] == n_ - k + j - 1) --j;
    if (j == 0) break;
    ++comb[j - 1];
    for (std::size_t t = j; t < k; ++t) comb[t] = comb[t - 1] + 1;
  }
  return {best, best_value};
}

namespace {

double log_binomial(std::size_t n, std::size_t k) {
  if (k > n) return -INFINITY;
  double acc = 0.0;
  for (std::size_t j = 1; j <= k; ++j)
    acc += std::log(static_cast<double>(n - j + 1) / static_cast<double>(j));
  return acc;
}

}  // namespace

ExactOptimum exact_opt(const SpreadOracle& oracle, const ProductCatalog& cat, Money budget) {
  const std::size_t q = cat.q();
  const std::size_t n = oracle.n();
  ExactOptimum result{SeedAssignment(q), 0.0};

  std::vector<std::size_t> cap(q);
  double combos = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    cap[i] = std::min(cat.affordable(i, budget), n);
    combos += std::exp(log_binomial(n, cap[i]));
  }
  if (combos > kExactOptCombinationLimit)
    throw InfeasibleInstance("exact_opt: instance too large to enumerate");
  std::size_t k_max = 0;
  for (auto c : cap) k_max = std::max(k_max, c);
  if (k_max == 0) return result;

  std::vector<std::pair<std::vector<NodeId>, double>> best(k_max + 1);
  for (std::size_t k = 0; k <= k_max; ++k) best[k] = oracle.best_of_size(k);

  // Walk every count profile with cost <= budget.  Non-maximal profiles are
  // dominated by monotonicity, so only maximal ones are scored.
  std::vector<std::size_t> counts(q, 0);
  double best_value = -1.0;
  std::vector<std::size_t> best_counts(q, 0);
  auto profile_cost = [&] {
    Money c = 0.0;
    for (std::size_t i = 0; i < q; ++i) c += cat.cost(i) * static_cast<double>(counts[i]);
    return c;
  };
  auto visit = [&](auto&& self, std::size_t i) -> void {
    if (i == q) {
      for (std::size_t j = 0; j < q; ++j) {
        if (counts[j] >= cap[j]) continue;
        ++counts[j];
        const bool extendable = profile_cost() <= budget;
        --counts[j];
        if (extendable) return;
      }
      double value = 0.0;
      for (std::size_t j = 0; j < q; ++j) value += cat.profit(j) * best[counts[j]].second;
      if (value > best_value) {
        best_value = value;
        best_counts = counts;
      }
      return;
    }
    for (std::size_t c = 0; c <= cap[i]; ++c) {
      counts[i] = c;
      if (profile_cost() > budget) break;
      self(self, i + 1);
    }
    counts[i] = 0;
  };
  visit(visit, 0);

  for (std::size_t i = 0; i < q; ++i)
    for (NodeId v : best[best_counts[i]].first) result.assignment.add(i, v);
  result.opt = std::max(best_value, 0.0);
  return result;
}

ExactOptimum exact_opt(const CopyGraph& cg, const ProductCatalog& cat, Money budget) {
  if (cat.q() != cg.q()) throw ContractViolation("catalog and copy graph disagree on q");
  if (cat.max_seeds(budget) == 0) return {SeedAssignment(cat.q()), 0.0};
  const SpreadOracle oracle(cg.base());
  return exact_opt(oracle, cat, budget);
}

double exact_profit(const SpreadOracle& oracle, const ProductCatalog& cat, const SeedAssignment& s) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.q(); ++i) total += cat.profit(i) * oracle.spread(s.seeds(i));
  return total;
}

}  // namespace pmax
