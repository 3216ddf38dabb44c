#include "pmax/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "pmax/error.hpp"

namespace pmax {

McOracle::McOracle(const CopyGraph& cg, const ProductCatalog& cat, std::size_t r,
                   std::uint64_t key)
    : cg_(&cg), cat_(&cat), r_(r), worlds_(cg.base(), key) {
  if (r == 0) throw ContractViolation("MC oracle needs r >= 1");
  if (cat.q() < cg.q()) throw ContractViolation("catalog has fewer products than the copy graph");
  reset();
}

void McOracle::reset() {
  active_.assign(q() * r_ * n(), 0);
  reached_.assign(q(), 0);
}

double McOracle::gain(CopyNode v) {
  const NodeId from[] = {v.node};
  std::uint64_t total = 0;
  const auto worlds = static_cast<std::int64_t>(r_);
#pragma omp parallel reduction(+ : total)
  {
    std::vector<NodeId> stack;
#pragma omp for schedule(static)
    for (std::int64_t t = 0; t < worlds; ++t)
      total += worlds_.expand(static_cast<std::uint64_t>(t), from, marks(v.component, t), stack,
                              false);
  }
  return cat_->profit(v.component) * static_cast<double>(total) / static_cast<double>(r_);
}

void McOracle::add(CopyNode v) {
  const NodeId from[] = {v.node};
  std::uint64_t total = 0;
  const auto worlds = static_cast<std::int64_t>(r_);
#pragma omp parallel reduction(+ : total)
  {
    std::vector<NodeId> stack;
#pragma omp for schedule(static)
    for (std::int64_t t = 0; t < worlds; ++t)
      total += worlds_.expand(static_cast<std::uint64_t>(t), from, marks(v.component, t), stack,
                              true);
  }
  reached_[v.component] += total;
}

double McOracle::value() const {
  double total = 0.0;
  for (std::size_t i = 0; i < q(); ++i)
    total += cat_->profit(i) * static_cast<double>(reached_[i]) / static_cast<double>(r_);
  return total;
}

ExactOracle::ExactOracle(const SpreadOracle& oracle, const ProductCatalog& cat, std::size_t q)
    : oracle_(&oracle), cat_(&cat), masks_(q, 0) {
  if (cat.q() < q) throw ContractViolation("catalog has fewer products than requested");
}

void ExactOracle::reset() { std::fill(masks_.begin(), masks_.end(), 0); }

double ExactOracle::gain(CopyNode v) {
  const std::uint64_t mask = masks_[v.component];
  const std::uint64_t bit = std::uint64_t{1} << v.node;
  if (mask & bit) return 0.0;
  return cat_->profit(v.component) *
         (oracle_->spread_mask(mask | bit) - oracle_->spread_mask(mask));
}

void ExactOracle::add(CopyNode v) { masks_[v.component] |= std::uint64_t{1} << v.node; }

double ExactOracle::value() const {
  double total = 0.0;
  for (std::size_t i = 0; i < masks_.size(); ++i)
    total += cat_->profit(i) * oracle_->spread_mask(masks_[i]);
  return total;
}

CoverageOracle::CoverageOracle(const RRCollection& rc, const ProductCatalog& cat)
    : rc_(&rc), cat_(&cat), state_(rc) {}

void CoverageOracle::reset() { state_ = CoverageState(*rc_); }

double CoverageOracle::gain(CopyNode v) { return marginal_gain(*rc_, *cat_, state_, v); }

void CoverageOracle::add(CopyNode v) { state_.add(v); }

double CoverageOracle::value() const { return profit_estimate(*rc_, *cat_, state_.assignment()); }

SeedAssignment budgeted_greedy(MarginalOracle& oracle, const ProductCatalog& cat, Money budget,
                               GreedyRule rule) {
  oracle.reset();
  const std::size_t n = oracle.n(), q = oracle.q();
  SeedAssignment s(q);
  std::vector<std::size_t> counts(q, 0);
  const auto affordable = [&](std::size_t c) {
    ++counts[c];
    Money total = 0.0;
    for (std::size_t i = 0; i < q; ++i) total += cat.cost(i) * static_cast<double>(counts[i]);
    --counts[c];
    return total <= budget;
  };
  const auto score = [&](std::size_t c, double g) {
    switch (rule) {
      case GreedyRule::ratio: return g / cat.cost(c);
      case GreedyRule::ratio_squared: return g / (cat.cost(c) * cat.cost(c));
      case GreedyRule::raw: break;
    }
    return g;
  };

  struct Entry {
    double score;
    double gain;
    std::uint32_t x;
    std::size_t round;
  };
  const auto lower = [](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.x > b.x;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower)> heap(lower);
  const auto node = [&](std::uint32_t x) {
    return CopyNode{static_cast<std::uint32_t>(x / n), static_cast<NodeId>(x % n)};
  };
  for (std::uint32_t x = 0; x < n * q; ++x) {
    const std::size_t c = x / n;
    if (!affordable(c)) continue;
    const double g = oracle.gain(node(x));
    if (g > 0.0) heap.push({score(c, g), g, x, 0});
  }
  std::size_t round = 0;
  while (!heap.empty()) {
    const Entry top = heap.top();
    heap.pop();
    const CopyNode v = node(top.x);
    if (!affordable(v.component)) continue;
    if (top.round != round) {
      const double g = oracle.gain(v);
      if (g > 0.0) heap.push({score(v.component, g), g, top.x, round});
      continue;
    }
    oracle.add(v);
    s.add(v.component, v.node);
    ++counts[v.component];
    ++round;
  }
  return s;
}

SeedAssignment random_baseline(const CopyGraph& cg, const ProductCatalog& cat, Money budget,
                               std::uint64_t seed) {
  const std::size_t n = cg.base().n(), q = cg.q();
  if (cat.q() < q) throw ContractViolation("catalog has fewer products than the copy graph");
  std::vector<std::uint64_t> pairs(n * q);
  std::iota(pairs.begin(), pairs.end(), 0);
  Rng rng = make_stream(seed, stream_tag::kBaseline);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  SeedAssignment s(q);
  std::vector<std::size_t> counts(q, 0);
  for (std::uint64_t x : pairs) {
    const std::size_t c = x / n;
    ++counts[c];
    Money total = 0.0;
    for (std::size_t i = 0; i < q; ++i) total += cat.cost(i) * static_cast<double>(counts[i]);
    if (total <= budget) {
      s.add(c, static_cast<NodeId>(x % n));
    } else {
      --counts[c];
    }
  }
  return s;
}

SeedAssignment greedy_mc(const CopyGraph& cg, const ProductCatalog& cat, Money budget,
                         std::size_t r, std::uint64_t seed) {
  McOracle oracle(cg, cat, r, hash_key(seed, stream_tag::kBaseline, 1));
  return budgeted_greedy(oracle, cat, budget, GreedyRule::ratio);
}

SeedAssignment pmce(const CopyGraph& cg, const ProductCatalog& cat, Money budget, std::size_t r,
                    std::uint64_t seed) {
  McOracle oracle(cg, cat, r, hash_key(seed, stream_tag::kBaseline, 1));
  SeedAssignment by_cost = budgeted_greedy(oracle, cat, budget, GreedyRule::ratio_squared);
  SeedAssignment by_gain = budgeted_greedy(oracle, cat, budget, GreedyRule::raw);
  const std::uint64_t key = hash_key(seed, stream_tag::kBaseline, 2);
  const double a = mc_profit_with_stderr(cg, cat, by_cost, r, key).mean;
  const double b = mc_profit_with_stderr(cg, cat, by_gain, r, key).mean;
  return b > a ? by_gain : by_cost;
}

}  // namespace pmax
