#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "pmax/diffusion.hpp"
#include "pmax/error.hpp"

using namespace pmax;

namespace {

std::vector<NodeId> nodes_of(std::uint64_t mask) {
  std::vector<NodeId> out;
  for (NodeId v = 0; mask; ++v, mask >>= 1)
    if (mask & 1U) out.push_back(v);
  return out;
}

}  // namespace

TEST_CASE("simulate_ic: trivial cascades") {
  Rng rng(1);
  Graph tg = testing::tg1();
  CHECK(simulate_ic(tg, {}, rng).activated.empty());

  Graph isolated(5, std::vector<Edge>{});
  const std::vector<NodeId> seeds{3, 0};
  auto out = simulate_ic(isolated, seeds, rng);
  CHECK(out.activated == std::vector<NodeId>{0, 3});
  CHECK(out.round[0] == 1);
  CHECK(out.round[3] == 1);

  const std::vector<Edge> certain{{0, 1, 1.0}};
  const std::vector<NodeId> zero{0};
  auto chain = simulate_ic(Graph(2, certain), zero, rng);
  CHECK(chain.activated == std::vector<NodeId>{0, 1});
  CHECK(chain.round[1] == 2);

  const std::vector<NodeId> bad{7};
  CHECK_THROWS_AS(simulate_ic(tg, bad, rng), ContractViolation);
}

TEST_CASE("simulate_ic: activation rounds are witnessed by an in-neighbour") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Graph g = testing::random_graph(15, 60, seed, false);
    Rng rng(seed);
    const std::vector<NodeId> seeds{static_cast<NodeId>(seed % 15), 4};
    auto out = simulate_ic(g, seeds, rng);
    for (NodeId v : out.activated) {
      const bool is_seed = std::find(seeds.begin(), seeds.end(), v) != seeds.end();
      if (is_seed) {
        CHECK(out.round[v] == 1);
        continue;
      }
      bool witnessed = false;
      for (const Arc& a : g.in(v)) witnessed |= out.round[a.node] + 1 == out.round[v];
      CHECK(witnessed);
    }
  }
}

TEST_CASE("simulate_ic: fixed stream replays the same trace") {
  Graph g = testing::random_graph(20, 80, 9, false);
  const std::vector<NodeId> seeds{0, 5};
  Rng a(42), b(42);
  CHECK(simulate_ic(g, seeds, a).round == simulate_ic(g, seeds, b).round);
}

TEST_CASE("simulate_ic averages to the exact spread on TG1") {
  Graph g = testing::tg1();
  Rng rng(7);
  const std::vector<NodeId> a{0};
  double total = 0.0;
  const int trials = 200000;
  for (int t = 0; t < trials; ++t) total += simulate_ic(g, a, rng).activated.size();
  CHECK(total / trials == doctest::Approx(1.75).epsilon(0.01));
}

TEST_CASE("exact_spread on TG1") {
  Graph g = testing::tg1();
  CHECK(exact_spread(g, {}) == 0.0);
  const std::vector<NodeId> a{0}, c{2}, ab{0, 1};
  CHECK(exact_spread(g, a) == 1.75);
  CHECK(exact_spread(g, c) == 1.0);
  CHECK(exact_spread(g, ab) == 2.5);
}

TEST_CASE("exact_spread refuses large graphs") {
  Graph g = testing::random_graph(10, 30, 1);
  const std::vector<NodeId> a{0};
  CHECK_THROWS_AS(exact_spread(g, a), InfeasibleInstance);
  CHECK_THROWS_AS(SpreadOracle{g}, InfeasibleInstance);
}

TEST_CASE("mc_expected_spread on TG1") {
  Graph g = testing::tg1();
  Rng rng(2024);
  CHECK(mc_expected_spread(g, {}, 10, rng) == 0.0);
  const std::vector<NodeId> a{0}, ab{0, 1};
  CHECK(std::abs(mc_expected_spread(g, a, 1000000, rng) - 1.75) <= 0.01);
  CHECK(std::abs(mc_expected_spread(g, ab, 1000000, rng) - 2.5) <= 0.01);
  CHECK_THROWS_AS(mc_expected_spread(g, a, 0, rng), ContractViolation);
}

TEST_CASE("mc_expected_profit on TG1 with two products") {
  Graph g = testing::tg1();
  CopyGraph cg(g, 2);
  auto cat = testing::catalog({{1, 1}, {2, 2}});
  Rng rng(99);
  CHECK(mc_expected_profit(cg, cat, SeedAssignment(2), 100, rng) == 0.0);

  SeedAssignment both(2);
  both.add(0, 0);
  both.add(1, 0);
  CHECK(std::abs(mc_expected_profit(cg, cat, both, 1000000, rng) - 5.25) <= 0.02);

  SeedAssignment sink(2);
  sink.add(1, 2);
  CHECK(std::abs(mc_expected_profit(cg, cat, sink, 1000000, rng) - 2.0) <= 0.01);

  auto est = mc_profit_with_stderr(cg, cat, both, 200000, 5);
  CHECK(std::abs(est.mean - 5.25) <= 4 * est.std_error);
}

TEST_CASE("mc spread samples do not depend on worker count") {
  Graph g = testing::random_graph(30, 120, 4);
  const std::vector<NodeId> seeds{1, 2, 3};
  set_workers(1);
  auto one = mc_spread_samples(g, seeds, 5000, 77);
  set_workers(4);
  auto four = mc_spread_samples(g, seeds, 5000, 77);
  set_workers(1);
  CHECK(one == four);
}

TEST_CASE("mc converges to the exact spread within three standard errors") {
  Graph g = testing::random_graph(6, 10, 11);
  const std::vector<NodeId> seeds{0, 3};
  const double exact = exact_spread(g, seeds);
  int inside = 0;
  const int runs = 200;
  const std::size_t r = 20000;
  for (int run = 0; run < runs; ++run) {
    auto sizes = mc_spread_samples(g, seeds, r, 1000 + run);
    double mean = 0.0, sq = 0.0;
    for (auto s : sizes) mean += s;
    mean /= r;
    for (auto s : sizes) sq += (s - mean) * (s - mean);
    const double se = std::sqrt(sq / (r - 1) / r);
    inside += std::abs(mean - exact) <= 3 * se;
  }
  // 3-sigma coverage is 99.7%; allow a little slack for 200 draws.
  CHECK(inside >= 0.98 * runs);
}

TEST_CASE("spread oracle agrees with direct enumeration") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Graph g = testing::random_graph(6, 9, seed);
    SpreadOracle oracle(g);
    for (std::uint64_t mask = 0; mask < 64; mask += 5) {
      auto s = nodes_of(mask);
      CHECK(oracle.spread(s) == doctest::Approx(exact_spread(g, s)).epsilon(1e-12));
    }
  }
}

TEST_CASE("exact spread is monotone and submodular on tiny graphs") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Graph g = testing::random_graph(5, 8, 100 + seed);
    SpreadOracle oracle(g);
    const std::uint64_t full = 31;
    for (std::uint64_t t = 0; t <= full; ++t) {
      // every S subset of T
      for (std::uint64_t s = t;; s = (s - 1) & t) {
        CHECK(oracle.spread_mask(s) <= oracle.spread_mask(t) + 1e-12);
        for (NodeId y = 0; y < 5; ++y) {
          const std::uint64_t bit = std::uint64_t{1} << y;
          if (t & bit) continue;
          const double gain_s = oracle.spread_mask(s | bit) - oracle.spread_mask(s);
          const double gain_t = oracle.spread_mask(t | bit) - oracle.spread_mask(t);
          CHECK(gain_s >= gain_t - 1e-12);
        }
        if (s == 0) break;
      }
    }
  }
}

TEST_CASE("exact_opt on TG1") {
  Graph g = testing::tg1();
  CopyGraph cg(g, 2);
  auto cat = testing::catalog({{1, 1}, {2, 2}});

  auto none = exact_opt(cg, cat, 0.5);
  CHECK(none.opt == 0.0);
  CHECK(none.assignment.empty());

  auto b3 = exact_opt(cg, cat, 3.0);
  CHECK(b3.opt == doctest::Approx(5.25));
  CHECK(b3.assignment.seeds(0) == std::vector<NodeId>{0});
  CHECK(b3.assignment.seeds(1) == std::vector<NodeId>{0});

  auto b2 = exact_opt(cg, cat, 2.0);
  CHECK(b2.opt == doctest::Approx(3.5));
  CHECK(b2.assignment.seeds(0).empty());
  CHECK(b2.assignment.seeds(1) == std::vector<NodeId>{0});
}

// Independent brute force: every assignment of node subsets per product.
TEST_CASE("exact_opt matches unrestricted enumeration") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Graph g = testing::random_graph(4, 6, 500 + seed);
    SpreadOracle oracle(g);
    auto cat = testing::catalog({{1.0 + seed % 3, 1.0}, {2.5, 1.7}});
    const double budget = 1.0 + static_cast<double>(seed % 4);
    double best = 0.0;
    for (std::uint64_t m0 = 0; m0 < 16; ++m0)
      for (std::uint64_t m1 = 0; m1 < 16; ++m1) {
        const double cost = cat.cost(0) * std::popcount(m0) + cat.cost(1) * std::popcount(m1);
        if (cost > budget) continue;
        best = std::max(best, cat.profit(0) * oracle.spread_mask(m0) +
                                  cat.profit(1) * oracle.spread_mask(m1));
      }
    auto opt = exact_opt(oracle, cat, budget);
    CHECK(opt.opt == doctest::Approx(best).epsilon(1e-12));
    CHECK(assignment_cost(opt.assignment, cat) <= budget);
    CHECK(exact_profit(oracle, cat, opt.assignment) == doctest::Approx(opt.opt));
  }
}

TEST_CASE("exact_opt refuses oversize enumeration") {
  Graph g = testing::random_graph(60, 20, 1);
  CopyGraph cg(g, 1);
  auto cat = testing::catalog({{1, 1}});
  CHECK_THROWS_AS(exact_opt(cg, cat, 30.0), InfeasibleInstance);
}
