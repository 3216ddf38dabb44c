// Acceptance suite: one PASS/FAIL line per criterion.  Run with criterion
// numbers as arguments to select a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "pmax/baselines.hpp"
#include "pmax/diffusion.hpp"
#include "pmax/error.hpp"
#include "pmax/harness.hpp"
#include "pmax/optbound.hpp"
#include "pmax/rmg.hpp"
#include "pmax/text.hpp"

using namespace pmax;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct TinyInstance {
  Graph graph;
  ProductCatalog catalog;
  Money budget = 0.0;
  double opt = 0.0;
};

/// Ten tiny instances: n in [5, 8], m <= 12, q cycling 1..3, k* <= 4.
const std::vector<TinyInstance>& tiny_instances() {
  static const std::vector<TinyInstance> instances = [] {
    std::vector<TinyInstance> out;
    Rng rng(20240601);
    for (int k = 0; k < 10; ++k) {
      const std::size_t n = 5 + k % 4;
      const std::size_t m = std::min<std::size_t>(12, n + 2 + rng() % 6);
      const std::size_t q = 1 + k % 3;
      TinyInstance inst;
      inst.graph = testing::random_graph(n, m, rng());
      std::vector<Product> products;
      for (std::size_t i = 0; i < q; ++i)
        products.push_back({0.5 + static_cast<double>(rng() % 20) / 8.0,
                            0.5 + static_cast<double>(rng() % 12) / 8.0});
      inst.catalog = ProductCatalog(products);
      inst.budget = inst.catalog.c_min() * static_cast<double>(1 + rng() % 4) + 0.01;
      inst.opt = exact_opt(CopyGraph(inst.graph, q), inst.catalog, inst.budget).opt;
      out.push_back(std::move(inst));
    }
    return out;
  }();
  return instances;
}

std::string fixed(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

Verdict unbiasedness() {
  const Graph g = testing::random_graph(7, 11, 101);
  const std::size_t q = 2, n = g.n();
  const CopyGraph cg(g, q);
  Rng rng(7);
  std::vector<SeedAssignment> assignments;
  for (int a = 0; a < 20; ++a) {
    SeedAssignment s(q);
    for (std::size_t i = 0; i < q; ++i) {
      const std::size_t size = 1 + rng() % 3;
      while (s.seeds(i).size() < size) s.add(i, static_cast<NodeId>(rng() % n));
    }
    assignments.push_back(std::move(s));
  }
  const int collections = 200;
  const std::size_t theta = 5000;
  // sums[a][i] and squares of the per-collection estimates.
  std::vector<std::vector<double>> sum(20, std::vector<double>(q, 0.0)), sq = sum;
  for (int c = 0; c < collections; ++c) {
    const RRCollection rc = generate_collection(cg, theta, hash_key(11, c));
    for (std::size_t a = 0; a < assignments.size(); ++a)
      for (std::size_t i = 0; i < q; ++i) {
        const double est = static_cast<double>(n * q) *
                           coverage_fraction(rc, i, assignments[a].seeds(i));
        sum[a][i] += est;
        sq[a][i] += est * est;
      }
  }
  int ok = 0;
  double worst = 0.0;
  for (std::size_t a = 0; a < assignments.size(); ++a) {
    bool all = true;
    for (std::size_t i = 0; i < q; ++i) {
      const double mean = sum[a][i] / collections;
      const double var = (sq[a][i] - collections * mean * mean) / (collections - 1);
      const double se = std::sqrt(std::max(var, 0.0) / collections);
      const double exact = exact_spread(g, assignments[a].seeds(i));
      const double z = se > 0.0 ? std::abs(mean - exact) / se : (mean == exact ? 0.0 : 1e9);
      worst = std::max(worst, z);
      all &= z <= 3.0;
    }
    ok += all;
  }
  return {ok >= 19, std::to_string(ok) + "/20 assignments within 3 SE (max |z| " + fixed(worst, 2) +
                        ")"};
}

Verdict submodularity() {
  Rng rng(4242);
  int violations = 0, triples = 0;
  while (triples < 10000) {
    const std::size_t n = 5 + rng() % 10, q = 1 + rng() % 3;
    const Graph g = testing::random_graph(n, 2 * n + rng() % (2 * n), rng());
    std::vector<Product> products;
    for (std::size_t i = 0; i < q; ++i)
      products.push_back({static_cast<double>(1 + rng() % 9), 1.0});
    const ProductCatalog cat(products);
    const RRCollection rc = generate_collection(CopyGraph(g, q), 4096, rng());
    for (int t = 0; t < 100; ++t, ++triples) {
      SeedAssignment s(q), big(q);
      for (std::size_t i = 0; i < q; ++i)
        for (NodeId v = 0; v < n; ++v) {
          const auto r = rng() % 4;
          if (r == 0) s.add(i, v);
          if (r <= 1) big.add(i, v);
        }
      const std::size_t yc = rng() % q;
      const auto yv = static_cast<NodeId>(rng() % n);
      SeedAssignment s_y = s, big_y = big;
      s_y.add(yc, yv);
      big_y.add(yc, yv);
      const double fs = profit_estimate(rc, cat, s), fb = profit_estimate(rc, cat, big);
      const double gs = profit_estimate(rc, cat, s_y) - fs;
      const double gb = profit_estimate(rc, cat, big_y) - fb;
      violations += fb < fs;
      violations += gs < gb;
      violations += gs < 0.0;
    }
  }
  return {violations == 0,
          std::to_string(triples) + " triples, " + std::to_string(violations) + " violations"};
}

Verdict width_identity() {
  bool pass = true;
  std::string detail;
  for (std::uint64_t k = 0; k < 3; ++k) {
    const Graph g = testing::random_graph(6 + k, 10 + k, 300 + k);
    double oracle = 0.0;
    for (NodeId v = 0; v < g.n(); ++v) {
      const NodeId seed[] = {v};
      oracle += static_cast<double>(g.in_degree(v)) / static_cast<double>(g.m()) *
                exact_spread(g, seed);
    }
    const RRCollection rc = generate_collection(CopyGraph(g, 1), 1000000, 900 + k);
    const double mean_width = static_cast<double>(rc.total_width()) / rc.theta();
    const double estimate = static_cast<double>(g.n()) / static_cast<double>(g.m()) * mean_width;
    const double rel = std::abs(estimate - oracle) / oracle;
    pass &= rel <= 0.02;
    detail += (k ? ", " : "") + std::string("rel err ") + fixed(rel, 5);
  }
  return {pass, detail};
}

Verdict theorem1() {
  const double eps = 0.3;
  const double target = 1.0 - std::exp(-1.0) - eps;
  RmgConfig config;
  config.eps = eps;
  config.mode = GreedyMode::exact;
  config.eval_trials = 0;
  int worst = 100;
  bool capped = false;
  for (const TinyInstance& inst : tiny_instances()) {
    const SpreadOracle oracle(inst.graph);
    int ok = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const RmgResult r = rmg_pipeline(inst.graph, inst.catalog, inst.budget, config, s);
      capped |= r.report.capped;
      if (assignment_cost(r.assignment, inst.catalog) > inst.budget) continue;
      ok += exact_profit(oracle, inst.catalog, r.assignment) >= target * inst.opt;
    }
    worst = std::min(worst, ok);
  }
  return {worst >= 95 && !capped, "worst instance " + std::to_string(worst) +
                                      "/100 runs reach (1-1/e-eps) OPT" +
                                      (capped ? ", theta cap bound" : "")};
}

Verdict lemma5() {
  const OptParams params;
  int worst = 200;
  for (const TinyInstance& inst : tiny_instances()) {
    const SpreadOracle oracle(inst.graph);
    const double eps = params.eps_prime;
    int ok = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
      const OptEstimate est = opt_estimation(inst.graph, inst.catalog, inst.budget, params, s);
      bool good = est.u_star <= inst.opt;
      for (std::size_t i = 0; i < inst.catalog.q(); ++i) {
        const std::size_t k = std::min(inst.catalog.affordable(i, inst.budget), inst.graph.n());
        if (k == 0) continue;
        const double best = oracle.best_of_size(k).second;
        const double sigma = est.runs[i].spread_estimate;
        good &= (1.0 - std::exp(-1.0)) * (1.0 - eps / 2) * best < sigma &&
                sigma < (1.0 + eps / 2) * best;
      }
      ok += good;
    }
    worst = std::min(worst, ok);
  }
  return {worst >= 190, "worst instance " + std::to_string(worst) +
                            "/200 runs with u* <= OPT and the bracket on every product"};
}

Verdict refopt() {
  int dominated = 0;
  double star = 0.0, prime = 0.0;
  const int runs = 200;
  for (int r = 0; r < runs; ++r) {
    const TinyInstance& inst = tiny_instances()[r % 10];
    const OptBounds b = estimate_opt_bounds(inst.graph, inst.catalog, inst.budget, {},
                                            static_cast<std::uint64_t>(r));
    dominated += b.u_prime >= b.u_star;
    star += b.u_star / inst.opt;
    prime += b.u_prime / inst.opt;
  }
  return {dominated == runs && prime >= star,
          std::to_string(dominated) + "/200 with u' >= u*; mean u*/OPT " + fixed(star / runs) +
              ", mean u'/OPT " + fixed(prime / runs)};
}

/// Criterion 7 and 8 share one set of sweeps.
struct OrderingData {
  std::vector<Money> budgets;
  // mean profit per algorithm per budget index
  std::map<std::string, std::vector<double>> mean;
  int all_on_best_ratio = 0;
  int seeds = 0;
};

const OrderingData& ordering_data() {
  static const OrderingData data = [] {
    OrderingData d;
    const Graph g = gen_synthetic(1000, 4.0, 1);
    const ProductCatalog cat({{0.45, 0.08}, {0.20, 0.65}, {0.06, 0.78}});
    std::size_t best_product = 0;
    for (std::size_t i = 1; i < cat.q(); ++i)
      if (cat.profit(i) / cat.cost(i) > cat.profit(best_product) / cat.cost(best_product))
        best_product = i;
    ExperimentSpec spec;
    spec.dataset = "synthetic";
    spec.budgets = {1, 2, 3, 4, 5, 6, 7, 8};
    spec.algorithms = {"rmg", "random", "pmce"};
    spec.eval_trials = 10000;
    spec.baseline_trials = 300;
    spec.rmg.eps = spec.rmg.eps_prime = spec.rmg.eps_bar = 0.5;
    spec.rmg.mode = GreedyMode::fast;
    d.budgets = spec.budgets;
    for (const auto& a : spec.algorithms) d.mean[a].assign(spec.budgets.size(), 0.0);
    d.seeds = 20;
    for (int s = 0; s < d.seeds; ++s) {
      spec.seed = static_cast<std::uint64_t>(s);
      const SweepResult r = run_sweep(g, cat, spec);
      for (const auto& row : r.profits) {
        const auto b = static_cast<std::size_t>(
            std::find(spec.budgets.begin(), spec.budgets.end(), row.budget) -
            spec.budgets.begin());
        d.mean[row.algorithm][b] += row.profit / d.seeds;
      }
      bool only_best = true;
      bool any = false;
      for (const auto& row : r.distribution)
        if (row.algorithm == "rmg" && row.budget == spec.budgets.front()) {
          if (row.product == best_product) any = row.seeds > 0;
          else only_best &= row.seeds == 0;
        }
      d.all_on_best_ratio += only_best && any;
    }
    return d;
  }();
  return data;
}

Verdict ordering() {
  const OrderingData& d = ordering_data();
  bool pass = true;
  std::string detail = "B:rmg/pmce/random";
  for (std::size_t b = 0; b < d.budgets.size(); ++b) {
    const double rmg = d.mean.at("rmg")[b], pm = d.mean.at("pmce")[b],
                 rnd = d.mean.at("random")[b];
    pass &= rmg >= pm && rmg >= rnd;
    detail += " " + format_number(d.budgets[b]) + ":" + fixed(rmg, 1) + "/" + fixed(pm, 1) + "/" +
              fixed(rnd, 1);
  }
  return {pass, detail};
}

Verdict distribution() {
  const OrderingData& d = ordering_data();
  return {d.all_on_best_ratio >= 18,
          std::to_string(d.all_on_best_ratio) + "/20 seeds spend B=1 only on the best p/c product"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / "pmax_acceptance_determinism";
  fs::create_directories(dir);
  const std::string cli = PMAX_CLI_PATH;
  const auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + cli + "\" --quiet " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  if (run("gen --n 150 --avg-degree 3 --seed 5 --out \"" + (dir / "g.txt").string() + "\"") != 0)
    return {false, "gen failed"};
  {
    std::ofstream cat(dir / "cat.txt");
    cat << "0.45 0.08\n0.20 0.65\n0.06 0.78\n";
  }
  const std::vector<std::string> suffixes{"", "_distribution", "_optbound"};
  std::vector<std::string> reference;
  for (int workers : {1, 4, 8}) {
    const fs::path out = dir / ("w" + std::to_string(workers) + ".csv");
    const std::string args =
        "--workers " + std::to_string(workers) + " run --dataset \"" + (dir / "g.txt").string() +
        "\" --catalog \"" + (dir / "cat.txt").string() +
        "\" --budget-list 0.5,1,2 --eps 0.5 --eps-prime 0.5 --eps-bar 0.5 --r 100 "
        "--eval-trials 2000 --theta-eval 20000 --seed 17 --out \"" + out.string() + "\"";
    if (run(args) != 0) return {false, "run failed with " + std::to_string(workers) + " workers"};
    std::vector<std::string> files;
    for (const auto& sfx : suffixes)
      files.push_back(slurp(dir / ("w" + std::to_string(workers) + sfx + ".csv")));
    if (files[0].empty()) return {false, "empty CSV"};
    if (reference.empty()) reference = files;
    else if (files != reference)
      return {false, "output differs at " + std::to_string(workers) + " workers"};
  }
  // A repeated invocation with the same seed, and the opt-bound subcommand.
  const fs::path again = dir / "again.csv", ob1 = dir / "ob1.csv", ob8 = dir / "ob8.csv";
  run("--workers 2 run --dataset \"" + (dir / "g.txt").string() + "\" --catalog \"" +
      (dir / "cat.txt").string() +
      "\" --budget-list 0.5,1,2 --eps 0.5 --eps-prime 0.5 --eps-bar 0.5 --r 100 "
      "--eval-trials 2000 --theta-eval 20000 --seed 17 --out \"" + again.string() + "\"");
  if (slurp(again) != reference[0]) return {false, "repeat run differs"};
  for (auto [w, p] : {std::pair{1, ob1}, std::pair{8, ob8}})
    run("--workers " + std::to_string(w) + " opt-bound --dataset \"" + (dir / "g.txt").string() +
        "\" --catalog \"" + (dir / "cat.txt").string() +
        "\" --budget-list 1,2 --eps-prime 0.5 --eps-bar 0.5 --seed 3 --out \"" + p.string() + "\"");
  if (slurp(ob1).empty() || slurp(ob1) != slurp(ob8)) return {false, "opt-bound output differs"};
  fs::remove_all(dir);
  return {true, "run and opt-bound CSVs identical across 1, 2, 4, 8 workers"};
}

Verdict feasibility() {
  diag::set_quiet(true);
  Rng rng(99);
  int violations = 0, exceptions = 0, assignments = 0;
  std::string first_error;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t n = 1 + rng() % 10, q = 1 + rng() % 3;
    const std::size_t max_m = n * (n - 1);
    const Graph g = testing::random_graph(n, max_m ? rng() % (max_m + 1) : 0, rng(), rng() % 2);
    std::vector<Product> products;
    for (std::size_t i = 0; i < q; ++i)
      products.push_back({0.05 + static_cast<double>(rng() % 1000) / 200.0,
                          0.05 + static_cast<double>(rng() % 1000) / 300.0});
    const ProductCatalog cat(products);
    const Money budget = static_cast<double>(rng() % 1000) / 150.0 + 0.001;
    const CopyGraph cg(g, q);
    try {
      std::vector<SeedAssignment> out;
      const RRCollection rc = generate_collection(cg, 50 + rng() % 300, rng());
      const GreedyMode mode = (n * q <= 15 && rng() % 4 == 0) ? GreedyMode::exact
                                                               : GreedyMode::fast;
      out.push_back(modified_greedy(rc, cat, budget, {.mode = mode}));
      out.push_back(random_baseline(cg, cat, budget, rng()));
      out.push_back(greedy_mc(cg, cat, budget, 10, rng()));
      out.push_back(pmce(cg, cat, budget, 10, rng()));
      if (cat.max_seeds(budget) > 0 && t % 10 == 0) {
        RmgConfig config;
        config.eps = config.eps_prime = config.eps_bar = 0.5;
        config.theta_cap = 2000;
        config.theta_eval = 500;
        config.eval_trials = 0;
        config.mode = mode;
        out.push_back(rmg_pipeline(g, cat, budget, config, rng()).assignment);
      }
      for (const auto& s : out) {
        ++assignments;
        violations += assignment_cost(s, cat) > budget;
      }
    } catch (const std::exception& e) {
      if (exceptions++ == 0) first_error = e.what();
    }
  }
  diag::set_quiet(false);
  std::string detail = "10000 instances, " + std::to_string(assignments) + " assignments, " +
                       std::to_string(violations) + " over budget, " +
                       std::to_string(exceptions) + " exceptions";
  if (!first_error.empty()) detail += " (first: " + first_error + ")";
  return {violations == 0 && exceptions == 0, detail};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0 = no runtime limit
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "unbiased profit estimator", 120, unbiasedness},
      {2, "monotone submodular estimator", 30, submodularity},
      {3, "width identity", 60, width_identity},
      {4, "end-to-end approximation", 600, theorem1},
      {5, "OPT lower bound and TIM+ bracket", 0, lemma5},
      {6, "refined bound dominance", 0, refopt},
      {7, "algorithm ordering", 1800, ordering},
      {8, "budget on the best ratio product", 0, distribution},
      {9, "determinism across workers", 0, determinism},
      {10, "feasibility fuzz", 0, feasibility},
  };
  std::set<int> selected;
  for (int a = 1; a < argc; ++a) selected.insert(std::atoi(argv[a]));

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0 && seconds > c.limit_s) {
      v.pass = false;
      v.detail += "; runtime " + fixed(seconds, 1) + "s over the " + fixed(c.limit_s, 0) + "s limit";
    }
    failures += !v.pass;
    std::cout << "criterion " << c.id << " (" << c.name << "): " << (v.pass ? "PASS" : "FAIL")
              << " - " << v.detail << " [" << fixed(seconds, 1) << "s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
