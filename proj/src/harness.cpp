#include "pmax/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <random>

#include "pmax/diffusion.hpp"
#include "pmax/error.hpp"
#include "pmax/text.hpp"

namespace pmax {

namespace {

const std::vector<std::string> kAlgorithms{"rmg", "random", "greedy_mc", "pmce"};

}  // namespace

void validate(const ExperimentSpec& spec) {
  if (spec.budgets.empty()) throw ValidationError("no budgets given");
  for (std::size_t b = 0; b < spec.budgets.size(); ++b) {
    if (!(spec.budgets[b] > 0.0)) throw ValidationError("budgets must be positive");
    if (b > 0 && !(spec.budgets[b] > spec.budgets[b - 1]))
      throw ValidationError("budgets must be strictly increasing");
  }
  if (spec.algorithms.empty()) throw ValidationError("no algorithms given");
  for (const auto& a : spec.algorithms)
    if (std::find(kAlgorithms.begin(), kAlgorithms.end(), a) == kAlgorithms.end())
      throw ValidationError("unknown algorithm '" + a + "'");
  if (spec.eval_trials == 0) throw ValidationError("eval_trials must be at least 1");
  if (spec.baseline_trials == 0) throw ValidationError("baseline trials must be at least 1");
}

SweepResult run_sweep(const Graph& g, const ProductCatalog& cat, const ExperimentSpec& spec) {
  validate(spec);
  using Clock = std::chrono::steady_clock;
  const CopyGraph cg(g, cat.q());
  const std::uint64_t eval_key = hash_key(spec.seed, stream_tag::kMcEval);
  SweepResult out;

  for (Money budget : spec.budgets) {
    const bool affordable = cat.max_seeds(budget) > 0;
    if (!affordable)
      diag::warn("budget " + format_number(budget) +
                 " is below the cheapest product; reporting zero profit");
    for (const auto& algo : spec.algorithms) {
      const auto start = Clock::now();
      SeedAssignment s(cat.q());
      if (affordable) {
        if (algo == "rmg") {
          RmgConfig config = spec.rmg;
          config.eval_trials = 0;
          RmgResult r = rmg_pipeline(g, cat, budget, config, spec.seed);
          s = std::move(r.assignment);
          out.opt_bounds.push_back({spec.dataset, budget, r.report.u_star,
                                    r.report.u_double_star, r.report.u_prime, spec.seed});
        } else if (algo == "random") {
          s = random_baseline(cg, cat, budget, spec.seed);
        } else if (algo == "greedy_mc") {
          s = greedy_mc(cg, cat, budget, spec.baseline_trials, spec.seed);
        } else {
          s = pmce(cg, cat, budget, spec.baseline_trials, spec.seed);
        }
      }
      const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();

      ProfitRow row{spec.dataset, algo, budget, 0.0, 0.0, spec.seed, spec.timing ? ms : 0.0};
      if (!s.empty()) {
        const ProfitEstimate est = mc_profit_with_stderr(cg, cat, s, spec.eval_trials, eval_key);
        row.profit = est.mean;
        row.std_error = est.std_error;
      }
      for (std::size_t i = 0; i < cat.q(); ++i) {
        DistributionRow d{spec.dataset, algo, budget, i, s.seeds(i).size(), 0.0, 0.0, spec.seed};
        d.spent = cat.cost(i) * static_cast<double>(d.seeds);
        if (d.seeds > 0) {
          const auto sizes = mc_spread_samples(g, s.seeds(i), spec.eval_trials,
                                               hash_key(eval_key, stream_tag::kComponent, i));
          double total = 0.0;
          for (auto x : sizes) total += x;
          d.profit = cat.profit(i) * total / static_cast<double>(spec.eval_trials);
        }
        out.distribution.push_back(d);
      }
      out.profits.push_back(row);
      out.assignments.push_back(std::move(s));
    }
  }
  return out;
}

void write_profit_csv(std::ostream& out, const std::vector<ProfitRow>& rows) {
  out << "dataset,algorithm,B,profit,stderr,seed,wall_ms\n";
  for (const auto& r : rows)
    out << r.dataset << ',' << r.algorithm << ',' << format_number(r.budget) << ','
        << format_number(r.profit) << ',' << format_number(r.std_error) << ',' << r.seed << ','
        << format_number(r.wall_ms) << '\n';
}

void write_distribution_csv(std::ostream& out, const std::vector<DistributionRow>& rows) {
  out << "dataset,algorithm,B,product,seeds,spent,profit,seed\n";
  for (const auto& r : rows)
    out << r.dataset << ',' << r.algorithm << ',' << format_number(r.budget) << ',' << r.product
        << ',' << r.seeds << ',' << format_number(r.spent) << ',' << format_number(r.profit)
        << ',' << r.seed << '\n';
}

void write_opt_bound_csv(std::ostream& out, const std::vector<OptBoundRow>& rows) {
  out << "dataset,B,u_star,u_double_star,u_prime,seed\n";
  for (const auto& r : rows)
    out << r.dataset << ',' << format_number(r.budget) << ',' << format_number(r.u_star) << ','
        << format_number(r.u_double_star) << ',' << format_number(r.u_prime) << ',' << r.seed
        << '\n';
}

Graph gen_synthetic(std::size_t n, double avg_degree, std::uint64_t seed) {
  if (n == 0) throw ValidationError("synthetic graph needs n >= 1");
  if (!(avg_degree >= 0.0)) throw ValidationError("average degree must be non-negative");
  std::vector<Edge> edges;
  if (n > 1 && avg_degree > 0.0) {
    const double p = std::min(1.0, avg_degree / static_cast<double>(n - 1));
    Rng rng = make_stream(seed, stream_tag::kSynthetic);
    std::binomial_distribution<std::size_t> degree(n - 1, p);
    std::vector<NodeId> targets;
    for (NodeId u = 0; u < n; ++u) {
      const std::size_t d = degree(rng);
      // Floyd's sampling of d distinct values from [0, n-1), shifted past u.
      targets.clear();
      for (std::size_t j = n - 1 - d; j < n - 1; ++j) {
        const auto t = static_cast<NodeId>(std::uniform_int_distribution<std::size_t>(0, j)(rng));
        if (std::find(targets.begin(), targets.end(), t) == targets.end())
          targets.push_back(t);
        else
          targets.push_back(static_cast<NodeId>(j));
      }
      std::sort(targets.begin(), targets.end());
      for (NodeId t : targets) edges.push_back({u, t >= u ? t + 1 : t, 1.0});
    }
  }
  return assign_wc_probabilities(Graph(n, edges));
}

FailureExponents failure_exponents(std::size_t n, std::size_t q, double delta) {
  if (n < 2 || q == 0) throw ValidationError("failure exponents need n >= 2 and q >= 1");
  if (delta == 0.0) delta = 1.0 / static_cast<double>(n);
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0,1)");
  const double nq = static_cast<double>(n * q);
  FailureExponents f;
  f.l = std::log(2.0 / delta) / std::log(nq);
  f.l_prime = std::log(6.0 * static_cast<double>(q) / delta) / std::log(static_cast<double>(n));
  return f;
}

}  // namespace pmax
