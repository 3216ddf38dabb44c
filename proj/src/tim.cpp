#include "pmax/tim.hpp"

#include <algorithm>
#include <cmath>

#include "pmax/error.hpp"

namespace pmax {

namespace {

void check_params(const Graph& g, std::size_t k) {
  if (g.n() < 2) throw ContractViolation("TIM+ needs a graph with n >= 2");
  if (k == 0 || k > g.n()) throw ContractViolation("TIM+ needs 1 <= k <= n");
}

std::uint64_t ceil_count(double x) {
  if (!(x > 0.0)) return 1;
  return static_cast<std::uint64_t>(std::ceil(x));
}

}  // namespace

double kappa(std::uint64_t width, std::size_t m, std::size_t k) {
  if (m == 0) return 0.0;
  const double frac = static_cast<double>(width) / static_cast<double>(m);
  return 1.0 - std::pow(1.0 - frac, static_cast<double>(k));
}

KptStar estimate_kpt_star(const Graph& g, std::size_t k, double l_prime, std::uint64_t seed) {
  check_params(g, k);
  const CopyGraph single(g, 1);
  const double n = static_cast<double>(g.n());
  const double log2n = std::log2(n);
  const int rounds = std::max(1, static_cast<int>(std::floor(log2n)) - 1);
  const double base = 6.0 * l_prime * std::log(n) + 6.0 * std::log(log2n);

  KptStar result;
  for (int i = 1; i <= rounds; ++i) {
    const double scale = std::ldexp(1.0, i);
    const std::uint64_t c_i = ceil_count(base * scale);
    result.last_batch = generate_collection(single, c_i, hash_key(seed, stream_tag::kTimKpt, i));
    double sum = 0.0;
    for (std::size_t j = 0; j < result.last_batch.theta(); ++j)
      sum += kappa(result.last_batch.set(j).width, g.m(), k);
    if (sum / static_cast<double>(c_i) > 1.0 / scale) {
      result.value = std::max(1.0, n * sum / (2.0 * static_cast<double>(c_i)));
      return result;
    }
  }
  result.value = 1.0;
  return result;
}

GreedyCoverage greedy_max_coverage(const RRCollection& rc, std::size_t k) {
  const std::size_t n = rc.n();
  std::vector<std::size_t> count(n);
  for (NodeId v = 0; v < n; ++v) count[v] = rc.covering(0, v).size();
  std::vector<char> covered(rc.theta(), 0);
  std::vector<char> chosen(n, 0);
  GreedyCoverage out;
  std::size_t total = 0;
  for (std::size_t round = 0; round < std::min(k, n); ++round) {
    NodeId best = 0;
    bool found = false;
    for (NodeId v = 0; v < n; ++v) {
      if (chosen[v]) continue;
      if (!found || count[v] > count[best]) {
        best = v;
        found = true;
      }
    }
    chosen[best] = 1;
    out.seeds.push_back(best);
    for (std::uint32_t id : rc.covering(0, best)) {
      if (covered[id]) continue;
      covered[id] = 1;
      ++total;
      for (NodeId u : rc.set(id).nodes) --count[u];
    }
    out.covered.push_back(total);
  }
  return out;
}

KptRefinement refine_kpt(const Graph& g, std::size_t k, double kpt_star,
                         const RRCollection& last_batch, double eps_bar, double l_prime,
                         std::uint64_t seed) {
  check_params(g, k);
  if (!(kpt_star >= 1.0)) throw ContractViolation("refine_kpt needs KPT* >= 1");
  if (!(eps_bar > 0.0 && eps_bar < 1.0)) throw ValidationError("eps_bar must lie in (0,1)");
  const double n = static_cast<double>(g.n());

  std::vector<NodeId> candidate;
  if (!last_batch.empty()) candidate = greedy_max_coverage(last_batch, k).seeds;
  else
    for (NodeId v = 0; v < k; ++v) candidate.push_back(v);

  const double lambda_bar = (2.0 + eps_bar) * l_prime * n * std::log(n) / (eps_bar * eps_bar);
  KptRefinement out;
  out.theta_bar = ceil_count(lambda_bar / kpt_star);
  const CopyGraph single(g, 1);
  const RRCollection fresh =
      generate_collection(single, out.theta_bar, hash_key(seed, stream_tag::kTimRefine));
  const double f = coverage_fraction(fresh, 0, candidate);
  out.kpt_prime = f * n / (1.0 + eps_bar);
  out.kpt_plus = std::max(out.kpt_prime, kpt_star);
  return out;
}

TimResult tim_node_selection(const Graph& g, std::size_t k, double kpt_plus, double eps_prime,
                             double l_prime, std::uint64_t seed) {
  check_params(g, k);
  if (!(kpt_plus >= 1.0)) throw ContractViolation("node selection needs KPT+ >= 1");
  if (!(eps_prime > 0.0 && eps_prime < 1.0)) throw ValidationError("eps' must lie in (0,1)");
  const double n = static_cast<double>(g.n());
  const double lambda_prime = (8.0 + 2.0 * eps_prime) * n *
                              (l_prime * std::log(n) + std::log(2.0) + log_binomial(g.n(), k)) /
                              (eps_prime * eps_prime);
  TimResult out;
  out.kpt_plus = kpt_plus;
  out.theta_prime = ceil_count(lambda_prime / kpt_plus);
  const CopyGraph single(g, 1);
  const RRCollection rc =
      generate_collection(single, out.theta_prime, hash_key(seed, stream_tag::kTimSelect));
  GreedyCoverage greedy = greedy_max_coverage(rc, k);
  out.seeds = std::move(greedy.seeds);
  const double theta = static_cast<double>(rc.theta());
  for (std::size_t c : greedy.covered) out.prefix_spread.push_back(n * static_cast<double>(c) / theta);
  out.spread_estimate = out.prefix_spread.empty() ? 0.0 : out.prefix_spread.back();
  return out;
}

TimResult tim_plus(const Graph& g, const TimParams& params, std::uint64_t seed) {
  std::size_t k = params.k;
  if (k > g.n()) {
    diag::warn("TIM+ k=" + std::to_string(k) + " exceeds n=" + std::to_string(g.n()) +
               "; clamped to n");
    k = g.n();
  }
  if (g.n() == 1) {
    TimResult single;
    single.seeds = {0};
    single.spread_estimate = 1.0;
    single.prefix_spread = {1.0};
    return single;
  }
  const KptStar star = estimate_kpt_star(g, k, params.l_prime, seed);
  const KptRefinement refined =
      refine_kpt(g, k, star.value, star.last_batch, params.eps_bar, params.l_prime, seed);
  TimResult out =
      tim_node_selection(g, k, refined.kpt_plus, params.eps_prime, params.l_prime, seed);
  out.kpt_star = star.value;
  out.kpt_prime = refined.kpt_prime;
  out.theta_bar = refined.theta_bar;
  return out;
}

}  // namespace pmax
