#include "pmax/optbound.hpp"

#include <algorithm>
#include <ostream>

#include "pmax/error.hpp"

namespace pmax {

namespace {

std::uint64_t product_seed(std::uint64_t seed, std::size_t i) {
  return hash_key(seed, stream_tag::kComponent, i);
}

TimResult run_tim(const Graph& g, std::size_t k, const OptParams& params, std::uint64_t seed) {
  return tim_plus(g, {.k = k, .eps_prime = params.eps_prime, .eps_bar = params.eps_bar,
                      .l_prime = params.l_prime},
                  seed);
}

}  // namespace

void ProfitMatrix::write_csv(std::ostream& out) const {
  out << "product,size,estimate\n";
  for (std::size_t i = 0; i < q_; ++i)
    for (std::size_t j = 1; j <= k_star_; ++j) out << i << ',' << j << ',' << profit(i, j) << '\n';
}

OptEstimate opt_estimation(const Graph& g, const ProductCatalog& cat, Money budget,
                           const OptParams& params, std::uint64_t seed) {
  if (cat.max_seeds(budget) == 0)
    throw InfeasibleInstance("budget below the cheapest product");
  OptEstimate out;
  out.runs.resize(cat.q());
  for (std::size_t i = 0; i < cat.q(); ++i) {
    const std::size_t k = std::min(cat.affordable(i, budget), g.n());
    if (k == 0) continue;
    out.runs[i] = run_tim(g, k, params, product_seed(seed, i));
    const double u = cat.profit(i) * out.runs[i].spread_estimate / (1.0 + params.eps_prime / 2.0);
    out.u_star = std::max(out.u_star, u);
  }
  return out;
}

ProfitMatrix build_profit_matrix(const Graph& g, const ProductCatalog& cat, Money budget,
                                 const OptParams& params, std::uint64_t seed, MatrixMode mode,
                                 const std::vector<TimResult>* runs) {
  const std::size_t k_star = cat.max_seeds(budget);
  ProfitMatrix pm(cat.q(), k_star);
  for (std::size_t i = 0; i < cat.q(); ++i) {
    const std::size_t k = std::min(cat.affordable(i, budget), g.n());
    if (k == 0) continue;
    if (mode == MatrixMode::prefix) {
      TimResult own;
      const TimResult* r = runs && i < runs->size() && !(*runs)[i].seeds.empty() ? &(*runs)[i]
                                                                                : nullptr;
      if (!r) {
        own = run_tim(g, k, params, product_seed(seed, i));
        r = &own;
      }
      for (std::size_t j = 1; j <= r->seeds.size(); ++j)
        pm.set(i, j, cat.profit(i) * r->prefix_spread[j - 1],
               std::vector<NodeId>(r->seeds.begin(), r->seeds.begin() + j));
    } else {
      for (std::size_t j = 1; j <= k; ++j) {
        TimResult r = run_tim(g, j, params, hash_key(product_seed(seed, i), j));
        pm.set(i, j, cat.profit(i) * r.spread_estimate, std::move(r.seeds));
      }
    }
  }
  return pm;
}

RefinedOpt refine_opt(const ProfitMatrix& pm, const ProductCatalog& cat, Money budget,
                      const RRCollection& rc_eval, double u_star) {
  const std::size_t q = pm.q();
  std::vector<char> used(q, 0);
  std::vector<std::size_t> counts(q, 0);
  const auto cost_with = [&](std::size_t row, std::size_t j) {
    Money total = 0.0;
    for (std::size_t i = 0; i < q; ++i)
      total += cat.cost(i) * static_cast<double>(i == row ? j : counts[i]);
    return total;
  };

  RefinedOpt out;
  out.s_hat = SeedAssignment(q);
  for (;;) {
    bool found = false;
    std::size_t bi = 0, bj = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      if (used[i]) continue;
      for (std::size_t j = 1; j <= pm.k_star(); ++j) {
        const double p = pm.profit(i, j);
        if (!(p > 0.0) || cost_with(i, j) > budget) continue;
        const double ratio = p / (cat.cost(i) * static_cast<double>(j));
        if (!found || ratio > best) {
          found = true;
          best = ratio;
          bi = i;
          bj = j;
        }
      }
    }
    if (!found) break;
    used[bi] = 1;
    counts[bi] = bj;
    for (NodeId v : pm.seeds(bi, bj)) out.s_hat.add(bi, v);
  }
  if (!out.s_hat.empty()) out.u_double_star = profit_estimate(rc_eval, cat, out.s_hat);
  out.u_prime = std::max(u_star, out.u_double_star);
  return out;
}

OptBounds estimate_opt_bounds(const Graph& g, const ProductCatalog& cat, Money budget,
                              const OptParams& params, std::uint64_t seed, MatrixMode mode,
                              std::size_t theta_eval) {
  OptEstimate est = opt_estimation(g, cat, budget, params, seed);
  OptBounds out;
  out.u_star = est.u_star;
  out.matrix = build_profit_matrix(g, cat, budget, params, seed, mode, &est.runs);
  const RRCollection rc_eval = generate_collection(CopyGraph(g, cat.q()), theta_eval,
                                                   hash_key(seed, stream_tag::kOptEval));
  RefinedOpt refined = refine_opt(out.matrix, cat, budget, rc_eval, est.u_star);
  out.u_double_star = refined.u_double_star;
  out.u_prime = refined.u_prime;
  out.s_hat = std::move(refined.s_hat);
  return out;
}

}  // namespace pmax
