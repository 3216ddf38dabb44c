#include "pmax/rmg.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>

#include "pmax/diffusion.hpp"
#include "pmax/error.hpp"
#include "pmax/text.hpp"

namespace pmax {

std::string to_string(GreedyMode mode) { return mode == GreedyMode::exact ? "exact" : "fast"; }

GreedyMode parse_greedy_mode(const std::string& text) {
  if (text == "exact") return GreedyMode::exact;
  if (text == "fast") return GreedyMode::fast;
  throw ValidationError("unknown mode '" + text + "' (expected exact or fast)");
}

namespace {

using Candidate = std::uint32_t;  // component * n + node

struct Outcome {
  std::vector<Candidate> chosen;
  double value = 0.0;
};

class Selector {
 public:
  Selector(const CompactCoverage& cc, const ProductCatalog& cat, Money budget)
      : cc_(cc), cat_(cat), budget_(budget), n_(cc.n()), q_(cc.q()) {
    if (cat.q() != q_) throw ContractViolation("collection and catalog disagree on q");
    weight_sum_.resize(n_ * q_);
    for (Candidate x = 0; x < n_ * q_; ++x) {
      std::uint64_t w = 0;
      for (std::uint32_t item : cc_.covering(at(x))) w += cc_.weight(item);
      weight_sum_[x] = w;
    }
  }

  std::size_t candidates() const noexcept { return n_ * q_; }
  std::size_t component(Candidate x) const noexcept { return x / n_; }
  CopyNode at(Candidate x) const noexcept {
    return {static_cast<std::uint32_t>(x / n_), static_cast<NodeId>(x % n_)};
  }

  Money cost_of(const std::vector<std::size_t>& counts) const {
    Money total = 0.0;
    for (std::size_t i = 0; i < q_; ++i) total += cat_.cost(i) * static_cast<double>(counts[i]);
    return total;
  }

  double value_of(const std::vector<std::uint64_t>& cover) const {
    double total = 0.0;
    for (std::size_t i = 0; i < q_; ++i) total += cat_.profit(i) * static_cast<double>(cover[i]);
    return total;
  }

  bool feasible(const std::vector<Candidate>& set) const {
    std::vector<std::size_t> counts(q_, 0);
    for (Candidate x : set) ++counts[component(x)];
    return cost_of(counts) <= budget_;
  }

  /// Best feasible set of one or two candidates.
  Outcome best_small() const {
    Outcome best;
    const auto consider = [&](double value, std::vector<Candidate> set) {
      if (value > best.value) {
        best.value = value;
        best.chosen = std::move(set);
      }
    };
    std::vector<double> single(candidates());
    for (Candidate x = 0; x < candidates(); ++x)
      single[x] = cat_.profit(component(x)) * static_cast<double>(weight_sum_[x]);

    // First maximiser per affordable component.
    std::vector<std::optional<Candidate>> top(q_);
    for (Candidate x = 0; x < candidates(); ++x) {
      const std::size_t c = component(x);
      if (cat_.cost(c) > budget_) continue;
      if (!top[c] || single[x] > single[*top[c]]) top[c] = x;
    }

    struct Pair {
      double value;
      Candidate x, y;
    };
    std::optional<Pair> best_pair;
    const auto offer = [&](double value, Candidate x, Candidate y) {
      if (!best_pair || value > best_pair->value ||
          (value == best_pair->value && std::pair(x, y) < std::pair(best_pair->x, best_pair->y)))
        best_pair = Pair{value, x, y};
    };

    // Same-component pairs by decreasing single weight, cut off by W(x) + W(y).
    std::vector<Candidate> order;
    for (std::size_t c = 0; c < q_; ++c) {
      if (2.0 * cat_.cost(c) > budget_) continue;
      const double profit = cat_.profit(c);
      order.clear();
      for (NodeId u = 0; u < n_; ++u) order.push_back(static_cast<Candidate>(c * n_ + u));
      std::stable_sort(order.begin(), order.end(),
                       [&](Candidate a, Candidate b) { return weight_sum_[a] > weight_sum_[b]; });
      const auto bound = [&](Candidate x, Candidate y) {
        return profit * static_cast<double>(weight_sum_[x] + weight_sum_[y]);
      };
      for (std::size_t a = 0; a + 1 < order.size(); ++a) {
        const Candidate x = order[a];
        if (best_pair && bound(x, order[a + 1]) < best_pair->value) break;
        for (std::size_t b = a + 1; b < order.size(); ++b) {
          const Candidate y = order[b];
          if (best_pair && bound(x, y) < best_pair->value) break;
          const std::uint64_t cover = weight_sum_[x] + weight_sum_[y] - overlap(x, y);
          offer(profit * static_cast<double>(cover), std::min(x, y), std::max(x, y));
        }
      }
    }
    for (std::size_t a = 0; a < q_; ++a)
      for (std::size_t b = a + 1; b < q_; ++b) {
        if (!top[a] || !top[b]) continue;
        std::vector<std::size_t> counts(q_, 0);
        counts[a] = counts[b] = 1;
        if (cost_of(counts) > budget_) continue;
        std::vector<std::uint64_t> cover(q_, 0);
        cover[a] = weight_sum_[*top[a]];
        cover[b] = weight_sum_[*top[b]];
        offer(value_of(cover), *top[a], *top[b]);
      }

    for (std::size_t c = 0; c < q_; ++c)
      if (top[c]) consider(single[*top[c]], {*top[c]});
    if (best_pair) consider(best_pair->value, {best_pair->x, best_pair->y});
    return best;
  }

  /// Weight of the items covered by both candidates (sorted-list merge).
  std::uint64_t overlap(Candidate x, Candidate y) const {
    const auto a = cc_.covering(at(x));
    const auto b = cc_.covering(at(y));
    std::uint64_t w = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] < b[j]) {
        ++i;
      } else if (b[j] < a[i]) {
        ++j;
      } else {
        w += cc_.weight(a[i]);
        ++i;
        ++j;
      }
    }
    return w;
  }

  /// Scratch for repeated greedy completions.
  struct Scratch {
    std::vector<char> covered;
    std::vector<std::uint32_t> touched;
    std::vector<char> in_set;
  };

  Scratch make_scratch() const {
    return {std::vector<char>(cc_.items(), 0), {}, std::vector<char>(candidates(), 0)};
  }

  /// Greedy completion of `start` by marginal-gain-per-cost; stops when no
  /// affordable candidate has a positive gain.
  Outcome greedy(const std::vector<Candidate>& start, bool lazy, Scratch& s) const {
    std::vector<std::size_t> counts(q_, 0);
    std::vector<std::uint64_t> cover(q_, 0);
    Outcome out;
    const auto add = [&](Candidate x) {
      out.chosen.push_back(x);
      s.in_set[x] = 1;
      ++counts[component(x)];
      for (std::uint32_t item : cc_.covering(at(x)))
        if (!s.covered[item]) {
          s.covered[item] = 1;
          s.touched.push_back(item);
          cover[cc_.item_component(item)] += cc_.weight(item);
        }
    };
    const auto gain = [&](Candidate x) {
      std::uint64_t g = 0;
      for (std::uint32_t item : cc_.covering(at(x)))
        if (!s.covered[item]) g += cc_.weight(item);
      return g;
    };
    const auto ratio = [&](Candidate x, std::uint64_t g) {
      const std::size_t c = component(x);
      return cat_.profit(c) * static_cast<double>(g) / cat_.cost(c);
    };
    const auto affordable = [&](Candidate x) {
      const std::size_t c = component(x);
      ++counts[c];
      const bool ok = cost_of(counts) <= budget_;
      --counts[c];
      return ok;
    };

    for (Candidate x : start) add(x);

    if (lazy) {
      struct Entry {
        double ratio;
        Candidate x;
        std::size_t round;
      };
      const auto lower = [](const Entry& a, const Entry& b) {
        return a.ratio < b.ratio || (a.ratio == b.ratio && a.x > b.x);
      };
      std::priority_queue<Entry, std::vector<Entry>, decltype(lower)> heap(lower);
      for (Candidate x = 0; x < candidates(); ++x) {
        if (s.in_set[x] || !affordable(x)) continue;
        const std::uint64_t g = gain(x);
        if (g > 0) heap.push({ratio(x, g), x, 0});
      }
      std::size_t round = 0;
      while (!heap.empty()) {
        const Entry top = heap.top();
        heap.pop();
        if (!affordable(top.x)) continue;
        if (top.round != round) {
          const std::uint64_t g = gain(top.x);
          if (g > 0) heap.push({ratio(top.x, g), top.x, round});
          continue;
        }
        add(top.x);
        ++round;
      }
    } else {
      for (;;) {
        std::optional<Candidate> best;
        double best_ratio = 0.0;
        for (Candidate x = 0; x < candidates(); ++x) {
          if (s.in_set[x] || !affordable(x)) continue;
          const std::uint64_t g = gain(x);
          if (g == 0) continue;
          const double r = ratio(x, g);
          if (!best || r > best_ratio) {
            best = x;
            best_ratio = r;
          }
        }
        if (!best) break;
        add(*best);
      }
    }

    out.value = value_of(cover);
    for (std::uint32_t item : s.touched) s.covered[item] = 0;
    s.touched.clear();
    for (Candidate x : out.chosen) s.in_set[x] = 0;
    return out;
  }

  /// Best greedy completion over every feasible size-3 start, as
  /// (value, start) with ties to the lexicographically first start.
  std::optional<Outcome> best_triple_completion(bool lazy) const {
    const std::size_t total = candidates();
    struct Best {
      double value = -1.0;
      Candidate y = 0, z = 0;
    };
    std::vector<Best> per_x(total);
#pragma omp parallel
    {
      Scratch scratch = make_scratch();
#pragma omp for schedule(dynamic, 1)
      for (std::size_t xi = 0; xi < total; ++xi) {
        const auto x = static_cast<Candidate>(xi);
        Best best;
        for (Candidate y = x + 1; y < total; ++y)
          for (Candidate z = y + 1; z < total; ++z) {
            const std::vector<Candidate> start{x, y, z};
            if (!feasible(start)) continue;
            const Outcome o = greedy(start, lazy, scratch);
            if (o.value > best.value) best = {o.value, y, z};
          }
        per_x[xi] = best;
      }
    }
    std::optional<std::size_t> winner;
    for (std::size_t xi = 0; xi < total; ++xi)
      if (per_x[xi].value >= 0.0 && (!winner || per_x[xi].value > per_x[*winner].value))
        winner = xi;
    if (!winner) return std::nullopt;
    Scratch scratch = make_scratch();
    const auto x = static_cast<Candidate>(*winner);
    return greedy({x, per_x[*winner].y, per_x[*winner].z}, lazy, scratch);
  }

  SeedAssignment to_assignment(const std::vector<Candidate>& chosen) const {
    SeedAssignment s(q_);
    for (Candidate x : chosen) s.add(component(x), static_cast<NodeId>(x % n_));
    return s;
  }

 private:
  const CompactCoverage& cc_;
  const ProductCatalog& cat_;
  Money budget_;
  std::size_t n_;
  std::size_t q_;
  std::vector<std::uint64_t> weight_sum_;
};

}  // namespace

SeedAssignment modified_greedy(const CompactCoverage& cc, const ProductCatalog& cat, Money budget,
                               const GreedyOptions& options) {
  if (options.required_theta && cc.theta() < *options.required_theta)
    diag::warn("collection has " + std::to_string(cc.theta()) + " RR sets, below the required " +
               std::to_string(*options.required_theta) + "; the approximation guarantee is void");
  const Selector sel(cc, cat, budget);
  if (cat.max_seeds(budget) == 0 || cc.theta() == 0) return SeedAssignment(cc.q());
  if (options.mode == GreedyMode::exact && sel.candidates() > 300)
    diag::warn("exact mode on " + std::to_string(sel.candidates()) +
               " copy nodes enumerates every size-3 start; expect a long run");

  Outcome best;
  const auto consider = [&](Outcome o) {
    if (o.value > best.value) best = std::move(o);
  };
  consider(sel.best_small());
  auto scratch = sel.make_scratch();
  consider(sel.greedy({}, options.lazy, scratch));
  if (options.mode == GreedyMode::exact)
    if (auto o = sel.best_triple_completion(options.lazy)) consider(std::move(*o));
  return sel.to_assignment(best.chosen);
}

SeedAssignment modified_greedy(const RRCollection& rc, const ProductCatalog& cat, Money budget,
                               const GreedyOptions& options) {
  return modified_greedy(CompactCoverage(rc), cat, budget, options);
}

void RmgReport::write_text(std::ostream& out) const {
  out << "mode=" << to_string(mode) << '\n'
      << "u_star=" << format_number(u_star) << '\n'
      << "u_double_star=" << format_number(u_double_star) << '\n'
      << "u_prime=" << format_number(u_prime) << '\n'
      << "lambda=" << format_number(lambda) << '\n'
      << "theta_required=" << theta_required << '\n'
      << "theta=" << theta << '\n'
      << "capped=" << (capped ? "true" : "false") << '\n'
      << "rho_hat=" << format_number(rho_hat) << '\n'
      << "mc_profit=" << format_number(mc_profit) << '\n'
      << "mc_stderr=" << format_number(mc_stderr) << '\n'
      << "cost=" << format_number(cost) << '\n'
      << "ms_bound=" << format_number(ms_bound) << '\n'
      << "ms_sampling=" << format_number(ms_sampling) << '\n'
      << "ms_greedy=" << format_number(ms_greedy) << '\n'
      << "ms_eval=" << format_number(ms_eval) << '\n';
}

std::string RmgReport::csv_header() {
  return "mode,u_star,u_double_star,u_prime,lambda,theta_required,theta,capped,rho_hat,"
         "mc_profit,mc_stderr,cost,ms_bound,ms_sampling,ms_greedy,ms_eval";
}

std::string RmgReport::csv_row() const {
  std::ostringstream out;
  out << to_string(mode) << ',' << format_number(u_star) << ',' << format_number(u_double_star)
      << ',' << format_number(u_prime) << ',' << format_number(lambda) << ',' << theta_required
      << ',' << theta << ',' << (capped ? 1 : 0) << ',' << format_number(rho_hat) << ','
      << format_number(mc_profit) << ',' << format_number(mc_stderr) << ','
      << format_number(cost) << ',' << format_number(ms_bound) << ','
      << format_number(ms_sampling) << ',' << format_number(ms_greedy) << ','
      << format_number(ms_eval);
  return out.str();
}

RmgResult rmg_pipeline(const Graph& g, const ProductCatalog& cat, Money budget,
                       const RmgConfig& config, std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  const auto ms_since = [](Clock::time_point t) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
  };
  RmgResult result;
  RmgReport& rep = result.report;
  rep.mode = config.mode;
  const CopyGraph cg(g, cat.q());

  auto t = Clock::now();
  const OptBounds bounds = estimate_opt_bounds(
      g, cat, budget,
      {.eps_prime = config.eps_prime, .eps_bar = config.eps_bar, .l_prime = config.l_prime}, seed,
      config.matrix_mode, config.theta_eval);
  rep.u_star = bounds.u_star;
  rep.u_double_star = bounds.u_double_star;
  rep.u_prime = bounds.u_prime;
  rep.ms_bound = ms_since(t);

  t = Clock::now();
  const ThetaBound tb =
      required_theta(g.n(), cat.q(), cat, budget, config.eps, config.l, bounds.u_prime);
  rep.lambda = tb.lambda;
  rep.theta_required = tb.theta;
  const std::uint64_t limit =
      std::min<std::uint64_t>(config.theta_cap, std::numeric_limits<std::uint32_t>::max());
  rep.theta = std::min(tb.theta, limit);
  rep.capped = rep.theta < tb.theta;
  if (rep.capped)
    diag::warn("theta capped at " + std::to_string(rep.theta) + " (required " +
               std::to_string(tb.theta) + "); the approximation guarantee may not hold");
  const RRCollection rc =
      generate_collection(cg, rep.theta, hash_key(seed, stream_tag::kRmgSample));
  rep.ms_sampling = ms_since(t);

  t = Clock::now();
  GreedyOptions options;
  options.mode = config.mode;
  result.assignment = modified_greedy(CompactCoverage(rc), cat, budget, options);
  rep.rho_hat = profit_estimate(rc, cat, result.assignment);
  rep.cost = assignment_cost(result.assignment, cat);
  rep.ms_greedy = ms_since(t);

  t = Clock::now();
  if (config.eval_trials > 0) {
    const ProfitEstimate mc = mc_profit_with_stderr(cg, cat, result.assignment,
                                                    config.eval_trials,
                                                    hash_key(seed, stream_tag::kMcEval));
    rep.mc_profit = mc.mean;
    rep.mc_stderr = mc.std_error;
  }
  rep.ms_eval = ms_since(t);
  return result;
}

}  // namespace pmax
