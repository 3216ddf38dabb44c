#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pmax/graph.hpp"
#include "pmax/ris.hpp"
#include "pmax/tim.hpp"

namespace pmax {

/// Per-product TIM+ settings; `k` is ignored (set per call).
struct OptParams {
  double eps_prime = 0.1;
  double eps_bar = 0.1;
  double l_prime = 1.0;
};

enum class MatrixMode {
  /// One TIM+ run per product at size k_i; row entries are its greedy prefixes.
  prefix,
  /// An independent TIM+ run for every (product, size) pair.
  literal,
};

/// q x k* profit matrix P and seed-set matrix A.  Sizes are 1-based:
/// entry (i, j) is the size-j set of product i.
class ProfitMatrix {
 public:
  ProfitMatrix() = default;
  ProfitMatrix(std::size_t q, std::size_t k_star)
      : q_(q), k_star_(k_star), p_(q * k_star, 0.0), a_(q * k_star) {}

  std::size_t q() const noexcept { return q_; }
  std::size_t k_star() const noexcept { return k_star_; }
  double profit(std::size_t i, std::size_t j) const { return p_[i * k_star_ + j - 1]; }
  const std::vector<NodeId>& seeds(std::size_t i, std::size_t j) const {
    return a_[i * k_star_ + j - 1];
  }
  void set(std::size_t i, std::size_t j, double profit, std::vector<NodeId> seeds) {
    p_[i * k_star_ + j - 1] = profit;
    a_[i * k_star_ + j - 1] = std::move(seeds);
  }

  /// Rows "product,size,estimate", one per entry, products 0-based.
  void write_csv(std::ostream& out) const;

 private:
  std::size_t q_ = 0;
  std::size_t k_star_ = 0;
  std::vector<double> p_;
  std::vector<std::vector<NodeId>> a_;
};

struct OptEstimate {
  double u_star = 0.0;
  /// TIM+ result per product (empty seeds for unaffordable products).
  std::vector<TimResult> runs;
};

/// u* = max_i p_i sigma-hat(S_{k_i}) / (1 + eps'/2) over products with
/// k_i >= 1.  Throws InfeasibleInstance when no product is affordable.
OptEstimate opt_estimation(const Graph& g, const ProductCatalog& cat, Money budget,
                           const OptParams& params, std::uint64_t seed);

/// Fills P and A: p_ij = p_i sigma-hat(a_ij) for j <= min(k_i, n), zero and
/// empty beyond.  In prefix mode `runs` (from opt_estimation with the same
/// seed) is reused when given.
ProfitMatrix build_profit_matrix(const Graph& g, const ProductCatalog& cat, Money budget,
                                 const OptParams& params, std::uint64_t seed,
                                 MatrixMode mode = MatrixMode::prefix,
                                 const std::vector<TimResult>* runs = nullptr);

struct RefinedOpt {
  double u_prime = 0.0;
  double u_double_star = 0.0;
  /// The greedy assignment whose estimate is u**.
  SeedAssignment s_hat;
};

/// Greedy over matrix entries by p_ij / (c_i j), skipping entries that would
/// exceed the budget; each row is used at most once.  u** = rho-hat(s_hat)
/// on `rc_eval`, and u' = max(u*, u**).
RefinedOpt refine_opt(const ProfitMatrix& pm, const ProductCatalog& cat, Money budget,
                      const RRCollection& rc_eval, double u_star);

inline constexpr std::size_t kDefaultThetaEval = 100000;

struct OptBounds {
  double u_star = 0.0;
  double u_double_star = 0.0;
  double u_prime = 0.0;
  ProfitMatrix matrix;
  SeedAssignment s_hat;
};

/// opt_estimation, build_profit_matrix and refine_opt on one seed, with a
/// fresh evaluation collection of theta_eval sets.
OptBounds estimate_opt_bounds(const Graph& g, const ProductCatalog& cat, Money budget,
                              const OptParams& params, std::uint64_t seed,
                              MatrixMode mode = MatrixMode::prefix,
                              std::size_t theta_eval = kDefaultThetaEval);

}  // namespace pmax
