#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pmax/diffusion.hpp"
#include "pmax/graph.hpp"
#include "pmax/ris.hpp"

namespace pmax {

/// Incremental profit oracle: the current assignment starts empty and only
/// grows.  gain() is the profit increase from adding one copy node.
class MarginalOracle {
 public:
  virtual ~MarginalOracle() = default;
  virtual std::size_t n() const = 0;
  virtual std::size_t q() const = 0;
  virtual void reset() = 0;
  virtual double gain(CopyNode v) = 0;
  virtual void add(CopyNode v) = 0;
  /// Profit estimate of the current assignment.
  virtual double value() const = 0;
};

/// Monte-Carlo marginals on r fixed live-edge worlds per product.  Every
/// product sees the same worlds, so marginals are exactly monotone and
/// submodular and equal products give equal estimates.
class McOracle final : public MarginalOracle {
 public:
  McOracle(const CopyGraph& cg, const ProductCatalog& cat, std::size_t r, std::uint64_t key);
  std::size_t n() const override { return cg_->base().n(); }
  std::size_t q() const override { return cg_->q(); }
  void reset() override;
  double gain(CopyNode v) override;
  void add(CopyNode v) override;
  double value() const override;

 private:
  std::span<char> marks(std::size_t component, std::size_t world) {
    return {active_.data() + (component * r_ + world) * n(), n()};
  }

  const CopyGraph* cg_;
  const ProductCatalog* cat_;
  std::size_t r_;
  WorldSampler worlds_;
  std::vector<char> active_;  // component x world x node
  std::vector<std::uint64_t> reached_;  // per component, summed over worlds
};

/// Exact marginals from a SpreadOracle (tiny graphs only).
class ExactOracle final : public MarginalOracle {
 public:
  ExactOracle(const SpreadOracle& oracle, const ProductCatalog& cat, std::size_t q);
  std::size_t n() const override { return oracle_->n(); }
  std::size_t q() const override { return masks_.size(); }
  void reset() override;
  double gain(CopyNode v) override;
  void add(CopyNode v) override;
  double value() const override;

 private:
  const SpreadOracle* oracle_;
  const ProductCatalog* cat_;
  std::vector<std::uint64_t> masks_;
};

/// Marginals of rho-hat on a fixed RR collection.
class CoverageOracle final : public MarginalOracle {
 public:
  CoverageOracle(const RRCollection& rc, const ProductCatalog& cat);
  std::size_t n() const override { return rc_->n(); }
  std::size_t q() const override { return rc_->q(); }
  void reset() override;
  double gain(CopyNode v) override;
  void add(CopyNode v) override;
  double value() const override;

 private:
  const RRCollection* rc_;
  const ProductCatalog* cat_;
  CoverageState state_;
};

enum class GreedyRule {
  /// gain / c
  ratio,
  /// gain / c^2
  ratio_squared,
  /// gain
  raw,
};

/// Budgeted greedy over every (node, product) pair with lazy re-evaluation.
/// Each step adds the affordable pair with the best score under `rule`
/// (equal scores: larger gain, then lower component and node); stops when no
/// affordable pair has a positive gain.  Resets the oracle first.
SeedAssignment budgeted_greedy(MarginalOracle& oracle, const ProductCatalog& cat, Money budget,
                               GreedyRule rule);

inline constexpr std::size_t kDefaultBaselineTrials = 10000;

/// Uniformly shuffled (node, product) pairs, each kept when still affordable.
SeedAssignment random_baseline(const CopyGraph& cg, const ProductCatalog& cat, Money budget,
                               std::uint64_t seed);

/// Ratio greedy with MC marginals over r worlds.
SeedAssignment greedy_mc(const CopyGraph& cg, const ProductCatalog& cat, Money budget,
                         std::size_t r, std::uint64_t seed);

/// Better of the cost-squared and raw-gain greedy candidates, compared by an
/// independent MC estimate with r trials (ties to the cost-squared one).
SeedAssignment pmce(const CopyGraph& cg, const ProductCatalog& cat, Money budget, std::size_t r,
                    std::uint64_t seed);

}  // namespace pmax
