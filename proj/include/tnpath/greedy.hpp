#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tnpath/cost.hpp"

namespace tnpath {

enum class GreedyScore {
  // size(result) - size(a) - size(b); lower is better
  size_difference,
};

struct GreedyConfig {
  double temperature = 0.0;
  std::size_t samples = 1;
  std::uint64_t seed = 0;
  GreedyScore score = GreedyScore::size_difference;
  // Re-scan all live pairs at every step and throw if the heap disagrees.
  // Quadratic; for tests.
  bool check_priority = false;
};

struct GreedyStats {
  std::size_t pushes = 0;       // candidates inserted in the heap
  std::size_t stale_pops = 0;   // popped entries whose operands were gone
  std::size_t outer_products = 0;
};

struct GreedyResult {
  EinExpr tree;
  CostReport cost;
  GreedyStats stats;
};

struct SampledGreedyResult {
  EinExpr tree;
  CostReport cost;
  std::vector<Count> sample_flops;  // per sample, in sample order
  std::size_t best_sample = 0;
  std::vector<std::string> warnings;
};

// Number of best candidates the stochastic selector draws from at each step.
inline constexpr std::size_t kBoltzmannSupport = 32;

/// Deterministic greedy: repeatedly contracts the pair of tensors sharing an
/// index with the lowest score, ties broken by (smaller id, larger id) over
/// SSA ids. When no pair shares an index, the two smallest tensors are
/// joined by an outer product. `config.temperature` is ignored.
GreedyResult greedy(const TensorNetwork& net, const GreedyConfig& config = {});

/// Runs `config.samples` greedy passes and keeps the cheapest by flops.
/// Sample 0 is the deterministic pass; sample i > 0 picks among the best
/// kBoltzmannSupport candidates with probability proportional to
/// exp(-(score - min_score) / temperature), seeded by derive_seed(seed, i).
SampledGreedyResult sampled_greedy(const TensorNetwork& net, const GreedyConfig& config);

}  // namespace tnpath
