#pragma once

#include <cstdint>

#include "tnpath/cost.hpp"

namespace tnpath {

enum class InitBound {
  naive,     // cost of the unoptimized left-fold tree
  greedy,    // cost of the deterministic greedy tree
  explicit_value,
};

struct SearchConfig {
  bool outer_products = false;
  InitBound init = InitBound::naive;
  Count explicit_bound = 0;  // used with InitBound::explicit_value, must be > 0
  Metric metric = Metric::flops;
  // Abort with Error(budget_exceeded) after this many generated nodes; 0 = no limit.
  std::uint64_t max_nodes = 0;
};

struct SearchStats {
  std::uint64_t nodes_expanded = 0;  // search nodes generated
  std::uint64_t prunes = 0;          // generated nodes discarded by bound or dominance
  Count best_cost = 0;               // metric value of the returned tree
};

struct SearchResult {
  EinExpr tree;
  CostReport cost;
  SearchStats stats;
};

// Both searches address tensor subsets with 64-bit masks.
inline constexpr std::size_t kMaxExhaustiveTensors = 64;

/// Depth-first branch and bound over contraction trees, top down: the tree
/// for a tensor subset is its final contraction (a split into two subsets)
/// plus the trees for both halves, solved recursively.
///
/// Splits are tried cheapest final step first. A split is abandoned when its
/// step plus lower bounds for both halves reaches the best cost found so far
/// for that subset, or the best complete cost (initially the bound, inclusive).
/// Each subset is expanded at most once; its optimum, or the fact that it
/// cannot beat the bound, is memoized. nodes_expanded counts generated splits.
///
/// Without outer products, both halves must be connected (or, for a
/// disconnected network, unions of whole components).
SearchResult exhaustive_dfs(const TensorNetwork& net, const SearchConfig& config = {});

/// Breadth-first search over tensor subsets of increasing size, keeping the
/// cheapest tree per subset and discarding any above a cost cap. The cap
/// starts at the initial bound and grows by the largest extent (at least 2)
/// until the full network is solved.
SearchResult exhaustive_bfs(const TensorNetwork& net, const SearchConfig& config = {});

}  // namespace tnpath
