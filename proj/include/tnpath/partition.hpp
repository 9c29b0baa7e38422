#pragma once

#include <cstdint>
#include <vector>

#include "tnpath/cost.hpp"

namespace tnpath {

/// Tensors as vertices, indices as hyperedges. Hyperedges of open indices
/// also touch a virtual anchor vertex that stays on side A.
struct Hypergraph {
  struct Edge {
    IndexId index;
    std::vector<std::uint32_t> pins;  // tensor positions, ascending
    double weight;                    // log2(extent)
    bool anchored;                    // open index
  };

  std::size_t vertex_count = 0;
  std::vector<Edge> edges;                          // one per index, in index order
  std::vector<std::vector<std::uint32_t>> incident; // vertex -> edge positions
};

Hypergraph build_hypergraph(const TensorNetwork& net);

enum class LeafOptimizer { exhaustive_dfs, greedy };

struct PartitionConfig {
  double imbalance = 0.2;  // in [0, 0.5)
  std::size_t cutoff = 8;  // >= 2
  LeafOptimizer leaf_optimizer = LeafOptimizer::exhaustive_dfs;
  std::uint64_t seed = 0;
  std::size_t fm_passes = 10;
  std::size_t restarts = 4;  // independent random starts per bisection
};

struct Bisection {
  std::vector<std::uint32_t> part_a;  // ascending
  std::vector<std::uint32_t> part_b;  // ascending
  double cut_weight = 0.0;
};

/// Largest side allowed for a bisection of `vertices`:
/// floor(ceil(V/2) * (1 + imbalance)), clamped to [ceil(V/2), V-1].
std::size_t max_side(std::size_t vertices, double imbalance);

/// Sum of weights of hyperedges with pins on both sides (the anchor counts as
/// side A). `side[v]` is 0 for A, 1 for B. Summed in edge order.
double cut_weight(const Hypergraph& h, const std::vector<std::uint8_t>& side);

/// Cut after the initial assignment, then after each FM pass, for one restart.
struct FmTrace {
  std::vector<double> pass_cuts;
};

/// Balanced 2-way split minimizing cut weight: random balanced starts refined
/// by Fiduccia-Mattheyses passes; the best restart wins. Deterministic for a
/// fixed seed. `traces`, when given, receives one entry per restart.
Bisection bisect(const Hypergraph& h, const PartitionConfig& config,
                 std::vector<FmTrace>* traces = nullptr);

struct PartitionResult {
  EinExpr tree;
  CostReport cost;
};

/// Recursive bisection down to `cutoff` tensors, solved by the leaf optimizer.
/// Each side's tree becomes one operand of a binary contraction that sums the
/// cut indices that are not open.
PartitionResult partition_optimize(const TensorNetwork& net, const PartitionConfig& config = {});

}  // namespace tnpath
