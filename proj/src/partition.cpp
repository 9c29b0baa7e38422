#include "tnpath/partition.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>

#include "tnpath/error.hpp"
#include "tnpath/exhaustive.hpp"
#include "tnpath/greedy.hpp"
#include "tnpath/rng.hpp"

namespace tnpath {

Hypergraph build_hypergraph(const TensorNetwork& net) {
  Hypergraph h;
  h.vertex_count = net.tensor_count();
  h.incident.resize(h.vertex_count);
  for (IndexId idx = 0; idx < net.index_count(); ++idx) {
    const auto pins = net.carriers(idx);
    if (pins.empty()) continue;
    const auto e = static_cast<std::uint32_t>(h.edges.size());
    h.edges.push_back({idx, {pins.begin(), pins.end()},
                       std::log2(static_cast<double>(net.extent(idx))), net.is_output(idx)});
    for (auto v : pins) h.incident[v].push_back(e);
  }
  return h;
}

std::size_t max_side(std::size_t vertices, double imbalance) {
  const std::size_t half = (vertices + 1) / 2;
  auto limit = static_cast<std::size_t>(std::floor(static_cast<double>(half) * (1.0 + imbalance)));
  limit = std::max(limit, half);
  if (vertices >= 2) limit = std::min(limit, vertices - 1);
  return limit;
}

double cut_weight(const Hypergraph& h, const std::vector<std::uint8_t>& side) {
  double total = 0.0;
  for (const auto& e : h.edges) {
    bool a = e.anchored, b = false;
    for (auto v : e.pins) (side[v] ? b : a) = true;
    if (a && b) total += e.weight;
  }
  return total;
}

namespace {

class FmRefiner {
 public:
  FmRefiner(const Hypergraph& h, std::vector<std::uint8_t> side, std::size_t limit)
      : h_(h), side_(std::move(side)), limit_(limit), counts_(h.edges.size(), {0, 0}) {
    for (std::size_t e = 0; e < h.edges.size(); ++e) {
      if (h.edges[e].anchored) ++counts_[e][0];
      for (auto v : h.edges[e].pins) ++counts_[e][side_[v]];
    }
    sizes_[0] = sizes_[1] = 0;
    for (auto s : side_) ++sizes_[s];
  }

  // One pass; keeps the best balanced prefix of moves. A move may overfill
  // its target side by one vertex so that swaps stay reachable under exact
  // balance. Returns true if the cut dropped.
  bool pass() {
    const auto n = h_.vertex_count;
    std::vector<bool> locked(n, false);
    std::vector<double> gains(n);
    std::set<std::pair<double, std::uint32_t>> buckets[2];  // (-gain, vertex) per current side
    for (std::uint32_t v = 0; v < n; ++v) {
      gains[v] = gain(v);
      buckets[side_[v]].insert({-gains[v], v});
    }

    std::vector<std::uint32_t> moves;
    double delta = 0.0, best_delta = 0.0;
    std::size_t best_prefix = 0;
    for (;;) {
      const std::pair<double, std::uint32_t>* pick = nullptr;
      for (int s = 0; s < 2; ++s) {
        if (buckets[s].empty() || sizes_[1 - s] > limit_ || sizes_[s] < 2) continue;
        const auto& top = *buckets[s].begin();
        if (!pick || top < *pick) pick = &top;
      }
      if (!pick) break;
      const auto chosen = *pick;
      const std::uint32_t v = chosen.second;
      const double g = gains[v];
      buckets[side_[v]].erase(chosen);
      locked[v] = true;
      move(v);
      moves.push_back(v);
      delta -= g;
      if (sizes_[0] <= limit_ && sizes_[1] <= limit_ && delta < best_delta - 1e-9) {
        best_delta = delta;
        best_prefix = moves.size();
      }
      for (auto e : h_.incident[v]) {
        for (auto u : h_.edges[e].pins) {
          if (locked[u]) continue;
          const double updated = gain(u);
          if (updated == gains[u]) continue;
          buckets[side_[u]].erase({-gains[u], u});
          gains[u] = updated;
          buckets[side_[u]].insert({-gains[u], u});
        }
      }
    }
    for (std::size_t k = moves.size(); k > best_prefix; --k) move(moves[k - 1]);
    return best_prefix > 0;
  }

  const std::vector<std::uint8_t>& side() const { return side_; }

 private:
  double gain(std::uint32_t v) const {
    const int s = side_[v];
    double g = 0.0;
    for (auto e : h_.incident[v]) {
      const auto& c = counts_[e];
      const bool before = c[0] > 0 && c[1] > 0;
      const bool after = c[s] > 1;
      if (before && !after) g += h_.edges[e].weight;
      if (!before && after) g -= h_.edges[e].weight;
    }
    return g;
  }

  void move(std::uint32_t v) {
    const int s = side_[v];
    for (auto e : h_.incident[v]) {
      --counts_[e][s];
      ++counts_[e][1 - s];
    }
    --sizes_[s];
    ++sizes_[1 - s];
    side_[v] = static_cast<std::uint8_t>(1 - s);
  }

  const Hypergraph& h_;
  std::vector<std::uint8_t> side_;
  std::size_t limit_;
  std::vector<std::array<std::uint32_t, 2>> counts_;
  std::size_t sizes_[2];
};

void check_partition(const PartitionConfig& config) {
  if (!(config.imbalance >= 0.0 && config.imbalance < 0.5))
    throw Error(ErrorKind::invalid_config, "imbalance must lie in [0, 0.5)");
  if (config.cutoff < 2) throw Error(ErrorKind::invalid_config, "cutoff must be at least 2");
  if (config.leaf_optimizer == LeafOptimizer::exhaustive_dfs && config.cutoff > kMaxExhaustiveTensors)
    throw Error(ErrorKind::invalid_config, "cutoff above 64 with an exhaustive leaf optimizer");
  if (config.fm_passes < 1) throw Error(ErrorKind::invalid_config, "fm_passes must be positive");
  if (config.restarts < 1) throw Error(ErrorKind::invalid_config, "restarts must be positive");
}

}  // namespace

Bisection bisect(const Hypergraph& h, const PartitionConfig& config, std::vector<FmTrace>* traces) {
  check_partition(config);
  const auto n = h.vertex_count;
  if (n < 2) throw Error(ErrorKind::invalid_config, "bisection needs at least two vertices");
  const std::size_t limit = max_side(n, config.imbalance);

  std::vector<std::uint8_t> best;
  double best_cut = 0.0;
  if (traces) traces->clear();
  for (std::size_t r = 0; r < config.restarts; ++r) {
    Rng rng(derive_seed(config.seed, r));
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    for (std::size_t k = n - 1; k > 0; --k) std::swap(order[k], order[uniform_below(rng, k + 1)]);
    std::vector<std::uint8_t> side(n, 0);
    for (std::size_t k = 0; k < n / 2; ++k) side[order[k]] = 1;

    FmRefiner fm(h, std::move(side), limit);
    FmTrace trace;
    trace.pass_cuts.push_back(cut_weight(h, fm.side()));
    for (std::size_t p = 0; p < config.fm_passes; ++p) {
      const bool improved = fm.pass();
      trace.pass_cuts.push_back(cut_weight(h, fm.side()));
      if (!improved) break;
    }
    const double cut = trace.pass_cuts.back();
    if (best.empty() || cut < best_cut) {
      best = fm.side();
      best_cut = cut;
    }
    if (traces) traces->push_back(std::move(trace));
  }

  Bisection out;
  for (std::uint32_t v = 0; v < n; ++v) (best[v] ? out.part_b : out.part_a).push_back(v);
  out.cut_weight = cut_weight(h, best);
  return out;
}

namespace {

EinExpr solve_leaf(const TensorNetwork& net, const PartitionConfig& config) {
  if (config.leaf_optimizer == LeafOptimizer::greedy) return greedy(net).tree;
  return exhaustive_dfs(net).tree;
}

EinExpr solve(const TensorNetwork& net, const std::vector<std::uint32_t>& positions,
              const PartitionConfig& config, std::uint64_t seed, std::uint64_t depth) {
  const TensorNetwork sub = net.induced(positions);
  if (positions.size() <= config.cutoff || positions.size() <= 2)
    return lift(net, positions, solve_leaf(sub, config));

  PartitionConfig local = config;
  local.seed = seed;
  const Bisection split = bisect(build_hypergraph(sub), local);

  std::vector<std::uint32_t> sides[2];
  for (auto v : split.part_a) sides[0].push_back(positions[v]);
  for (auto v : split.part_b) sides[1].push_back(positions[v]);

  std::optional<EinExpr> trees[2];
  const int first = sides[0].size() <= sides[1].size() ? 0 : 1;
  for (int k : {first, 1 - first})
    trees[k] = solve(net, sides[k], config, derive_seed(seed, depth + 1, k), depth + 1);
  return EinExpr::contract(net, *trees[0], *trees[1]);
}

}  // namespace

PartitionResult partition_optimize(const TensorNetwork& net, const PartitionConfig& config) {
  check_partition(config);
  if (net.tensor_count() == 0) throw Error(ErrorKind::invalid_network, "network has no tensors");
  EinExpr tree = [&] {
    if (net.tensor_count() <= config.cutoff) return solve_leaf(net, config);
    std::vector<std::uint32_t> all(net.tensor_count());
    std::iota(all.begin(), all.end(), 0u);
    return solve(net, all, config, config.seed, 0);
  }();
  CostReport report = cost(net, tree);
  return {std::move(tree), std::move(report)};
}

}  // namespace tnpath
