#include "tnpath/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <unordered_set>

#include "tnpath/error.hpp"
#include "tnpath/rng.hpp"

namespace tnpath {

namespace {

struct Candidate {
  Count score;
  std::uint32_t a;  // a < b
  std::uint32_t b;

  bool operator>(const Candidate& o) const {
    if (score != o.score) return score > o.score;
    if (a != o.a) return a > o.a;
    return b > o.b;
  }
};

using Heap = std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>>;

class GreedyRun {
 public:
  GreedyRun(const TensorNetwork& net, bool check_priority)
      : net_(net), check_(check_priority), carriers_(net.index_count()) {
    const auto n = net.tensor_count();
    slots_.reserve(2 * n);
    for (std::size_t t = 0; t < n; ++t) {
      auto leaf = EinExpr::leaf(net, t);
      slots_.push_back(Slot{leaf, net.size_of(leaf.head()), true});
      for (auto idx : leaf.head()) carriers_[idx].push_back(static_cast<std::uint32_t>(t));
    }
    live_ = n;
    for (IndexId idx = 0; idx < carriers_.size(); ++idx) {
      const auto& c = carriers_[idx];
      for (std::size_t x = 0; x < c.size(); ++x)
        for (std::size_t y = x + 1; y < c.size(); ++y) push(c[x], c[y]);
    }
  }

  // rng == nullptr selects deterministically
  EinExpr run(Rng* rng, double temperature) {
    std::vector<Candidate> pool;
    while (live_ > 1) {
      pool.clear();
      const std::size_t want = rng ? kBoltzmannSupport : 1;
      while (pool.size() < want && !heap_.empty()) {
        Candidate c = heap_.top();
        heap_.pop();
        if (!slots_[c.a].alive || !slots_[c.b].alive) {
          ++stats_.stale_pops;
          continue;
        }
        pool.push_back(std::move(c));
      }
      if (pool.empty()) {
        join_smallest();
        continue;
      }
      if (check_) check_minimum(pool.front());

      std::size_t pick = 0;
      if (rng && pool.size() > 1) pick = boltzmann(pool, *rng, temperature);
      for (std::size_t k = 0; k < pool.size(); ++k) {
        if (k != pick) heap_.push(pool[k]);
      }
      merge(pool[pick].a, pool[pick].b);
    }
    for (auto& s : slots_) {
      if (s.alive) return s.expr;
    }
    throw Error(ErrorKind::invalid_network, "network has no tensors");
  }

  const GreedyStats& stats() const { return stats_; }

 private:
  struct Slot {
    EinExpr expr;
    Count size;
    bool alive;
  };

  IndexSet result_head(std::uint32_t a, std::uint32_t b) const {
    const auto& ha = slots_[a].expr.head();
    const auto& hb = slots_[b].expr.head();
    IndexSet out;
    out.reserve(ha.size() + hb.size());
    std::size_t i = 0, j = 0;
    while (i < ha.size() || j < hb.size()) {
      if (j == hb.size() || (i < ha.size() && ha[i] < hb[j])) {
        out.push_back(ha[i++]);
      } else if (i == ha.size() || hb[j] < ha[i]) {
        out.push_back(hb[j++]);
      } else {
        const IndexId idx = ha[i];
        if (net_.is_output(idx) || carriers_[idx].size() > 2) out.push_back(idx);
        ++i;
        ++j;
      }
    }
    return out;
  }

  Count score(std::uint32_t a, std::uint32_t b) const {
    return net_.size_of(result_head(a, b)) - slots_[a].size - slots_[b].size;
  }

  void push(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    if (!pushed_.insert((std::uint64_t(a) << 32) | b).second) return;
    heap_.push({score(a, b), a, b});
    ++stats_.pushes;
  }

  void merge(std::uint32_t a, std::uint32_t b) {
    const auto c = static_cast<std::uint32_t>(slots_.size());
    EinExpr expr = EinExpr::contract(net_, slots_[a].expr, slots_[b].expr);
    for (auto id : {a, b}) {
      for (auto idx : slots_[id].expr.head()) {
        auto& list = carriers_[idx];
        list.erase(std::find(list.begin(), list.end(), id));
      }
      slots_[id].alive = false;
    }
    for (auto idx : expr.head()) carriers_[idx].push_back(c);
    Count size = net_.size_of(expr.head());
    slots_.push_back(Slot{std::move(expr), std::move(size), true});
    --live_;
    for (auto idx : slots_[c].expr.head()) {
      for (auto d : carriers_[idx]) {
        if (d != c) push(d, c);
      }
    }
  }

  // Outer product of the two smallest live tensors, ties by id.
  void join_smallest() {
    std::optional<std::uint32_t> first, second;
    auto smaller = [&](std::uint32_t x, std::uint32_t y) {
      return slots_[x].size < slots_[y].size || (slots_[x].size == slots_[y].size && x < y);
    };
    for (std::uint32_t id = 0; id < slots_.size(); ++id) {
      if (!slots_[id].alive) continue;
      if (!first || smaller(id, *first)) {
        second = first;
        first = id;
      } else if (!second || smaller(id, *second)) {
        second = id;
      }
    }
    ++stats_.outer_products;
    merge(std::min(*first, *second), std::max(*first, *second));
  }

  std::size_t boltzmann(const std::vector<Candidate>& pool, Rng& rng, double temperature) {
    std::vector<double> weights(pool.size());
    double total = 0.0;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      const double gap = to_double(pool[k].score - pool.front().score);
      weights[k] = std::exp(-gap / temperature);
      total += weights[k];
    }
    double u = uniform_unit(rng) * total;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (u < weights[k]) return k;
      u -= weights[k];
    }
    return 0;
  }

  void check_minimum(const Candidate& chosen) const {
    std::optional<Candidate> best;
    for (std::uint32_t a = 0; a < slots_.size(); ++a) {
      if (!slots_[a].alive) continue;
      for (std::uint32_t b = a + 1; b < slots_.size(); ++b) {
        if (!slots_[b].alive) continue;
        if (set_intersection(slots_[a].expr.head(), slots_[b].expr.head()).empty()) continue;
        Candidate c{score(a, b), a, b};
        if (!best || *best > c) best = std::move(c);
      }
    }
    if (!best || best->score != chosen.score || best->a != chosen.a || best->b != chosen.b)
      throw Error(ErrorKind::invalid_tree, "greedy heap selection disagrees with a full rescan");
  }

  const TensorNetwork& net_;
  bool check_;
  std::vector<std::vector<std::uint32_t>> carriers_;  // live SSA ids per index
  std::vector<Slot> slots_;
  std::size_t live_ = 0;
  Heap heap_;
  std::unordered_set<std::uint64_t> pushed_;
  GreedyStats stats_;
};

void check_config(const GreedyConfig& config) {
  if (config.samples < 1) throw Error(ErrorKind::invalid_config, "samples must be at least 1");
  if (!(config.temperature >= 0.0))
    throw Error(ErrorKind::invalid_config, "temperature must be non-negative");
}

}  // namespace

GreedyResult greedy(const TensorNetwork& net, const GreedyConfig& config) {
  check_config(config);
  GreedyRun run(net, config.check_priority);
  EinExpr tree = run.run(nullptr, 0.0);
  CostReport report = cost(net, tree);
  return {std::move(tree), std::move(report), run.stats()};
}

SampledGreedyResult sampled_greedy(const TensorNetwork& net, const GreedyConfig& config) {
  check_config(config);
  SampledGreedyResult out{EinExpr::leaf(net, 0), {}, {}, 0, {}};
  if (config.temperature == 0.0 && config.samples > 1)
    out.warnings.push_back("temperature is 0: all " + std::to_string(config.samples) +
                           " samples are identical");

  for (std::size_t i = 0; i < config.samples; ++i) {
    GreedyRun run(net, config.check_priority);
    EinExpr tree = [&] {
      if (i == 0 || config.temperature == 0.0) return run.run(nullptr, 0.0);
      Rng rng(derive_seed(config.seed, i));
      return run.run(&rng, config.temperature);
    }();
    CostReport report = cost(net, tree);
    out.sample_flops.push_back(report.flops);
    if (i == 0 || report.flops < out.cost.flops) {
      out.tree = std::move(tree);
      out.cost = std::move(report);
      out.best_sample = i;
    }
  }
  return out;
}

}  // namespace tnpath
