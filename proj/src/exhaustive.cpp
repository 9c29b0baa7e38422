#include "tnpath/exhaustive.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <unordered_map>

#include "tnpath/error.hpp"
#include "tnpath/greedy.hpp"

namespace tnpath {

namespace {

using Mask = std::uint64_t;

// Heads and sizes of tensor subsets, memoized by mask.
class SubsetModel {
 public:
  struct Info {
    IndexSet head;
    Count size;
  };

  explicit SubsetModel(const TensorNetwork& net) : net_(net) {
    const auto n = net.tensor_count();
    full_ = n == 64 ? ~Mask(0) : (Mask(1) << n) - 1;
    carriers_.resize(net.index_count(), 0);
    for (IndexId idx = 0; idx < net.index_count(); ++idx) {
      for (auto t : net.carriers(idx)) carriers_[idx] |= Mask(1) << t;
    }
    for (const auto& comp : net.components()) {
      Mask m = 0;
      for (auto t : comp) m |= Mask(1) << t;
      components_.push_back(m);
    }
  }

  Mask full() const { return full_; }

  const Info& info(Mask s) {
    auto it = cache_.find(s);
    if (it != cache_.end()) return it->second;
    Info inf;
    for (IndexId idx = 0; idx < carriers_.size(); ++idx) {
      const Mask c = carriers_[idx];
      if ((c & s) && (net_.is_output(idx) || (c & ~s))) inf.head.push_back(idx);
    }
    inf.size = net_.size_of(inf.head);
    return cache_.emplace(s, std::move(inf)).first->second;
  }

  Count pair_flops(Mask a, Mask b) {
    const auto& ha = info(a).head;
    const auto& hb = info(b).head;
    Count flops = 1;
    std::size_t i = 0, j = 0;
    while (i < ha.size() || j < hb.size()) {
      IndexId idx;
      if (j == hb.size() || (i < ha.size() && ha[i] < hb[j])) {
        idx = ha[i++];
      } else if (i == ha.size() || hb[j] < ha[i]) {
        idx = hb[j++];
      } else {
        idx = ha[i++];
        ++j;
      }
      flops *= net_.extent(idx);
    }
    return flops;
  }

  bool adjacent(Mask a, Mask b) {
    const auto& ha = info(a).head;
    const auto& hb = info(b).head;
    std::size_t i = 0, j = 0;
    while (i < ha.size() && j < hb.size()) {
      if (ha[i] == hb[j]) return true;
      ha[i] < hb[j] ? ++i : ++j;
    }
    return false;
  }

  // true when s is a union of connected components
  bool closed(Mask s) const {
    for (Mask c : components_) {
      if ((c & s) && (c & ~s)) return false;
    }
    return true;
  }

  // Contribution of contracting a with b under `metric`.
  Count step(Metric metric, Mask a, Mask b) {
    if (metric == Metric::flops) return pair_flops(a, b);
    const Mask s = a | b;
    const auto& inf = info(s);
    if (s == full_ && inf.head.empty()) return 0;
    return inf.size;
  }

  static Count accumulate(Metric metric, const Count& acc, const Count& step) {
    if (metric == Metric::flops) return acc + step;
    return acc < step ? step : acc;
  }

  EinExpr build(const std::vector<std::pair<Mask, Mask>>& steps) const {
    std::map<Mask, EinExpr> parts;
    for (std::size_t t = 0; t < net_.tensor_count(); ++t)
      parts.emplace(Mask(1) << t, EinExpr::leaf(net_, t));
    for (auto [a, b] : steps) {
      auto ea = parts.extract(a);
      auto eb = parts.extract(b);
      parts.emplace(a | b, EinExpr::contract(net_, ea.mapped(), eb.mapped()));
    }
    return parts.begin()->second;
  }

 private:
  const TensorNetwork& net_;
  Mask full_ = 0;
  std::vector<Mask> carriers_;
  std::vector<Mask> components_;
  std::unordered_map<Mask, Info> cache_;
};

void check_search(const TensorNetwork& net, const SearchConfig& config) {
  if (net.tensor_count() == 0) throw Error(ErrorKind::invalid_network, "network has no tensors");
  if (net.tensor_count() > kMaxExhaustiveTensors)
    throw Error(ErrorKind::invalid_config,
                "exhaustive search supports at most 64 tensors, got " + std::to_string(net.tensor_count()));
  if (config.init == InitBound::explicit_value && config.explicit_bound <= 0)
    throw Error(ErrorKind::invalid_config, "explicit bound must be positive");
}

// Initial bound; nullopt means unbounded.
std::optional<Count> initial_bound(const TensorNetwork& net, const SearchConfig& config) {
  switch (config.init) {
    case InitBound::naive:
      return metric_value(cost(net, EinExpr::naive(net)), config.metric);
    case InitBound::greedy:
      return metric_value(greedy(net).cost, config.metric);
    case InitBound::explicit_value:
      return config.explicit_bound;
  }
  return std::nullopt;
}

// Exact product of extents, multiplying big integers only once per 64 bits.
Count product(const std::vector<std::uint64_t>& extents, const std::vector<IndexId>& ids) {
  Count out = 1;
  std::uint64_t chunk = 1;
  for (IndexId i : ids) {
    std::uint64_t next;
    if (__builtin_mul_overflow(chunk, extents[i], &next)) {
      out *= chunk;
      chunk = extents[i];
    } else {
      chunk = next;
    }
  }
  out *= chunk;
  return out;
}

// Top-down branch and bound: the best tree for a subset S is the cheapest
// split S = A + B plus the best trees for A and B. Subsets are solved
// depth-first under a cost limit; exact optima and failed limits (lower
// bounds) are memoized per subset.
class DepthFirst {
 public:
  DepthFirst(const TensorNetwork& net, const SearchConfig& config) : net_(net), config_(config) {
    n_ = net.tensor_count();
    full_ = n_ == 64 ? ~Mask(0) : (Mask(1) << n_) - 1;
    for (IndexId idx = 0; idx < net.index_count(); ++idx) {
      Mask m = 0;
      for (auto t : net.carriers(idx)) m |= Mask(1) << t;
      touch_.push_back(m);
      extents_.push_back(net.extent(idx));
    }
    for (std::size_t t = 0; t < n_; ++t) leaf_sizes_.push_back(net.size_of(net.leaf_head(t)));
    adj_.assign(n_, 0);
    for (Mask m : touch_) {
      for (std::size_t t = 0; t < n_; ++t)
        if (m & (Mask(1) << t)) adj_[t] |= m & ~(Mask(1) << t);
    }
  }

  // limit: exclusive bound on the total; nullopt = unbounded
  std::optional<Count> run(std::optional<Count> limit) {
    global_ = limit;
    return solve(full_, limit);
  }

  const SearchStats& stats() const { return stats_; }

  EinExpr build() const { return build(full_); }


 private:
  struct Memo {
    Count value;   // exact optimum, or a lower bound when !exact
    bool exact = false;
    Mask split = 0;
  };

  struct Split {
    Mask a, b;
    Count step;
  };

  static Mask lowest(Mask s) { return s & (~s + 1); }

  bool connected(Mask s) const {
    if (!s) return false;
    Mask seen = lowest(s), frontier = seen;
    while (frontier) {
      Mask next = 0;
      for (Mask f = frontier; f; f &= f - 1) next |= adj_[__builtin_ctzll(f)];
      next &= s & ~seen;
      seen |= next;
      frontier = next;
    }
    return seen == s;
  }

  // components of s, lowest first
  std::vector<Mask> components(Mask s) const {
    std::vector<Mask> out;
    while (s) {
      Mask comp = lowest(s), frontier = comp;
      while (frontier) {
        Mask next = 0;
        for (Mask f = frontier; f; f &= f - 1) next |= adj_[__builtin_ctzll(f)];
        next &= s & ~comp;
        comp |= next;
        frontier = next;
      }
      out.push_back(comp);
      s &= ~comp;
    }
    return out;
  }

  // indices of the contraction A * B: the head of A|B plus what A and B share
  std::vector<IndexId> step_indices(Mask a, Mask b) const {
    const Mask s = a | b;
    std::vector<IndexId> out;
    for (IndexId i = 0; i < touch_.size(); ++i) {
      const Mask m = touch_[i];
      if (!(m & s)) continue;
      if (net_.is_output(i) || (m & ~s) || ((m & a) && (m & b))) out.push_back(i);
    }
    return out;
  }

  std::vector<IndexId> head_indices(Mask s) const {
    std::vector<IndexId> out;
    for (IndexId i = 0; i < touch_.size(); ++i) {
      const Mask m = touch_[i];
      if ((m & s) && (net_.is_output(i) || (m & ~s))) out.push_back(i);
    }
    return out;
  }

  Split make_split(Mask a, Mask b) const {
    Split sp{a, b, 0};
    const Mask s = a | b;
    std::vector<IndexId> ids;
    if (config_.metric == Metric::flops) {
      ids = step_indices(a, b);
    } else if (!(s == full_ && head_indices(s).empty())) {
      ids = head_indices(s);
    } else {
      return sp;  // scalar root: contributes nothing to the peak
    }
    sp.step = product(extents_, ids);
    return sp;
  }

  void enumerate_connected(Mask s, Mask a, Mask nbr, Mask excluded, std::vector<Split>& out) const {
    const Mask b = s & ~a;
    if (b && connected(b)) out.push_back(make_split(a, b));
    const Mask frontier = nbr & s & ~excluded;
    if (!frontier) return;
    for (Mask sub = frontier; sub; sub = (sub - 1) & frontier) {
      Mask grown_nbr = nbr;
      for (Mask f = sub; f; f &= f - 1) grown_nbr |= adj_[__builtin_ctzll(f)];
      enumerate_connected(s, a | sub, grown_nbr, excluded | frontier, out);
    }
  }

  std::vector<Split> splits(Mask s) const {
    std::vector<Split> out;
    const Mask low = lowest(s);
    if (config_.outer_products) {
      const Mask rest = s & ~low;
      for (Mask sub = rest;; sub = (sub - 1) & rest) {
        if ((low | sub) != s) out.push_back(make_split(low | sub, s & ~(low | sub)));
        if (!sub) break;
      }
    } else if (connected(s)) {
      enumerate_connected(s, low, adj_[__builtin_ctzll(low)], low | ~s, out);
    } else {
      // disconnected pieces: split along whole components
      const auto comps = components(s);
      const std::size_t k = comps.size();
      for (std::uint64_t pick = 0; pick < (std::uint64_t(1) << (k - 1)); ++pick) {
        Mask a = comps[0];
        for (std::size_t c = 1; c < k; ++c)
          if (pick & (std::uint64_t(1) << (c - 1))) a |= comps[c];
        if (a != s) out.push_back(make_split(a, s & ~a));
      }
    }
    std::stable_sort(out.begin(), out.end(), [](const Split& x, const Split& y) { return x.step < y.step; });
    return out;
  }

  Count combine(const Count& x, const Count& y) const {
    if (config_.metric == Metric::flops) return x + y;
    return x < y ? y : x;
  }

  static bool reaches(const Count& value, const std::optional<Count>& limit) { return limit && value >= *limit; }

  // Admissible bound on the best tree for s that ignores the memo, so the
  // set of subsets visited only grows with the bound.
  const Count& lower(Mask s) {
    static const Count zero = 0;
    if ((s & (s - 1)) == 0) return zero;
    auto [it, fresh] = lower_.try_emplace(s);
    if (fresh) {
      it->second = product(extents_, head_indices(s));
      if (config_.metric == Metric::flops) {
        for (Mask f = s; f; f &= f - 1) {
          const auto& leaf = leaf_sizes_[__builtin_ctzll(f)];
          if (leaf > it->second) it->second = leaf;
        }
      }
    }
    return it->second;
  }

  std::optional<Count> solve(Mask s, std::optional<Count> limit) {
    if ((s & (s - 1)) == 0) {
      if (reaches(Count(0), limit)) return std::nullopt;
      return Count(0);
    }
    auto it = memo_.find(s);
    if (it != memo_.end()) {
      if (it->second.exact) {
        if (reaches(it->second.value, limit)) return std::nullopt;
        return it->second.value;
      }
      if (reaches(it->second.value, limit)) return std::nullopt;
    }

    std::optional<Count> best;
    Mask best_split = 0;
    auto current = limit;
    for (const Split& sp : splits(s)) {
      ++stats_.nodes_expanded;
      if (config_.max_nodes && stats_.nodes_expanded > config_.max_nodes)
        throw Error(ErrorKind::budget_exceeded,
                    "exhaustive search exceeded " + std::to_string(config_.max_nodes) + " nodes");
      const Count floor = combine(combine(sp.step, lower(sp.a)), lower(sp.b));
      if (reaches(floor, current)) {
        ++stats_.prunes;
        continue;
      }
      const auto ca = solve(sp.a, global_);
      if (!ca) {
        ++stats_.prunes;
        continue;
      }
      const auto cb = solve(sp.b, global_);
      if (!cb) {
        ++stats_.prunes;
        continue;
      }
      Count total = combine(combine(sp.step, *ca), *cb);
      if (reaches(total, current)) {
        ++stats_.prunes;
        continue;
      }
      best = std::move(total);
      best_split = sp.a;
      current = best;
      if (s == full_) global_ = best;
    }

    Memo& m = memo_[s];
    if (best) {
      m = Memo{*best, true, best_split};
    } else if (limit && (m.exact == false) && *limit > m.value) {
      m.value = *limit;
    }
    return best;
  }

  EinExpr build(Mask s) const {
    if ((s & (s - 1)) == 0) return EinExpr::leaf(net_, static_cast<std::size_t>(__builtin_ctzll(s)));
    const Memo& m = memo_.at(s);
    return EinExpr::contract(net_, build(m.split), build(s & ~m.split));
  }

  const TensorNetwork& net_;
  const SearchConfig& config_;
  std::size_t n_ = 0;
  Mask full_ = 0;
  std::vector<Mask> touch_;
  std::vector<Mask> adj_;
  std::vector<std::uint64_t> extents_;
  std::vector<Count> leaf_sizes_;
  std::unordered_map<Mask, Memo> memo_;
  std::unordered_map<Mask, Count> lower_;
  // best complete total so far (exclusive); only ever decreases, so a subset
  // that fails once never needs another visit
  std::optional<Count> global_;
  SearchStats stats_;
};

SearchResult finish(const TensorNetwork& net, EinExpr tree, SearchStats stats, Metric metric) {
  CostReport report = cost(net, tree);
  stats.best_cost = metric_value(report, metric);
  return {std::move(tree), std::move(report), std::move(stats)};
}

}  // namespace

SearchResult exhaustive_dfs(const TensorNetwork& net, const SearchConfig& config) {
  check_search(net, config);
  if (net.tensor_count() == 1) return finish(net, EinExpr::leaf(net, 0), {}, config.metric);

  DepthFirst search(net, config);
  // the initial bound is inclusive: a tree costing exactly the bound is accepted
  auto bound = initial_bound(net, config);
  if (bound) *bound += 1;
  if (search.run(bound)) return finish(net, search.build(), search.stats(), config.metric);
  if (config.init == InitBound::explicit_value)
    throw Error(ErrorKind::budget_exceeded,
                "no contraction tree within the explicit bound " + to_string(config.explicit_bound));

  // the naive tree may use outer products the restricted search excludes
  DepthFirst rerun(net, config);
  rerun.run(std::nullopt);
  SearchStats stats = rerun.stats();
  stats.nodes_expanded += search.stats().nodes_expanded;
  stats.prunes += search.stats().prunes;
  return finish(net, rerun.build(), stats, config.metric);
}

SearchResult exhaustive_bfs(const TensorNetwork& net, const SearchConfig& config) {
  check_search(net, config);
  if (net.tensor_count() == 1) return finish(net, EinExpr::leaf(net, 0), {}, config.metric);

  const std::size_t n = net.tensor_count();
  SubsetModel model(net);
  SearchStats stats;

  std::uint64_t growth = 2;
  for (const auto& idx : net.indices()) growth = std::max(growth, idx.extent);

  struct Entry {
    Count cost;
    Mask left = 0, right = 0;
  };
  // one sorted table per subset size
  using Level = std::vector<std::pair<Mask, Entry>>;

  std::optional<Count> seeded = config.init == InitBound::naive ? std::nullopt : initial_bound(net, config);
  Count cap;
  if (seeded) {
    cap = *seeded;
  } else {
    // cheapest single step: no full tree costs less
    std::optional<Count> cheapest;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        Count s = model.step(config.metric, Mask(1) << a, Mask(1) << b);
        if (!cheapest || s < *cheapest) cheapest = s;
      }
    cap = *cheapest > 0 ? *cheapest : Count(1);
  }

  auto allowed = [&](Mask a, Mask b) {
    if (config.outer_products || model.adjacent(a, b)) return true;
    return model.closed(a) && model.closed(b);
  };

  for (;;) {
    std::vector<Level> levels(n + 1);
    for (std::size_t t = 0; t < n; ++t) levels[1].push_back({Mask(1) << t, Entry{0}});
    std::sort(levels[1].begin(), levels[1].end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    for (std::size_t c = 2; c <= n; ++c) {
      std::unordered_map<Mask, std::size_t> slot;
      Level& out = levels[c];
      for (std::size_t d = 1; d <= c / 2; ++d) {
        const Level& small = levels[d];
        const Level& large = levels[c - d];
        for (const auto& [ma, ea] : small) {
          for (const auto& [mb, eb] : large) {
            if (ma & mb) continue;
            if (d == c - d && ma >= mb) continue;
            if (!allowed(ma, mb)) continue;
            ++stats.nodes_expanded;
            if (config.max_nodes && stats.nodes_expanded > config.max_nodes)
              throw Error(ErrorKind::budget_exceeded, "exhaustive search exceeded " +
                                                          std::to_string(config.max_nodes) + " nodes");
            Count total = SubsetModel::accumulate(config.metric, ea.cost, eb.cost);
            total = SubsetModel::accumulate(config.metric, total, model.step(config.metric, ma, mb));
            if (total > cap) {
              ++stats.prunes;
              continue;
            }
            const Mask s = ma | mb;
            auto [it, inserted] = slot.try_emplace(s, out.size());
            if (inserted) {
              out.push_back({s, Entry{std::move(total), std::min(ma, mb), std::max(ma, mb)}});
            } else if (total < out[it->second].second.cost) {
              out[it->second].second = Entry{std::move(total), std::min(ma, mb), std::max(ma, mb)};
            } else {
              ++stats.prunes;
            }
          }
        }
      }
      std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    }

    if (!levels[n].empty()) {
      std::unordered_map<Mask, const Entry*> table;
      for (const auto& level : levels)
        for (const auto& [m, e] : level) table.emplace(m, &e);
      std::vector<std::pair<Mask, Mask>> steps;
      std::vector<Mask> pending{model.full()};
      while (!pending.empty()) {
        const Mask m = pending.back();
        pending.pop_back();
        const Entry* e = table.at(m);
        if (!e->left) continue;
        steps.emplace_back(e->left, e->right);
        pending.push_back(e->left);
        pending.push_back(e->right);
      }
      std::reverse(steps.begin(), steps.end());
      return finish(net, model.build(steps), std::move(stats), config.metric);
    }
    cap *= growth;
  }
}

}  // namespace tnpath
