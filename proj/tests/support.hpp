#pragma once

// Test-only helpers: fixtures and oracles that do not share code paths with
// the optimizers they check.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <string>
#include <vector>

#include "tnpath/einexpr.hpp"
#include "tnpath/error.hpp"
#include "tnpath/io.hpp"
#include "tnpath/rng.hpp"

namespace tnpath::testing {

// T = A_im B_ijp C_jkn D_klp E_mno F_lo, every extent 2.
inline TensorNetwork ring6_network(std::uint64_t extent = 2) {
  ExtentMap ext;
  for (char c : std::string("ijklmnop")) ext[std::string(1, c)] = extent;
  return parse_einsum("im,ijp,jkn,klp,mno,lo->", ext);
}

// Six index orderings that all describe the same tree shape.
inline const std::vector<std::vector<std::string>> kRing6Orderings = {
    {"m", "o", "j", "pk", "inl"}, {"m", "j", "o", "pk", "inl"}, {"m", "j", "pk", "o", "inl"},
    {"j", "pk", "m", "o", "inl"}, {"j", "m", "pk", "o", "inl"}, {"j", "m", "o", "pk", "inl"},
};

inline IndexSet ids(const TensorNetwork& net, const std::string& names) {
  IndexSet out;
  for (char c : names) out.push_back(*net.find_index(std::string(1, c)));
  std::sort(out.begin(), out.end());
  return out;
}

// Builds a tree by summing index groups in order, e.g. {"m","o","j","pk","inl"}.
// Each group is summed by contracting the two live tensors carrying its first
// index; the group must then be exactly what that contraction sums.
inline EinExpr tree_from_index_order(const TensorNetwork& net, const std::vector<std::string>& groups) {
  std::vector<EinExpr> live;
  for (std::size_t t = 0; t < net.tensor_count(); ++t) live.push_back(EinExpr::leaf(net, t));
  for (const auto& g : groups) {
    const IndexId first = *net.find_index(std::string(1, g[0]));
    std::vector<std::size_t> hit;
    for (std::size_t k = 0; k < live.size(); ++k) {
      if (std::binary_search(live[k].head().begin(), live[k].head().end(), first)) hit.push_back(k);
    }
    if (hit.size() != 2) throw std::logic_error("group '" + g + "' is not carried by exactly two tensors");
    EinExpr c = EinExpr::contract(net, live[hit[0]], live[hit[1]]);
    if (c.summed() != ids(net, g)) throw std::logic_error("group '" + g + "' is not what the step sums");
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(hit[1]));
    live[hit[0]] = c;
  }
  if (live.size() != 1) throw std::logic_error("ordering leaves more than one tensor");
  return live.front();
}

inline EinExpr left_deep(const TensorNetwork& net) {
  EinExpr acc = EinExpr::leaf(net, 0);
  for (std::size_t t = 1; t < net.tensor_count(); ++t) acc = EinExpr::contract(net, acc, EinExpr::leaf(net, t));
  return acc;
}

// Random full binary tree: repeatedly join two random live subtrees.
inline EinExpr random_tree(const TensorNetwork& net, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<EinExpr> live;
  for (std::size_t t = 0; t < net.tensor_count(); ++t) live.push_back(EinExpr::leaf(net, t));
  while (live.size() > 1) {
    auto a = uniform_below(rng, live.size());
    auto b = uniform_below(rng, live.size() - 1);
    if (b >= a) ++b;
    EinExpr c = EinExpr::contract(net, live[a], live[b]);
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(std::max(a, b)));
    live[std::min(a, b)] = c;
  }
  return live.front();
}

// --- subset oracles --------------------------------------------------------
// Heads and flops straight from the definition: an index survives a subset S
// iff it touches S and is open or also touches the complement.

class SubsetOracle {
 public:
  using Mask = std::uint64_t;

  explicit SubsetOracle(const TensorNetwork& net) : net_(net) {
    n_ = net.tensor_count();
    full_ = (Mask(1) << n_) - 1;
    for (IndexId i = 0; i < net.index_count(); ++i) {
      Mask m = 0;
      for (auto t : net.carriers(i)) m |= Mask(1) << t;
      touch_.push_back(m);
    }
    // components by flood fill over shared indices
    Mask seen = 0;
    for (std::size_t t = 0; t < n_; ++t) {
      if (seen & (Mask(1) << t)) continue;
      Mask comp = Mask(1) << t, prev = 0;
      while (comp != prev) {
        prev = comp;
        for (Mask m : touch_)
          if (m & comp) comp |= m;
      }
      comps_.push_back(comp);
      seen |= comp;
    }
  }

  std::set<IndexId> head(Mask s) const {
    std::set<IndexId> h;
    for (IndexId i = 0; i < touch_.size(); ++i) {
      if ((touch_[i] & s) && (net_.is_output(i) || (touch_[i] & ~s & full_))) h.insert(i);
    }
    return h;
  }

  Count flops(Mask a, Mask b) const {
    auto h = head(a);
    auto hb = head(b);
    h.insert(hb.begin(), hb.end());
    Count f = 1;
    for (auto i : h) f *= net_.extent(i);
    return f;
  }

  bool shares(Mask a, Mask b) const {
    auto ha = head(a);
    for (auto i : head(b))
      if (ha.count(i)) return true;
    return false;
  }

  bool closed(Mask s) const {
    for (Mask c : comps_)
      if ((c & s) && (c & ~s)) return false;
    return true;
  }

  bool connected(Mask s) const {
    Mask start = s & (~s + 1), comp = start, prev = 0;
    while (comp != prev) {
      prev = comp;
      for (Mask m : touch_)
        if (m & comp) comp |= (m & s);
    }
    return comp == s;
  }

  // may A and B be joined when outer products are excluded
  bool allowed(Mask a, Mask b) const { return shares(a, b) || (closed(a) && closed(b)); }

  // Minimal total flops over all binary trees (restricted if !outer).
  Count dp_optimum(bool outer) {
    memo_.clear();
    return *best(full_, outer);
  }

  // Literal enumeration of every binary tree (n <= 8): calls fn(total flops, restricted-ok).
  void enumerate(const std::function<void(const Count&, bool)>& fn) const {
    struct Tree {
      Count flops;
      bool ok;
    };
    std::function<std::vector<Tree>(Mask)> trees = [&](Mask s) -> std::vector<Tree> {
      if ((s & (s - 1)) == 0) return {Tree{0, true}};
      std::vector<Tree> out;
      const Mask low = s & (~s + 1);
      const Mask rest = s & ~low;
      // every A containing the lowest element, B non-empty
      for (Mask sub = rest;; sub = (sub - 1) & rest) {
        const Mask a = low | sub;
        const Mask b = s & ~a;
        if (b) {
          const bool here = allowed(a, b) && buildable(a) && buildable(b);
          const Count step = flops(a, b);
          for (const auto& ta : trees(a))
            for (const auto& tb : trees(b)) out.push_back({ta.flops + tb.flops + step, ta.ok && tb.ok && here});
        }
        if (sub == 0) break;
      }
      return out;
    };
    for (const auto& t : trees(full_)) fn(t.flops, t.ok);
  }

  bool buildable(Mask s) const { return connected(s) || closed(s); }

  // Streams every binary tree without storing them and returns the minimal
  // flops over all trees and over restricted ones. Flops must fit in 64 bits.
  struct Minima {
    std::uint64_t all = ~std::uint64_t(0);
    std::uint64_t restricted = ~std::uint64_t(0);
    std::uint64_t trees = 0;
  };

  Minima brute_force() const {
    Minima m;
    visit(full_, [&](std::uint64_t flops, bool ok) {
      ++m.trees;
      m.all = std::min(m.all, flops);
      if (ok) m.restricted = std::min(m.restricted, flops);
    });
    return m;
  }

 private:
  // non-owning callable reference; the recursion nests lambdas
  struct Sink {
    const void* obj;
    void (*call)(const void*, std::uint64_t, bool);
    template <class F>
    Sink(const F& f)  // NOLINT: implicit on purpose
        : obj(&f), call([](const void* o, std::uint64_t x, bool ok) { (*static_cast<const F*>(o))(x, ok); }) {}
    void operator()(std::uint64_t x, bool ok) const { call(obj, x, ok); }
  };

  struct Split {
    Mask a, b;
    std::uint64_t step;
    bool ok;
  };

  const std::vector<Split>& splits_of(Mask s) const {
    auto it = splits_.find(s);
    if (it != splits_.end()) return it->second;
    std::vector<Split> out;
    const Mask low = s & (~s + 1);
    const Mask rest = s & ~low;
    for (Mask sub = rest;; sub = (sub - 1) & rest) {
      const Mask a = low | sub;
      const Mask b = s & ~a;
      if (b) out.push_back({a, b, static_cast<std::uint64_t>(flops(a, b)), allowed(a, b) && buildable(a) && buildable(b)});
      if (sub == 0) break;
    }
    return splits_.emplace(s, std::move(out)).first->second;
  }

  void visit(Mask s, Sink fn) const {
    if ((s & (s - 1)) == 0) {
      fn(0, true);
      return;
    }
    for (const Split& sp : splits_of(s)) {
      visit(sp.a, [&](std::uint64_t fa, bool oka) {
        visit(sp.b, [&](std::uint64_t fb, bool okb) { fn(fa + fb + sp.step, sp.ok && oka && okb); });
      });
    }
  }

  std::optional<Count> best(Mask s, bool outer) {
    if ((s & (s - 1)) == 0) return Count(0);
    if (auto it = memo_.find(s); it != memo_.end()) return it->second;
    std::optional<Count> result;
    const Mask low = s & (~s + 1);
    const Mask rest = s & ~low;
    for (Mask sub = rest;; sub = (sub - 1) & rest) {
      const Mask a = low | sub;
      const Mask b = s & ~a;
      if (b && (outer || (buildable(a) && buildable(b) && allowed(a, b)))) {
        auto ba = best(a, outer);
        auto bb = best(b, outer);
        if (ba && bb) {
          Count total = *ba + *bb + flops(a, b);
          if (!result || total < *result) result = total;
        }
      }
      if (sub == 0) break;
    }
    memo_[s] = result;
    return result;
  }

  const TensorNetwork& net_;
  std::size_t n_ = 0;
  Mask full_ = 0;
  std::vector<Mask> touch_;
  std::vector<Mask> comps_;
  std::map<Mask, std::optional<Count>> memo_;
  mutable std::unordered_map<Mask, std::vector<Split>> splits_;
};

}  // namespace tnpath::testing
