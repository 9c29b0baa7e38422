#include <doctest.h>

#include <chrono>

#include "support.hpp"
#include "tnpath/exhaustive.hpp"
#include "tnpath/generator.hpp"
#include "tnpath/greedy.hpp"
#include "tnpath/io.hpp"
#include "tnpath/ssa.hpp"

using namespace tnpath;
using namespace tnpath::testing;

namespace {

// Quadratic-per-step greedy straight from the rule, over SSA ids.
SsaPath reference_greedy(const TensorNetwork& net) {
  struct Live {
    std::size_t id;
    EinExpr expr;
  };
  std::vector<Live> live;
  for (std::size_t t = 0; t < net.tensor_count(); ++t) live.push_back({t, EinExpr::leaf(net, t)});
  std::size_t next = net.tensor_count();
  SsaPath path;
  auto size = [&](const EinExpr& e) { return net.size_of(e.head()); };
  while (live.size() > 1) {
    std::optional<std::tuple<Count, std::size_t, std::size_t>> best;
    std::size_t bx = 0, by = 0;
    for (std::size_t x = 0; x < live.size(); ++x)
      for (std::size_t y = x + 1; y < live.size(); ++y) {
        if (set_intersection(live[x].expr.head(), live[y].expr.head()).empty()) continue;
        const EinExpr c = EinExpr::contract(net, live[x].expr, live[y].expr);
        const Count s = size(c) - size(live[x].expr) - size(live[y].expr);
        std::tuple<Count, std::size_t, std::size_t> key{s, std::min(live[x].id, live[y].id),
                                                        std::max(live[x].id, live[y].id)};
        if (!best || key < *best) {
          best = key;
          bx = x;
          by = y;
        }
      }
    if (!best) {
      // two smallest, ties by id
      std::vector<std::size_t> order(live.size());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
      std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) {
        const Count sp = size(live[p].expr), sq = size(live[q].expr);
        return sp < sq || (sp == sq && live[p].id < live[q].id);
      });
      bx = std::min(order[0], order[1]);
      by = std::max(order[0], order[1]);
    }
    if (live[bx].id > live[by].id) std::swap(bx, by);
    path.pairs.emplace_back(live[bx].id, live[by].id);
    EinExpr c = EinExpr::contract(net, live[bx].expr, live[by].expr);
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(std::max(bx, by)));
    live[std::min(bx, by)] = {next++, c};
  }
  return path;
}

// Tree shape with children ordered, e.g. "((0 1) 4)".
std::string shape(const EinExpr& e) {
  if (e.args().empty()) return std::to_string(e.tensor());
  std::vector<std::string> parts;
  for (const auto& a : e.args()) parts.push_back(shape(a));
  std::sort(parts.begin(), parts.end());
  std::string out = "(";
  for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? " " : "") + parts[k];
  return out + ")";
}

std::string reference_shape(const TensorNetwork& net) { return shape(ssa_to_tree(reference_greedy(net), net)); }

}  // namespace

TEST_CASE("ring6: first choice and tie-breaking") {
  const auto net = ring6_network();
  // A.B, A.E, D.F and E.F all score 8 - 4 - 8 = -4; (0,1) is the smallest id pair
  std::vector<std::pair<std::size_t, std::size_t>> tied;
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = a + 1; b < 6; ++b) {
      const auto la = EinExpr::leaf(net, a), lb = EinExpr::leaf(net, b);
      if (set_intersection(la.head(), lb.head()).empty()) continue;
      const auto c = EinExpr::contract(net, la, lb);
      if (net.size_of(c.head()) - net.size_of(la.head()) - net.size_of(lb.head()) == -4) tied.emplace_back(a, b);
    }
  CHECK(tied == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 4}, {3, 5}, {4, 5}});

  GreedyConfig config;
  config.check_priority = true;
  const auto r = greedy(net, config);
  const auto path = tree_to_ssa(r.tree);
  REQUIRE(!path.pairs.empty());
  CHECK(reference_greedy(net).pairs[0] == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(shape(r.tree) == reference_shape(net));
  CHECK(r.cost.flops >= 100);
  validate_tree(net, r.tree);
}

TEST_CASE("heap selection matches a full rescan") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 3 + seed % 20;
    const auto net = generate({n, std::min(3.0, double(n - 1)), seed % 4, 1, 6, seed});
    GreedyConfig config;
    config.check_priority = true;
    const auto r = greedy(net, config);
    validate_tree(net, r.tree);
    CHECK(shape(r.tree) == reference_shape(net));
    CHECK(r.stats.pushes >= net.tensor_count() - 1);
  }
}

TEST_CASE("hyperedges keep priorities current") {
  // b has three carriers; once two of them merge, the remaining pair sums it
  const auto net = parse_einsum("ab,bc,bd,de,ef->acf", {{"a", 2}, {"b", 4}, {"c", 3}, {"d", 2}, {"e", 5}, {"f", 2}});
  GreedyConfig config;
  config.check_priority = true;
  const auto r = greedy(net, config);
  validate_tree(net, r.tree);
  CHECK(shape(r.tree) == reference_shape(net));
}

TEST_CASE("outer products only between components") {
  const auto net = parse_einsum("ab,bc,de,ef,g->acdfg",
                                {{"a", 2}, {"b", 3}, {"c", 2}, {"d", 5}, {"e", 2}, {"f", 3}, {"g", 7}});
  const auto r = greedy(net);
  validate_tree(net, r.tree);
  CHECK(r.stats.outer_products == 2);
  CHECK(shape(r.tree) == reference_shape(net));
}

TEST_CASE("greedy never beats the optimum") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const std::size_t n = 4 + seed % 6;
    const auto net = generate({n, std::min(3.0, double(n - 1)), seed % 3, 1, 5, 100 + seed});
    const auto g = greedy(net);
    const auto opt = exhaustive_dfs(net);
    CHECK(g.cost.flops >= opt.cost.flops);
  }
}

TEST_CASE("sampled greedy") {
  const auto net = generate({40, 3.0, 2, 2, 5, 7});
  GreedyConfig config;
  config.samples = 16;
  config.temperature = 1.5;
  config.seed = 11;

  const auto a = sampled_greedy(net, config);
  const auto b = sampled_greedy(net, config);
  CHECK(tree_to_ssa(a.tree) == tree_to_ssa(b.tree));
  CHECK(a.sample_flops == b.sample_flops);
  CHECK(a.warnings.empty());
  REQUIRE(a.sample_flops.size() == 16);

  // sample 0 is the deterministic pass; the result is the best sample
  CHECK(a.sample_flops[0] == greedy(net).cost.flops);
  for (const auto& f : a.sample_flops) CHECK(a.cost.flops <= f);
  CHECK(a.cost.flops == a.sample_flops[a.best_sample]);
  validate_tree(net, a.tree);

  // stochastic passes actually explore
  bool varied = false;
  for (const auto& f : a.sample_flops) varied |= f != a.sample_flops[0];
  CHECK(varied);

  config.seed = 12;
  const auto c = sampled_greedy(net, config);
  CHECK(c.sample_flops[0] == a.sample_flops[0]);
  CHECK(c.sample_flops != a.sample_flops);
}

TEST_CASE("sampled greedy configuration") {
  const auto net = ring6_network();
  GreedyConfig config;
  config.samples = 4;
  const auto r = sampled_greedy(net, config);
  CHECK(r.warnings.size() == 1);
  for (const auto& f : r.sample_flops) CHECK(f == r.sample_flops[0]);

  config.samples = 0;
  CHECK_THROWS_AS(sampled_greedy(net, config), Error);
  config.samples = 2;
  config.temperature = -1.0;
  CHECK_THROWS_AS(sampled_greedy(net, config), Error);
}

TEST_CASE("large networks") {
  const auto net = generate({1024, 3.0, 4, 2, 4, 3});
  const auto start = std::chrono::steady_clock::now();
  const auto r = greedy(net);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  validate_tree(net, r.tree);
  CHECK(seconds < 5.0);
  CHECK(r.tree.leaf_count() == 1024);
}
