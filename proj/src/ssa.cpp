#include "tnpath/ssa.hpp"

#include <algorithm>
#include <optional>

#include "tnpath/error.hpp"

namespace tnpath {

SsaPath tree_to_ssa(const EinExpr& tree) {
  SsaPath path;
  if (tree.is_leaf()) return path;
  const std::size_t n = tree.leaf_count();
  std::size_t next = n;

  // iterative post-order; each branch yields the SSA id of its result
  struct Frame {
    const EinExpr* node;
    std::size_t child = 0;
    std::size_t ids[2] = {0, 0};
  };
  std::vector<Frame> stack;
  stack.push_back({&tree});
  std::size_t returned = 0;
  while (!stack.empty()) {
    auto& top = stack.back();
    if (top.node->args().size() != 2)
      throw Error(ErrorKind::unsupported_arity, "cannot serialize a branch with " +
                                                    std::to_string(top.node->args().size()) +
                                                    " operands");
    if (top.child < 2) {
      const EinExpr& c = top.node->args()[top.child];
      if (c.is_leaf()) {
        top.ids[top.child++] = c.tensor();
      } else {
        stack.push_back({&c});
      }
      continue;
    }
    path.pairs.emplace_back(top.ids[0], top.ids[1]);
    returned = next++;
    stack.pop_back();
    if (!stack.empty()) {
      auto& parent = stack.back();
      parent.ids[parent.child++] = returned;
    }
  }
  return path;
}

EinExpr ssa_to_tree(const SsaPath& path, const TensorNetwork& net) {
  const std::size_t n = net.tensor_count();
  if (n == 0) throw Error(ErrorKind::malformed_path, "network has no tensors");
  if (path.pairs.size() != n - 1)
    throw Error(ErrorKind::malformed_path, "path has " + std::to_string(path.pairs.size()) +
                                               " pairs, a full contraction of " + std::to_string(n) +
                                               " tensors needs " + std::to_string(n - 1));
  std::vector<std::optional<EinExpr>> slots;
  slots.reserve(2 * n - 1);
  for (std::size_t t = 0; t < n; ++t) slots.emplace_back(EinExpr::leaf(net, t));

  for (std::size_t k = 0; k < path.pairs.size(); ++k) {
    auto [a, b] = path.pairs[k];
    auto take = [&](std::size_t id) {
      if (id >= slots.size())
        throw Error(ErrorKind::malformed_path, "pair " + std::to_string(k) + " uses id " +
                                                   std::to_string(id) + " before it exists");
      if (!slots[id])
        throw Error(ErrorKind::malformed_path,
                    "pair " + std::to_string(k) + " reuses id " + std::to_string(id));
      EinExpr e = std::move(*slots[id]);
      slots[id].reset();
      return e;
    };
    if (a == b)
      throw Error(ErrorKind::malformed_path, "pair " + std::to_string(k) + " contracts id " +
                                                 std::to_string(a) + " with itself");
    EinExpr ea = take(a);
    EinExpr eb = take(b);
    slots.emplace_back(EinExpr::contract(net, ea, eb));
  }
  return std::move(*slots.back());
}

bool intermediates_equal(const EinExpr& a, const EinExpr& b) {
  auto heads = [](const EinExpr& t) {
    std::vector<IndexSet> out;
    for_each_branch(t, [&](const EinExpr& node) { out.push_back(node.head()); });
    std::sort(out.begin(), out.end());
    return out;
  };
  return heads(a) == heads(b);
}

}  // namespace tnpath
