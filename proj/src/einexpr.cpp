#include "tnpath/einexpr.hpp"

#include <algorithm>
#include <map>

#include "tnpath/error.hpp"

namespace tnpath {

EinExpr EinExpr::leaf(const TensorNetwork& net, std::size_t tensor) {
  if (tensor >= net.tensor_count())
    throw Error(ErrorKind::invalid_tree, "leaf refers to tensor " + std::to_string(tensor) +
                                             " but the network has " +
                                             std::to_string(net.tensor_count()));
  auto node = std::make_shared<Node>();
  node->head = net.leaf_head(tensor);
  node->counts.assign(node->head.size(), 1);
  node->tensor = tensor;
  return EinExpr(std::move(node));
}

EinExpr EinExpr::contract(const TensorNetwork& net, const EinExpr& a, const EinExpr& b) {
  auto node = std::make_shared<Node>();
  const auto& ha = a.head();
  const auto& hb = b.head();
  const auto ca = a.carrier_counts();
  const auto cb = b.carrier_counts();
  node->head.reserve(ha.size() + hb.size());
  node->counts.reserve(ha.size() + hb.size());

  auto emit = [&](IndexId idx, std::uint32_t count) {
    if (!net.is_output(idx) && count == net.carriers(idx).size()) return;
    node->head.push_back(idx);
    node->counts.push_back(count);
  };
  std::size_t i = 0, j = 0;
  while (i < ha.size() || j < hb.size()) {
    if (j == hb.size() || (i < ha.size() && ha[i] < hb[j])) {
      emit(ha[i], ca[i]);
      ++i;
    } else if (i == ha.size() || hb[j] < ha[i]) {
      emit(hb[j], cb[j]);
      ++j;
    } else {
      emit(ha[i], ca[i] + cb[j]);
      ++i;
      ++j;
    }
  }
  node->args = {a, b};
  node->leaves = a.leaf_count() + b.leaf_count();
  return EinExpr(std::move(node));
}

EinExpr EinExpr::contract_all(const TensorNetwork& net, std::vector<EinExpr> args) {
  if (args.empty()) throw Error(ErrorKind::invalid_tree, "contraction without operands");
  if (args.size() == 1) return args.front();
  std::map<IndexId, std::uint32_t> counts;
  std::size_t leaves = 0;
  for (const auto& arg : args) {
    for (std::size_t k = 0; k < arg.head().size(); ++k) counts[arg.head()[k]] += arg.carrier_counts()[k];
    leaves += arg.leaf_count();
  }
  auto node = std::make_shared<Node>();
  for (auto [idx, count] : counts) {
    if (!net.is_output(idx) && count == net.carriers(idx).size()) continue;
    node->head.push_back(idx);
    node->counts.push_back(count);
  }
  node->args = std::move(args);
  node->leaves = leaves;
  return EinExpr(std::move(node));
}

EinExpr EinExpr::naive(const TensorNetwork& net) {
  std::vector<EinExpr> leaves;
  leaves.reserve(net.tensor_count());
  for (std::size_t t = 0; t < net.tensor_count(); ++t) leaves.push_back(leaf(net, t));
  return contract_all(net, std::move(leaves));
}

IndexSet EinExpr::summed() const {
  if (is_leaf()) return {};
  IndexSet all;
  for (const auto& arg : args()) all = set_union(all, arg.head());
  return set_difference(all, head());
}

IndexSet summed_indices(const EinExpr& node) { return node.summed(); }

void for_each_branch(const EinExpr& tree, const std::function<void(const EinExpr&)>& fn) {
  // explicit stack: greedy trees over thousands of tensors can be deep
  struct Frame {
    const EinExpr* node;
    std::size_t next;
  };
  std::vector<Frame> stack{{&tree, 0}};
  while (!stack.empty()) {
    auto& top = stack.back();
    if (top.next < top.node->args().size()) {
      const EinExpr* child = &top.node->args()[top.next++];
      if (!child->is_leaf()) stack.push_back({child, 0});
      continue;
    }
    const EinExpr* done = top.node;
    stack.pop_back();
    if (!done->is_leaf()) fn(*done);
  }
}

std::vector<std::size_t> leaves_of(const EinExpr& tree) {
  std::vector<std::size_t> out;
  std::vector<const EinExpr*> stack{&tree};
  while (!stack.empty()) {
    const EinExpr* e = stack.back();
    stack.pop_back();
    if (e->is_leaf()) {
      out.push_back(e->tensor());
      continue;
    }
    for (auto it = e->args().rbegin(); it != e->args().rend(); ++it) stack.push_back(&*it);
  }
  return out;
}

void validate_tree(const TensorNetwork& net, const EinExpr& tree, bool require_binary) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::invalid_tree, what); };

  std::vector<int> seen(net.tensor_count(), 0);
  for (auto t : leaves_of(tree)) {
    if (t >= seen.size()) fail("leaf refers to unknown tensor " + std::to_string(t));
    if (seen[t]++) fail("tensor " + std::to_string(t) + " appears more than once");
  }
  for (std::size_t t = 0; t < seen.size(); ++t) {
    if (!seen[t]) fail("tensor " + std::to_string(t) + " is missing from the tree");
  }

  // Recompute every head from scratch: per index, count leaves below each node.
  std::function<std::map<IndexId, std::uint32_t>(const EinExpr&)> visit =
      [&](const EinExpr& e) -> std::map<IndexId, std::uint32_t> {
    std::map<IndexId, std::uint32_t> live;
    if (e.is_leaf()) {
      if (e.head() != net.leaf_head(e.tensor()))
        fail("leaf " + std::to_string(e.tensor()) + " head differs from its tensor");
      for (auto idx : e.head()) live[idx] = 1;
      return live;
    }
    if (e.args().size() < 2) fail("branch with fewer than two operands");
    if (require_binary && e.args().size() != 2)
      throw Error(ErrorKind::unsupported_arity, "branch with " + std::to_string(e.args().size()) +
                                                    " operands in a binary tree");
    for (const auto& arg : e.args()) {
      for (auto [idx, c] : visit(arg)) live[idx] += c;
    }
    IndexSet head;
    for (auto it = live.begin(); it != live.end();) {
      if (!net.is_output(it->first) && it->second == net.carriers(it->first).size()) {
        it = live.erase(it);
      } else {
        head.push_back(it->first);
        ++it;
      }
    }
    if (head != e.head()) fail("branch head inconsistent with its operands");
    return live;
  };
  visit(tree);

  IndexSet out(net.output().begin(), net.output().end());
  std::sort(out.begin(), out.end());
  if (tree.head() != out) fail("root head differs from the network output");
}

EinExpr binarize(const TensorNetwork& net, const EinExpr& tree) {
  if (tree.is_leaf()) return tree;
  std::vector<EinExpr> args;
  for (const auto& a : tree.args()) args.push_back(binarize(net, a));
  EinExpr acc = args.front();
  for (std::size_t k = 1; k < args.size(); ++k) acc = EinExpr::contract(net, acc, args[k]);
  return acc;
}

EinExpr lift(const TensorNetwork& net, std::span<const std::uint32_t> positions, const EinExpr& tree) {
  if (tree.is_leaf()) return EinExpr::leaf(net, positions[tree.tensor()]);
  std::vector<EinExpr> args;
  for (const auto& a : tree.args()) args.push_back(lift(net, positions, a));
  if (args.size() == 2) return EinExpr::contract(net, args[0], args[1]);
  return EinExpr::contract_all(net, std::move(args));
}

}  // namespace tnpath
