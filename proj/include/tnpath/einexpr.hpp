#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "tnpath/network.hpp"

namespace tnpath {

/// Contraction tree node. A leaf stands for one input tensor; a branch
/// contracts its children, summing every index that no tensor outside the
/// subtree carries and that is not an output of the network.
///
/// Values are immutable and share structure, so copies are cheap.
class EinExpr {
 public:
  static EinExpr leaf(const TensorNetwork& net, std::size_t tensor);

  /// Binary contraction. The head is derived from the children.
  static EinExpr contract(const TensorNetwork& net, const EinExpr& a, const EinExpr& b);

  /// n-ary contraction of all `args` at once.
  static EinExpr contract_all(const TensorNetwork& net, std::vector<EinExpr> args);

  /// The unoptimized tree: every tensor contracted in a single node.
  static EinExpr naive(const TensorNetwork& net);

  bool is_leaf() const { return node_->args.empty(); }
  const IndexSet& head() const { return node_->head; }
  std::span<const EinExpr> args() const { return node_->args; }
  std::size_t tensor() const { return node_->tensor; }
  std::size_t leaf_count() const { return node_->leaves; }

  /// Indices removed at this node: union of the children's heads minus head.
  IndexSet summed() const;

  /// Number of leaves below this node carrying each head index (parallel to head()).
  std::span<const std::uint32_t> carrier_counts() const { return node_->counts; }

 private:
  struct Node {
    IndexSet head;
    std::vector<std::uint32_t> counts;
    std::vector<EinExpr> args;
    std::size_t tensor = 0;
    std::size_t leaves = 1;
  };

  explicit EinExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

IndexSet summed_indices(const EinExpr& node);

/// Visits branch nodes children-first, left to right.
void for_each_branch(const EinExpr& tree, const std::function<void(const EinExpr&)>& fn);

/// Leaf tensor positions in left-to-right order.
std::vector<std::size_t> leaves_of(const EinExpr& tree);

/// Checks the tree invariants against `net`: each tensor is a leaf exactly
/// once, leaf heads match their tensors, every branch head equals the
/// summed-index rule applied to its children, the root head is the network
/// output, and (optionally) every branch is binary. Throws Error(invalid_tree).
void validate_tree(const TensorNetwork& net, const EinExpr& tree, bool require_binary = true);

/// Rewrites n-ary branches as left-deep chains of binary contractions in
/// argument order.
EinExpr binarize(const TensorNetwork& net, const EinExpr& tree);

/// Maps the leaves of a tree built over `sub` (sub tensor i = positions[i] of
/// `net`) onto `net`, recomputing heads.
EinExpr lift(const TensorNetwork& net, std::span<const std::uint32_t> positions, const EinExpr& tree);

}  // namespace tnpath
