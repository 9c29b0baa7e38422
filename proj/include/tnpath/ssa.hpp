#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "tnpath/einexpr.hpp"

namespace tnpath {

/// Flat path encoding: ids 0..n-1 are the input tensors, the k-th pair
/// produces id n+k. Every id is consumed at most once.
struct SsaPath {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  friend bool operator==(const SsaPath&, const SsaPath&) = default;
};

/// Post-order serialization, left subtree before right.
/// Throws Error(unsupported_arity) on n-ary branches.
SsaPath tree_to_ssa(const EinExpr& tree);

/// Rebuilds the tree for a full contraction path over `net`.
/// Throws Error(malformed_path) on reused, unknown, or missing ids.
EinExpr ssa_to_tree(const SsaPath& path, const TensorNetwork& net);

/// True when both trees produce the same multiset of intermediate heads.
bool intermediates_equal(const EinExpr& a, const EinExpr& b);

}  // namespace tnpath
