#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tnpath/count.hpp"

namespace tnpath {

using IndexId = std::uint32_t;

// Sorted, duplicate-free list of index ids.
using IndexSet = std::vector<IndexId>;

using ExtentMap = std::map<std::string, std::uint64_t, std::less<>>;

struct Index {
  std::string name;
  std::uint64_t extent = 1;
};

struct TensorSig {
  std::int64_t id = 0;
  std::vector<IndexId> indices;  // in declaration order
};

// Input description for TensorNetwork::from_names.
struct NamedTensor {
  std::int64_t id = 0;
  std::vector<std::string> indices;
};

/// A tensor network without numeric data: tensor signatures, index extents,
/// and the open indices of the final result.
///
/// Tensors are addressed by position (0..n-1); this position is also the SSA
/// id of the tensor in contraction paths. Immutable after construction.
class TensorNetwork {
 public:
  TensorNetwork() = default;

  /// Validates every network invariant and throws Error(invalid_network) on
  /// the first violation.
  TensorNetwork(std::vector<Index> indices, std::vector<TensorSig> tensors,
                std::vector<IndexId> output);

  static TensorNetwork from_names(const std::vector<NamedTensor>& tensors,
                                  const ExtentMap& extents,
                                  const std::vector<std::string>& output);

  std::size_t tensor_count() const { return tensors_.size(); }
  std::size_t index_count() const { return indices_.size(); }

  std::span<const TensorSig> tensors() const { return tensors_; }
  const TensorSig& tensor(std::size_t pos) const { return tensors_.at(pos); }

  std::span<const Index> indices() const { return indices_; }
  const Index& index(IndexId id) const { return indices_.at(id); }
  std::uint64_t extent(IndexId id) const { return indices_[id].extent; }
  std::optional<IndexId> find_index(std::string_view name) const;

  std::span<const IndexId> output() const { return output_; }
  bool is_output(IndexId id) const { return is_output_[id]; }

  /// Positions of the tensors carrying an index, ascending.
  std::span<const std::uint32_t> carriers(IndexId id) const { return carriers_[id]; }

  /// The index set of a leaf tensor.
  const IndexSet& leaf_head(std::size_t pos) const { return leaf_heads_.at(pos); }

  /// Product of the extents of `head`; 1 for the empty set.
  Count size_of(std::span<const IndexId> head) const;

  std::vector<std::string> names_of(std::span<const IndexId> ids) const;

  /// Connected components over shared indices, each sorted, ordered by
  /// smallest member.
  std::vector<std::vector<std::uint32_t>> components() const;

  /// Network induced by `positions`: tensors keep their ids, indices shared
  /// with tensors outside the subset become open, as do original open indices.
  /// The result's tensor i corresponds to positions[i].
  TensorNetwork induced(std::span<const std::uint32_t> positions) const;

  ExtentMap extent_map() const;

 private:
  std::vector<Index> indices_;
  std::vector<TensorSig> tensors_;
  std::vector<IndexId> output_;
  std::vector<bool> is_output_;
  std::vector<std::vector<std::uint32_t>> carriers_;
  std::vector<IndexSet> leaf_heads_;
  std::unordered_map<std::string, IndexId> by_name_;
};

/// Element count of a tensor with the given index names.
/// Throws Error(missing_extent) for unknown names.
Count tensor_size(std::span<const std::string> head, const ExtentMap& extents);

/// Cost of one pairwise contraction: product of the extents over the union of
/// both operands' indices. `result` must be the union minus a subset of the
/// shared indices, otherwise Error(invalid_contraction).
Count contraction_flops(std::span<const std::string> a, std::span<const std::string> b,
                        std::span<const std::string> result, const ExtentMap& extents);

IndexSet set_union(std::span<const IndexId> a, std::span<const IndexId> b);
IndexSet set_intersection(std::span<const IndexId> a, std::span<const IndexId> b);
IndexSet set_difference(std::span<const IndexId> a, std::span<const IndexId> b);

}  // namespace tnpath
