#pragma once

#include <cstdint>

#include "tnpath/network.hpp"

namespace tnpath {

struct GenConfig {
  std::size_t n_tensors = 2;
  double regularity = 3.0;   // average contracting indices per tensor
  std::size_t n_open = 0;
  std::uint64_t extent_min = 2;
  std::uint64_t extent_max = 2;
  std::uint64_t seed = 0;
  // Reject and redraw networks with more contracting indices than this; 0 = off.
  std::size_t max_indices = 0;
  std::size_t max_attempts = 1000;
};

/// Random network: round(n * regularity / 2) contracting indices, each joining
/// two distinct tensors that do not already share an index; `n_open` open
/// indices on random tensors; extents uniform in [extent_min, extent_max].
/// Tensors left without indices get a placeholder index shared with a random
/// other tensor. Contracting indices are named e0, e1, ..., open indices
/// o0, o1, ..., placeholders s0, s1, ....
///
/// Attempt k draws from std::mt19937_64 seeded with derive_seed(seed, k).
/// Throws Error(generation) when the counts cannot be placed or no attempt
/// satisfies max_indices.
TensorNetwork generate(const GenConfig& config);

/// Number of indices carried by two or more tensors.
std::size_t contracting_index_count(const TensorNetwork& net);

}  // namespace tnpath
