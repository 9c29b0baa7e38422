#include "tnpath/network.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "tnpath/error.hpp"

namespace tnpath {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::invalid_network, what); }

}  // namespace

TensorNetwork::TensorNetwork(std::vector<Index> indices, std::vector<TensorSig> tensors,
                             std::vector<IndexId> output)
    : indices_(std::move(indices)), tensors_(std::move(tensors)), output_(std::move(output)) {
  const auto n_idx = indices_.size();
  for (IndexId i = 0; i < n_idx; ++i) {
    if (indices_[i].extent < 1) invalid("index '" + indices_[i].name + "' has extent 0");
    if (!by_name_.emplace(indices_[i].name, i).second)
      invalid("index name '" + indices_[i].name + "' declared twice");
  }

  carriers_.assign(n_idx, {});
  leaf_heads_.reserve(tensors_.size());
  std::set<std::int64_t> ids;
  for (std::size_t pos = 0; pos < tensors_.size(); ++pos) {
    const auto& t = tensors_[pos];
    if (!ids.insert(t.id).second) invalid("tensor id " + std::to_string(t.id) + " used twice");
    IndexSet head(t.indices.begin(), t.indices.end());
    std::sort(head.begin(), head.end());
    for (std::size_t k = 0; k < head.size(); ++k) {
      if (head[k] >= n_idx) invalid("tensor " + std::to_string(t.id) + " references unknown index");
      if (k > 0 && head[k] == head[k - 1])
        throw Error(ErrorKind::unsupported_trace, "tensor " + std::to_string(t.id) +
                                                      " repeats index '" + indices_[head[k]].name +
                                                      "' (traces are not supported)");
      carriers_[head[k]].push_back(static_cast<std::uint32_t>(pos));
    }
    leaf_heads_.push_back(std::move(head));
  }

  is_output_.assign(n_idx, false);
  for (IndexId o : output_) {
    if (o >= n_idx) invalid("output references unknown index");
    if (is_output_[o]) invalid("output index '" + indices_[o].name + "' listed twice");
    if (carriers_[o].empty())
      invalid("output index '" + indices_[o].name + "' does not appear on any tensor");
    is_output_[o] = true;
  }

  for (IndexId i = 0; i < n_idx; ++i) {
    if (carriers_[i].size() == 1 && !is_output_[i])
      invalid("index '" + indices_[i].name + "' appears on a single tensor but is not an output");
  }
}

TensorNetwork TensorNetwork::from_names(const std::vector<NamedTensor>& tensors,
                                        const ExtentMap& extents,
                                        const std::vector<std::string>& output) {
  std::vector<Index> indices;
  std::unordered_map<std::string, IndexId> ids;
  auto intern = [&](const std::string& name) -> IndexId {
    if (auto it = ids.find(name); it != ids.end()) return it->second;
    auto ext = extents.find(name);
    if (ext == extents.end())
      throw Error(ErrorKind::missing_extent, "no extent for index '" + name + "'");
    const auto id = static_cast<IndexId>(indices.size());
    indices.push_back({name, ext->second});
    ids.emplace(name, id);
    return id;
  };

  std::vector<TensorSig> sigs;
  sigs.reserve(tensors.size());
  for (const auto& t : tensors) {
    TensorSig sig{t.id, {}};
    for (const auto& name : t.indices) sig.indices.push_back(intern(name));
    sigs.push_back(std::move(sig));
  }
  std::vector<IndexId> out;
  for (const auto& name : output) out.push_back(intern(name));
  // extents nobody references are kept so documents round-trip
  for (const auto& [name, extent] : extents) intern(name);

  return TensorNetwork(std::move(indices), std::move(sigs), std::move(out));
}

std::optional<IndexId> TensorNetwork::find_index(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

Count TensorNetwork::size_of(std::span<const IndexId> head) const {
  Count size = 1;
  for (IndexId i : head) size *= indices_[i].extent;
  return size;
}

std::vector<std::string> TensorNetwork::names_of(std::span<const IndexId> ids) const {
  std::vector<std::string> names;
  names.reserve(ids.size());
  for (IndexId i : ids) names.push_back(indices_[i].name);
  return names;
}

std::vector<std::vector<std::uint32_t>> TensorNetwork::components() const {
  const auto n = tensors_.size();
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& c : carriers_) {
    for (std::size_t k = 1; k < c.size(); ++k) {
      auto a = find(c[0]), b = find(c[k]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<std::vector<std::uint32_t>> groups;
  std::vector<std::int64_t> slot(n, -1);
  for (std::uint32_t v = 0; v < n; ++v) {
    auto r = find(v);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::int64_t>(groups.size());
      groups.emplace_back();
    }
    groups[slot[r]].push_back(v);
  }
  return groups;
}

TensorNetwork TensorNetwork::induced(std::span<const std::uint32_t> positions) const {
  std::vector<bool> inside(tensors_.size(), false);
  for (auto p : positions) inside.at(p) = true;

  std::vector<std::int64_t> remap(indices_.size(), -1);
  std::vector<Index> indices;
  std::vector<IndexId> cut;
  for (IndexId i = 0; i < indices_.size(); ++i) {
    bool in = false, out = false;
    for (auto c : carriers_[i]) (inside[c] ? in : out) = true;
    if (!in) continue;
    remap[i] = static_cast<std::int64_t>(indices.size());
    indices.push_back(indices_[i]);
    if (out && !is_output_[i]) cut.push_back(static_cast<IndexId>(remap[i]));
  }

  std::vector<TensorSig> sigs;
  sigs.reserve(positions.size());
  for (auto p : positions) {
    TensorSig sig{tensors_[p].id, {}};
    for (IndexId i : tensors_[p].indices) sig.indices.push_back(static_cast<IndexId>(remap[i]));
    sigs.push_back(std::move(sig));
  }

  std::vector<IndexId> output;
  for (IndexId o : output_) {
    if (remap[o] >= 0) output.push_back(static_cast<IndexId>(remap[o]));
  }
  output.insert(output.end(), cut.begin(), cut.end());
  return TensorNetwork(std::move(indices), std::move(sigs), std::move(output));
}

ExtentMap TensorNetwork::extent_map() const {
  ExtentMap m;
  for (const auto& idx : indices_) m.emplace(idx.name, idx.extent);
  return m;
}

Count tensor_size(std::span<const std::string> head, const ExtentMap& extents) {
  Count size = 1;
  for (const auto& name : head) {
    auto it = extents.find(name);
    if (it == extents.end())
      throw Error(ErrorKind::missing_extent, "no extent for index '" + name + "'");
    size *= it->second;
  }
  return size;
}

Count contraction_flops(std::span<const std::string> a, std::span<const std::string> b,
                        std::span<const std::string> result, const ExtentMap& extents) {
  const std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  const std::set<std::string> sr(result.begin(), result.end());
  std::set<std::string> all = sa;
  all.insert(sb.begin(), sb.end());
  for (const auto& r : sr) {
    if (!all.count(r))
      throw Error(ErrorKind::invalid_contraction, "result index '" + r + "' is not an operand index");
  }
  for (const auto& i : all) {
    if (sr.count(i)) continue;
    if (!(sa.count(i) && sb.count(i)))
      throw Error(ErrorKind::invalid_contraction,
                  "index '" + i + "' is summed but appears on only one operand");
  }
  std::vector<std::string> space(all.begin(), all.end());
  return tensor_size(space, extents);
}

IndexSet set_union(std::span<const IndexId> a, std::span<const IndexId> b) {
  IndexSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet set_intersection(std::span<const IndexId> a, std::span<const IndexId> b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet set_difference(std::span<const IndexId> a, std::span<const IndexId> b) {
  IndexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace tnpath
