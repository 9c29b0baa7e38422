#include "tnpath/generator.hpp"

#include <cmath>
#include <set>

#include "tnpath/error.hpp"
#include "tnpath/rng.hpp"

namespace tnpath {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::generation, what); }

struct Draft {
  std::vector<Index> indices;
  std::vector<TensorSig> tensors;
  std::vector<IndexId> output;
  std::size_t contracting = 0;
};

Draft draw(const GenConfig& config, Rng& rng) {
  const std::size_t n = config.n_tensors;
  const auto edges = static_cast<std::size_t>(std::llround(static_cast<double>(n) * config.regularity / 2.0));
  const std::size_t capacity = n * (n - 1) / 2;
  if (edges > capacity)
    fail("regularity " + std::to_string(config.regularity) + " needs " + std::to_string(edges) +
         " contracting indices but " + std::to_string(n) + " tensors admit at most " +
         std::to_string(capacity) + " without repeated pairs");

  Draft d;
  d.tensors.resize(n);
  for (std::size_t t = 0; t < n; ++t) d.tensors[t].id = static_cast<std::int64_t>(t);
  auto extent = [&] {
    return config.extent_min + uniform_below(rng, config.extent_max - config.extent_min + 1);
  };
  auto add_index = [&](std::string name) {
    d.indices.push_back({std::move(name), extent()});
    return static_cast<IndexId>(d.indices.size() - 1);
  };

  std::set<std::pair<std::size_t, std::size_t>> used;
  for (std::size_t k = 0; k < edges; ++k) {
    std::size_t tries = 0;
    std::size_t a, b;
    do {
      if (++tries > 1000 + 10 * capacity)
        fail("could not place contracting index " + std::to_string(k) + " between distinct unlinked tensors");
      a = uniform_below(rng, n);
      b = uniform_below(rng, n);
    } while (a == b || used.count({std::min(a, b), std::max(a, b)}));
    used.insert({std::min(a, b), std::max(a, b)});
    const IndexId id = add_index("e" + std::to_string(k));
    d.tensors[a].indices.push_back(id);
    d.tensors[b].indices.push_back(id);
    ++d.contracting;
  }

  for (std::size_t k = 0; k < config.n_open; ++k) {
    const auto t = uniform_below(rng, n);
    const IndexId id = add_index("o" + std::to_string(k));
    d.tensors[t].indices.push_back(id);
    d.output.push_back(id);
  }

  std::size_t placeholders = 0;
  for (std::size_t t = 0; t < n && n > 1; ++t) {
    if (!d.tensors[t].indices.empty()) continue;
    auto other = uniform_below(rng, n - 1);
    if (other >= t) ++other;
    const IndexId id = add_index("s" + std::to_string(placeholders++));
    d.tensors[t].indices.push_back(id);
    d.tensors[other].indices.push_back(id);
    ++d.contracting;
  }
  return d;
}

}  // namespace

TensorNetwork generate(const GenConfig& config) {
  if (config.n_tensors < 1) fail("at least one tensor is required");
  if (!(config.regularity >= 0.0)) fail("regularity must be non-negative");
  if (config.extent_min < 1) fail("extent_min must be at least 1");
  if (config.extent_min > config.extent_max) fail("extent_min exceeds extent_max");
  if (config.max_attempts < 1) fail("max_attempts must be positive");

  for (std::size_t attempt = 0; attempt < config.max_attempts; ++attempt) {
    Rng rng(derive_seed(config.seed, attempt));
    Draft d = draw(config, rng);
    if (config.max_indices && d.contracting > config.max_indices) continue;
    return TensorNetwork(std::move(d.indices), std::move(d.tensors), std::move(d.output));
  }
  fail("no network with at most " + std::to_string(config.max_indices) + " contracting indices in " +
       std::to_string(config.max_attempts) + " attempts");
}

std::size_t contracting_index_count(const TensorNetwork& net) {
  std::size_t count = 0;
  for (IndexId i = 0; i < net.index_count(); ++i) count += net.carriers(i).size() >= 2;
  return count;
}

}  // namespace tnpath
