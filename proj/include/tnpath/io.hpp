#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tnpath/cost.hpp"
#include "tnpath/ssa.hpp"

namespace tnpath {

/// Parses `operand("," operand)* "->" output` with single-character index
/// names. Whitespace is ignored. Implicit output ("ij,jk") is not accepted.
TensorNetwork parse_einsum(std::string_view spec, const ExtentMap& extents);

// Network documents:
//   {"extents": {name: int}, "output": [name], "tensors": [{"id": int, "indices": [name]}]}
nlohmann::json network_to_json(const TensorNetwork& net);
TensorNetwork network_from_json(const nlohmann::json& doc);
std::string dump_network(const TensorNetwork& net);
TensorNetwork load_network(std::string_view text);

struct PathDocument {
  SsaPath path;
  CostReport cost;
  std::string optimizer;
  std::uint64_t seed = 0;
};

// Path documents:
//   {"cost": {"flops": "dec", "peak_size": "dec", "write_volume": "dec"},
//    "optimizer": str, "seed": int, "ssa_path": [[int, int]]}
nlohmann::json path_to_json(const PathDocument& doc);
PathDocument path_from_json(const nlohmann::json& doc);
std::string dump_path(const PathDocument& doc);
PathDocument load_path(std::string_view text);

/// Graphviz digraph of a contraction tree. Branch nodes are labeled with
/// their flop count, edges with the size of the tensor they carry; each
/// carries a `weight` attribute of log10 of that value.
std::string export_dot(const TensorNetwork& net, const EinExpr& tree);

}  // namespace tnpath
