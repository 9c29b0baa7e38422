#include "tnpath/io.hpp"

#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "tnpath/error.hpp"

namespace tnpath {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::parse, where + ": " + what);
}

bool is_name_char(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, std::string(what) + ": " + e.what());
  }
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) parse_fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(where, std::string("missing key \"") + key + "\"");
  return *it;
}

std::int64_t as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) parse_fail(where, "expected an integer");
  return v.get<std::int64_t>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) parse_fail(where, "expected a string");
  return v.get<std::string>();
}

std::string fixed(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

}  // namespace

TensorNetwork parse_einsum(std::string_view spec, const ExtentMap& extents) {
  std::vector<NamedTensor> tensors(1);
  std::vector<std::string> output;
  std::set<char> seen_in_operands;
  bool in_output = false;
  std::set<char> current;

  auto where = [&](std::size_t pos) { return "einsum offset " + std::to_string(pos); };
  for (std::size_t pos = 0; pos < spec.size(); ++pos) {
    const char c = spec[pos];
    if (c == ' ' || c == '\t') continue;
    if (c == ',') {
      if (in_output) parse_fail(where(pos), "',' after '->'");
      tensors.push_back({static_cast<std::int64_t>(tensors.size()), {}});
      current.clear();
    } else if (c == '-') {
      if (in_output || pos + 1 >= spec.size() || spec[pos + 1] != '>')
        parse_fail(where(pos), "expected a single '->'");
      in_output = true;
      ++pos;
      current.clear();
    } else if (is_name_char(c)) {
      if (!current.insert(c).second) {
        if (in_output) parse_fail(where(pos), std::string("output repeats index '") + c + "'");
        throw Error(ErrorKind::unsupported_trace, where(pos) + ": operand " +
                                                      std::to_string(tensors.size() - 1) +
                                                      " repeats index '" + c +
                                                      "' (traces are not supported)");
      }
      if (in_output) {
        if (!seen_in_operands.count(c))
          parse_fail(where(pos), std::string("output index '") + c + "' appears in no operand");
        output.emplace_back(1, c);
      } else {
        seen_in_operands.insert(c);
        tensors.back().indices.emplace_back(1, c);
      }
    } else {
      parse_fail(where(pos), std::string("unexpected character '") + c + "'");
    }
  }
  if (!in_output) parse_fail(where(spec.size()), "missing '->' (implicit output is not supported)");
  return TensorNetwork::from_names(tensors, extents, output);
}

json network_to_json(const TensorNetwork& net) {
  json doc = json::object();
  json extents = json::object();
  for (const auto& idx : net.indices()) extents[idx.name] = idx.extent;
  json tensors = json::array();
  for (const auto& t : net.tensors()) {
    tensors.push_back({{"id", t.id}, {"indices", net.names_of(t.indices)}});
  }
  doc["extents"] = std::move(extents);
  doc["output"] = net.names_of(net.output());
  doc["tensors"] = std::move(tensors);
  return doc;
}

TensorNetwork network_from_json(const json& doc) {
  const json& ext = member(doc, "extents", "/");
  if (!ext.is_object()) parse_fail("/extents", "expected an object");
  ExtentMap extents;
  for (auto it = ext.begin(); it != ext.end(); ++it) {
    const std::string where = "/extents/" + it.key();
    if (!it.value().is_number_integer()) parse_fail(where, "expected an integer");
    const auto value = it.value().get<std::int64_t>();
    if (value < 1) parse_fail(where, "extent must be at least 1");
    extents.emplace(it.key(), static_cast<std::uint64_t>(value));
  }

  const json& ts = member(doc, "tensors", "/");
  if (!ts.is_array()) parse_fail("/tensors", "expected an array");
  std::vector<NamedTensor> tensors;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const std::string where = "/tensors/" + std::to_string(k);
    NamedTensor t;
    t.id = as_int(member(ts[k], "id", where), where + "/id");
    const json& idx = member(ts[k], "indices", where);
    if (!idx.is_array()) parse_fail(where + "/indices", "expected an array");
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const std::string w = where + "/indices/" + std::to_string(j);
      std::string name = as_string(idx[j], w);
      if (!extents.count(name)) parse_fail(w, "index '" + name + "' has no extent");
      t.indices.push_back(std::move(name));
    }
    tensors.push_back(std::move(t));
  }

  const json& out = member(doc, "output", "/");
  if (!out.is_array()) parse_fail("/output", "expected an array");
  std::vector<std::string> output;
  for (std::size_t j = 0; j < out.size(); ++j) {
    const std::string w = "/output/" + std::to_string(j);
    std::string name = as_string(out[j], w);
    if (!extents.count(name)) parse_fail(w, "index '" + name + "' has no extent");
    output.push_back(std::move(name));
  }
  return TensorNetwork::from_names(tensors, extents, output);
}

std::string dump_network(const TensorNetwork& net) { return network_to_json(net).dump(2) + "\n"; }

TensorNetwork load_network(std::string_view text) {
  return network_from_json(parse_json(text, "network document"));
}

json path_to_json(const PathDocument& doc) {
  json pairs = json::array();
  for (auto [a, b] : doc.path.pairs) pairs.push_back({a, b});
  return json{{"cost",
               {{"flops", to_string(doc.cost.flops)},
                {"peak_size", to_string(doc.cost.peak_size)},
                {"write_volume", to_string(doc.cost.write_volume)}}},
              {"optimizer", doc.optimizer},
              {"seed", doc.seed},
              {"ssa_path", std::move(pairs)}};
}

PathDocument path_from_json(const json& doc) {
  PathDocument out;
  const json& pairs = member(doc, "ssa_path", "/");
  if (!pairs.is_array()) parse_fail("/ssa_path", "expected an array");
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const std::string where = "/ssa_path/" + std::to_string(k);
    if (!pairs[k].is_array() || pairs[k].size() != 2) parse_fail(where, "expected a pair [int, int]");
    const auto a = as_int(pairs[k][0], where + "/0");
    const auto b = as_int(pairs[k][1], where + "/1");
    if (a < 0 || b < 0) parse_fail(where, "SSA ids are non-negative");
    out.path.pairs.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  }
  const json& c = member(doc, "cost", "/");
  auto count = [&](const char* key) {
    const std::string where = std::string("/cost/") + key;
    const std::string text = as_string(member(c, key, "/cost"), where);
    try {
      return parse_count(text);
    } catch (const Error& e) {
      parse_fail(where, e.what());
    }
  };
  out.cost.flops = count("flops");
  out.cost.peak_size = count("peak_size");
  out.cost.write_volume = count("write_volume");
  out.optimizer = as_string(member(doc, "optimizer", "/"), "/optimizer");
  const json& seed = member(doc, "seed", "/");
  if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
    parse_fail("/seed", "expected a non-negative integer");
  out.seed = seed.get<std::uint64_t>();
  return out;
}

std::string dump_path(const PathDocument& doc) { return path_to_json(doc).dump(2) + "\n"; }

PathDocument load_path(std::string_view text) {
  return path_from_json(parse_json(text, "path document"));
}

std::string export_dot(const TensorNetwork& net, const EinExpr& tree) {
  std::ostringstream os;
  os << "digraph contraction {\n";
  os << "  rankdir=BT;\n";
  os << "  node [shape=circle];\n";

  std::size_t next_branch = 0;
  std::vector<std::string> edges;

  auto edge = [&](const std::string& from, const std::string& to, const EinExpr& tensor) {
    const Count size = net.size_of(tensor.head());
    edges.push_back("  " + from + " -> " + to + " [label=\"" + to_string(size) +
                    "\", weight=" + fixed(log10_count(size)) + "];\n");
  };

  // returns the DOT node that produces `e`
  std::function<std::string(const EinExpr&)> visit = [&](const EinExpr& e) -> std::string {
    if (e.is_leaf()) {
      const std::string name = "t" + std::to_string(e.tensor());
      os << "  " << name << " [shape=point, xlabel=\"" << net.tensor(e.tensor()).id << "\"];\n";
      return name;
    }
    std::vector<std::string> children;
    for (const auto& a : e.args()) children.push_back(visit(a));
    const std::string name = "b" + std::to_string(next_branch++);
    const Count flops = branch_flops(net, e);
    os << "  " << name << " [label=\"" << to_string(flops) << "\", weight=" << fixed(log10_count(flops))
       << "];\n";
    for (std::size_t k = 0; k < children.size(); ++k) edge(children[k], name, e.args()[k]);
    return name;
  };

  const std::string root = visit(tree);
  os << "  out [shape=point];\n";
  edge(root, "out", tree);
  for (const auto& e : edges) os << e;
  os << "}\n";
  return os.str();
}

}  // namespace tnpath
