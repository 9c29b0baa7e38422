#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tnpath/error.hpp"
#include "tnpath/exhaustive.hpp"
#include "tnpath/generator.hpp"
#include "tnpath/greedy.hpp"
#include "tnpath/io.hpp"
#include "tnpath/partition.hpp"

namespace py = pybind11;
using namespace tnpath;

namespace {

py::int_ to_py(const Count& c) { return py::int_(py::reinterpret_steal<py::object>(
    PyLong_FromString(to_string(c).c_str(), nullptr, 10))); }

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

py::dict report(const EinExpr& tree, const CostReport& c) {
  py::dict d;
  d["ssa_path"] = tree_to_ssa(tree).pairs;
  d["flops"] = to_py(c.flops);
  d["peak_size"] = to_py(c.peak_size);
  d["write_volume"] = to_py(c.write_volume);
  return d;
}

SearchConfig search_config(bool outer_products, const std::string& init, const std::string& metric) {
  SearchConfig c;
  c.outer_products = outer_products;
  if (init == "greedy") {
    c.init = InitBound::greedy;
  } else if (init != "naive") {
    throw Error(ErrorKind::invalid_config, "init must be 'naive' or 'greedy'");
  }
  if (metric == "size" || metric == "peak_size") {
    c.metric = Metric::peak_size;
  } else if (metric != "flops") {
    throw Error(ErrorKind::invalid_config, "metric must be 'flops' or 'size'");
  }
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tensor network contraction path optimization";

  static py::exception<Error> error(m, "TnpathError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error(e.what());
    }
  });

  py::class_<TensorNetwork>(m, "Network")
      .def_static("from_einsum", [](const std::string& spec, const std::map<std::string, std::uint64_t>& ext) {
        return parse_einsum(spec, ExtentMap(ext.begin(), ext.end()));
      }, py::arg("spec"), py::arg("extents"))
      .def_static("from_json", [](const std::string& text) { return load_network(text); })
      .def("to_json", &dump_network)
      .def_property_readonly("tensor_count", &TensorNetwork::tensor_count)
      .def_property_readonly("index_count", &TensorNetwork::index_count)
      .def_property_readonly("output", [](const TensorNetwork& n) { return n.names_of(n.output()); });

  m.def("generate", [](std::size_t n, double regularity, std::size_t n_open, std::uint64_t extent_min,
                       std::uint64_t extent_max, std::uint64_t seed, std::size_t max_indices) {
    return generate({n, regularity, n_open, extent_min, extent_max, seed, max_indices});
  }, py::arg("n_tensors"), py::arg("regularity") = 3.0, py::arg("n_open") = 0, py::arg("extent_min") = 2,
     py::arg("extent_max") = 2, py::arg("seed") = 0, py::arg("max_indices") = 0);

  m.def("greedy", [](const TensorNetwork& net) {
    auto r = greedy(net);
    return report(r.tree, r.cost);
  }, py::arg("network"));

  m.def("sampled_greedy", [](const TensorNetwork& net, double temperature, std::size_t samples, std::uint64_t seed) {
    auto r = sampled_greedy(net, {temperature, samples, seed});
    auto d = report(r.tree, r.cost);
    py::list flops;
    for (const auto& f : r.sample_flops) flops.append(to_py(f));
    d["sample_flops"] = flops;
    return d;
  }, py::arg("network"), py::arg("temperature") = 1.0, py::arg("samples") = 8, py::arg("seed") = 0);

  auto exhaustive = [&m](const char* name, SearchResult (*fn)(const TensorNetwork&, const SearchConfig&)) {
    m.def(name, [fn](const TensorNetwork& net, bool outer_products, const std::string& init,
                     const std::string& metric) {
      auto r = fn(net, search_config(outer_products, init, metric));
      auto d = report(r.tree, r.cost);
      d["nodes_expanded"] = r.stats.nodes_expanded;
      d["prunes"] = r.stats.prunes;
      return d;
    }, py::arg("network"), py::arg("outer_products") = false, py::arg("init") = "naive",
       py::arg("metric") = "flops");
  };
  exhaustive("exhaustive_dfs", &exhaustive_dfs);
  exhaustive("exhaustive_bfs", &exhaustive_bfs);

  m.def("partition", [](const TensorNetwork& net, std::size_t cutoff, double imbalance, std::uint64_t seed,
                        const std::string& leaf) {
    PartitionConfig c;
    c.cutoff = cutoff;
    c.imbalance = imbalance;
    c.seed = seed;
    if (leaf == "greedy") {
      c.leaf_optimizer = LeafOptimizer::greedy;
    } else if (leaf != "exhaustive-dfs") {
      throw Error(ErrorKind::invalid_config, "leaf must be 'exhaustive-dfs' or 'greedy'");
    }
    auto r = partition_optimize(net, c);
    return report(r.tree, r.cost);
  }, py::arg("network"), py::arg("cutoff") = 8, py::arg("imbalance") = 0.2, py::arg("seed") = 0,
     py::arg("leaf") = "exhaustive-dfs");

  m.def("cost", [](const TensorNetwork& net, const Pairs& path) {
    const EinExpr tree = ssa_to_tree({path}, net);
    validate_tree(net, tree);
    return report(tree, cost(net, tree));
  }, py::arg("network"), py::arg("ssa_path"));

  m.def("export_dot", [](const TensorNetwork& net, const Pairs& path) {
    return export_dot(net, ssa_to_tree({path}, net));
  }, py::arg("network"), py::arg("ssa_path"));
}
