#include "tnpath/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "tnpath/error.hpp"
#include "tnpath/exhaustive.hpp"
#include "tnpath/generator.hpp"
#include "tnpath/greedy.hpp"
#include "tnpath/io.hpp"
#include "tnpath/partition.hpp"

namespace tnpath {

namespace {

constexpr const char* kCsvHeader = "method,init,n_tensors,seed,flops,peak_size,wall_ns,nodes_expanded\n";

struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write '" + path + "'");
  out << text;
  if (!out) throw FileError("failed writing '" + path + "'");
}

struct Row {
  std::string method;
  std::string init;
  std::size_t n_tensors;
  std::uint64_t seed;
  Count flops;
  Count peak_size;
  std::int64_t wall_ns;
  std::uint64_t nodes_expanded;
};

std::string csv_row(const Row& r) {
  std::ostringstream os;
  os << r.method << ',' << r.init << ',' << r.n_tensors << ',' << r.seed << ',' << to_string(r.flops) << ','
     << to_string(r.peak_size) << ',' << r.wall_ns << ',' << r.nodes_expanded << '\n';
  return os.str();
}

struct OptimizeOptions {
  std::string input, output, stats, dot;
  std::string method = "greedy";
  std::string init = "naive";
  std::string metric = "flops";
  std::string leaf = "exhaustive-dfs";
  std::uint64_t seed = 0;
  std::size_t samples = 1;
  double temperature = 0.0;
  std::size_t cutoff = 8;
  double imbalance = 0.2;
  bool outer_products = false;
  std::uint64_t max_nodes = 0;
};

struct Outcome {
  EinExpr tree;
  CostReport cost;
  std::uint64_t nodes = 0;
  std::vector<std::string> warnings;
};

SearchConfig search_config(const OptimizeOptions& o) {
  SearchConfig c;
  c.outer_products = o.outer_products;
  c.init = o.init == "greedy" ? InitBound::greedy : InitBound::naive;
  c.metric = o.metric == "size" ? Metric::peak_size : Metric::flops;
  c.max_nodes = o.max_nodes;
  return c;
}

Outcome run_method(const TensorNetwork& net, const OptimizeOptions& o) {
  if (o.method == "greedy") {
    auto r = greedy(net, GreedyConfig{0.0, 1, o.seed});
    return {r.tree, r.cost, r.stats.pushes, {}};
  }
  if (o.method == "sampled-greedy") {
    auto r = sampled_greedy(net, GreedyConfig{o.temperature, o.samples, o.seed});
    return {r.tree, r.cost, 0, r.warnings};
  }
  if (o.method == "exhaustive-dfs" || o.method == "exhaustive-bfs") {
    const auto c = search_config(o);
    auto r = o.method == "exhaustive-dfs" ? exhaustive_dfs(net, c) : exhaustive_bfs(net, c);
    return {r.tree, r.cost, r.stats.nodes_expanded, {}};
  }
  PartitionConfig c;
  c.cutoff = o.cutoff;
  c.imbalance = o.imbalance;
  c.seed = o.seed;
  c.leaf_optimizer = o.leaf == "greedy" ? LeafOptimizer::greedy : LeafOptimizer::exhaustive_dfs;
  auto r = partition_optimize(net, c);
  return {r.tree, r.cost, 0, {}};
}

std::vector<std::size_t> parse_sizes(const std::string& list) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw Error(ErrorKind::invalid_config, "--sizes expects a comma-separated list of integers");
    sizes.push_back(std::stoull(item));
  }
  if (sizes.empty()) throw Error(ErrorKind::invalid_config, "--sizes is empty");
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::budget_exceeded:
    case ErrorKind::generation:
      return kExitInfeasible;
    case ErrorKind::invalid_tree:
      return kExitInvalid;
    default:
      return kExitMalformed;
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contraction path optimizer for tensor networks", "tnpath"};
  app.require_subcommand(1);

  OptimizeOptions opt;
  auto* optimize = app.add_subcommand("optimize", "Optimize the contraction path of a network");
  optimize->add_option("--input", opt.input, "Network JSON")->required();
  optimize->add_option("--method", opt.method)
      ->check(CLI::IsMember({"greedy", "sampled-greedy", "exhaustive-dfs", "exhaustive-bfs", "partition"}))
      ->required();
  optimize->add_option("--init", opt.init, "Initial bound for exhaustive search")
      ->check(CLI::IsMember({"naive", "greedy"}));
  optimize->add_option("--metric", opt.metric, "Exhaustive search objective")
      ->check(CLI::IsMember({"flops", "size"}));
  optimize->add_option("--seed", opt.seed);
  optimize->add_option("--samples", opt.samples)->check(CLI::PositiveNumber);
  optimize->add_option("--temperature", opt.temperature)->check(CLI::NonNegativeNumber);
  optimize->add_option("--cutoff", opt.cutoff, "Partition leaf size");
  optimize->add_option("--imbalance", opt.imbalance);
  optimize->add_option("--leaf", opt.leaf, "Partition leaf optimizer")
      ->check(CLI::IsMember({"exhaustive-dfs", "greedy"}));
  optimize->add_flag("--outer-products", opt.outer_products);
  optimize->add_option("--max-nodes", opt.max_nodes, "Exhaustive search budget (0 = none)");
  optimize->add_option("--output", opt.output, "Path JSON")->required();
  optimize->add_option("--stats", opt.stats, "CSV with one result row");
  optimize->add_option("--dot", opt.dot, "Graphviz rendering of the tree");

  GenConfig gen_cfg;
  std::string gen_output;
  auto* gen = app.add_subcommand("gen", "Generate a random network");
  gen->add_option("--tensors", gen_cfg.n_tensors)->required();
  gen->add_option("--regularity", gen_cfg.regularity)->required();
  gen->add_option("--open", gen_cfg.n_open);
  gen->add_option("--extent-min", gen_cfg.extent_min);
  gen->add_option("--extent-max", gen_cfg.extent_max);
  gen->add_option("--seed", gen_cfg.seed);
  gen->add_option("--max-indices", gen_cfg.max_indices, "Redraw until at most this many contracting indices");
  gen->add_option("--output", gen_output)->required();

  std::string verify_net, verify_path;
  auto* verify = app.add_subcommand("verify", "Check a path document against a network");
  verify->add_option("--network", verify_net)->required();
  verify->add_option("--path", verify_path)->required();

  std::string suite, sizes_list, bench_output;
  std::uint64_t seeds = 1;
  GenConfig bench_gen;
  bench_gen.extent_min = 2;
  bench_gen.extent_max = 5;
  std::uint64_t bench_budget = 0;
  auto* bench = app.add_subcommand("bench", "Run a benchmark sweep over random networks");
  bench->add_option("--suite", suite)->check(CLI::IsMember({"exhaustive", "greedy"}))->required();
  bench->add_option("--sizes", sizes_list, "Comma-separated tensor counts")->required();
  bench->add_option("--seeds", seeds, "Seeds 0..K-1 per size")->required();
  bench->add_option("--output", bench_output)->required();
  bench->add_option("--regularity", bench_gen.regularity);
  bench->add_option("--open", bench_gen.n_open);
  bench->add_option("--extent-min", bench_gen.extent_min);
  bench->add_option("--extent-max", bench_gen.extent_max);
  bench->add_option("--max-nodes", bench_budget, "Exhaustive search budget per run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitMalformed;
  }

  try {
    if (optimize->parsed()) {
      const TensorNetwork net = load_network(read_file(opt.input));
      const auto start = std::chrono::steady_clock::now();
      Outcome r = run_method(net, opt);
      const auto wall = std::chrono::steady_clock::now() - start;
      for (const auto& w : r.warnings) err << "warning: " << w << "\n";
      write_file(opt.output, dump_path({tree_to_ssa(r.tree), r.cost, opt.method, opt.seed}));
      if (!opt.dot.empty()) write_file(opt.dot, export_dot(net, r.tree));
      if (!opt.stats.empty()) {
        const bool exhaustive = opt.method.rfind("exhaustive", 0) == 0;
        write_file(opt.stats, std::string(kCsvHeader) +
                                  csv_row({opt.method, exhaustive ? opt.init : "-", net.tensor_count(), opt.seed,
                                           r.cost.flops, r.cost.peak_size,
                                           std::chrono::duration_cast<std::chrono::nanoseconds>(wall).count(),
                                           r.nodes}));
      }
      out << "flops " << to_string(r.cost.flops) << "\n";
      return kExitOk;
    }

    if (gen->parsed()) {
      write_file(gen_output, dump_network(generate(gen_cfg)));
      return kExitOk;
    }

    if (verify->parsed()) {
      const TensorNetwork net = load_network(read_file(verify_net));
      const PathDocument doc = load_path(read_file(verify_path));
      const EinExpr tree = ssa_to_tree(doc.path, net);
      validate_tree(net, tree);
      const CostReport actual = cost(net, tree);
      if (!(actual == doc.cost)) {
        err << "cost mismatch: document says flops=" << to_string(doc.cost.flops)
            << " peak_size=" << to_string(doc.cost.peak_size)
            << " write_volume=" << to_string(doc.cost.write_volume) << ", path gives flops="
            << to_string(actual.flops) << " peak_size=" << to_string(actual.peak_size)
            << " write_volume=" << to_string(actual.write_volume) << "\n";
        return kExitInvalid;
      }
      out << "valid flops " << to_string(actual.flops) << " peak_size " << to_string(actual.peak_size)
          << " write_volume " << to_string(actual.write_volume) << "\n";
      return kExitOk;
    }

    // bench
    const auto sizes = parse_sizes(sizes_list);
    if (suite == "exhaustive") bench_gen.max_indices = 32;
    std::string csv = kCsvHeader;
    for (auto n : sizes) {
      for (std::uint64_t seed = 0; seed < seeds; ++seed) {
        GenConfig g = bench_gen;
        g.n_tensors = n;
        g.seed = seed;
        const TensorNetwork net = generate(g);
        auto timed = [&](const std::string& method, const std::string& init) {
          OptimizeOptions o;
          o.method = method;
          o.init = init;
          o.seed = seed;
          o.max_nodes = bench_budget;
          const auto start = std::chrono::steady_clock::now();
          Outcome r = run_method(net, o);
          const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                              std::chrono::steady_clock::now() - start).count();
          csv += csv_row({method, init, n, seed, r.cost.flops, r.cost.peak_size, ns, r.nodes});
        };
        if (suite == "exhaustive") {
          for (const char* method : {"exhaustive-dfs", "exhaustive-bfs"})
            for (const char* init : {"naive", "greedy"}) timed(method, init);
        } else {
          timed("greedy", "-");
        }
      }
    }
    write_file(bench_output, csv);
    return kExitOk;
  } catch (const FileError& e) {
    err << "error: " << e.what() << "\n";
    return kExitMalformed;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  }
}

}  // namespace tnpath
