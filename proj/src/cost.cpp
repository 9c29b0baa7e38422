#include "tnpath/cost.hpp"

namespace tnpath {

CostReport cost(const TensorNetwork& net, const EinExpr& tree) {
  CostReport report;
  const EinExpr* root = &tree;

  auto account = [&](const EinExpr& a, const EinExpr& b, const EinExpr& result, bool is_root) {
    report.flops += net.size_of(set_union(a.head(), b.head()));
    const Count size = net.size_of(result.head());
    report.write_volume += size;
    if (is_root && result.head().empty()) return;
    if (size > report.peak_size) report.peak_size = size;
  };

  for_each_branch(tree, [&](const EinExpr& node) {
    const bool is_root = &node == root;
    const auto args = node.args();
    if (args.size() == 2) {
      account(args[0], args[1], node, is_root);
      return;
    }
    EinExpr acc = args[0];
    for (std::size_t k = 1; k < args.size(); ++k) {
      EinExpr next = EinExpr::contract(net, acc, args[k]);
      account(acc, args[k], next, is_root && k + 1 == args.size());
      acc = std::move(next);
    }
  });
  return report;
}

Count branch_flops(const TensorNetwork& net, const EinExpr& branch) {
  const auto args = branch.args();
  if (args.empty()) return 0;
  Count flops = 0;
  EinExpr acc = args[0];
  for (std::size_t k = 1; k < args.size(); ++k) {
    flops += net.size_of(set_union(acc.head(), args[k].head()));
    if (k + 1 < args.size()) acc = EinExpr::contract(net, acc, args[k]);
  }
  return flops;
}

const Count& metric_value(const CostReport& report, Metric metric) {
  return metric == Metric::flops ? report.flops : report.peak_size;
}

}  // namespace tnpath
