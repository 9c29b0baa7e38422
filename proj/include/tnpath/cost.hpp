#pragma once

#include "tnpath/einexpr.hpp"

namespace tnpath {

struct CostReport {
  Count flops = 0;        // multiply-adds over all contractions
  Count peak_size = 0;    // largest intermediate, a rank-0 root excluded
  Count write_volume = 0; // sum of all intermediate sizes, root included

  friend bool operator==(const CostReport&, const CostReport&) = default;
};

enum class Metric { flops, peak_size };

/// Cost of a contraction tree. n-ary branches are costed as a left fold over
/// their operands in order.
CostReport cost(const TensorNetwork& net, const EinExpr& tree);

/// Flops of a single branch, excluding its subtrees.
Count branch_flops(const TensorNetwork& net, const EinExpr& branch);

const Count& metric_value(const CostReport& report, Metric metric);

}  // namespace tnpath
