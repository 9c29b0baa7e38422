#include "tnpath/count.hpp"

#include <cmath>
#include <limits>

#include "tnpath/error.hpp"

namespace tnpath {

std::string to_string(const Count& value) { return value.str(); }

Count parse_count(std::string_view text) {
  if (text.empty()) throw Error(ErrorKind::parse, "empty count");
  for (char c : text) {
    if (c < '0' || c > '9')
      throw Error(ErrorKind::parse, "count is not a decimal integer: '" + std::string(text) + "'");
  }
  return Count(std::string(text));
}

double log10_count(const Count& value) {
  if (value <= 0) return 0.0;
  const auto bits = boost::multiprecision::msb(value);
  if (bits < 1000) return std::log10(value.convert_to<double>());
  // keep the top 64 bits and add back the shifted magnitude
  const auto shift = bits - 63;
  const Count top = value >> shift;
  return std::log10(top.convert_to<double>()) + static_cast<double>(shift) * std::log10(2.0);
}

double to_double(const Count& value) {
  if (value > 0 && boost::multiprecision::msb(value) >= 1023)
    return std::numeric_limits<double>::max();
  return value.convert_to<double>();
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_network: return "invalid-network";
    case ErrorKind::missing_extent: return "missing-extent";
    case ErrorKind::invalid_contraction: return "invalid-contraction";
    case ErrorKind::invalid_tree: return "invalid-tree";
    case ErrorKind::unsupported_arity: return "unsupported-arity";
    case ErrorKind::malformed_path: return "malformed-path";
    case ErrorKind::parse: return "parse";
    case ErrorKind::unsupported_trace: return "unsupported-trace";
    case ErrorKind::generation: return "generation";
    case ErrorKind::budget_exceeded: return "budget-exceeded";
    case ErrorKind::invalid_config: return "invalid-config";
  }
  return "unknown";
}

}  // namespace tnpath
