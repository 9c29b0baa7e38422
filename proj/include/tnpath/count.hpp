#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace tnpath {

// Element and operation counts. Large networks overflow any fixed width, so
// counts are arbitrary precision.
using Count = boost::multiprecision::cpp_int;

std::string to_string(const Count& value);

// Parses a non-negative decimal string. Throws tnpath::Error on bad input.
Count parse_count(std::string_view text);

// log10 that stays finite for values beyond the double range. Returns 0 for 0.
double log10_count(const Count& value);

// Convert to double, saturating at the largest finite value.
double to_double(const Count& value);

}  // namespace tnpath
