#pragma once

#include <stdexcept>
#include <string>

namespace tnpath {

enum class ErrorKind {
  invalid_network,
  missing_extent,
  invalid_contraction,
  invalid_tree,
  unsupported_arity,
  malformed_path,
  parse,
  unsupported_trace,
  generation,
  budget_exceeded,
  invalid_config,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tnpath
