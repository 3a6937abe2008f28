#include "bogwatch/error.hpp"

namespace bogwatch {

namespace {

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

RowValidationError::RowValidationError(std::vector<std::size_t> lines, const std::string& what)
    : Error(what + " (lines " + join(lines) + ")"), lines_(std::move(lines)) {}

DivisionGuardError::DivisionGuardError(std::vector<std::size_t> indices)
    : Error("zero ground-truth value at indices " + join(indices)), indices_(std::move(indices)) {}

}  // namespace bogwatch
