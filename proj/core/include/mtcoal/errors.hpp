#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mtcoal {

// A requested value is not supported by the given offspring law (e.g. exact
// moments of a Custom law without a moment oracle).
class UnsupportedOperation : public std::runtime_error {
 public:
  explicit UnsupportedOperation(const std::string& what) : std::runtime_error(what) {}
};

// A rate or probability table does not cover every key a computation needs.
class IncompleteTableError : public std::runtime_error {
 public:
  IncompleteTableError(const std::string& what, std::vector<std::string> missing)
      : std::runtime_error(what), missing_keys(std::move(missing)) {}

  std::vector<std::string> missing_keys;
};

}  // namespace mtcoal
