#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mtcoal {

// Outcome of one machine check of a structural law. Exact laws report the
// worst residual as a fraction string; float laws as a decimal.
struct LawReport {
  std::string law;
  std::string instance;
  std::size_t cases_checked = 0;
  std::string worst_residual = "0";
  double worst_residual_value = 0.0;
  std::vector<std::string> violations;
  std::vector<std::string> notes;

  bool pass() const { return violations.empty(); }
  void note(std::string s) { notes.push_back(std::move(s)); }
};

}  // namespace mtcoal
