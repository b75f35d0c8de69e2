// Scenario execution: turns a validated scenario into named data curves plus
// the invariant checks that apply to it.

#pragma once

#include <string>
#include <vector>

#include "qwp/cli/scenario.hpp"

namespace qwp::cli {

/// One output table; column 0 is always the time axis.
struct Curve {
  std::string name;
  json params;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> plot_columns;
};

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

struct RunResult {
  std::vector<Curve> curves;
  std::vector<CheckResult> checks;
  json extra = json::object();  // scenario-specific summary entries
};

RunResult run(const Scenario& scenario, const PhysicalConstants& c);

}  // namespace qwp::cli
