#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "otto/cycle.hpp"

namespace otto::tools {

struct FigureOptions {
  /// key=value overrides applied to every base configuration.
  std::vector<std::pair<std::string, double>> overrides;
  bool si = false;
  int workers = 0;
};

const std::vector<std::string>& figure_names();

/// Writes the named figure's data as CSV with manifest. Throws
/// ValidationError for an unknown name.
void emit_figure(const std::string& name, const FigureOptions& opts, std::ostream& os);

struct OracleLine {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass() const { return value <= limit; }
};

/// Closed-form four-site results against the numerical pipeline.
std::vector<OracleLine> run_oracle();

}  // namespace otto::tools
