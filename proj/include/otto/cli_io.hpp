#pragma once

// Configuration files, result tables and their manifests.
//
// Config format (UTF-8, '#' starts a comment):
//   j1 = 1
//   mode = lindblad
//   gamma = 0.1
//   sweep {
//     tau = 0.5 .. 6.0 step 0.1
//     b = 0.1, 0.5, 1.0
//   }
// Statements may also be separated by ';'.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "otto/cycle.hpp"

namespace otto {

struct ParsedConfig {
  CycleConfig cycle;
  SweepGrid grid;
  /// Keys in the order they were set, for the manifest.
  std::vector<std::pair<std::string, std::string>> entries;
};

/// Errors are ValidationError("<source>:<line>: ...").
ParsedConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
ParsedConfig parse_config(const std::string& path);

/// Canonical key = value form of a configuration.
std::string config_snapshot(const CycleConfig& cfg);

/// Display-only conversions from scaled units.
inline constexpr double kJoulePerEnergyUnit = 6e-22;
inline constexpr double kWattPerPowerUnit = 6e-9;
inline constexpr double kPicosecondPerTimeUnit = 0.1;

struct RunManifest {
  std::string command;
  std::string config;
  std::string version;
  std::map<std::string, double> tolerances;
  bool si = false;

  static RunManifest for_config(const std::string& command, const CycleConfig& cfg, bool si);
};

const std::vector<std::string>& result_columns();
std::vector<double> result_values(const CycleResult& r, bool si);

/// 12 significant digits; nan / inf / -inf spelled out.
std::string format_number(double v);
/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

/// Failed rows become '#' comment lines carrying the grid point and error.
void write_csv(std::ostream& os, const RunManifest& m, const std::vector<SweepRow>& rows);
void write_json(std::ostream& os, const RunManifest& m, const std::vector<SweepRow>& rows);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> comments;

  /// Throws ValidationError for a missing column or a non-numeric cell.
  std::vector<double> column(const std::string& name) const;
};

/// RFC 4180 reader; lines starting with '#' are comments.
Table read_csv(std::istream& is);

/// Generic numeric table with its own header, for figure data.
void write_table_csv(std::ostream& os, const RunManifest& m, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

}  // namespace otto
