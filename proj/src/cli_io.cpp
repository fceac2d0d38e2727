#include "otto/cli_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#ifndef OTTO_VERSION
#define OTTO_VERSION "0.1.0"
#endif

namespace otto {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

class LineError {
 public:
  LineError(std::string source, int line) : source_(std::move(source)), line_(line) {}
  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError(source_ + ":" + std::to_string(line_) + ": " + msg);
  }

 private:
  std::string source_;
  int line_;
};

double parse_number(const std::string& text, const LineError& at) {
  const std::string s = trim(text);
  if (s.empty()) at.fail("missing numeric value");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) at.fail("'" + s + "' is not a finite number");
  return v;
}

bool parse_bool(const std::string& s, const LineError& at) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  at.fail("'" + s + "' is not a boolean");
}

std::vector<double> parse_sweep_values(const std::string& text, const LineError& at) {
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const auto step_pos = text.find("step", dots);
    if (step_pos == std::string::npos) at.fail("range needs 'step'");
    const double lo = parse_number(text.substr(0, dots), at);
    const double hi = parse_number(text.substr(dots + 2, step_pos - dots - 2), at);
    const double step = parse_number(text.substr(step_pos + 4), at);
    if (!(step > 0.0)) at.fail("range step must be positive");
    if (hi < lo) at.fail("range end is below its start");
    const double span = (hi - lo) / step;
    const long n = std::lround(std::floor(span + 1e-9)) + 1;
    if (n > 1000000) at.fail("range has too many points");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + static_cast<double>(i) * step;
    return v;
  }
  std::vector<double> v;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) v.push_back(parse_number(item, at));
  if (v.empty()) at.fail("empty sweep list");
  return v;
}

const std::set<std::string> kSweepKeys = {"tau", "b", "t_hot", "t_cold", "n_sites", "d0", "d1", "epsilon", "gamma",
                                         "j1",  "j2", "g_me"};

void apply_key(ParsedConfig& pc, const std::string& key, const std::string& value, const LineError& at) {
  CycleConfig& c = pc.cycle;
  if (key == "mode") {
    if (value == "gibbs") c.mode = CycleMode::gibbs;
    else if (value == "lindblad") c.mode = CycleMode::lindblad;
    else at.fail("mode must be gibbs or lindblad");
  } else if (key == "coupling") {
    if (value == "collective") c.coupling = BathCoupling::collective;
    else if (value == "local") c.coupling = BathCoupling::local;
    else at.fail("coupling must be collective or local");
  } else if (key == "w_irr_reference") {
    if (value == "transported") c.w_irr_reference = IrreversibleReference::transported;
    else if (value == "gibbs_cd") c.w_irr_reference = IrreversibleReference::gibbs_cd;
    else at.fail("w_irr_reference must be transported or gibbs_cd");
  } else if (key == "strokes") {
    if (value == "automatic") c.strokes = StrokeEvaluation::automatic;
    else if (value == "propagate") c.strokes = StrokeEvaluation::propagate;
    else if (value == "spectral") c.strokes = StrokeEvaluation::spectral;
    else at.fail("strokes must be automatic, propagate or spectral");
  } else if (key == "driving") {
    if (value == "counterdiabatic") c.stroke.driving = Driving::counterdiabatic;
    else if (value == "bare") c.stroke.driving = Driving::bare;
    else at.fail("driving must be counterdiabatic or bare");
  } else if (key == "dephasing") {
    if (!c.bath) c.bath = BathSpec{};
    c.bath->include_dephasing = parse_bool(value, at);
  } else if (key == "relax_times_in_power") {
    c.relax_times_in_power = parse_bool(value, at);
  } else if (key == "loops_max" || key == "seed" || key == "samples") {
    const double v = parse_number(value, at);
    if (v != std::floor(v) || v < 1.0 || v > 9.0e15) at.fail(key + " must be a positive integer");
    if (key == "loops_max") c.loops_max = static_cast<int>(v);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(v);
    else c.stroke.samples = static_cast<int>(v);
  } else if (key == "relax_horizon") {
    c.relax.horizon = parse_number(value, at);
  } else if (key == "relax_tol") {
    c.relax.tol = parse_number(value, at);
  } else if (kSweepKeys.count(key)) {
    try {
      set_parameter(c, key, parse_number(value, at));
    } catch (const ValidationError& e) {
      at.fail(e.what());
    }
  } else {
    at.fail("unknown key '" + key + "'");
  }
}

}  // namespace

ParsedConfig parse_config_text(const std::string& text, const std::string& source) {
  ParsedConfig pc;
  std::set<std::string> seen, swept;
  bool in_sweep = false, pending_sweep = false;
  int sweep_line = 0, line_no = 0;
  std::stringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    ++line_no;
    const LineError at(source, line_no);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string spaced;
    for (char ch : line) {
      if (ch == '{' || ch == '}') spaced += std::string(";") + ch + ";";
      else spaced += ch;
    }
    std::stringstream parts(spaced);
    for (std::string stmt; std::getline(parts, stmt, ';');) {
      stmt = trim(stmt);
      if (stmt.empty()) continue;
      if (pending_sweep) {
        if (stmt != "{") at.fail("expected '{' after sweep");
        pending_sweep = false;
        in_sweep = true;
        continue;
      }
      if (stmt == "sweep") {
        if (in_sweep) at.fail("nested sweep block");
        pending_sweep = true;
        sweep_line = line_no;
        continue;
      }
      if (stmt == "{") at.fail("unexpected '{'");
      if (stmt == "}") {
        if (!in_sweep) at.fail("unmatched '}'");
        in_sweep = false;
        continue;
      }
      const auto eq = stmt.find('=');
      if (eq == std::string::npos) at.fail("expected 'key = value', got '" + stmt + "'");
      const std::string key = trim(stmt.substr(0, eq));
      const std::string value = trim(stmt.substr(eq + 1));
      if (key.empty()) at.fail("missing key");
      if (value.empty()) at.fail("missing value for '" + key + "'");
      if (in_sweep) {
        if (!kSweepKeys.count(key)) at.fail("'" + key + "' cannot be swept");
        if (!swept.insert(key).second) at.fail("'" + key + "' swept twice");
        pc.grid.axes.emplace_back(key, parse_sweep_values(value, at));
        pc.entries.emplace_back("sweep." + key, value);
        continue;
      }
      if (!seen.insert(key).second) at.fail("duplicate key '" + key + "'");
      if ((key == "epsilon" && seen.count("d1")) || (key == "d1" && seen.count("epsilon"))) {
        at.fail("epsilon and d1 are mutually exclusive");
      }
      apply_key(pc, key, value, at);
      pc.entries.emplace_back(key, value);
    }
  }
  if (pending_sweep || in_sweep) LineError(source, sweep_line).fail("sweep block is not closed");
  if (seen.count("epsilon") && swept.count("d1")) {
    throw ValidationError(source + ": epsilon is fixed while d1 is swept");
  }
  if (pc.cycle.mode == CycleMode::lindblad && !pc.cycle.bath) {
    throw ValidationError(source + ": mode = lindblad requires gamma");
  }
  try {
    pc.cycle.validate();
    if (!(pc.cycle.relax.horizon > 0.0)) throw ValidationError("relax_horizon must be positive");
    if (!(pc.cycle.relax.tol > 0.0)) throw ValidationError("relax_tol must be positive");
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return pc;
}

ParsedConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string config_snapshot(const CycleConfig& c) {
  std::ostringstream os;
  auto kv = [&os](const char* k, const std::string& v) { os << k << " = " << v << "\n"; };
  kv("j1", format_number(c.chain.j1));
  kv("j2", format_number(c.chain.j2));
  kv("b", format_number(c.chain.b));
  kv("g_me", format_number(c.chain.g_me));
  kv("n_sites", std::to_string(c.chain.n_sites));
  kv("d0", format_number(c.protocol.d0));
  kv("tau", format_number(c.protocol.tau));
  if (c.d1) kv("d1", format_number(*c.d1));
  else kv("epsilon", format_number(c.protocol.epsilon));
  kv("t_hot", format_number(c.t_hot));
  kv("t_cold", format_number(c.t_cold));
  kv("mode", c.mode == CycleMode::gibbs ? "gibbs" : "lindblad");
  if (c.bath) {
    kv("gamma", format_number(c.bath->gamma));
    kv("dephasing", c.bath->include_dephasing ? "true" : "false");
  }
  kv("coupling", c.coupling == BathCoupling::collective ? "collective" : "local");
  kv("loops_max", std::to_string(c.loops_max));
  kv("seed", std::to_string(c.seed));
  kv("w_irr_reference", c.w_irr_reference == IrreversibleReference::transported ? "transported" : "gibbs_cd");
  kv("strokes", c.strokes == StrokeEvaluation::automatic   ? "automatic"
                : c.strokes == StrokeEvaluation::propagate ? "propagate"
                                                           : "spectral");
  kv("driving", c.stroke.driving == Driving::counterdiabatic ? "counterdiabatic" : "bare");
  kv("samples", std::to_string(c.stroke.samples));
  kv("relax_horizon", format_number(c.relax.horizon));
  kv("relax_tol", format_number(c.relax.tol));
  kv("relax_times_in_power", c.relax_times_in_power ? "true" : "false");
  return os.str();
}

RunManifest RunManifest::for_config(const std::string& command, const CycleConfig& cfg, bool si) {
  RunManifest m;
  m.command = command;
  m.config = config_snapshot(cfg);
  m.version = OTTO_VERSION;
  m.si = si;
  m.tolerances = {{"propagation", cfg.stroke.propagation.tol},
                  {"relax_tol", cfg.relax.tol},
                  {"loop_tol", 1e-8},
                  {"transport", 1e-6}};
  return m;
}

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> cols = {"tau",   "B",          "T_H",    "T_L",       "N",           "d0",
                                                "d1",    "w2",         "w4",     "q_in",      "q_out",       "power",
                                                "efficiency", "dw_ad", "w_irr_max", "tau2_tangle", "tau1_tangle",
                                                "s_half"};
  return cols;
}

std::vector<double> result_values(const CycleResult& r, bool si) {
  const double e = si ? kJoulePerEnergyUnit : 1.0;
  const double t = si ? kPicosecondPerTimeUnit : 1.0;
  const double p = si ? kWattPerPowerUnit : 1.0;
  return {r.tau * t,   r.b,           r.t_hot,       r.t_cold,        static_cast<double>(r.n_sites),
          r.d0,        r.d1,          r.w2 * e,      r.w4 * e,        r.q_in * e,
          r.q_out * e, r.power * p,   r.efficiency,  r.dw_ad * e,     r.w_irr_max * e,
          r.tau2_tangle, r.tau1_tangle, r.s_half};
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

namespace {

void write_manifest_comments(std::ostream& os, const RunManifest& m) {
  os << "# command: " << m.command << "\n";
  os << "# version: " << m.version << "\n";
  os << "# units: " << (m.si ? "SI (energies J, power W, tau ps)" : "scaled") << "\n";
  for (const auto& [k, v] : m.tolerances) os << "# tolerance " << k << ": " << format_number(v) << "\n";
  std::stringstream cfg(m.config);
  for (std::string line; std::getline(cfg, line);) os << "# config: " << line << "\n";
}

void write_row(std::ostream& os, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << format_number(values[i]);
  os << "\n";
}

std::string grid_point(const CycleConfig& c) {
  const DriveProtocol p = c.resolved_protocol();
  std::ostringstream os;
  os << "tau=" << format_number(p.tau) << " B=" << format_number(c.chain.b) << " T_H=" << format_number(c.t_hot)
     << " T_L=" << format_number(c.t_cold) << " N=" << c.chain.n_sites << " d0=" << format_number(p.d0)
     << " d1=" << format_number(p.d1());
  return os.str();
}

const char* failure_name(FailureKind k) {
  switch (k) {
    case FailureKind::validation:
      return "validation";
    case FailureKind::numerical:
      return "numerical";
    case FailureKind::other:
      return "other";
    case FailureKind::none:
      break;
  }
  return "none";
}

nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return std::strtod(format_number(v).c_str(), nullptr);
  return nullptr;
}

}  // namespace

void write_csv(std::ostream& os, const RunManifest& m, const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw ValidationError("no results to write");
  write_manifest_comments(os, m);
  const auto& cols = result_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << csv_field(cols[i]);
  os << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.result) {
      write_row(os, result_values(*r.result, m.si));
    } else {
      std::string err = r.error;
      for (char& ch : err) {
        if (ch == '\n' || ch == '\r') ch = ' ';
      }
      os << "# failed row " << i << " (" << failure_name(r.failure) << "): " << grid_point(r.config) << ": " << err
         << "\n";
    }
  }
  if (!os) throw std::runtime_error("write failed");
}

void write_json(std::ostream& os, const RunManifest& m, const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw ValidationError("no results to write");
  nlohmann::json j;
  j["manifest"] = {{"command", m.command},
                   {"version", m.version},
                   {"config", m.config},
                   {"units", m.si ? "SI" : "scaled"},
                   {"tolerances", m.tolerances}};
  j["columns"] = result_columns();
  j["rows"] = nlohmann::json::array();
  j["failures"] = nlohmann::json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.result) {
      nlohmann::json row = nlohmann::json::array();
      for (double v : result_values(*r.result, m.si)) row.push_back(json_number(v));
      j["rows"].push_back(std::move(row));
    } else {
      j["failures"].push_back(
          {{"index", i}, {"kind", failure_name(r.failure)}, {"point", grid_point(r.config)}, {"error", r.error}});
    }
  }
  os << j.dump(2) << "\n";
  if (!os) throw std::runtime_error("write failed");
}

void write_table_csv(std::ostream& os, const RunManifest& m, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  write_manifest_comments(os, m);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << csv_field(header[i]);
  os << "\n";
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw ValidationError("table row width does not match header");
    write_row(os, r);
  }
  if (!os) throw std::runtime_error("write failed");
}

Table read_csv(std::istream& is) {
  Table t;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, at_record_start = true, any = false;
  auto end_record = [&] {
    record.push_back(field);
    field.clear();
    if (t.header.empty()) t.header = record;
    else t.rows.push_back(record);
    record.clear();
    at_record_start = true;
    any = false;
  };
  for (int c; (c = is.get()) != EOF;) {
    const char ch = static_cast<char>(c);
    if (at_record_start && !quoted && ch == '#') {
      std::string line;
      std::getline(is, line);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      t.comments.push_back(trim(line));
      continue;
    }
    at_record_start = false;
    if (quoted) {
      if (ch == '"') {
        if (is.peek() == '"') {
          field += '"';
          is.get();
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      record.push_back(field);
      field.clear();
      any = true;
    } else if (ch == '\r') {
      continue;
    } else if (ch == '\n') {
      if (any || !field.empty() || !record.empty()) end_record();
      else at_record_start = true;
    } else {
      field += ch;
      any = true;
    }
  }
  if (quoted) throw ValidationError("csv: unterminated quoted field");
  if (any || !field.empty() || !record.empty()) end_record();
  for (const auto& r : t.rows) {
    if (r.size() != t.header.size()) throw ValidationError("csv: row width does not match header");
  }
  return t;
}

std::vector<double> Table::column(const std::string& name) const {
  std::size_t idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) idx = i;
  }
  if (idx == header.size()) throw ValidationError("csv: no column '" + name + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    const std::string& s = r[idx];
    if (s == "nan") {
      out.push_back(std::nan(""));
      continue;
    }
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw ValidationError("csv: '" + s + "' is not numeric");
    out.push_back(v);
  }
  return out;
}

}  // namespace otto
