// otto: run, sweep and tabulate superadiabatic Otto cycles on the chiral
// spin ring.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "figures.hpp"
#include "otto/cli_io.hpp"
#include "otto/magnon.hpp"

namespace {

using namespace otto;

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

struct Output {
  std::string path;
  std::string format = "csv";
  bool si = false;
};

void add_output(CLI::App* cmd, Output& out) {
  cmd->add_option("-o,--out", out.path, "output file (default stdout)");
  cmd->add_option("-f,--format", out.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--si", out.si, "convert work, power and time to SI units");
}

template <class F>
void with_stream(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot open '" + path + "' for writing");
  write(f);
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

void write_rows(const Output& out, const RunManifest& m, const std::vector<SweepRow>& rows) {
  with_stream(out.path, [&](std::ostream& os) {
    if (out.format == "json") write_json(os, m, rows);
    else write_csv(os, m, rows);
  });
}

std::vector<std::pair<std::string, double>> parse_overrides(const std::vector<std::string>& sets) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + s + "'");
    char* end = nullptr;
    const std::string v = s.substr(eq + 1);
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size()) throw ValidationError("--set value '" + v + "' is not numeric");
    out.emplace_back(s.substr(0, eq), x);
  }
  return out;
}

int run_main(int argc, char** argv) {
  CLI::App app{"Superadiabatic quantum Otto cycle on a chiral multiferroic spin ring"};
  app.require_subcommand(1);

  std::string config_path;
  Output out;
  int workers = 0;

  auto* run = app.add_subcommand("run", "one cycle from a config file (sweep blocks ignored)");
  run->add_option("config", config_path, "config file")->required();
  add_output(run, out);

  auto* sw = app.add_subcommand("sweep", "grid of cycles from a config file with a sweep block");
  sw->add_option("config", config_path, "config file")->required();
  sw->add_option("-j,--workers", workers, "worker threads (capped by OTTO_MAX_WORKERS)");
  add_output(sw, out);

  std::string fig_name;
  std::vector<std::string> sets;
  auto* fig = app.add_subcommand("fig", "figure data table");
  fig->add_option("name", fig_name, "figure name")->required()->check(CLI::IsMember(tools::figure_names()));
  fig->add_option("--set", sets, "key=value override of the figure's base parameters");
  fig->add_option("-j,--workers", workers, "worker threads (capped by OTTO_MAX_WORKERS)");
  fig->add_option("-o,--out", out.path, "output file (default stdout)");
  fig->add_flag("--si", out.si, "convert work, power and time to SI units");

  auto* oracle = app.add_subcommand("oracle", "closed-form four-site checks");

  double j1 = -1.0, j2 = 1.0, d0 = 2.5, d1 = 1.5, t_hot = 40.0, t_cold = 10.0;
  int nodes = 256;
  bool cos2q = false, at_cold = false;
  auto* limit = app.add_subcommand("limit", "thermodynamic-limit quasiparticle model");
  limit->add_option("--j1", j1);
  limit->add_option("--j2", j2);
  limit->add_option("--d0", d0);
  limit->add_option("--d1", d1);
  limit->add_option("--t-hot", t_hot);
  limit->add_option("--t-cold", t_cold);
  limit->add_option("--nodes", nodes, "Gauss-Legendre nodes");
  limit->add_flag("--b-cos2q", cos2q, "use cos 2Q in the J2 term of B(q)");
  limit->add_flag("--work-at-cold", at_cold, "evaluate the work at T_L instead of T_H");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  if (*run || *sw) {
    const ParsedConfig pc = parse_config(config_path);
    const std::string command = *run ? "run" : "sweep";
    RunManifest m = RunManifest::for_config(command, pc.cycle, out.si);
    std::vector<SweepRow> rows;
    if (*run) {
      SweepRow row;
      row.config = pc.cycle;
      row.result = run_cycle(pc.cycle);
      rows.push_back(std::move(row));
    } else {
      if (pc.grid.axes.empty()) throw ValidationError(config_path + ": sweep needs a sweep block");
      for (const auto& [k, v] : pc.entries) {
        if (k.rfind("sweep.", 0) == 0) m.config += k + " = " + v + "\n";
      }
      rows = sweep(pc.cycle, pc.grid, workers);
    }
    write_rows(out, m, rows);
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.result ? 0 : 1;
    if (failed) std::cerr << failed << " of " << rows.size() << " rows failed\n";
    return 0;
  }
  if (*fig) {
    tools::FigureOptions fo;
    fo.overrides = parse_overrides(sets);
    fo.si = out.si;
    fo.workers = workers;
    with_stream(out.path, [&](std::ostream& os) { tools::emit_figure(fig_name, fo, os); });
    return 0;
  }
  if (*oracle) {
    bool ok = true;
    for (const auto& line : tools::run_oracle()) {
      std::printf("%s %s %.3e (limit %.0e)\n", line.pass() ? "PASS" : "FAIL", line.name.c_str(), line.value,
                  line.limit);
      ok = ok && line.pass();
    }
    return ok ? 0 : kExitNumerical;
  }
  if (*limit) {
    const MagnonModel mm(j1, j2, nodes, cos2q);
    const auto at = at_cold ? WorkTemperature::cold : WorkTemperature::hot;
    const double w = limit_work(mm, d0, d1, at_cold ? t_cold : t_hot);
    const double q = limit_heat_in(mm, d0, t_hot, t_cold);
    const double eta = limit_efficiency(mm, d0, d1, t_hot, t_cold, at);
    std::printf("work,heat_in,efficiency,regime\n%s,%s,%s,%s\n", format_number(w).c_str(), format_number(q).c_str(),
                format_number(eta).c_str(), eta > 0 ? "engine" : eta < 0 ? "refrigerator" : "border");
    return 0;
  }
  return kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_main(argc, argv);
  } catch (const otto::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const otto::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
