#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "otto/cli_io.hpp"

using namespace otto;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

SweepRow row(double tau, double eff) {
  SweepRow r;
  r.config.protocol.tau = tau;
  CycleResult res;
  res.tau = tau;
  res.efficiency = eff;
  res.w2 = -1.25e-3;
  res.power = 0.1 / 3.0;
  res.n_sites = 4;
  r.result = res;
  return r;
}

}  // namespace

TEST_SUITE("cli_io") {
  TEST_CASE("scalar keys") {
    const ParsedConfig pc = parse_config_text(
        "# defaults\n"
        "j1 = 1\nj2 = -1\nb = 0.1   # field\n"
        "n_sites = 4; epsilon = 1; d0 = 2.5\n"
        "tau = 2.3\nt_hot = 40\nt_cold = 10\nmode = gibbs\n");
    CHECK(pc.cycle.chain.j2 == -1.0);
    CHECK(pc.cycle.chain.b == 0.1);
    CHECK(pc.cycle.protocol.tau == 2.3);
    CHECK(pc.cycle.protocol.d0 == 2.5);
    CHECK(pc.cycle.mode == CycleMode::gibbs);
    CHECK(pc.grid.axes.empty());
    CHECK(pc.entries.size() == 10);
    CHECK(pc.entries[2].first == "b");
  }

  TEST_CASE("sweep block") {
    const ParsedConfig pc = parse_config_text(
        "sweep {\n"
        "  tau = 0.5 .. 6.0 step 0.1\n"
        "  b = 0.1, 0.5, 1.0\n"
        "}\n");
    REQUIRE(pc.grid.axes.size() == 2);
    const auto& tau = pc.grid.axes[0].second;
    CHECK(tau.size() == 56);
    CHECK(tau.front() == doctest::Approx(0.5));
    CHECK(tau.back() == doctest::Approx(6.0));
    CHECK(pc.grid.size() == 168);
    const ParsedConfig inline_block = parse_config_text("sweep { d1 = 1, 2 }");
    CHECK(inline_block.grid.axes[0].second.size() == 2);
  }

  TEST_CASE("Lindblad keys") {
    const ParsedConfig pc =
        parse_config_text("mode = lindblad\ngamma = 0.2\ncoupling = local\ndephasing = false\nloops_max = 7\n");
    REQUIRE(pc.cycle.bath);
    CHECK(pc.cycle.bath->gamma == 0.2);
    CHECK(!pc.cycle.bath->include_dephasing);
    CHECK(pc.cycle.coupling == BathCoupling::local);
    CHECK(pc.cycle.loops_max == 7);
    CHECK(error_of("mode = lindblad\n").find("gamma") != std::string::npos);
  }

  TEST_CASE("errors carry the line") {
    CHECK(error_of("j1 = 1\n\ntemperature = 3\n").rfind("<config>:3:", 0) == 0);
    CHECK(error_of("j1 = 1\nj1 = 2\n").find(":2: duplicate") != std::string::npos);
    CHECK(error_of("tau = fast\n").find(":1:") != std::string::npos);
    CHECK(error_of("epsilon = 1\nd1 = 1.5\n").find(":2:") != std::string::npos);
    CHECK(error_of("sweep {\n tau = 1 .. 0 step 0.1\n}\n").find(":2:") != std::string::npos);
    CHECK(error_of("sweep {\n mode = 1\n}\n").find(":2:") != std::string::npos);
    CHECK(error_of("sweep {\n tau = 1\n").find("not closed") != std::string::npos);
    CHECK(error_of("n_sites = 3\n").find(":1:") != std::string::npos);
    CHECK(error_of("j1 = 1\n}\n").find(":2:") != std::string::npos);
    CHECK(!error_of("t_hot = 5\nt_cold = 10\n").empty());
    CHECK(!error_of("epsilon = 1\nsweep { d1 = 1, 2 }\n").empty());
  }

  TEST_CASE("numbers and fields") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(INFINITY) == "inf");
    CHECK(format_number(-INFINITY) == "-inf");
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  }

  TEST_CASE("csv round trip") {
    std::vector<SweepRow> rows = {row(0.5, 0.04), row(1.0, -0.02)};
    SweepRow failed;
    failed.config.protocol.tau = 1.5;
    failed.failure = FailureKind::numerical;
    failed.error = "stroke did not converge, sorry";
    rows.push_back(failed);
    const RunManifest m = RunManifest::for_config("sweep", rows[0].config, false);
    std::stringstream ss;
    write_csv(ss, m, rows);
    const Table t = read_csv(ss);
    CHECK(t.header == result_columns());
    REQUIRE(t.rows.size() == 2);
    const auto tau = t.column("tau"), eff = t.column("efficiency"), p = t.column("power");
    CHECK(tau[1] == 1.0);
    CHECK(eff[0] == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(p[0] == doctest::Approx(0.1 / 3.0).epsilon(1e-11));
    bool saw_failure = false, saw_version = false;
    for (const auto& c : t.comments) {
      saw_failure = saw_failure || c.find("stroke did not converge") != std::string::npos;
      saw_version = saw_version || c.find(m.version) != std::string::npos;
    }
    CHECK(saw_failure);
    CHECK(saw_version);
    CHECK_THROWS_AS(t.column("nope"), ValidationError);
  }

  TEST_CASE("quoted csv cells") {
    std::stringstream ss("a,b\n\"x,1\",\"he said \"\"2\"\"\"\n# note\n3,4\n");
    const Table t = read_csv(ss);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][0] == "x,1");
    CHECK(t.rows[0][1] == "he said \"2\"");
    CHECK(t.rows[1][1] == "4");
    CHECK_THROWS_AS(t.column("a"), ValidationError);
    std::stringstream numeric("x,y\n1,\"2\"\n");
    CHECK(read_csv(numeric).column("y")[0] == 2.0);
    std::stringstream bad("a\n\"open\n");
    CHECK_THROWS_AS(read_csv(bad), ValidationError);
  }

  TEST_CASE("json output and SI units") {
    const std::vector<SweepRow> rows = {row(0.5, 0.04)};
    const RunManifest m = RunManifest::for_config("run", rows[0].config, true);
    std::stringstream ss;
    write_json(ss, m, rows);
    const auto j = nlohmann::json::parse(ss.str());
    CHECK(j.dump().find("efficiency") != std::string::npos);
    const auto si = result_values(*rows[0].result, true);
    const auto raw = result_values(*rows[0].result, false);
    const auto& cols = result_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (cols[i] == "w2") CHECK(si[i] == doctest::Approx(raw[i] * kJoulePerEnergyUnit));
      if (cols[i] == "power") CHECK(si[i] == doctest::Approx(raw[i] * kWattPerPowerUnit));
      if (cols[i] == "tau") CHECK(si[i] == doctest::Approx(raw[i] * kPicosecondPerTimeUnit));
      if (cols[i] == "efficiency") CHECK(si[i] == raw[i]);
    }
  }

  TEST_CASE("snapshot parses back to the same configuration") {
    const ParsedConfig a = parse_config_text("j1 = -1\nj2 = 1\nd1 = 1.5\ntau = 0.7\nmode = lindblad\ngamma = 0.3\n");
    const ParsedConfig b = parse_config_text(config_snapshot(a.cycle));
    CHECK(config_snapshot(b.cycle) == config_snapshot(a.cycle));
    REQUIRE(b.cycle.d1);
    CHECK(*b.cycle.d1 == 1.5);
    CHECK(b.cycle.bath->gamma == 0.3);
  }
}
