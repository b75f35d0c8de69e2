#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qwp/cli/output.hpp"
#include "qwp/cli/runner.hpp"
#include "qwp/cli/scenario.hpp"

using namespace qwp;
using namespace qwp::cli;
namespace fs = std::filesystem;

namespace {

const PhysicalConstants au = PhysicalConstants::atomic();
constexpr double kPi = std::numbers::pi;

std::vector<ConfigIssue> issues_of(const std::string& kind, const json& cfg) {
  try {
    parse_scenario(kind, cfg, au);
  } catch (const ConfigError& e) {
    return e.issues();
  }
  return {};
}

bool has_issue(const std::vector<ConfigIssue>& issues, const std::string& path) {
  return std::any_of(issues.begin(), issues.end(),
                     [&](const ConfigIssue& i) { return i.path == path; });
}

RunResult run_preset(const std::string& kind, const std::vector<std::string>& overrides = {}) {
  const json cfg = apply_overrides(preset(kind), overrides);
  return run(parse_scenario(kind, cfg, au), au);
}

void require_all_pass(const RunResult& r) {
  REQUIRE_FALSE(r.checks.empty());
  for (const auto& c : r.checks) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.passed);
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qwp_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("every preset parses and names its kind") {
  for (const auto& kind : scenario_kinds()) {
    CAPTURE(kind);
    const json cfg = preset(kind);
    CHECK(detect_kind(cfg) == kind);
    const Scenario s = parse_scenario(kind, cfg, au);
    CHECK(kind_of(s) == kind);
    CHECK(normalized(s)["units"] == "hartree atomic units");
  }
  CHECK_THROWS(preset("no-such-kind"));
}

TEST_CASE("validation reports key paths") {
  SUBCASE("missing required key") {
    json cfg = preset("single-mode");
    cfg.erase("omega");
    CHECK(has_issue(issues_of("single-mode", cfg), "/omega"));
  }
  SUBCASE("negative squeezing") {
    json cfg = preset("single-mode");
    cfg["r_list"] = {-1.0, 0.5};
    CHECK(has_issue(issues_of("single-mode", cfg), "/r_list/0"));
  }
  SUBCASE("unknown keys are rejected") {
    json cfg = preset("multimode");
    cfg["pulse"]["colour"] = "green";
    CHECK(has_issue(issues_of("multimode", cfg), "/pulse/colour"));
  }
  SUBCASE("mismatched scenario tag") {
    CHECK(has_issue(issues_of("zero-mean", preset("single-mode")), "/scenario"));
  }
  SUBCASE("all issues are collected at once") {
    json cfg = preset("single-mode");
    cfg.erase("omega");
    cfg["r_list"] = {-1.0};
    cfg["electron"]["sigma_x"] = -2.0;
    const auto issues = issues_of("single-mode", cfg);
    CHECK(issues.size() >= 3);
    CHECK(has_issue(issues, "/electron/sigma_x"));
  }
  SUBCASE("coupling beyond the mass threshold") {
    json cfg = preset("single-mode");
    cfg["gamma"] = 10.0;
    CHECK(has_issue(issues_of("single-mode", cfg), "/gamma"));
  }
}

TEST_CASE("normalization to atomic units") {
  const json n = normalized(parse_scenario("multimode", preset("multimode"), au));
  CHECK(n["pulse"]["omega0"].get<double>() == doctest::Approx(0.04423626459143756).epsilon(1e-12));
  const double period = 2 * kPi / n["pulse"]["omega0"].get<double>();
  CHECK(n["pulse"]["support"].get<double>() == doctest::Approx(3 * period).epsilon(1e-14));
  CHECK(n["pulse"]["t_box"].get<double>() == doctest::Approx(24 * period).epsilon(1e-14));
  CHECK(n["pulse"]["energy"].get<double>() ==
        doctest::Approx(units::uJ_to_au_energy(1.0)).epsilon(1e-14));

  const json s = normalized(parse_scenario("single-mode", preset("single-mode"), au));
  CHECK(s["t_grid"]["end"].get<double>() == doctest::Approx(3 * 2 * kPi / 0.05).epsilon(1e-14));
  CHECK(s["t_grid"]["samples"] == 601);
}

TEST_CASE("overrides") {
  const json base = preset("single-mode");
  const json a = apply_overrides(base, {"electron.sigma_x=4", "/t_grid/samples=11"});
  CHECK(a["electron"]["sigma_x"] == 4);
  CHECK(a["t_grid"]["samples"] == 11);
  const json b = apply_overrides(base, {"r_list=[0.25]", "t_grid.unit=au"});
  CHECK(b["r_list"].size() == 1);
  CHECK(b["t_grid"]["unit"] == "au");
  CHECK_THROWS_AS(apply_overrides(base, {"no_equals_sign"}), ConfigError);
  // Overrides land in the config before validation, so typos are caught there.
  CHECK(has_issue(issues_of("single-mode", apply_overrides(base, {"electron.sigmax=4"})),
                  "/electron/sigmax"));
}

TEST_CASE("single-mode runs") {
  const auto r = run_preset("single-mode", {"t_grid.samples=301"});
  require_all_pass(r);
  CHECK(r.curves.size() == 6);

  const auto zero = run_preset("single-mode", {"r_list=[0]", "t_grid.samples=101"});
  require_all_pass(zero);
  for (const auto& c : zero.curves) {
    const auto col = std::find(c.columns.begin(), c.columns.end(), "diff") - c.columns.begin();
    REQUIRE(col < static_cast<long>(c.columns.size()));
    for (const auto& row : c.rows) CHECK(row[col] == 0.0);
  }
}

TEST_CASE("zero-mean, multimode and classical runs pass their checks") {
  require_all_pass(run_preset("zero-mean", {"t_grid.samples=201"}));
  require_all_pass(run_preset("multimode", {"t_grid.samples=201"}));
  require_all_pass(run_preset("classical", {"t_grid.samples=201"}));
}

TEST_CASE("oracle comparison") {
  const auto r = run_preset("oracle-compare", {"t_grid.samples=7", "m_grid=128"});
  require_all_pass(r);
  CHECK(r.extra["fock_dim"].get<int>() >= 64);
}

TEST_CASE("outputs are deterministic and reload exactly") {
  const auto r = run_preset("single-mode", {"t_grid.samples=51"});
  const json scenario = normalized(parse_scenario("single-mode", preset("single-mode"), au));
  const fs::path a = scratch("a"), b = scratch("b");
  const auto ra = write_outputs(r, scenario, a, true);
  const auto rb = write_outputs(r, scenario, b, false);
  CHECK(ra.passed);
  CHECK(rb.passed);
  int csv = 0, svg = 0;
  for (const auto& f : ra.files) {
    if (f.extension() == ".svg") {
      ++svg;
      CHECK(slurp(f).starts_with("<svg"));
    } else if (f.extension() == ".csv") {
      ++csv;
      CHECK(slurp(f) == slurp(b / f.filename()));
      const Table t = read_csv(f);
      CHECK(t.columns.front() == "t");
      CHECK(t.rows.size() == 51);
    }
  }
  CHECK(csv == 6);
  CHECK(svg == 6);
  CHECK(fs::exists(a / "single-mode_summary.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("doubles survive formatting") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
}
