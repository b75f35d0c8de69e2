// qwp: produce plot data, compare against the Fock-space oracle and
// validate scenario configs.
//
// Exit codes: 0 success, 1 I/O or unexpected failure, 2 configuration error,
// 3 numerical-validation failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qwp/cli/output.hpp"
#include "qwp/cli/runner.hpp"
#include "qwp/cli/scenario.hpp"
#include "qwp/oracle.hpp"

namespace {

using qwp::cli::json;

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qwp::cli::ConfigError({{"", "cannot read config file " + path}});
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded())
    throw qwp::cli::ConfigError({{"", "config file " + path + " is not valid JSON"}});
  return j;
}

void report_config_error(const qwp::cli::ConfigError& e) {
  std::cerr << "configuration error:\n";
  for (const auto& issue : e.issues())
    std::cerr << "  " << (issue.path.empty() ? "(file)" : issue.path) << ": "
              << issue.message << "\n";
}

struct RunOptions {
  std::string config;
  std::string out = "out";
  std::vector<std::string> overrides;
  bool svg = false;
  bool print_config = false;
};

int run_kind(const std::string& kind, const RunOptions& opt) {
  const auto c = qwp::PhysicalConstants::atomic();
  json config;
  qwp::cli::Scenario scenario;
  try {
    config = opt.config.empty() ? qwp::cli::preset(kind) : load_config(opt.config);
    config = qwp::cli::apply_overrides(config, opt.overrides);
    if (opt.print_config) {
      std::cout << config.dump(2) << "\n";
      return 0;
    }
    scenario = qwp::cli::parse_scenario(kind, config, c);
  } catch (const qwp::cli::ConfigError& e) {
    report_config_error(e);
    return kExitConfig;
  }

  qwp::cli::RunResult result;
  try {
    result = qwp::cli::run(scenario, c);
  } catch (const qwp::oracle::TruncationError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const qwp::oracle::AliasingError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    // Pulse coverage and other parameter problems found while building.
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }

  qwp::cli::OutputReport report;
  try {
    report = qwp::cli::write_outputs(result, qwp::cli::normalized(scenario), opt.out, opt.svg);
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kExitIo;
  }
  for (const auto& f : report.files) std::cout << "wrote " << f.string() << "\n";
  for (const auto& ch : report.checks)
    std::cout << (ch.passed ? "PASS " : "FAIL ") << ch.name << ": " << ch.detail << "\n";
  return report.passed ? 0 : kExitNumerical;
}

int run_validate(const std::string& path, const std::vector<std::string>& overrides) {
  const auto c = qwp::PhysicalConstants::atomic();
  try {
    json config = qwp::cli::apply_overrides(load_config(path), overrides);
    const std::string kind = qwp::cli::detect_kind(config);
    const auto scenario = qwp::cli::parse_scenario(kind, config, c);
    std::cout << qwp::cli::normalized(scenario).dump(2) << "\n";
    return 0;
  } catch (const qwp::cli::ConfigError& e) {
    report_config_error(e);
    return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electron wave packets driven by quantized light: analytic "
               "observables, Fock-space oracle and plot data"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (overrides QWP_THREADS)")
      ->check(CLI::PositiveNumber);

  RunOptions opt;
  std::string selected;
  for (const auto& kind : qwp::cli::scenario_kinds()) {
    auto* sub = app.add_subcommand(kind, "Run the " + kind + " scenario");
    sub->add_option("--config", opt.config, "Scenario JSON (default: built-in preset)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
    sub->add_option("--set", opt.overrides, "Override a key: path=json (repeatable)");
    sub->add_flag("--svg", opt.svg, "Also write static SVG plots");
    sub->add_flag("--print-config", opt.print_config,
                  "Print the effective config and exit");
    sub->callback([&selected, kind] { selected = kind; });
  }
  std::string validate_path;
  std::vector<std::string> validate_overrides;
  auto* validate = app.add_subcommand("validate", "Validate a scenario config and print it in atomic units");
  validate->add_option("--config", validate_path, "Scenario JSON")->required();
  validate->add_option("--set", validate_overrides, "Override a key: path=json (repeatable)");
  validate->callback([&selected] { selected = "validate"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  if (threads > 0) setenv("QWP_THREADS", std::to_string(threads).c_str(), 1);

  try {
    if (selected == "validate") return run_validate(validate_path, validate_overrides);
    return run_kind(selected, opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}
