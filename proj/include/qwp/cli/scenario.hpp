// Scenario configuration: JSON schema, validation with key paths, unit
// normalization and command-line overrides.
//
// Precedence: built-in preset (used only when no config file is given)
// < config file < --set overrides.  A config file is authoritative: required
// physics keys must be present in it.

#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qwp/core.hpp"
#include "qwp/pulse.hpp"

namespace qwp::cli {

using json = nlohmann::ordered_json;

struct ConfigIssue {
  std::string path;  // JSON pointer of the offending key
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Uniform grid of `samples` times in [start, end] (a.u.).
struct TimeGrid {
  double start = 0.0;
  double end = 0.0;
  int samples = 0;
  std::vector<double> values() const;
};

/// Squeezed-minus-coherent variance for one mode and several (r, theta).
struct SingleModeScenario {
  double omega;
  double gamma;
  cplx alpha;
  std::vector<double> r_list;
  std::vector<double> theta_list;
  ElectronGaussian electron;
  TimeGrid t_grid;
};

/// Fields with vanishing mean: squeezed vacuum, Fock and thermal states.
struct ZeroMeanScenario {
  double omega;
  double gamma;
  double bsv_r;
  std::vector<double> bsv_theta_list;
  std::vector<int> fock_n_list;
  double thermal_T;  // kelvin
  ElectronGaussian electron;
  TimeGrid t_grid;
};

enum class BandChoice { Fwhm, All, Explicit };

struct SqueezeBand {
  BandChoice choice = BandChoice::Fwhm;
  double omega_min = 0.0;
  double omega_max = 0.0;
};

/// Squeezed pulse grids against the coherent pulse.
struct MultimodeScenario {
  pulse::PulseSpec pulse;
  std::vector<double> r_list;
  std::vector<double> theta_list;
  SqueezeBand band;
  ElectronGaussian electron;
  TimeGrid t_grid;
};

/// Analytic observables against the Fock-space propagator for one mode.
struct OracleScenario {
  double omega;
  double gamma;
  FieldModeState state;
  ElectronGaussian electron;
  TimeGrid t_grid;
  int n_fock;  // 0 = smallest dimension with enough headroom
  int m_grid;  // half the number of momentum points
  double half_width_sigmas;
};

struct MonochromaticWave {
  double amp_A;
  double omega;
  double phase;
};

/// Point-particle trajectory in a classical waveform.
struct ClassicalScenario {
  std::variant<pulse::PulseSpec, MonochromaticWave> waveform;
  ElectronGaussian electron;
  TimeGrid t_grid;
};

using Scenario = std::variant<SingleModeScenario, ZeroMeanScenario,
                              MultimodeScenario, OracleScenario,
                              ClassicalScenario>;

/// Subcommand names: single-mode, zero-mean, multimode, oracle-compare,
/// classical.
const std::vector<std::string>& scenario_kinds();
std::string kind_of(const Scenario& s);

/// Built-in preset for a scenario kind (the reference settings shipped in configs/).
json preset(const std::string& kind);

/// Applies `path=value` overrides.  The path is dotted ("electron.sigma_x")
/// or a JSON pointer ("/electron/sigma_x"); the value is parsed as JSON and
/// taken as a plain string if that fails.
json apply_overrides(json config, const std::vector<std::string>& overrides);

/// Validates and normalizes to atomic units.  The optional "scenario" key
/// must match `kind` when present.  Throws ConfigError listing every issue.
Scenario parse_scenario(const std::string& kind, const json& config,
                        const PhysicalConstants& c);

/// Reads the "scenario" key of a config to find its kind.
std::string detect_kind(const json& config);

/// The scenario in atomic units, as echoed into output metadata.
json normalized(const Scenario& s);

}  // namespace qwp::cli
