#include "qwp/cli/scenario.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <set>

namespace qwp::cli {

namespace {

constexpr double kPi = std::numbers::pi;
using Issues = std::vector<ConfigIssue>;

std::string child(const std::string& path, const std::string& key) {
  return path + "/" + key;
}

std::string type_name(const json& j) { return j.type_name(); }

// Reads the members of one JSON object, recording problems instead of
// throwing so that every issue in a file is reported at once.
class Reader {
 public:
  Reader(const json* node, std::string path, Issues& issues,
         std::set<std::string> allowed)
      : node_(node), path_(std::move(path)), issues_(issues) {
    if (node_ == nullptr) return;
    if (!node_->is_object()) {
      fail(path_, "expected an object, got " + type_name(*node_));
      node_ = nullptr;
      return;
    }
    for (const auto& [key, value] : node_->items()) {
      if (!allowed.count(key)) fail(child(path_, key), "unknown key");
    }
  }

  bool ok() const { return node_ != nullptr; }
  const std::string& path() const { return path_; }

  const json* get(const std::string& key, bool required) {
    if (node_ == nullptr) return nullptr;
    auto it = node_->find(key);
    if (it == node_->end()) {
      if (required) fail(child(path_, key), "missing required key");
      return nullptr;
    }
    return &*it;
  }

  /// Number with an optional default and a range check returning an error
  /// message (empty when valid).
  double number(const std::string& key, std::optional<double> fallback,
                const std::function<std::string(double)>& check = {}) {
    const json* v = get(key, !fallback.has_value());
    if (v == nullptr) return fallback.value_or(std::numeric_limits<double>::quiet_NaN());
    if (!v->is_number()) {
      fail(child(path_, key), "expected a number, got " + type_name(*v));
      return std::numeric_limits<double>::quiet_NaN();
    }
    const double x = v->get<double>();
    if (!std::isfinite(x)) {
      fail(child(path_, key), "expected a finite number");
    } else if (check) {
      if (std::string msg = check(x); !msg.empty()) fail(child(path_, key), msg);
    }
    return x;
  }

  int integer(const std::string& key, std::optional<int> fallback,
              const std::function<std::string(double)>& check = {}) {
    const json* v = get(key, !fallback.has_value());
    if (v == nullptr) return fallback.value_or(0);
    if (!v->is_number_integer()) {
      fail(child(path_, key), "expected an integer, got " + type_name(*v));
      return 0;
    }
    const auto x = v->get<long long>();
    if (check) {
      if (std::string msg = check(static_cast<double>(x)); !msg.empty())
        fail(child(path_, key), msg);
    }
    return static_cast<int>(x);
  }

  std::string text(const std::string& key, std::optional<std::string> fallback,
                   const std::set<std::string>& choices) {
    const json* v = get(key, !fallback.has_value());
    if (v == nullptr) return fallback.value_or("");
    if (!v->is_string()) {
      fail(child(path_, key), "expected a string, got " + type_name(*v));
      return "";
    }
    const auto s = v->get<std::string>();
    if (!choices.empty() && !choices.count(s)) {
      std::string list;
      for (const auto& ch : choices) list += (list.empty() ? "" : ", ") + ch;
      fail(child(path_, key), "expected one of {" + list + "}, got \"" + s + "\"");
    }
    return s;
  }

  std::vector<double> numbers(const std::string& key,
                              const std::function<std::string(double)>& check = {}) {
    std::vector<double> out;
    const json* v = get(key, true);
    if (v == nullptr) return out;
    if (!v->is_array() || v->empty()) {
      fail(child(path_, key), "expected a non-empty array of numbers");
      return out;
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      const std::string p = child(child(path_, key), std::to_string(i));
      if (!e.is_number()) {
        fail(p, "expected a number, got " + type_name(e));
        continue;
      }
      const double x = e.get<double>();
      if (!std::isfinite(x)) fail(p, "expected a finite number");
      else if (check) {
        if (std::string msg = check(x); !msg.empty()) fail(p, msg);
      }
      out.push_back(x);
    }
    return out;
  }

  std::vector<int> integers(const std::string& key,
                            const std::function<std::string(double)>& check = {}) {
    std::vector<int> out;
    const json* v = get(key, true);
    if (v == nullptr) return out;
    if (!v->is_array() || v->empty()) {
      fail(child(path_, key), "expected a non-empty array of integers");
      return out;
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      const std::string p = child(child(path_, key), std::to_string(i));
      if (!e.is_number_integer()) {
        fail(p, "expected an integer, got " + type_name(e));
        continue;
      }
      const auto x = e.get<long long>();
      if (check) {
        if (std::string msg = check(static_cast<double>(x)); !msg.empty()) fail(p, msg);
      }
      out.push_back(static_cast<int>(x));
    }
    return out;
  }

  /// Complex number given as a real number or as [re, im].
  cplx complex(const std::string& key, std::optional<cplx> fallback) {
    const json* v = get(key, !fallback.has_value());
    if (v == nullptr) return fallback.value_or(cplx{});
    if (v->is_number()) return {v->get<double>(), 0.0};
    if (v->is_array() && v->size() == 2 && (*v)[0].is_number() && (*v)[1].is_number())
      return {(*v)[0].get<double>(), (*v)[1].get<double>()};
    fail(child(path_, key), "expected a number or a [re, im] pair");
    return {};
  }

  Reader object(const std::string& key, bool required, std::set<std::string> allowed) {
    return Reader(get(key, required), child(path_, key), issues_, std::move(allowed));
  }

  void fail(const std::string& path, const std::string& message) {
    issues_.push_back({path, message});
  }

 private:
  const json* node_;
  std::string path_;
  Issues& issues_;
};

std::string positive(double x) { return x > 0.0 ? "" : "must be > 0"; }
std::string non_negative(double x) { return x >= 0.0 ? "" : "must be >= 0"; }

std::function<std::string(double)> at_least(double lo) {
  return [lo](double x) {
    return x >= lo ? std::string{} : "must be >= " + json(lo).dump();
  };
}

ElectronGaussian read_electron(Reader& parent) {
  Reader r = parent.object("electron", true, {"sigma_x", "p0", "x0"});
  ElectronGaussian e{};
  e.sigma_x = r.number("sigma_x", std::nullopt, positive);
  e.p0 = r.number("p0", 0.0);
  e.x0 = r.number("x0", 0.0);
  return e;
}

// Time grid in units of `period` ("cycles"), atomic units or femtoseconds.
TimeGrid read_time_grid(Reader& parent, double period) {
  Reader r = parent.object("t_grid", true, {"unit", "start", "end", "samples"});
  const std::string unit = r.text("unit", "cycles", {"cycles", "au", "fs"});
  const double start = r.number("start", 0.0, non_negative);
  const double end = r.number("end", std::nullopt);
  const int samples = r.integer("samples", std::nullopt, at_least(2));
  if (r.ok() && std::isfinite(start) && std::isfinite(end) && !(end > start))
    r.fail(child(r.path(), "end"), "must be greater than start (strictly increasing grid)");
  double scale = 1.0;
  if (unit == "cycles") scale = period;
  else if (unit == "fs") scale = units::fs_to_au_time(1.0);
  return {start * scale, end * scale, samples};
}

pulse::PulseSpec read_pulse(Reader& parent, const std::string& key) {
  Reader r = parent.object(key, true,
                           {"lambda0_nm", "n_cycles", "envelope", "envelope_target",
                            "gaussian_fwhm_fs", "energy_uJ", "cep_rad", "waist_um",
                            "t_box_factor", "n_modes"});
  pulse::PulseSpec p;
  p.lambda0_nm = r.number("lambda0_nm", std::nullopt, positive);
  p.n_cycles = r.number("n_cycles", std::nullopt, positive);
  const std::string env = r.text("envelope", "sin2", {"sin2", "gaussian", "flat"});
  const std::string target =
      r.text("envelope_target", "field", {"field", "intensity"});
  p.target = target == "intensity" ? pulse::EnvelopeTarget::Intensity
                                   : pulse::EnvelopeTarget::Field;
  if (env == "gaussian") {
    p.envelope = pulse::GaussianEnvelope{
        units::fs_to_au_time(r.number("gaussian_fwhm_fs", std::nullopt, positive))};
  } else {
    if (r.get("gaussian_fwhm_fs", false) != nullptr)
      r.fail(child(r.path(), "gaussian_fwhm_fs"), "only valid with envelope \"gaussian\"");
    p.envelope = env == "flat" ? pulse::Envelope{pulse::FlatEnvelope{}}
                               : pulse::Envelope{pulse::Sin2Envelope{}};
  }
  p.energy_J = 1e-6 * r.number("energy_uJ", std::nullopt, positive);
  p.cep = r.number("cep_rad", 0.0);
  p.waist_m = 1e-6 * r.number("waist_um", std::nullopt, positive);
  const double factor = r.number("t_box_factor", pulse::kDefaultBoxFactor, [](double x) {
    return x > 1.0 ? std::string{} : "must be > 1 (the box must exceed the pulse)";
  });
  p.n_modes = r.integer("n_modes", std::nullopt, at_least(1));
  if (std::isfinite(p.lambda0_nm) && std::isfinite(p.n_cycles) && std::isfinite(factor))
    p.t_box = factor * p.support();
  if (r.ok() && std::holds_alternative<pulse::GaussianEnvelope>(p.envelope) &&
      std::isfinite(p.t_box)) {
    try {
      pulse::validate(p);
    } catch (const std::invalid_argument& e) {
      r.fail(child(r.path(), "gaussian_fwhm_fs"), e.what());
    }
  }
  return p;
}

FieldModeState read_state(Reader& parent) {
  Reader r = parent.object("state", true,
                           {"type", "alpha", "r", "theta_rad", "n", "temperature_K"});
  const std::string type =
      r.text("type", std::nullopt, {"vacuum", "coherent", "squeezed", "fock", "thermal"});
  auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (r.get(k, false) != nullptr)
        r.fail(child(r.path(), k), "not a parameter of a " + type + " state");
  };
  if (type == "coherent") {
    forbid({"r", "theta_rad", "n", "temperature_K"});
    return Coherent{r.complex("alpha", std::nullopt)};
  }
  if (type == "squeezed") {
    forbid({"n", "temperature_K"});
    const cplx alpha = r.complex("alpha", cplx{});
    const double sq = r.number("r", std::nullopt, non_negative);
    return SqueezedCoherent{alpha, sq, r.number("theta_rad", 0.0)};
  }
  if (type == "fock") {
    forbid({"alpha", "r", "theta_rad", "temperature_K"});
    return Fock{r.integer("n", std::nullopt, non_negative)};
  }
  if (type == "thermal") {
    forbid({"alpha", "r", "theta_rad", "n"});
    return Thermal{r.number("temperature_K", std::nullopt, positive)};
  }
  forbid({"alpha", "r", "theta_rad", "n", "temperature_K"});
  return Vacuum{};
}

SqueezeBand read_band(Reader& r, const PhysicalConstants&) {
  SqueezeBand band;
  const json* v = r.get("band", false);
  if (v == nullptr) return band;
  const std::string path = child(r.path(), "band");
  if (v->is_string()) {
    const auto s = v->get<std::string>();
    if (s == "fwhm") band.choice = BandChoice::Fwhm;
    else if (s == "all") band.choice = BandChoice::All;
    else r.fail(path, "expected \"fwhm\", \"all\" or [lambda_min_nm, lambda_max_nm]");
    return band;
  }
  if (v->is_array() && v->size() == 2 && (*v)[0].is_number() && (*v)[1].is_number()) {
    const double a = (*v)[0].get<double>();
    const double b = (*v)[1].get<double>();
    if (!(a > 0.0) || !(b > a)) {
      r.fail(path, "wavelength band must satisfy 0 < lambda_min < lambda_max");
      return band;
    }
    band.choice = BandChoice::Explicit;
    band.omega_min = units::wavelength_nm_to_omega(b);
    band.omega_max = units::wavelength_nm_to_omega(a);
    return band;
  }
  r.fail(path, "expected \"fwhm\", \"all\" or [lambda_min_nm, lambda_max_nm]");
  return band;
}

void check_kind(Reader& r, const std::string& kind) {
  const json* v = r.get("scenario", false);
  if (v == nullptr) return;
  if (!v->is_string() || v->get<std::string>() != kind)
    r.fail("/scenario", "config is for scenario " + v->dump() +
                            " but the command runs \"" + kind + "\"");
}

void check_coupling(Reader& r, double omega, double gamma, const PhysicalConstants& c) {
  if (!(omega > 0.0) || !std::isfinite(gamma)) return;
  const Mode m = Mode::from_gamma(omega, gamma, c);
  try {
    const Mode one[] = {m};
    effective_mass(one, c);
  } catch (const CouplingRangeError& e) {
    r.fail(child(r.path(), "gamma"), e.what());
  }
}

json electron_json(const ElectronGaussian& e) {
  return {{"sigma_x", e.sigma_x}, {"p0", e.p0}, {"x0", e.x0}};
}

json grid_json(const TimeGrid& g) {
  return {{"start", g.start}, {"end", g.end}, {"samples", g.samples}};
}

json pulse_json(const pulse::PulseSpec& p) {
  json env;
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, pulse::Sin2Envelope>) env = "sin2";
        else if constexpr (std::is_same_v<T, pulse::FlatEnvelope>) env = "flat";
        else env = {{"gaussian_fwhm", e.fwhm}};
      },
      p.envelope);
  return {{"omega0", p.carrier_omega()},
          {"lambda0_nm", p.lambda0_nm},
          {"n_cycles", p.n_cycles},
          {"support", p.support()},
          {"envelope", env},
          {"envelope_target",
           p.target == pulse::EnvelopeTarget::Field ? "field" : "intensity"},
          {"energy", units::J_to_au_energy(p.energy_J)},
          {"cep", p.cep},
          {"waist", units::m_to_bohr(p.waist_m)},
          {"t_box", p.t_box},
          {"n_modes", p.n_modes}};
}

json state_json(const FieldModeState& s) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Vacuum>) return {{"type", "vacuum"}};
        else if constexpr (std::is_same_v<T, Coherent>)
          return {{"type", "coherent"}, {"alpha", {v.alpha.real(), v.alpha.imag()}}};
        else if constexpr (std::is_same_v<T, SqueezedCoherent>)
          return {{"type", "squeezed"},
                  {"alpha", {v.alpha.real(), v.alpha.imag()}},
                  {"r", v.r},
                  {"theta", v.theta}};
        else if constexpr (std::is_same_v<T, Fock>) return {{"type", "fock"}, {"n", v.n}};
        else return {{"type", "thermal"}, {"temperature_K", v.temperature}};
      },
      s);
}

json default_electron(double p0) {
  return {{"sigma_x", 10.0}, {"p0", p0}, {"x0", 0.0}};
}

json default_grid(double end, int samples) {
  return {{"unit", "cycles"}, {"start", 0.0}, {"end", end}, {"samples", samples}};
}

json reference_pulse() {
  return {{"lambda0_nm", 1030.0}, {"n_cycles", 3.0},    {"envelope", "sin2"},
          {"envelope_target", "field"}, {"energy_uJ", 1.0}, {"cep_rad", 0.0},
          {"waist_um", 10.0},      {"t_box_factor", 8.0}, {"n_modes", 400}};
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& i : issues) msg += "\n  " + i.path + ": " + i.message;
        return msg;
      }()),
      issues_(std::move(issues)) {}

std::vector<double> TimeGrid::values() const {
  std::vector<double> t(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i)
    t[static_cast<std::size_t>(i)] =
        i + 1 == samples ? end : start + (end - start) * i / (samples - 1);
  return t;
}

const std::vector<std::string>& scenario_kinds() {
  static const std::vector<std::string> kinds = {
      "single-mode", "zero-mean", "multimode", "oracle-compare", "classical"};
  return kinds;
}

std::string kind_of(const Scenario& s) {
  return scenario_kinds()[s.index()];
}

json preset(const std::string& kind) {
  if (kind == "single-mode")
    return {{"scenario", kind},
            {"omega", 0.05},
            {"gamma", 0.002},
            {"alpha", {5.0, 0.0}},
            {"r_list", {0.5, 1.0, 2.0}},
            {"theta_list_rad", {0.0, kPi}},
            {"electron", default_electron(0.0)},
            {"t_grid", default_grid(3.0, 601)}};
  if (kind == "zero-mean")
    return {{"scenario", kind},
            {"omega", 0.05},
            {"gamma", 0.002},
            {"bsv", {{"r", 2.0}, {"theta_list_rad", {0.0, 0.5 * kPi, kPi}}}},
            {"fock_n_list", {1, 10, 100}},
            {"thermal_T_K", 300.0},
            {"electron", default_electron(0.0)},
            {"t_grid", default_grid(3.0, 601)}};
  if (kind == "multimode")
    return {{"scenario", kind},
            {"pulse", reference_pulse()},
            {"squeeze",
             {{"r_list", {0.75, 1.0}}, {"theta_list_rad", {0.0, kPi}}, {"band", "fwhm"}}},
            {"electron", default_electron(0.0)},
            {"t_grid", default_grid(3.0, 601)}};
  if (kind == "oracle-compare")
    return {{"scenario", kind},
            {"omega", 0.05},
            {"gamma", 0.002},
            {"state", {{"type", "coherent"}, {"alpha", {5.0, 0.0}}}},
            {"electron", default_electron(0.1)},
            {"t_grid", default_grid(3.0, 61)},
            {"n_fock", 0},
            {"m_grid", 256},
            {"half_width_sigmas", 16.0}};
  if (kind == "classical")
    return {{"scenario", kind},
            {"waveform", {{"type", "pulse"}, {"pulse", reference_pulse()}}},
            {"electron", default_electron(0.0)},
            {"t_grid", default_grid(6.0, 601)}};
  throw ConfigError(std::vector<ConfigIssue>{{"/scenario", "unknown scenario kind \"" + kind + "\""}});
}

json apply_overrides(json config, const std::vector<std::string>& overrides) {
  std::vector<ConfigIssue> issues;
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      issues.push_back({item, "override must look like key.path=value"});
      continue;
    }
    std::string key = item.substr(0, eq);
    const std::string raw = item.substr(eq + 1);
    if (key.front() != '/') {
      std::string ptr;
      std::size_t pos = 0;
      while (pos <= key.size()) {
        const auto dot = key.find('.', pos);
        const std::string part = key.substr(pos, dot == std::string::npos ? dot : dot - pos);
        ptr += "/" + part;
        if (dot == std::string::npos) break;
        pos = dot + 1;
      }
      key = ptr;
    }
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    try {
      config[json::json_pointer(key)] = value;
    } catch (const json::exception& e) {
      issues.push_back({key, std::string("cannot apply override: ") + e.what()});
    }
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return config;
}

std::string detect_kind(const json& config) {
  auto it = config.find("scenario");
  if (it == config.end() || !it->is_string())
    throw ConfigError(std::vector<ConfigIssue>{{"/scenario", "missing required key (scenario kind)"}});
  const auto kind = it->get<std::string>();
  for (const auto& k : scenario_kinds())
    if (k == kind) return kind;
  throw ConfigError(std::vector<ConfigIssue>{{"/scenario", "unknown scenario kind \"" + kind + "\""}});
}

Scenario parse_scenario(const std::string& kind, const json& config,
                        const PhysicalConstants& c) {
  Issues issues;
  std::optional<Scenario> result;

  if (kind == "single-mode") {
    Reader r(&config, "", issues,
             {"scenario", "omega", "gamma", "alpha", "r_list", "theta_list_rad",
              "electron", "t_grid"});
    check_kind(r, kind);
    SingleModeScenario s;
    s.omega = r.number("omega", std::nullopt, positive);
    s.gamma = r.number("gamma", std::nullopt, non_negative);
    s.alpha = r.complex("alpha", cplx{});
    s.r_list = r.numbers("r_list", non_negative);
    s.theta_list = r.numbers("theta_list_rad");
    s.electron = read_electron(r);
    s.t_grid = read_time_grid(r, 2.0 * kPi / s.omega);
    check_coupling(r, s.omega, s.gamma, c);
    result = s;
  } else if (kind == "zero-mean") {
    Reader r(&config, "", issues,
             {"scenario", "omega", "gamma", "bsv", "fock_n_list", "thermal_T_K",
              "electron", "t_grid"});
    check_kind(r, kind);
    ZeroMeanScenario s;
    s.omega = r.number("omega", std::nullopt, positive);
    s.gamma = r.number("gamma", std::nullopt, non_negative);
    Reader b = r.object("bsv", true, {"r", "theta_list_rad"});
    s.bsv_r = b.number("r", std::nullopt, non_negative);
    s.bsv_theta_list = b.numbers("theta_list_rad");
    s.fock_n_list = r.integers("fock_n_list", non_negative);
    s.thermal_T = r.number("thermal_T_K", std::nullopt, positive);
    s.electron = read_electron(r);
    s.t_grid = read_time_grid(r, 2.0 * kPi / s.omega);
    check_coupling(r, s.omega, s.gamma, c);
    result = s;
  } else if (kind == "multimode") {
    Reader r(&config, "", issues, {"scenario", "pulse", "squeeze", "electron", "t_grid"});
    check_kind(r, kind);
    MultimodeScenario s;
    s.pulse = read_pulse(r, "pulse");
    Reader q = r.object("squeeze", true, {"r_list", "theta_list_rad", "band"});
    s.r_list = q.numbers("r_list", non_negative);
    s.theta_list = q.numbers("theta_list_rad");
    s.band = read_band(q, c);
    s.electron = read_electron(r);
    s.t_grid = read_time_grid(r, s.pulse.carrier_period());
    result = s;
  } else if (kind == "oracle-compare") {
    Reader r(&config, "", issues,
             {"scenario", "omega", "gamma", "state", "electron", "t_grid", "n_fock",
              "m_grid", "half_width_sigmas"});
    check_kind(r, kind);
    OracleScenario s;
    s.omega = r.number("omega", std::nullopt, positive);
    s.gamma = r.number("gamma", std::nullopt, non_negative);
    s.state = read_state(r);
    s.electron = read_electron(r);
    s.t_grid = read_time_grid(r, 2.0 * kPi / s.omega);
    s.n_fock = r.integer("n_fock", 0, non_negative);
    s.m_grid = r.integer("m_grid", 256, at_least(16));
    s.half_width_sigmas = r.number("half_width_sigmas", 16.0, at_least(8.0));
    check_coupling(r, s.omega, s.gamma, c);
    result = s;
  } else if (kind == "classical") {
    Reader r(&config, "", issues, {"scenario", "waveform", "electron", "t_grid"});
    check_kind(r, kind);
    ClassicalScenario s;
    Reader w = r.object("waveform", true, {"type", "pulse", "amp_A", "omega", "phase_rad"});
    const std::string type = w.text("type", std::nullopt, {"pulse", "monochromatic"});
    double period = std::numeric_limits<double>::quiet_NaN();
    if (type == "pulse") {
      pulse::PulseSpec p = read_pulse(w, "pulse");
      period = p.carrier_period();
      s.waveform = p;
    } else if (type == "monochromatic") {
      MonochromaticWave m{w.number("amp_A", std::nullopt), w.number("omega", std::nullopt, positive),
                          w.number("phase_rad", 0.0)};
      period = 2.0 * kPi / m.omega;
      s.waveform = m;
    }
    s.electron = read_electron(r);
    s.t_grid = read_time_grid(r, period);
    result = s;
  } else {
    issues.push_back({"/scenario", "unknown scenario kind \"" + kind + "\""});
  }

  if (!issues.empty()) throw ConfigError(std::move(issues));
  return *result;
}

json normalized(const Scenario& scenario) {
  json j = {{"scenario", kind_of(scenario)}, {"units", "hartree atomic units"}};
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SingleModeScenario>) {
          j["omega"] = s.omega;
          j["gamma"] = s.gamma;
          j["alpha"] = {s.alpha.real(), s.alpha.imag()};
          j["r_list"] = s.r_list;
          j["theta_list"] = s.theta_list;
          j["electron"] = electron_json(s.electron);
          j["t_grid"] = grid_json(s.t_grid);
        } else if constexpr (std::is_same_v<T, ZeroMeanScenario>) {
          j["omega"] = s.omega;
          j["gamma"] = s.gamma;
          j["bsv"] = {{"r", s.bsv_r}, {"theta_list", s.bsv_theta_list}};
          j["fock_n_list"] = s.fock_n_list;
          j["thermal_T_K"] = s.thermal_T;
          j["electron"] = electron_json(s.electron);
          j["t_grid"] = grid_json(s.t_grid);
        } else if constexpr (std::is_same_v<T, MultimodeScenario>) {
          j["pulse"] = pulse_json(s.pulse);
          json band;
          if (s.band.choice == BandChoice::Fwhm) band = "fwhm";
          else if (s.band.choice == BandChoice::All) band = "all";
          else band = {s.band.omega_min, s.band.omega_max};
          j["squeeze"] = {{"r_list", s.r_list}, {"theta_list", s.theta_list}, {"band", band}};
          j["electron"] = electron_json(s.electron);
          j["t_grid"] = grid_json(s.t_grid);
        } else if constexpr (std::is_same_v<T, OracleScenario>) {
          j["omega"] = s.omega;
          j["gamma"] = s.gamma;
          j["state"] = state_json(s.state);
          j["electron"] = electron_json(s.electron);
          j["t_grid"] = grid_json(s.t_grid);
          j["n_fock"] = s.n_fock;
          j["m_grid"] = s.m_grid;
          j["half_width_sigmas"] = s.half_width_sigmas;
        } else {
          if (auto* p = std::get_if<pulse::PulseSpec>(&s.waveform))
            j["waveform"] = {{"type", "pulse"}, {"pulse", pulse_json(*p)}};
          else {
            const auto& m = std::get<MonochromaticWave>(s.waveform);
            j["waveform"] = {{"type", "monochromatic"},
                             {"amp_A", m.amp_A},
                             {"omega", m.omega},
                             {"phase", m.phase}};
          }
          j["electron"] = electron_json(s.electron);
          j["t_grid"] = grid_json(s.t_grid);
        }
      },
      scenario);
  return j;
}

}  // namespace qwp::cli
