#include "qwp/cli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "qwp/analytic.hpp"
#include "qwp/oracle.hpp"
#include "qwp/parallel.hpp"
#include "qwp/pulse.hpp"

namespace qwp::cli {

namespace {

constexpr double kPi = std::numbers::pi;

std::string label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

CheckResult make_check(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// Distance from t to the nearest point of the set {a + k period}.
double periodic_distance(double t, double a, double period) {
  double u = std::fmod(t - a, period);
  if (u < 0.0) u += period;
  return std::min(u, period - u);
}

json intervals_json(const std::vector<std::pair<double, double>>& iv) {
  json out = json::array();
  for (const auto& [a, b] : iv) out.push_back({a, b});
  return out;
}

// Maximal runs of samples where pred holds, as [t_first, t_last] pairs.
template <typename Pred>
json sample_runs(const std::vector<double>& t, Pred pred) {
  json out = json::array();
  std::size_t i = 0;
  while (i < t.size()) {
    if (!pred(i)) {
      ++i;
      continue;
    }
    std::size_t k = i;
    while (k + 1 < t.size() && pred(k + 1)) ++k;
    out.push_back({t[i], t[k]});
    i = k + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------

RunResult run_single_mode(const SingleModeScenario& s, const PhysicalConstants& c) {
  const Mode mode = Mode::from_gamma(s.omega, s.gamma, c);
  const std::vector<Mode> modes{mode};
  const Electron electron = s.electron;
  const std::vector<double> times = s.t_grid.values();
  const double dt = times.size() > 1 ? times[1] - times[0] : 0.0;

  struct Job {
    double r;
    double theta;
  };
  std::vector<Job> jobs;
  for (double theta : s.theta_list)
    for (double r : s.r_list) jobs.push_back({r, theta});

  RunResult result;
  result.curves.resize(jobs.size());
  std::vector<CheckResult> checks(jobs.size());
  std::vector<json> windows(jobs.size());

  parallel_for(jobs.size(), [&](std::size_t k) {
    const auto [r, theta] = jobs[k];
    const std::vector<FieldModeState> coh{Coherent{s.alpha}};
    const std::vector<FieldModeState> sq{SqueezedCoherent{s.alpha, r, theta}};
    const analytic::ReductionWindow win = analytic::reduction_window(r, theta, s.omega);

    Curve& curve = result.curves[k];
    curve.name = "r" + label(r) + "_theta" + label(theta);
    curve.params = {{"r", r}, {"theta", theta}, {"window_within_claim", win.within_claim}};
    curve.columns = {"t", "var_x_coherent", "var_x_squeezed", "diff", "in_window"};
    curve.plot_columns = {"diff"};

    double max_abs = 0.0;
    std::size_t mismatches = 0;
    for (double t : times) {
      const double vc = analytic::position_variance(electron, coh, modes, t, c).total;
      const double vs = analytic::position_variance(electron, sq, modes, t, c).total;
      const double diff = analytic::position_variance_difference(sq, coh, modes, t, c);
      const bool inside = win.contains(t);
      curve.rows.push_back({t, vc, vs, diff, inside ? 1.0 : 0.0});
      max_abs = std::max(max_abs, std::abs(diff));
      if (r > 0.0 && (diff < 0.0) != inside) {
        // Sign changes are resolved to one grid step; the difference also
        // vanishes at every full period, where its sign is meaningless.
        const bool near_edge = periodic_distance(t, win.start, win.period) <= dt ||
                               periodic_distance(t, win.end, win.period) <= dt ||
                               periodic_distance(t, 0.0, win.period) <= dt;
        if (!near_edge) ++mismatches;
      }
    }
    if (r == 0.0) {
      checks[k] = make_check(curve.name + ": r = 0 difference vanishes", max_abs == 0.0,
                             "max |diff| = " + sci(max_abs));
    } else {
      checks[k] = make_check(curve.name + ": negative exactly inside reduction windows",
                             mismatches == 0,
                             std::to_string(mismatches) + " samples disagree");
    }
    windows[k] = {{"curve", curve.name},
                  {"period", win.period},
                  {"half_width", win.half_width()},
                  {"within_claim", win.within_claim},
                  {"intervals", intervals_json(win.intervals(times.front(), times.back()))}};
  });
  result.checks = std::move(checks);
  result.extra["reduction_windows"] = windows;
  return result;
}

// ---------------------------------------------------------------------------

RunResult run_zero_mean(const ZeroMeanScenario& s, const PhysicalConstants& c) {
  const Mode mode = Mode::from_gamma(s.omega, s.gamma, c);
  const std::vector<Mode> modes{mode};
  const Electron electron = s.electron;
  const std::vector<double> times = s.t_grid.values();

  std::vector<std::pair<std::string, FieldModeState>> states;
  states.emplace_back("vacuum", Vacuum{});
  for (double theta : s.bsv_theta_list)
    states.emplace_back("bsv_theta" + label(theta), SqueezedCoherent{0.0, s.bsv_r, theta});
  for (int n : s.fock_n_list) states.emplace_back("fock_n" + std::to_string(n), Fock{n});
  states.emplace_back("thermal_T" + label(s.thermal_T), Thermal{s.thermal_T});

  RunResult result;
  result.curves.resize(states.size());
  parallel_for(states.size(), [&](std::size_t k) {
    const std::vector<FieldModeState> st{states[k].second};
    const std::vector<FieldModeState> vac{Vacuum{}};
    Curve& curve = result.curves[k];
    curve.name = states[k].first;
    curve.params = {{"state", describe(states[k].second)}};
    curve.columns = {"t", "mean_x", "var_x", "field_term", "diff_vs_vacuum"};
    curve.plot_columns = {"diff_vs_vacuum"};
    for (double t : times) {
      const auto v = analytic::position_variance(electron, st, modes, t, c);
      curve.rows.push_back({t, analytic::position_mean(electron, st, modes, t, c), v.total,
                            v.field_term,
                            analytic::position_variance_difference(st, vac, modes, t, c)});
    }
  });

  // Fock(n) field fluctuations are (2n + 1) times the vacuum ones.
  const Curve& vacuum = result.curves.front();
  for (std::size_t k = 0; k < states.size(); ++k) {
    const Curve& curve = result.curves[k];
    if (auto* f = std::get_if<Fock>(&states[k].second)) {
      double worst = 0.0;
      for (std::size_t i = 0; i < times.size(); ++i) {
        const double base = vacuum.rows[i][3];
        if (base <= 0.0) continue;
        worst = std::max(worst, std::abs(curve.rows[i][3] / base - (2.0 * f->n + 1.0)) /
                                    (2.0 * f->n + 1.0));
      }
      result.checks.push_back(make_check(curve.name + ": field term ratio equals 2n+1",
                                         worst < 1e-12, "max relative error " + sci(worst)));
    }
    bool same_mean = true;
    for (std::size_t i = 0; i < times.size(); ++i)
      same_mean = same_mean && curve.rows[i][1] == vacuum.rows[i][1];
    result.checks.push_back(make_check(curve.name + ": mean position equals vacuum value",
                                       same_mean, same_mean ? "identical" : "differs"));
  }
  const double x = c.hbar * s.omega / (c.k_boltzmann * s.thermal_T);
  const double direct = 1.0 / std::tanh(0.5 * x);
  const double via_nbar = thermal_coth(s.omega, s.thermal_T, c);
  const double rel = std::abs(direct - via_nbar) / direct;
  result.checks.push_back(make_check("thermal: coth(hw/2kT) equals 2 n_bar + 1", rel < 1e-12,
                                     "relative error " + sci(rel)));
  result.extra["thermal_mean_photon"] = thermal_mean_photon(s.omega, s.thermal_T, c);
  return result;
}

// ---------------------------------------------------------------------------

RunResult run_multimode(const MultimodeScenario& s, const PhysicalConstants& c) {
  const pulse::ModeGrid grid = pulse::build_mode_grid(s.pulse, c);
  const pulse::PulseShape shape(s.pulse, c);
  const Electron electron = s.electron;
  const std::vector<double> times = s.t_grid.values();
  const std::vector<FieldModeState> coherent = grid.coherent_states();

  std::optional<pulse::FrequencyBand> band;
  if (s.band.choice == BandChoice::Fwhm) band = pulse::spectral_fwhm_band(grid);
  else if (s.band.choice == BandChoice::Explicit)
    band = pulse::FrequencyBand{s.band.omega_min, s.band.omega_max};

  RunResult result;
  {
    const double energy = grid.photon_energy(c);
    const double rel = std::abs(energy - grid.target_energy) / grid.target_energy;
    result.checks.push_back(make_check("pulse energy equals sum of hbar w |alpha|^2",
                                       rel < 1e-10, "relative error " + sci(rel)));
    double worst = 0.0;
    for (double t : pulse::sample_times(s.pulse)) {
      const double e = analytic::field_waveform_stats(coherent, grid.modes, t, c).mean;
      worst = std::max(worst, std::abs(e - shape.field(t)));
    }
    worst /= shape.peak_amplitude();
    result.checks.push_back(make_check("coherent mean field reproduces the waveform at the sample times",
                                       worst < 1e-6, "max error / peak " + sci(worst)));
    // Between the sample times the truncated series converges only as the
    // spectral tail allows; reported, not checked.
    double dense = 0.0;
    constexpr int kDense = 4000;
    for (int i = 0; i <= kDense; ++i) {
      const double t = shape.support() * i / kDense;
      const double e = analytic::field_waveform_stats(coherent, grid.modes, t, c).mean;
      dense = std::max(dense, std::abs(e - shape.field(t)));
    }
    result.extra["reconstruction_error_on_support"] = dense / shape.peak_amplitude();
  }

  struct Job {
    double r;
    double theta;
  };
  std::vector<Job> jobs;
  for (double theta : s.theta_list)
    for (double r : s.r_list) jobs.push_back({r, theta});
  result.curves.resize(jobs.size());
  std::vector<CheckResult> checks(jobs.size());
  std::vector<json> info(jobs.size());

  parallel_for(jobs.size(), [&](std::size_t k) {
    const auto [r, theta] = jobs[k];
    const pulse::ModeGrid sq = pulse::apply_squeezing(grid, r, theta, band);
    const std::vector<FieldModeState> states = sq.states();
    const auto extent = pulse::squeezed_band(sq);
    const double w_c = extent ? 0.5 * (extent->omega_min + extent->omega_max) : 0.0;
    const double d_w = extent ? extent->omega_max - extent->omega_min : 0.0;

    Curve& curve = result.curves[k];
    curve.name = "r" + label(r) + "_theta" + label(theta);
    curve.params = {{"r", r},
                    {"theta", theta},
                    {"squeezed_modes",
                     std::count_if(sq.squeeze.begin(), sq.squeeze.end(),
                                   [](const auto& q) { return q.has_value(); })},
                    {"band_center", w_c},
                    {"band_width", d_w}};
    curve.columns = {"t", "mean_E", "var_E", "diff", "condition"};
    curve.plot_columns = {"diff"};

    std::size_t support_samples = 0;
    std::size_t non_negative = 0;
    std::size_t violations = 0;
    for (double t : times) {
      const auto f = analytic::field_waveform_stats(states, sq.modes, t, c);
      const double diff =
          analytic::position_variance_difference(states, coherent, sq.modes, t, c);
      const bool cond =
          extent && r > 0.0 &&
          analytic::spectral_width_bound(r, theta, w_c, d_w, t).satisfied;
      curve.rows.push_back({t, f.mean, f.variance, diff, cond ? 1.0 : 0.0});
      if (cond && !(diff < 0.0)) ++violations;
      if (t <= s.pulse.support()) {
        ++support_samples;
        if (diff >= 0.0) ++non_negative;
      }
    }
    checks[k] = make_check(curve.name + ": sufficient condition implies reduction",
                           violations == 0,
                           std::to_string(violations) + " condition samples not negative");
    const std::vector<double> tcol = times;
    info[k] = {{"curve", curve.name},
               {"non_negative_fraction_on_support",
                support_samples ? static_cast<double>(non_negative) / support_samples : 1.0},
               {"negative_runs", sample_runs(tcol, [&](std::size_t i) {
                  return curve.rows[i][3] < 0.0;
                })},
               {"condition_runs", sample_runs(tcol, [&](std::size_t i) {
                  return curve.rows[i][4] > 0.5;
                })},
               {"simplified_bound",
                analytic::spectral_width_bound(r, theta, w_c, d_w, 0.0).relative_width_bound},
               {"relative_width", w_c > 0.0 ? d_w / w_c : 0.0}};
  });
  for (auto& ch : checks) result.checks.push_back(std::move(ch));
  result.extra["curves"] = info;
  result.extra["grid"] = {{"delta_omega", grid.delta_omega},
                          {"n_modes", grid.size()},
                          {"alpha_scale", grid.alpha_scale},
                          {"peak_field", shape.peak_amplitude()}};
  if (band) result.extra["band"] = {band->omega_min, band->omega_max};
  return result;
}

// ---------------------------------------------------------------------------

RunResult run_oracle_compare(const OracleScenario& s, const PhysicalConstants& c) {
  const Mode mode = Mode::from_gamma(s.omega, s.gamma, c);
  const std::vector<Mode> modes{mode};
  const std::vector<FieldModeState> states{s.state};
  const Electron electron = s.electron;
  const std::vector<double> times = s.t_grid.values();

  oracle::OracleSetup setup;
  setup.modes = modes;
  setup.states = states;
  setup.electron = s.electron;
  setup.fock_dims = {s.n_fock};
  setup.half_points = s.m_grid;
  setup.half_width_sigmas = s.half_width_sigmas;
  const oracle::OracleResult res = oracle::run_oracle(setup, times, c);

  RunResult result;
  Curve curve;
  curve.name = "oracle";
  curve.params = {{"fock_dim", res.fock_dims.front()},
                  {"grid_points", res.grid_points},
                  {"retained_weight", res.retained_weight}};
  curve.columns = {"t",      "mean_x_analytic", "mean_x_oracle", "var_x_analytic",
                   "var_x_oracle", "mean_p",   "var_p",         "norm",
                   "energy", "mean_x_fd"};
  curve.plot_columns = {"var_x_analytic", "var_x_oracle"};

  double dev_mean = 0.0, dev_var = 0.0, dev_fd = 0.0;
  const auto& first = res.samples.front();
  double drift_norm = 0.0, drift_energy = 0.0, drift_p = 0.0, edge = 0.0;
  for (const auto& o : res.samples) {
    const double mx = analytic::position_mean(electron, states, modes, o.t, c);
    const double vx = analytic::position_variance(electron, states, modes, o.t, c).total;
    curve.rows.push_back({o.t, mx, o.mean_x, vx, o.var_x, o.mean_p, o.var_p, o.norm,
                          o.energy, o.mean_x_fd});
    const double scale = std::max(std::abs(mx), std::sqrt(vx));
    dev_mean = std::max(dev_mean, std::abs(o.mean_x - mx) / scale);
    dev_var = std::max(dev_var, std::abs(o.var_x - vx) / vx);
    dev_fd = std::max(dev_fd, std::abs(o.mean_x_fd - o.mean_x) / scale);
    drift_norm = std::max(drift_norm, std::abs(o.norm - first.norm));
    drift_energy = std::max(drift_energy, std::abs(o.energy - first.energy) /
                                              std::abs(first.energy));
    drift_p = std::max({drift_p, std::abs(o.mean_p - first.mean_p) /
                                     std::max(std::abs(first.mean_p), std::sqrt(first.var_p)),
                        std::abs(o.var_p - first.var_p) / first.var_p});
    edge = std::max(edge, o.edge_population);
  }
  const double tol = std::holds_alternative<Thermal>(s.state) ? 1e-5 : 1e-6;
  result.checks = {
      make_check("oracle vs analytic <X>", dev_mean < tol,
                 "max relative deviation " + sci(dev_mean) + " (tolerance " + sci(tol) + ")"),
      make_check("oracle vs analytic Var X", dev_var < tol,
                 "max relative deviation " + sci(dev_var) + " (tolerance " + sci(tol) + ")"),
      make_check("DFT and finite-difference <X> agree", dev_fd < 1e-6,
                 "max relative deviation " + sci(dev_fd)),
      make_check("norm conserved", drift_norm < 1e-12, "drift " + sci(drift_norm)),
      make_check("energy conserved", drift_energy < 1e-10, "relative drift " + sci(drift_energy)),
      make_check("momentum statistics constant", drift_p < 1e-10,
                 "relative drift " + sci(drift_p)),
      make_check("Fock truncation headroom", edge < 1e-10, "edge population " + sci(edge)),
  };
  result.extra["max_relative_deviation"] = {{"mean_x", dev_mean}, {"var_x", dev_var}};
  result.extra["fock_dim"] = res.fock_dims.front();
  result.curves.push_back(std::move(curve));
  return result;
}

// ---------------------------------------------------------------------------

RunResult run_classical(const ClassicalScenario& s, const PhysicalConstants& c) {
  ClassicalWaveform wave;
  double support = 0.0;
  if (auto* p = std::get_if<pulse::PulseSpec>(&s.waveform)) {
    const pulse::PulseShape shape(*p, c);
    wave = pulse::classical_waveform(shape);
    support = shape.support();
  } else {
    const auto& m = std::get<MonochromaticWave>(s.waveform);
    wave = pulse::monochromatic_waveform(m.amp_A, m.omega, m.phase);
  }
  const std::vector<double> times = s.t_grid.values();
  Curve curve;
  curve.name = "trajectory";
  curve.params = {{"x0", s.electron.x0}, {"p0", s.electron.p0}};
  curve.columns = {"t", "E", "A", "A_integral", "x", "p_kin"};
  curve.plot_columns = {"x"};
  for (double t : times) {
    const auto pt = analytic::classical_trajectory(s.electron.x0, s.electron.p0, wave, t, c);
    curve.rows.push_back({t, wave.field(t), wave.vector_potential(t),
                          wave.vector_potential_integral(t), pt.x, pt.p_kin});
  }
  RunResult result;
  if (support > 0.0) {
    double a_max = 0.0;
    for (const auto& row : curve.rows) a_max = std::max(a_max, std::abs(row[2]));
    const double residual = std::abs(wave.vector_potential(support));
    const double start = std::abs(wave.vector_potential(0.0));
    result.checks.push_back(make_check("A_cl(0) = 0", start == 0.0, "A_cl(0) = " + sci(start)));
    result.checks.push_back(make_check("zero net impulse after the pulse",
                                       residual <= 1e-6 * a_max,
                                       "|A_cl(end)| / max|A_cl| = " +
                                           sci(a_max > 0.0 ? residual / a_max : 0.0)));
  }
  result.curves.push_back(std::move(curve));
  return result;
}

}  // namespace

RunResult run(const Scenario& scenario, const PhysicalConstants& c) {
  return std::visit(
      [&](const auto& s) -> RunResult {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SingleModeScenario>) return run_single_mode(s, c);
        else if constexpr (std::is_same_v<T, ZeroMeanScenario>) return run_zero_mean(s, c);
        else if constexpr (std::is_same_v<T, MultimodeScenario>) return run_multimode(s, c);
        else if constexpr (std::is_same_v<T, OracleScenario>) return run_oracle_compare(s, c);
        else return run_classical(s, c);
      },
      scenario);
}

}  // namespace qwp::cli
