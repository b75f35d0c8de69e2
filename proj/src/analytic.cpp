#include "qwp/analytic.hpp"

#include <cmath>
#include <limits>

namespace qwp::analytic {

namespace {

constexpr double kPi = std::numbers::pi;

// 1 - exp(-i x) without cancellation for small x or near full periods.
cplx one_minus_phase(double x) {
  const double s = std::sin(0.5 * x);
  return {2.0 * s * s, std::sin(x)};
}

void check_lengths(std::span<const FieldModeState> states,
                   std::span<const Mode> modes) {
  if (states.size() != modes.size())
    throw std::invalid_argument("states and modes must have equal length");
}

// S(t) = sum gamma_n^2 sin(w_n t)
double gamma_sine_sum(std::span<const Mode> modes, double t) {
  double s = 0.0;
  for (const Mode& m : modes) s += m.gamma() * m.gamma() * std::sin(m.omega() * t);
  return s;
}

// Dimensionless fluctuation factor of the time-integrated vector potential,
// Var(Abar_0) = (hbar m / e)^2 * factor.
double abar_fluctuation(const FieldModeState& state, const Mode& mode, double t,
                        const PhysicalConstants& c) {
  const cplx g = gamma_factor(mode, t);
  const double g2 = std::norm(g);
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Vacuum> || std::is_same_v<T, Coherent>) {
          return g2;
        } else if constexpr (std::is_same_v<T, SqueezedCoherent>) {
          const cplx u = std::cosh(s.r) * std::conj(g) -
                         std::sinh(s.r) * std::polar(1.0, s.theta) * g;
          return std::norm(u);
        } else if constexpr (std::is_same_v<T, Fock>) {
          return (2.0 * s.n + 1.0) * g2;
        } else {
          return thermal_coth(mode.omega(), s.temperature, c) * g2;
        }
      },
      state);
}

double field_fluctuation(const FieldModeState& state, const Mode& mode,
                         double t, const PhysicalConstants& c) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Vacuum> || std::is_same_v<T, Coherent>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, SqueezedCoherent>) {
          const double wt = mode.omega() * t;
          const cplx u = std::cosh(s.r) * std::polar(1.0, -wt) -
                         std::polar(1.0, -s.theta) * std::sinh(s.r) *
                             std::polar(1.0, wt);
          return std::norm(u);
        } else if constexpr (std::is_same_v<T, Fock>) {
          return 2.0 * s.n + 1.0;
        } else {
          return thermal_coth(mode.omega(), s.temperature, c);
        }
      },
      state);
}

}  // namespace

cplx gamma_factor(const Mode& mode, double t) {
  return mode.gamma() * one_minus_phase(mode.omega() * t);
}

EvolvedModeLabel evolve_labels(const FieldModeState& state, const Mode& mode,
                               double p, double t) {
  cplx alpha{};
  cplx z{};
  if (auto* coh = std::get_if<Coherent>(&state)) {
    alpha = coh->alpha;
  } else if (auto* sq = std::get_if<SqueezedCoherent>(&state)) {
    alpha = sq->alpha;
    z = std::polar(sq->r, sq->theta);
  } else if (!std::holds_alternative<Vacuum>(state)) {
    throw UnsupportedStateError("evolve_labels: label evolution is defined "
                                "only for vacuum, coherent and squeezed states");
  }
  const double pg = p * mode.gamma();
  const cplx rot = std::polar(1.0, -mode.omega() * t);
  const cplx displaced = (alpha - pg) * rot;
  return {pg + displaced, pg * std::imag(alpha - displaced),
          z * std::polar(1.0, -2.0 * mode.omega() * t)};
}

MomentumStats momentum_stats(const Electron& electron,
                             const PhysicalConstants& c) {
  const ElectronMoments m = to_moments(electron, c);
  return {m.mean_p, m.var_p};
}

double abar_mean(std::span<const FieldModeState> states,
                 std::span<const Mode> modes, double t) {
  check_lengths(states, modes);
  double sum = 0.0;
  for (std::size_t n = 0; n < modes.size(); ++n) {
    const cplx alpha = mean_annihilation(states[n]);
    if (alpha == cplx{}) continue;
    const Mode& m = modes[n];
    sum += (m.amp_A() / m.omega()) * 2.0 *
           std::imag(alpha * one_minus_phase(m.omega() * t));
  }
  return sum;
}

double abar_variance_mode(const FieldModeState& state, const Mode& mode,
                          double t, const PhysicalConstants& c) {
  const double scale = c.hbar * c.mass_e / c.charge_e;
  return scale * scale * abar_fluctuation(state, mode, t, c);
}

double position_mean(const Electron& electron,
                     std::span<const FieldModeState> states,
                     std::span<const Mode> modes, double t,
                     const PhysicalConstants& c) {
  check_lengths(states, modes);
  const ElectronMoments e = to_moments(electron, c);
  const double mg = effective_mass(modes, c);
  return e.mean_x + e.mean_p * t / mg -
         (c.charge_e / c.mass_e) * abar_mean(states, modes, t) +
         2.0 * c.hbar * e.mean_p * gamma_sine_sum(modes, t);
}

VarianceBreakdown position_variance(const Electron& electron,
                                    std::span<const FieldModeState> states,
                                    std::span<const Mode> modes, double t,
                                    const PhysicalConstants& c) {
  check_lengths(states, modes);
  const ElectronMoments e = to_moments(electron, c);
  const double mg = effective_mass(modes, c);
  const double tau = t / mg;

  VarianceBreakdown out{};
  out.free_spread = e.var_x + e.corr_xp * tau + e.var_p * tau * tau;

  double field = 0.0;
  for (std::size_t n = 0; n < modes.size(); ++n)
    field += abar_variance_mode(states[n], modes[n], t, c);
  const double em = c.charge_e / c.mass_e;
  out.field_term = em * em * field;

  // Exact expansion of Var P (t/m(g) + 2 hbar S)^2 + C0 (t/m(g) + 2 hbar S)
  // beyond the free part.
  const double s = gamma_sine_sum(modes, t);
  out.cross_p_terms = 4.0 * c.hbar * e.var_p * tau * s +
                      4.0 * c.hbar * c.hbar * e.var_p * s * s +
                      2.0 * c.hbar * e.corr_xp * s;
  out.total = out.free_spread + out.field_term + out.cross_p_terms;
  return out;
}

double position_variance_difference(std::span<const FieldModeState> states_a,
                                    std::span<const FieldModeState> states_b,
                                    std::span<const Mode> modes, double t,
                                    const PhysicalConstants& c) {
  check_lengths(states_a, modes);
  check_lengths(states_b, modes);
  double diff = 0.0;
  for (std::size_t n = 0; n < modes.size(); ++n)
    diff += abar_variance_mode(states_a[n], modes[n], t, c) -
            abar_variance_mode(states_b[n], modes[n], t, c);
  const double em = c.charge_e / c.mass_e;
  return em * em * diff;
}

bool ReductionWindow::contains(double t) const {
  double u = std::fmod(t - start, period);
  if (u < 0.0) u += period;
  return u > 0.0 && u < end - start;
}

std::vector<std::pair<double, double>> ReductionWindow::intervals(
    double t0, double t1) const {
  std::vector<std::pair<double, double>> out;
  const auto k_lo = static_cast<long>(std::floor((t0 - end) / period));
  const auto k_hi = static_cast<long>(std::ceil((t1 - start) / period));
  for (long k = k_lo; k <= k_hi; ++k) {
    const double a = start + k * period;
    const double b = end + k * period;
    if (b <= t0 || a >= t1) continue;
    out.emplace_back(std::max(a, t0), std::min(b, t1));
  }
  return out;
}

double reduction_half_angle(double r) {
  if (!(r >= 0.0)) throw std::domain_error("squeezing parameter must be >= 0");
  return std::atan2(1.0, std::sinh(r));
}

ReductionWindow reduction_window(double r, double theta, double omega) {
  if (!(omega > 0.0)) throw std::domain_error("reduction_window: omega must be > 0");
  const double half = reduction_half_angle(r);
  return {(theta + kPi - half) / omega, (theta + kPi + half) / omega,
          2.0 * kPi / omega, r > 0.0};
}

SpectralWidthCheck spectral_width_bound(double r, double theta,
                                        double omega_center,
                                        double delta_omega, double t) {
  if (!(delta_omega >= 0.0))
    throw std::domain_error("spectral_width_bound: delta_omega must be >= 0");
  const double half = reduction_half_angle(r);
  // Smallest positive window centre: theta folded into (-pi, pi].
  double th = std::remainder(theta, 2.0 * kPi);
  if (th <= -kPi) th += 2.0 * kPi;
  const bool ok =
      std::abs(omega_center * t - theta - kPi) + 0.5 * delta_omega * t < half;
  return {ok, 2.0 * half / (th + kPi)};
}

FieldStats field_waveform_stats(std::span<const FieldModeState> states,
                                std::span<const Mode> modes, double t,
                                const PhysicalConstants& c) {
  check_lengths(states, modes);
  cplx mean_c{};
  double mean = 0.0;
  double scale = 0.0;
  double var = 0.0;
  for (std::size_t n = 0; n < modes.size(); ++n) {
    const Mode& m = modes[n];
    const double amp_E = m.amp_E();
    const cplx alpha = mean_annihilation(states[n]);
    const cplx u = alpha * std::polar(1.0, -m.omega() * t);
    mean_c += cplx{0.0, amp_E} * (u - std::conj(u));
    mean += -2.0 * amp_E * u.imag();
    scale += 2.0 * amp_E * std::abs(alpha);
    var += amp_E * amp_E * field_fluctuation(states[n], m, t, c);
  }
  if (std::abs(mean_c.imag()) > 1e-10 * (scale + std::numeric_limits<double>::min()))
    throw std::logic_error("field_waveform_stats: <E> is not real");
  return {mean, var};
}

ClassicalPoint classical_trajectory(double x0, double p0,
                                    const ClassicalWaveform& waveform, double t,
                                    const PhysicalConstants& c) {
  const double x = x0 + p0 * t / c.mass_e -
                   c.charge_e * waveform.vector_potential_integral(t) / c.mass_e;
  const double p_kin = p0 - c.charge_e * waveform.vector_potential(t);
  return {x, p_kin};
}

ObservableSeries observable_series(const Electron& electron,
                                   std::span<const FieldModeState> states,
                                   std::span<const Mode> modes,
                                   std::span<const double> times,
                                   const PhysicalConstants& c) {
  ObservableSeries s;
  const MomentumStats ps = momentum_stats(electron, c);
  for (double t : times) {
    const FieldStats f = field_waveform_stats(states, modes, t, c);
    s.t.push_back(t);
    s.mean_x.push_back(position_mean(electron, states, modes, t, c));
    s.var_x.push_back(position_variance(electron, states, modes, t, c).total);
    s.mean_p.push_back(ps.mean);
    s.var_p.push_back(ps.variance);
    s.mean_E.push_back(f.mean);
    s.var_E.push_back(f.variance);
  }
  return s;
}

}  // namespace qwp::analytic
