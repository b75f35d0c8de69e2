#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "qwp/analytic.hpp"
#include "qwp/pulse.hpp"

using namespace qwp;
using namespace qwp::pulse;

namespace {

const PhysicalConstants au = PhysicalConstants::atomic();
constexpr double kPi = std::numbers::pi;

PulseSpec three_cycle_spec() {
  PulseSpec s;  // 1030 nm, 3 cycles, sin^2, 1 uJ, 400 modes
  s.t_box = kDefaultBoxFactor * s.support();
  return s;
}

double max_reconstruction_error(const PulseSpec& spec, const std::vector<double>& times) {
  const ModeGrid g = build_mode_grid(spec, au);
  const PulseShape shape(spec, au);
  const auto st = g.coherent_states();
  double worst = 0.0;
  for (double t : times)
    worst = std::max(worst, std::abs(analytic::field_waveform_stats(st, g.modes, t, au).mean -
                                     shape.field(t)));
  return worst / shape.peak_amplitude();
}

}  // namespace

TEST_CASE("spec geometry and validation") {
  PulseSpec s = three_cycle_spec();
  CHECK(s.carrier_omega() == doctest::Approx(0.04423626459143756).epsilon(1e-12));
  CHECK(s.support() == doctest::Approx(3 * 2 * kPi / s.carrier_omega()).epsilon(1e-15));
  CHECK_NOTHROW(validate(s));

  auto bad = s;
  bad.t_box = s.support();
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = s;
  bad.n_modes = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = s;
  bad.energy_J = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = s;
  bad.waist_m = -1.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = s;
  bad.envelope = GaussianEnvelope{0.5 * s.support()};  // cut off at the edges
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad.envelope = GaussianEnvelope{0.15 * s.support()};
  CHECK_NOTHROW(validate(bad));
}

TEST_CASE("mode amplitudes") {
  PulseSpec s = three_cycle_spec();
  const double v1 = effective_volume(s, au);
  const double w0 = units::m_to_bohr(s.waist_m);
  CHECK(v1 == doctest::Approx(au.c_light * s.t_box * kPi * w0 * w0 / 2).epsilon(1e-15));

  const double a1 = mode_amplitude(0.05, v1, au);
  CHECK(a1 * a1 == doctest::Approx(1.0 / (2 * au.eps0 * 0.05 * v1)).epsilon(1e-14));

  auto s2 = s;
  s2.t_box *= 2;
  const double a2 = mode_amplitude(0.05, effective_volume(s2, au), au);
  CHECK(a2 * a2 == doctest::Approx(0.5 * a1 * a1).epsilon(1e-14));

  CHECK(mode_amplitude(0.2, v1, au) == doctest::Approx(0.5 * a1).epsilon(1e-14));

  // Wider beams couple more weakly, without bound.
  double last = 1.0;
  for (double waist : {1e-5, 1e-3, 1e-1, 10.0}) {
    auto sw = s;
    sw.waist_m = waist;
    const double g = coupling_gamma(0.05, mode_amplitude(0.05, effective_volume(sw, au), au), au);
    CHECK(g < last);
    last = g;
  }
  CHECK(last < 1e-11);
}

TEST_CASE("pulse shape normalization") {
  for (auto target : {EnvelopeTarget::Field, EnvelopeTarget::Intensity}) {
    PulseSpec s = three_cycle_spec();
    s.target = target;
    const PulseShape shape(s, au);
    // Independent check: fine trapezoid rule for int E^2 dt.
    const int n = 200000;
    const double h = shape.support() / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double e = shape.field(i * h);
      sum += (i == 0 || i == n ? 0.5 : 1.0) * e * e;
    }
    sum *= h;
    const double w0 = units::m_to_bohr(s.waist_m);
    const double energy = au.eps0 * au.c_light * kPi * w0 * w0 / 2 * sum;
    CHECK(energy == doctest::Approx(units::J_to_au_energy(s.energy_J)).epsilon(1e-9));
    CHECK(shape.field(-1.0) == 0.0);
    CHECK(shape.field(shape.support() + 1.0) == 0.0);
  }
  // cep = 0: carrier crest at the envelope centre.
  const PulseShape shape(three_cycle_spec(), au);
  CHECK(shape.field(0.5 * shape.support()) == doctest::Approx(shape.peak_amplitude()));
}

TEST_CASE("three-cycle pulse grid") {
  const PulseSpec s = three_cycle_spec();
  const ModeGrid g = build_mode_grid(s, au);
  REQUIRE(g.size() == 400);
  CHECK(g.delta_omega * s.t_box == doctest::Approx(2 * kPi).epsilon(1e-15));
  for (std::size_t n = 0; n < g.size(); ++n)
    CHECK(g.modes[n].omega() == doctest::Approx((n + 1) * g.delta_omega).epsilon(1e-15));

  const double energy = g.photon_energy(au);
  CHECK(std::abs(energy - g.target_energy) / g.target_energy < 1e-10);
  CHECK(std::abs(g.alpha_scale - 1.0) < 1e-6);

  const auto times = sample_times(s);
  REQUIRE(times.size() == 801);
  CHECK(times[1] == doctest::Approx(s.t_box / 801));
  CHECK(max_reconstruction_error(s, times) < 1e-6);

  const FrequencyBand fwhm = spectral_fwhm_band(g);
  CHECK(fwhm.contains(s.carrier_omega()));
  CHECK(fwhm.omega_max - fwhm.omega_min < s.carrier_omega());
}

TEST_CASE("reconstruction between samples converges with the mode count") {
  PulseSpec s = three_cycle_spec();
  std::vector<double> dense;
  for (int i = 0; i <= 3000; ++i) dense.push_back(s.support() * i / 3000);
  const double e400 = max_reconstruction_error(s, dense);
  s.n_modes = 1600;
  const double e1600 = max_reconstruction_error(s, dense);
  s.n_modes = 3200;
  const double e3200 = max_reconstruction_error(s, dense);
  // The sin^2 field has a jump in its second derivative at the edges, so the
  // spectrum falls like w^-3 and the truncation error like N^-2.
  CHECK(e1600 < e400 / 10);
  CHECK(e3200 < e1600 / 3);
  CHECK(e3200 < 1e-6);
}

TEST_CASE("spectral floor leaves far modes in vacuum") {
  PulseSpec s = three_cycle_spec();
  s.envelope = GaussianEnvelope{0.12 * s.support()};
  s.cep = -kPi / 2;  // odd field, no net impulse
  const ModeGrid g = build_mode_grid(s, au);
  double cmax = 0.0;
  for (const cplx& c : g.fourier_coeffs) cmax = std::max(cmax, std::abs(c));
  int vacuum = 0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (std::abs(g.fourier_coeffs[n]) < kSpectralFloor * cmax) {
      CHECK(g.coherent_alphas[n] == cplx{});
      ++vacuum;
    } else {
      CHECK(g.coherent_alphas[n] != cplx{});
    }
  }
  CHECK(vacuum > 100);
  CHECK(std::abs(g.photon_energy(au) - g.target_energy) / g.target_energy < 1e-10);
}

TEST_CASE("too few modes reports the required count") {
  PulseSpec s = three_cycle_spec();
  s.n_modes = 20;  // below the carrier harmonic
  int required = 0;
  try {
    build_mode_grid(s, au);
    FAIL("expected ModeCoverageError");
  } catch (const ModeCoverageError& e) {
    required = e.required_modes;
  }
  CHECK(required > 20);
  s.n_modes = required;
  CHECK_NOTHROW(build_mode_grid(s, au));
  s.n_modes = required - 1;
  CHECK_THROWS_AS(build_mode_grid(s, au), ModeCoverageError);
}

TEST_CASE("pulse with a net impulse is rejected") {
  PulseSpec s = three_cycle_spec();
  s.n_cycles = 2.5;
  s.t_box = kDefaultBoxFactor * s.support();
  bool coverage = false, rejected = false;
  try {
    build_mode_grid(s, au);
  } catch (const ModeCoverageError&) {
    coverage = true;
  } catch (const std::invalid_argument&) {
    rejected = true;
  }
  CHECK_FALSE(coverage);
  CHECK(rejected);
}

TEST_CASE("flat long pulse collapses onto one mode") {
  PulseSpec s;
  s.envelope = FlatEnvelope{};
  s.cep = -kPi / 2;  // sine carrier: the field starts and ends at zero
  s.n_cycles = 2000;
  s.t_box = s.support() * (1 + 1e-12);
  s.n_modes = 2100;
  const ModeGrid g = build_mode_grid(s, au);
  const std::size_t k = 1999;  // harmonic 2000
  CHECK(g.modes[k].omega() == doctest::Approx(s.carrier_omega()).epsilon(1e-11));
  const double photons = std::norm(g.coherent_alphas[k]);
  const double expected = g.target_energy / (au.hbar * s.carrier_omega());
  CHECK(photons == doctest::Approx(expected).epsilon(1e-9));
  CHECK(au.hbar * g.modes[k].omega() * photons / g.photon_energy(au) > 1 - 1e-9);
}

TEST_CASE("squeezing a grid") {
  const PulseSpec s = three_cycle_spec();
  const ModeGrid g = build_mode_grid(s, au);
  const auto coh = g.coherent_states();

  SUBCASE("r = 0 changes nothing") {
    const ModeGrid sq = apply_squeezing(g, 0.0, 0.3);
    const auto st = sq.states();
    for (double t : {0.0, 300.0, 700.0, 1400.0}) {
      CHECK(analytic::position_variance_difference(st, coh, g.modes, t, au) == 0.0);
      const auto a = analytic::field_waveform_stats(st, g.modes, t, au);
      const auto b = analytic::field_waveform_stats(coh, g.modes, t, au);
      CHECK(a.mean == b.mean);
      CHECK(a.variance == doctest::Approx(b.variance).epsilon(1e-15));
    }
  }

  SUBCASE("band selection") {
    const FrequencyBand band = spectral_fwhm_band(g);
    const ModeGrid sq = apply_squeezing(g, 1.0, 0.0, band);
    std::size_t inside = 0;
    for (std::size_t n = 0; n < g.size(); ++n) {
      CHECK(sq.squeeze[n].has_value() == band.contains(g.modes[n].omega()));
      inside += sq.squeeze[n].has_value();
    }
    CHECK(inside > 0);
    const auto ext = squeezed_band(sq);
    REQUIRE(ext);
    CHECK(ext->omega_min >= band.omega_min);
    CHECK(ext->omega_max <= band.omega_max);
    CHECK_FALSE(squeezed_band(g).has_value());
    CHECK(apply_squeezing(g, 1.0, 0.0).squeeze.back().has_value());
    CHECK_THROWS_AS(apply_squeezing(g, -0.5, 0.0), std::domain_error);
  }

  SUBCASE("difference is additive over modes") {
    const FrequencyBand band = spectral_fwhm_band(g);
    const ModeGrid sq = apply_squeezing(g, 1.5, kPi, band);
    const auto st = sq.states();
    for (double t : {200.0, 450.0, 900.0}) {
      const double whole = analytic::position_variance_difference(st, coh, g.modes, t, au);
      double parts = 0.0;
      for (std::size_t n = 0; n < g.size(); ++n) {
        if (!sq.squeeze[n]) continue;
        auto one = coh;
        one[n] = st[n];
        parts += analytic::position_variance_difference(one, coh, g.modes, t, au);
      }
      CHECK(whole == doctest::Approx(parts).epsilon(1e-12));
    }
  }

  SUBCASE("narrow band reduces to the single-mode result") {
    const std::size_t k = 23;
    const double w = g.modes[k].omega();
    const ModeGrid sq = apply_squeezing(g, 2.0, 0.0, FrequencyBand{w * (1 - 1e-9), w * (1 + 1e-9)});
    const auto st = sq.states();
    const std::vector<Mode> single{g.modes[k]};
    const std::vector<FieldModeState> a{st[k]}, b{coh[k]};
    for (double t = 0.0; t < s.t_box; t += 97.0)
      CHECK(analytic::position_variance_difference(st, coh, g.modes, t, au) ==
            analytic::position_variance_difference(a, b, single, t, au));
  }
}

TEST_CASE("classical pulse waveform") {
  const PulseSpec s = three_cycle_spec();
  const PulseShape shape(s, au);
  const ClassicalWaveform w = classical_waveform(shape);
  const double T = shape.support();
  CHECK(w.vector_potential(0.0) == 0.0);
  CHECK(w.vector_potential_integral(0.0) == 0.0);

  double amax = 0.0;
  for (int i = 0; i <= 600; ++i) amax = std::max(amax, std::abs(w.vector_potential(T * i / 600)));
  CHECK(std::abs(w.vector_potential(T)) < 1e-8 * amax);
  CHECK(w.vector_potential(2 * T) == w.vector_potential(T));

  // E = -dA/dt and dAbar/dt = A by central differences.
  const double h = 1e-2;
  for (double t : {0.13 * T, 0.5 * T, 0.77 * T}) {
    const double dA = (w.vector_potential(t + h) - w.vector_potential(t - h)) / (2 * h);
    CHECK(-dA == doctest::Approx(w.field(t)).scale(shape.peak_amplitude()).epsilon(1e-6));
    const double dI =
        (w.vector_potential_integral(t + h) - w.vector_potential_integral(t - h)) / (2 * h);
    CHECK(dI == doctest::Approx(w.vector_potential(t)).scale(amax).epsilon(1e-6));
  }
  // After the pulse the integral grows linearly with the residual A.
  const double i1 = w.vector_potential_integral(1.5 * T), i2 = w.vector_potential_integral(2 * T);
  CHECK(std::abs(i2 - i1 - 0.5 * T * w.vector_potential(T)) < 1e-9 * amax * T);
}

TEST_CASE("coherent and monochromatic waveforms") {
  const std::vector<Mode> modes{Mode::from_gamma(0.05, 0.002, au)};
  const std::vector<cplx> alpha{{2.0, 0.0}};
  const auto w = coherent_waveform(modes, alpha);
  // One real-alpha mode: A = 2 A_1 alpha cos(wt)
  const auto m = monochromatic_waveform(2 * modes[0].amp_A() * 2.0, 0.05);
  for (double t : {0.0, 7.0, 33.0, 120.0}) {
    CHECK(w.vector_potential(t) == doctest::Approx(m.vector_potential(t)).epsilon(1e-14));
    CHECK(w.field(t) == doctest::Approx(m.field(t)).scale(1e-6).epsilon(1e-12));
    CHECK(w.vector_potential_integral(t) ==
          doctest::Approx(m.vector_potential_integral(t)).scale(1e-3).epsilon(1e-12));
  }
  CHECK_THROWS_AS(coherent_waveform(modes, {}), std::invalid_argument);
  CHECK_THROWS_AS(monochromatic_waveform(1.0, 0.0), std::domain_error);
}
