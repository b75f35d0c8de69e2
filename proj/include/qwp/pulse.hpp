// Discrete multimode quantization of a finite laser pulse.
//
// The classical field E_cl(t) is synthesized on [0, support] and expanded in
// a Fourier series on the quantization window [0, t_box] with spacing
// dw = 2 pi / t_box.  Each harmonic n w_1 becomes one field mode whose
// coherent label reproduces E_cl through <E>_0(t) = E_cl(t).

#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "qwp/core.hpp"
#include "qwp/waveform.hpp"

namespace qwp::pulse {

struct Sin2Envelope {};
/// Gaussian with the given full width at half maximum (a.u. time), centred
/// in the support window.
struct GaussianEnvelope {
  double fwhm;
};
struct FlatEnvelope {};

using Envelope = std::variant<Sin2Envelope, GaussianEnvelope, FlatEnvelope>;

/// Whether the envelope shape describes the field amplitude or the
/// intensity (field envelope = sqrt of the shape).
enum class EnvelopeTarget { Field, Intensity };

struct PulseSpec {
  double lambda0_nm = 1030.0;
  double n_cycles = 3.0;  // support = n_cycles optical periods
  Envelope envelope = Sin2Envelope{};
  EnvelopeTarget target = EnvelopeTarget::Field;
  double energy_J = 1e-6;
  double cep = 0.0;       // phase of the carrier at the envelope centre
  double waist_m = 10e-6; // 1/e^2 intensity radius
  double t_box = 0.0;     // a.u.; must exceed the support
  int n_modes = 400;

  double carrier_omega() const;
  double carrier_period() const;
  /// Temporal support n_cycles * 2 pi / w0 (a.u.).
  double support() const;
};

/// Default quantization window: 8x the pulse support.
inline constexpr double kDefaultBoxFactor = 8.0;
/// Harmonics with |c_n| below this fraction of the largest are left in
/// vacuum.
inline constexpr double kSpectralFloor = 1e-8;
/// Maximum fraction of the pulse energy allowed above the highest harmonic.
inline constexpr double kCoverageTolerance = 1e-6;

void validate(const PulseSpec& spec);

/// Thrown when n_modes cannot represent the pulse spectrum.
class ModeCoverageError : public std::invalid_argument {
 public:
  ModeCoverageError(const std::string& what, int required)
      : std::invalid_argument(what), required_modes(required) {}
  int required_modes;
};

/// V = c t_box A_eff with A_eff = pi w0^2 / 2.
double effective_volume(const PulseSpec& spec, const PhysicalConstants& c);

/// A_n = sqrt(hbar / (2 eps0 w V)).
double mode_amplitude(double omega, double volume, const PhysicalConstants& c);

/// Classical field of the pulse, scaled so that
/// eps0 c A_eff int E_cl^2 dt equals the configured energy.
class PulseShape {
 public:
  PulseShape(const PulseSpec& spec, const PhysicalConstants& c);

  double field(double t) const;
  double peak_amplitude() const { return amplitude_; }
  double support() const { return support_; }
  double carrier_omega() const { return omega0_; }
  /// int_0^support E_cl^2 dt by composite Gauss-Legendre quadrature.
  double field_square_integral() const;

 private:
  double unit_field(double t) const;

  Envelope envelope_;
  EnvelopeTarget target_;
  double omega0_;
  double support_;
  double cep_;
  double amplitude_ = 1.0;
};

struct FrequencyBand {
  double omega_min;
  double omega_max;
  bool contains(double omega) const {
    return omega >= omega_min && omega <= omega_max;
  }
};

struct ModeSqueeze {
  double r;
  double theta;
};

struct ModeGrid {
  std::vector<Mode> modes;                // w_n = n dw, n = 1..n_modes
  double delta_omega = 0.0;
  std::vector<cplx> fourier_coeffs;       // c_n of E_cl = sum c_n e^{-iwt} + cc
  std::vector<cplx> coherent_alphas;      // zero below the spectral floor
  std::vector<std::optional<ModeSqueeze>> squeeze;
  double energy_before_rescale = 0.0;     // sum hbar w |alpha|^2 before scaling
  double target_energy = 0.0;             // a.u.
  double alpha_scale = 1.0;               // common factor applied to alphas

  std::vector<FieldModeState> states() const;
  /// The same labels without squeezing.
  std::vector<FieldModeState> coherent_states() const;
  double photon_energy(const PhysicalConstants& c) const;
  std::size_t size() const { return modes.size(); }
};

ModeGrid build_mode_grid(const PulseSpec& spec, const PhysicalConstants& c);

/// Squeezes every mode inside `band` (all modes when absent).
ModeGrid apply_squeezing(const ModeGrid& grid, double r, double theta,
                         std::optional<FrequencyBand> band = std::nullopt);

/// Band spanned by the harmonics whose spectral intensity |c_n|^2 is at least
/// half of the maximum.
FrequencyBand spectral_fwhm_band(const ModeGrid& grid);

/// Full extent [min, max] of the squeezed modes, if any.
std::optional<FrequencyBand> squeezed_band(const ModeGrid& grid);

/// Sample times t_k = k t_box / K, K = 2 n_modes + 1, on which the Fourier
/// coefficients are defined.
std::vector<double> sample_times(const PulseSpec& spec);

/// E_cl with A_cl = -int_0^t E_cl and its integral, by quadrature.
ClassicalWaveform classical_waveform(const PulseShape& shape);

/// Waveform matched to a set of coherent modes: E = <E>_0, A = <A>_0 and the
/// exact time integral of <A>_0.
ClassicalWaveform coherent_waveform(std::vector<Mode> modes,
                                    std::vector<cplx> alphas);

/// A_cl(t) = A0 cos(w t + phase).
ClassicalWaveform monochromatic_waveform(double amp_A, double omega,
                                         double phase = 0.0);

}  // namespace qwp::pulse
