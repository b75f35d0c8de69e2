#include "qwp/pulse.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>

namespace qwp::pulse {

namespace {

constexpr double kPi = std::numbers::pi;
// |int E dt| / int |E| dt above which the pulse is rejected as carrying a
// net impulse.
constexpr double kImpulseTolerance = 1e-8;

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 8> kGLNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGLWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

// int_a^b f by 8-point Gauss-Legendre on panels no longer than `panel`.
template <typename F>
double integrate(F&& f, double a, double b, double panel) {
  if (b <= a) return 0.0;
  const auto count = static_cast<long>(std::ceil((b - a) / panel));
  const double h = (b - a) / static_cast<double>(count);
  double sum = 0.0;
  for (long i = 0; i < count; ++i) {
    const double mid = a + (i + 0.5) * h;
    double part = 0.0;
    for (std::size_t k = 0; k < kGLNodes.size(); ++k)
      part += kGLWeights[k] * f(mid + 0.5 * h * kGLNodes[k]);
    sum += 0.5 * h * part;
  }
  return sum;
}

struct FftwPlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};

// c_n = (1/K) sum_k x_k e^{+2 pi i n k / K}, n = 0..K/2.
std::vector<cplx> fourier_coefficients(std::vector<double> samples) {
  const int k = static_cast<int>(samples.size());
  std::vector<cplx> out(static_cast<std::size_t>(k / 2 + 1));
  std::unique_ptr<fftw_plan_s, FftwPlanDeleter> plan(fftw_plan_dft_r2c_1d(
      k, samples.data(), reinterpret_cast<fftw_complex*>(out.data()),
      FFTW_ESTIMATE));
  fftw_execute(plan.get());
  for (auto& v : out) v = std::conj(v) / static_cast<double>(k);
  return out;
}

std::vector<double> sample_field(const PulseShape& shape, double t_box, int k) {
  std::vector<double> e(static_cast<std::size_t>(k));
  const double dt = t_box / k;
  for (int i = 0; i < k; ++i) e[static_cast<std::size_t>(i)] = shape.field(i * dt);
  return e;
}

void check_coverage(const PulseShape& shape, const PulseSpec& spec) {
  const int n = spec.n_modes;
  const int over = 16 * n + 1;
  const auto coeffs = fourier_coefficients(sample_field(shape, spec.t_box, over));
  std::vector<double> power(coeffs.size());
  for (std::size_t i = 1; i < coeffs.size(); ++i) power[i] = std::norm(coeffs[i]);
  const double total = std::accumulate(power.begin() + 1, power.end(), 0.0);
  // tail[m] = energy in harmonics above m
  double tail = 0.0;
  int required = static_cast<int>(coeffs.size()) - 1;
  for (int m = static_cast<int>(coeffs.size()) - 1; m >= 1; --m) {
    tail += power[static_cast<std::size_t>(m)];
    if (tail > kCoverageTolerance * total) {
      required = m;
      break;
    }
  }
  double beyond = 0.0;
  for (std::size_t i = static_cast<std::size_t>(n) + 1; i < power.size(); ++i)
    beyond += power[i];
  if (beyond > kCoverageTolerance * total) {
    throw ModeCoverageError(
        "n_modes = " + std::to_string(n) +
            " does not cover the pulse spectrum; at least " +
            std::to_string(required) + " modes are required",
        required);
  }
}

}  // namespace

double PulseSpec::carrier_omega() const {
  return units::wavelength_nm_to_omega(lambda0_nm);
}

double PulseSpec::carrier_period() const { return 2.0 * kPi / carrier_omega(); }

double PulseSpec::support() const { return n_cycles * carrier_period(); }

void validate(const PulseSpec& spec) {
  if (!(spec.lambda0_nm > 0.0)) throw std::invalid_argument("lambda0 must be > 0");
  if (!(spec.n_cycles > 0.0)) throw std::invalid_argument("n_cycles must be > 0");
  if (!(spec.energy_J > 0.0)) throw std::invalid_argument("pulse energy must be > 0");
  if (!(spec.waist_m > 0.0)) throw std::invalid_argument("waist must be > 0");
  if (spec.n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
  if (!std::isfinite(spec.cep)) throw std::invalid_argument("cep must be finite");
  if (!(spec.t_box > spec.support()))
    throw std::invalid_argument("t_box must exceed the pulse support");
  if (auto* g = std::get_if<GaussianEnvelope>(&spec.envelope)) {
    if (!(g->fwhm > 0.0)) throw std::invalid_argument("gaussian fwhm must be > 0");
    // Field envelope at the support edges must be negligible.
    const double half = 0.5 * spec.support();
    const double k = spec.target == EnvelopeTarget::Field ? 4.0 : 2.0;
    if (std::exp(-k * std::log(2.0) * half * half / (g->fwhm * g->fwhm)) > 1e-6)
      throw std::invalid_argument(
          "gaussian envelope is truncated by the support; increase n_cycles");
  }
}

double effective_volume(const PulseSpec& spec, const PhysicalConstants& c) {
  if (!(spec.waist_m > 0.0) || !(spec.t_box > 0.0))
    throw std::invalid_argument("effective_volume: waist and t_box must be > 0");
  const double w0 = units::m_to_bohr(spec.waist_m);
  return c.c_light * spec.t_box * kPi * w0 * w0 / 2.0;
}

double mode_amplitude(double omega, double volume, const PhysicalConstants& c) {
  return std::sqrt(c.hbar / (2.0 * c.eps0 * omega * volume));
}

PulseShape::PulseShape(const PulseSpec& spec, const PhysicalConstants& c)
    : envelope_(spec.envelope),
      target_(spec.target),
      omega0_(spec.carrier_omega()),
      support_(spec.support()),
      cep_(spec.cep) {
  validate(spec);
  amplitude_ = 1.0;
  const double w0 = units::m_to_bohr(spec.waist_m);
  const double area = kPi * w0 * w0 / 2.0;
  const double energy = units::J_to_au_energy(spec.energy_J);
  amplitude_ =
      std::sqrt(energy / (c.eps0 * c.c_light * area * field_square_integral()));
}

double PulseShape::unit_field(double t) const {
  if (t < 0.0 || t > support_) return 0.0;
  const double tc = 0.5 * support_;
  const double env = std::visit(
      [&](const auto& e) -> double {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Sin2Envelope>) {
          const double s = std::sin(kPi * t / support_);
          return target_ == EnvelopeTarget::Field ? s * s : s;
        } else if constexpr (std::is_same_v<T, GaussianEnvelope>) {
          const double k = target_ == EnvelopeTarget::Field ? 4.0 : 2.0;
          const double u = (t - tc) / e.fwhm;
          return std::exp(-k * std::log(2.0) * u * u);
        } else {
          return 1.0;
        }
      },
      envelope_);
  return env * std::cos(omega0_ * (t - tc) + cep_);
}

double PulseShape::field(double t) const { return amplitude_ * unit_field(t); }

double PulseShape::field_square_integral() const {
  const double panel = (2.0 * kPi / omega0_) / 16.0;
  return integrate([&](double t) { return std::pow(field(t), 2); }, 0.0,
                   support_, panel);
}

std::vector<FieldModeState> ModeGrid::states() const {
  std::vector<FieldModeState> out;
  out.reserve(modes.size());
  for (std::size_t n = 0; n < modes.size(); ++n) {
    if (squeeze[n])
      out.emplace_back(SqueezedCoherent{coherent_alphas[n], squeeze[n]->r,
                                        squeeze[n]->theta});
    else
      out.emplace_back(Coherent{coherent_alphas[n]});
  }
  return out;
}

std::vector<FieldModeState> ModeGrid::coherent_states() const {
  std::vector<FieldModeState> out;
  out.reserve(modes.size());
  for (const cplx& a : coherent_alphas) out.emplace_back(Coherent{a});
  return out;
}

double ModeGrid::photon_energy(const PhysicalConstants& c) const {
  double e = 0.0;
  for (std::size_t n = 0; n < modes.size(); ++n)
    e += c.hbar * modes[n].omega() * std::norm(coherent_alphas[n]);
  return e;
}

std::vector<double> sample_times(const PulseSpec& spec) {
  const int k = 2 * spec.n_modes + 1;
  std::vector<double> t(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) t[static_cast<std::size_t>(i)] = i * spec.t_box / k;
  return t;
}

ModeGrid build_mode_grid(const PulseSpec& spec, const PhysicalConstants& c) {
  const PulseShape shape(spec, c);
  check_coverage(shape, spec);

  const int n_modes = spec.n_modes;
  const auto coeffs =
      fourier_coefficients(sample_field(shape, spec.t_box, 2 * n_modes + 1));
  double cmax = 0.0;
  for (std::size_t n = 1; n < coeffs.size(); ++n)
    cmax = std::max(cmax, std::abs(coeffs[n]));
  // The sampled c_0 carries aliasing error, so the net impulse is judged
  // from the quadrature integral instead.
  const double panel = spec.carrier_period() / 16.0;
  const double impulse =
      integrate([&](double t) { return shape.field(t); }, 0.0, shape.support(), panel);
  const double magnitude =
      integrate([&](double t) { return std::abs(shape.field(t)); }, 0.0, shape.support(), panel);
  if (std::abs(impulse) > kImpulseTolerance * magnitude)
    throw std::invalid_argument(
        "pulse has a net DC component (non-zero impulse) that no mode with "
        "w > 0 can represent");

  ModeGrid grid;
  grid.delta_omega = 2.0 * kPi / spec.t_box;
  const double volume = effective_volume(spec, c);
  for (int n = 1; n <= n_modes; ++n) {
    const double omega = n * grid.delta_omega;
    const Mode mode = Mode::from_amplitude(omega, mode_amplitude(omega, volume, c), c);
    const cplx cn = coeffs[static_cast<std::size_t>(n)];
    grid.modes.push_back(mode);
    grid.fourier_coeffs.push_back(cn);
    grid.coherent_alphas.push_back(std::abs(cn) >= kSpectralFloor * cmax
                                       ? cn / cplx{0.0, mode.amp_E()}
                                       : cplx{});
    grid.squeeze.emplace_back();
  }

  grid.energy_before_rescale = grid.photon_energy(c);
  grid.target_energy = units::J_to_au_energy(spec.energy_J);
  grid.alpha_scale = std::sqrt(grid.target_energy / grid.energy_before_rescale);
  for (auto& a : grid.coherent_alphas) a *= grid.alpha_scale;
  return grid;
}

ModeGrid apply_squeezing(const ModeGrid& grid, double r, double theta,
                         std::optional<FrequencyBand> band) {
  if (!(r >= 0.0)) throw std::domain_error("apply_squeezing: r must be >= 0");
  ModeGrid out = grid;
  for (std::size_t n = 0; n < out.modes.size(); ++n) {
    if (!band || band->contains(out.modes[n].omega()))
      out.squeeze[n] = ModeSqueeze{r, theta};
  }
  return out;
}

FrequencyBand spectral_fwhm_band(const ModeGrid& grid) {
  double pmax = 0.0;
  for (const cplx& cn : grid.fourier_coeffs) pmax = std::max(pmax, std::norm(cn));
  FrequencyBand band{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t n = 0; n < grid.modes.size(); ++n) {
    if (std::norm(grid.fourier_coeffs[n]) >= 0.5 * pmax) {
      band.omega_min = std::min(band.omega_min, grid.modes[n].omega());
      band.omega_max = std::max(band.omega_max, grid.modes[n].omega());
    }
  }
  return band;
}

std::optional<FrequencyBand> squeezed_band(const ModeGrid& grid) {
  std::optional<FrequencyBand> band;
  for (std::size_t n = 0; n < grid.modes.size(); ++n) {
    if (!grid.squeeze[n]) continue;
    const double w = grid.modes[n].omega();
    if (!band)
      band = FrequencyBand{w, w};
    else
      band = FrequencyBand{std::min(band->omega_min, w), std::max(band->omega_max, w)};
  }
  return band;
}

ClassicalWaveform classical_waveform(const PulseShape& shape) {
  const double panel = (2.0 * kPi / shape.carrier_omega()) / 16.0;
  ClassicalWaveform w;
  w.field = [shape](double t) { return shape.field(t); };
  w.vector_potential = [shape, panel](double t) {
    const double upper = std::clamp(t, 0.0, shape.support());
    return -integrate([&](double s) { return shape.field(s); }, 0.0, upper, panel);
  };
  // Repeated integral folded into one: int_0^t A = -int_0^t (t - s) E(s) ds.
  w.vector_potential_integral = [shape, panel](double t) {
    const double upper = std::clamp(t, 0.0, shape.support());
    return -integrate([&](double s) { return (t - s) * shape.field(s); }, 0.0,
                      upper, panel);
  };
  return w;
}

ClassicalWaveform coherent_waveform(std::vector<Mode> modes,
                                    std::vector<cplx> alphas) {
  if (modes.size() != alphas.size())
    throw std::invalid_argument("coherent_waveform: size mismatch");
  ClassicalWaveform w;
  w.field = [modes, alphas](double t) {
    double e = 0.0;
    for (std::size_t n = 0; n < modes.size(); ++n)
      e += -2.0 * modes[n].amp_E() *
           std::imag(alphas[n] * std::polar(1.0, -modes[n].omega() * t));
    return e;
  };
  w.vector_potential = [modes, alphas](double t) {
    double a = 0.0;
    for (std::size_t n = 0; n < modes.size(); ++n)
      a += 2.0 * modes[n].amp_A() *
           std::real(alphas[n] * std::polar(1.0, -modes[n].omega() * t));
    return a;
  };
  w.vector_potential_integral = [modes, alphas](double t) {
    double a = 0.0;
    for (std::size_t n = 0; n < modes.size(); ++n) {
      const double wn = modes[n].omega();
      a += 2.0 * modes[n].amp_A() / wn *
           (alphas[n].imag() - std::imag(alphas[n] * std::polar(1.0, -wn * t)));
    }
    return a;
  };
  return w;
}

ClassicalWaveform monochromatic_waveform(double amp_A, double omega,
                                         double phase) {
  if (!(omega > 0.0)) throw std::domain_error("monochromatic_waveform: omega must be > 0");
  ClassicalWaveform w;
  w.field = [=](double t) { return amp_A * omega * std::sin(omega * t + phase); };
  w.vector_potential = [=](double t) { return amp_A * std::cos(omega * t + phase); };
  w.vector_potential_integral = [=](double t) {
    return amp_A * (std::sin(omega * t + phase) - std::sin(phase)) / omega;
  };
  return w;
}

}  // namespace qwp::pulse
