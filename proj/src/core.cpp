#include "qwp/core.hpp"

#include <cmath>
#include <sstream>

namespace qwp {

namespace units {

namespace {
constexpr double kNmPerBohr = codata::bohr_radius_m * 1e9;
constexpr double kUmPerBohr = codata::bohr_radius_m * 1e6;
constexpr double kFsPerAuTime = codata::atomic_time_s * 1e15;
}  // namespace

double nm_to_bohr(double nm) { return nm / kNmPerBohr; }
double bohr_to_nm(double bohr) { return bohr * kNmPerBohr; }
double um_to_bohr(double um) { return um / kUmPerBohr; }
double bohr_to_um(double bohr) { return bohr * kUmPerBohr; }
double m_to_bohr(double m) { return m / codata::bohr_radius_m; }
double bohr_to_m(double bohr) { return bohr * codata::bohr_radius_m; }

double wavelength_nm_to_omega(double lambda_nm) {
  if (!(lambda_nm > 0.0)) throw std::domain_error("wavelength must be > 0");
  const double c = PhysicalConstants::atomic().c_light;
  return 2.0 * std::numbers::pi * c / nm_to_bohr(lambda_nm);
}

double omega_to_wavelength_nm(double omega) {
  if (!(omega > 0.0)) throw std::domain_error("omega must be > 0");
  const double c = PhysicalConstants::atomic().c_light;
  return bohr_to_nm(2.0 * std::numbers::pi * c / omega);
}

double fs_to_au_time(double fs) { return fs / kFsPerAuTime; }
double au_time_to_fs(double t) { return t * kFsPerAuTime; }

double uJ_to_au_energy(double uJ) { return J_to_au_energy(uJ * 1e-6); }
double au_energy_to_uJ(double energy) { return au_energy_to_J(energy) * 1e6; }
double J_to_au_energy(double joule) { return joule / codata::hartree_energy_J; }
double au_energy_to_J(double energy) {
  return energy * codata::hartree_energy_J;
}

double kelvin_to_au_energy(double kelvin) {
  return kelvin * PhysicalConstants::atomic().k_boltzmann;
}
double au_energy_to_kelvin(double energy) {
  return energy / PhysicalConstants::atomic().k_boltzmann;
}

}  // namespace units

double coupling_gamma(double omega, double amp_A, const PhysicalConstants& c) {
  if (!(omega > 0.0)) throw std::domain_error("coupling_gamma: omega must be > 0");
  if (!(amp_A >= 0.0))
    throw std::domain_error("coupling_gamma: amplitude must be >= 0");
  return c.charge_e * amp_A / (c.mass_e * c.hbar * omega);
}

Mode Mode::from_amplitude(double omega, double amp_A,
                          const PhysicalConstants& c) {
  return Mode(omega, amp_A, coupling_gamma(omega, amp_A, c));
}

Mode Mode::from_gamma(double omega, double gamma, const PhysicalConstants& c) {
  if (!(omega > 0.0)) throw std::domain_error("Mode: omega must be > 0");
  if (!(gamma >= 0.0)) throw std::domain_error("Mode: gamma must be >= 0");
  const double amp_A = gamma * c.mass_e * c.hbar * omega / c.charge_e;
  return Mode(omega, amp_A, gamma);
}

double effective_mass(std::span<const Mode> modes, const PhysicalConstants& c) {
  double shift = 0.0;
  for (const Mode& m : modes)
    shift += 2.0 * c.hbar * m.omega() * m.gamma() * m.gamma();
  const double inv = 1.0 / c.mass_e - shift;
  if (!(inv > 0.0))
    throw CouplingRangeError("coupling outside nonrelativistic validity");
  return 1.0 / inv;
}

double thermal_mean_photon(double omega, double temperature,
                           const PhysicalConstants& c) {
  if (!(omega > 0.0) || !(temperature > 0.0))
    throw std::domain_error("thermal_mean_photon: omega and T must be > 0");
  const double x = c.hbar * omega / (c.k_boltzmann * temperature);
  // expm1 overflows to +inf for frozen modes, giving exactly 0.
  return 1.0 / std::expm1(x);
}

double thermal_coth(double omega, double temperature,
                    const PhysicalConstants& c) {
  return 2.0 * thermal_mean_photon(omega, temperature, c) + 1.0;
}

cplx mean_annihilation(const FieldModeState& s) {
  if (auto* coh = std::get_if<Coherent>(&s)) return coh->alpha;
  if (auto* sq = std::get_if<SqueezedCoherent>(&s)) return sq->alpha;
  return {0.0, 0.0};
}

std::string describe(const FieldModeState& s) {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Vacuum>) {
          os << "vacuum";
        } else if constexpr (std::is_same_v<T, Coherent>) {
          os << "coherent(alpha=" << v.alpha.real() << "+" << v.alpha.imag()
             << "i)";
        } else if constexpr (std::is_same_v<T, SqueezedCoherent>) {
          os << "squeezed(alpha=" << v.alpha.real() << "+" << v.alpha.imag()
             << "i, r=" << v.r << ", theta=" << v.theta << ")";
        } else if constexpr (std::is_same_v<T, Fock>) {
          os << "fock(n=" << v.n << ")";
        } else {
          os << "thermal(T=" << v.temperature << "K)";
        }
      },
      s);
  return os.str();
}

void validate(const FieldModeState& s) {
  if (auto* sq = std::get_if<SqueezedCoherent>(&s)) {
    if (!(sq->r >= 0.0) || !std::isfinite(sq->r))
      throw std::invalid_argument("squeezing parameter r must be >= 0");
    if (!std::isfinite(sq->theta))
      throw std::invalid_argument("squeezing angle must be finite");
  } else if (auto* f = std::get_if<Fock>(&s)) {
    if (f->n < 0) throw std::invalid_argument("Fock photon number must be >= 0");
  } else if (auto* th = std::get_if<Thermal>(&s)) {
    if (!(th->temperature > 0.0))
      throw std::invalid_argument("thermal temperature must be > 0");
  }
}

ElectronMoments to_moments(const ElectronGaussian& g,
                           const PhysicalConstants& c) {
  validate(g);
  const double sigma_p = c.hbar / (2.0 * g.sigma_x);
  return {g.x0, g.p0, g.sigma_x * g.sigma_x, sigma_p * sigma_p, 0.0};
}

ElectronMoments to_moments(const Electron& e, const PhysicalConstants& c) {
  if (auto* g = std::get_if<ElectronGaussian>(&e)) return to_moments(*g, c);
  const auto& m = std::get<ElectronMoments>(e);
  validate(m, c);
  return m;
}

void validate(const ElectronGaussian& g) {
  if (!(g.sigma_x > 0.0)) throw std::invalid_argument("sigma_x must be > 0");
  if (!std::isfinite(g.p0) || !std::isfinite(g.x0))
    throw std::invalid_argument("electron p0/x0 must be finite");
}

void validate(const ElectronMoments& m, const PhysicalConstants& c) {
  if (!(m.var_x > 0.0) || !(m.var_p > 0.0))
    throw std::invalid_argument("electron variances must be > 0");
  const double bound = 0.25 * (c.hbar * c.hbar + m.corr_xp * m.corr_xp);
  if (m.var_x * m.var_p < bound * (1.0 - 1e-12))
    throw std::invalid_argument(
        "electron moments violate the Schroedinger-Robertson bound");
}

}  // namespace qwp
