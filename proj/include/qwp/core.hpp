// Physical constants, unit conversion, field modes and the state data model
// shared by the analytic solution, the pulse builder and the Fock-space oracle.
//
// Everything inside the library is expressed in Hartree atomic units.  SI
// quantities only appear in the `units` converters used at I/O boundaries.

#pragma once

#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qwp {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Raised when the coupling leaves the nonrelativistic regime, i.e. when
/// 2 sum(hbar w_n gamma_n^2) >= 1/m and the effective mass diverges.
class CouplingRangeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised by operations that are only defined for Gaussian field states.
class UnsupportedStateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Constants and units
// ---------------------------------------------------------------------------

/// CODATA 2018 reference values (SI) used by the converters.
namespace codata {
inline constexpr double bohr_radius_m = 5.29177210903e-11;
inline constexpr double hartree_energy_J = 4.3597447222071e-18;
inline constexpr double atomic_time_s = 2.4188843265857e-17;
inline constexpr double fine_structure = 7.2973525693e-3;
inline constexpr double boltzmann_J_per_K = 1.380649e-23;
}  // namespace codata

struct PhysicalConstants {
  double hbar;
  double charge_e;
  double mass_e;
  double eps0;
  double k_boltzmann;  // energy per kelvin
  double c_light;

  /// Hartree atomic units: hbar = e = m = 1, eps0 = 1/(4 pi).
  static constexpr PhysicalConstants atomic() {
    return {1.0,
            1.0,
            1.0,
            1.0 / (4.0 * std::numbers::pi),
            codata::boltzmann_J_per_K / codata::hartree_energy_J,
            1.0 / codata::fine_structure};
  }
};

namespace units {

double nm_to_bohr(double nm);
double bohr_to_nm(double bohr);
double um_to_bohr(double um);
double bohr_to_um(double bohr);
double m_to_bohr(double m);
double bohr_to_m(double bohr);

/// Angular frequency w = 2 pi c / lambda (a.u.) of a vacuum wavelength in nm.
double wavelength_nm_to_omega(double lambda_nm);
double omega_to_wavelength_nm(double omega);

double fs_to_au_time(double fs);
double au_time_to_fs(double t);

double uJ_to_au_energy(double uJ);
double au_energy_to_uJ(double energy);
double J_to_au_energy(double joule);
double au_energy_to_J(double energy);

/// k_B T in Hartree for a temperature in kelvin.
double kelvin_to_au_energy(double kelvin);
double au_energy_to_kelvin(double energy);

}  // namespace units

// ---------------------------------------------------------------------------
// Modes
// ---------------------------------------------------------------------------

/// gamma = e A / (m hbar omega).  Throws std::domain_error for omega <= 0.
double coupling_gamma(double omega, double amp_A, const PhysicalConstants& c);

/// One quantized field mode in the dipole approximation.
class Mode {
 public:
  /// Mode defined by its vector-potential amplitude A_n.
  static Mode from_amplitude(double omega, double amp_A,
                             const PhysicalConstants& c);
  /// Mode defined by its coupling gamma_n; A_n is recovered from the
  /// defining relation.
  static Mode from_gamma(double omega, double gamma,
                         const PhysicalConstants& c);

  double omega() const { return omega_; }
  double amp_A() const { return amp_A_; }
  /// Electric amplitude E_n = A_n omega_n.
  double amp_E() const { return amp_A_ * omega_; }
  double gamma() const { return gamma_; }

 private:
  Mode(double omega, double amp_A, double gamma)
      : omega_(omega), amp_A_(amp_A), gamma_(gamma) {}

  double omega_;
  double amp_A_;
  double gamma_;
};

/// m(gamma) = 1 / (1/m - 2 sum hbar w_n gamma_n^2).
double effective_mass(std::span<const Mode> modes, const PhysicalConstants& c);

/// Mean Bose occupation 1/(exp(hbar w / k T) - 1); 0 once the mode is frozen.
double thermal_mean_photon(double omega, double temperature,
                           const PhysicalConstants& c);

/// coth(hbar w / 2kT), evaluated as 2 n_bar + 1.
double thermal_coth(double omega, double temperature,
                    const PhysicalConstants& c);

// ---------------------------------------------------------------------------
// Field states
// ---------------------------------------------------------------------------

struct Vacuum {};
struct Coherent {
  cplx alpha;
};
/// D(alpha) S(z)|0> with z = r e^{i theta},
/// S(z) = exp((z a^dag^2 - z^* a^2)/2).
struct SqueezedCoherent {
  cplx alpha;
  double r;
  double theta;
};
struct Fock {
  int n;
};
struct Thermal {
  double temperature;  // kelvin
};

using FieldModeState =
    std::variant<Vacuum, Coherent, SqueezedCoherent, Fock, Thermal>;

/// <a> for the state; zero for Vacuum, Fock and Thermal.
cplx mean_annihilation(const FieldModeState& s);
std::string describe(const FieldModeState& s);
/// Throws std::invalid_argument if the state parameters are out of range.
void validate(const FieldModeState& s);

// ---------------------------------------------------------------------------
// Electron
// ---------------------------------------------------------------------------

/// Minimum-uncertainty Gaussian packet centred at x0 with mean momentum p0.
struct ElectronGaussian {
  double sigma_x;
  double p0;
  double x0 = 0.0;
};

/// Second-moment description of an arbitrary packet.
struct ElectronMoments {
  double mean_x;
  double mean_p;
  double var_x;
  double var_p;
  double corr_xp;  // <PX + XP> - 2<X><P>
};

using Electron = std::variant<ElectronGaussian, ElectronMoments>;

ElectronMoments to_moments(const ElectronGaussian& g,
                           const PhysicalConstants& c);
ElectronMoments to_moments(const Electron& e, const PhysicalConstants& c);

/// Checks positivity and the Schroedinger-Robertson bound
/// var_x var_p >= (hbar^2 + corr^2)/4 (with a relative slack of 1e-12).
void validate(const ElectronMoments& m, const PhysicalConstants& c);
void validate(const ElectronGaussian& g);

}  // namespace qwp
