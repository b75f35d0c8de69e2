// Closed-form dynamics of a free electron coupled to quantized field modes
// (velocity gauge, dipole approximation).
//
// The Hamiltonian H = P^2/2m + sum hbar w_n (N_n + 1/2) - (e/m) P A is
// diagonalized by the momentum-dependent displacement exp(gamma_n P (a^dag -
// a)).  In the Heisenberg picture
//
//   X(t) = X + P (t/m(gamma) + 2 hbar sum gamma_n^2 sin w_n t)
//          - i hbar sum (Gamma_n^* a_n^dag - Gamma_n a_n),
//   Gamma_n(t) = gamma_n (1 - e^{-i w_n t}),
//
// so every observable below is a finite sum over modes.  Mode sums run
// left-to-right over the mode index.

#pragma once

#include <span>
#include <vector>

#include "qwp/core.hpp"
#include "qwp/waveform.hpp"

namespace qwp::analytic {

/// Gamma_n(t) = gamma_n (1 - exp(-i w_n t)).
cplx gamma_factor(const Mode& mode, double t);

struct EvolvedModeLabel {
  cplx alpha_t;    // p gamma + (alpha - p gamma) e^{-i w t}
  double delta_t;  // p gamma Im(alpha - (alpha - p gamma) e^{-i w t})
  cplx z_t;        // z(0) e^{-2 i w t}
};

/// Evolved coherent/squeezed labels of one mode conditioned on electron
/// momentum p.  Throws UnsupportedStateError for Fock and Thermal states.
EvolvedModeLabel evolve_labels(const FieldModeState& state, const Mode& mode,
                               double p, double t);

struct MomentumStats {
  double mean;
  double variance;
};

/// <P> and Var(P).  Both are constants of motion of the coupled dynamics.
MomentumStats momentum_stats(const Electron& electron,
                             const PhysicalConstants& c);

/// <Abar_0>(t), the expectation of the time-integrated free vector potential.
double abar_mean(std::span<const FieldModeState> states,
                 std::span<const Mode> modes, double t);

/// Per-mode Var(Abar_0)(t).  Multiply by e^2/m^2 for the position-variance
/// contribution.
double abar_variance_mode(const FieldModeState& state, const Mode& mode,
                          double t, const PhysicalConstants& c);

double position_mean(const Electron& electron,
                     std::span<const FieldModeState> states,
                     std::span<const Mode> modes, double t,
                     const PhysicalConstants& c);

struct VarianceBreakdown {
  double free_spread;    // Var X(0) + C0 t/m(g) + Var P t^2/m(g)^2
  double field_term;     // (e/m)^2 sum Var(Abar_0)
  double cross_p_terms;  // O(gamma^2) terms shared by all field states
  double total;
};

VarianceBreakdown position_variance(const Electron& electron,
                                    std::span<const FieldModeState> states,
                                    std::span<const Mode> modes, double t,
                                    const PhysicalConstants& c);

/// Var X[states_a] - Var X[states_b] for the same electron and modes.  Only
/// the field terms differ, so the difference is summed mode by mode instead
/// of subtracting two totals dominated by the free spreading.
double position_variance_difference(std::span<const FieldModeState> states_a,
                                    std::span<const FieldModeState> states_b,
                                    std::span<const Mode> modes, double t,
                                    const PhysicalConstants& c);

/// Times at which a squeezed mode reduces Var X below the coherent value:
/// tanh r + cos(w t - theta) < 0.  The interval (start, end) repeats with
/// `period`.  For r = 0 the half-cycle cos(w t - theta) < 0 is returned with
/// `within_claim` = false.
struct ReductionWindow {
  double start;
  double end;
  double period;
  bool within_claim;

  double half_width() const { return 0.5 * (end - start); }
  double center() const { return 0.5 * (start + end); }
  /// True if t lies strictly inside some periodic translate of the window.
  bool contains(double t) const;
  /// All window translates intersecting [t0, t1], clipped to it.
  std::vector<std::pair<double, double>> intervals(double t0, double t1) const;
};

/// arccos(tanh r), evaluated as atan2(1, sinh r).
double reduction_half_angle(double r);

ReductionWindow reduction_window(double r, double theta, double omega);

struct SpectralWidthCheck {
  bool satisfied;  // |w t - theta - pi| + (dw/2) t < arccos(tanh r)
  /// Upper bound on dw/w at the first window centre w t = theta + pi.
  double relative_width_bound;
};

/// Sufficient (not necessary) condition for a squeezing-induced reduction by
/// a band of modes [w - dw/2, w + dw/2].
SpectralWidthCheck spectral_width_bound(double r, double theta,
                                        double omega_center,
                                        double delta_omega, double t);

struct FieldStats {
  double mean;
  double variance;
};

/// Free-field <E>_0(t) and Var E_0(t) of the multimode state.
FieldStats field_waveform_stats(std::span<const FieldModeState> states,
                                std::span<const Mode> modes, double t,
                                const PhysicalConstants& c);

struct ClassicalPoint {
  double x;
  double p_kin;
};

/// x = x0 + p0 t/m - e Abar_cl(t)/m, p_kin = p0 - e A_cl(t).
ClassicalPoint classical_trajectory(double x0, double p0,
                                    const ClassicalWaveform& waveform, double t,
                                    const PhysicalConstants& c);

struct ObservableSeries {
  std::vector<double> t;
  std::vector<double> mean_x;
  std::vector<double> var_x;
  std::vector<double> mean_p;
  std::vector<double> var_p;
  std::vector<double> mean_E;
  std::vector<double> var_E;
};

ObservableSeries observable_series(const Electron& electron,
                                   std::span<const FieldModeState> states,
                                   std::span<const Mode> modes,
                                   std::span<const double> times,
                                   const PhysicalConstants& c);

}  // namespace qwp::analytic
