// Brute-force reference propagator for the electron + field system.
//
// The Hamiltonian commutes with the electron momentum, so the joint state is
// a family of Fock-space vectors chi_j, one per point p_j of a momentum grid.
// Each block H(p_j) = p^2/2m + sum_n [hbar w_n (N_n + 1/2) - (e/m) p A_n
// (a_n + a_n^dag)] is tridiagonal per mode and is diagonalized exactly, so the
// propagation has no time-step error.  Position moments come from a discrete
// Fourier transform p -> x (primary) and from finite differences in p
// (cross-check).  Nothing here uses the closed-form results.
//
// One or two modes are supported.  Two-mode blocks are never formed densely
// during propagation: the per-mode factors commute and are applied to the
// N1 x N2 reshaped state.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwp/core.hpp"

namespace qwp::oracle {

/// Population allowed beyond index dim - kHeadroom of every mode.
inline constexpr int kHeadroom = 8;
inline constexpr double kTailTolerance = 1e-12;
/// Thermal mixtures keep Fock components until this much weight is covered.
inline constexpr double kThermalCoverage = 1.0 - 1e-12;
/// Fraction of x-space mass tolerated in the outer 1/16 of the DFT window.
inline constexpr double kAliasTolerance = 1e-8;

class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, int required)
      : std::runtime_error(what), required_dim(required) {}
  int required_dim;
};

class AliasingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Bases and grids
// ---------------------------------------------------------------------------

struct FockBasis {
  int dim = 0;
  Eigen::MatrixXd a;
  Eigen::MatrixXd adag;
  Eigen::MatrixXd number;
  Eigen::MatrixXd quad_x;   // a + a^dag
  Eigen::MatrixXcd quad_p;  // i (a - a^dag)
};

FockBasis make_fock_basis(int dim);

/// Uniform grid p_j = center + (j - M) dp, j = 0..2M, with amplitudes
/// w_j = phi(p_j) sqrt(dp).
struct MomentumGrid {
  std::vector<double> p;
  std::vector<cplx> w;
  double dp = 0.0;
  double center = 0.0;
  int half_points = 0;

  std::size_t size() const { return p.size(); }
  double norm() const;
};

/// Grid for a Gaussian packet, extending half_width_sigmas * sigma_p on each
/// side of p0.  Throws if the sampled norm differs from 1 by more than 1e-10.
MomentumGrid make_momentum_grid(const ElectronGaussian& e,
                                const PhysicalConstants& c,
                                int half_points = 256,
                                double half_width_sigmas = 16.0);

/// Grid for an arbitrary momentum-space amplitude phi(p) (normalized by the
/// caller).  Same norm check.
MomentumGrid make_momentum_grid(const std::function<cplx(double)>& amplitude,
                                double center, double half_width,
                                int half_points);

// ---------------------------------------------------------------------------
// Field states
// ---------------------------------------------------------------------------

/// Pure state (one component of weight 1) or an incoherent mixture.
struct FieldEnsemble {
  std::vector<double> weights;
  std::vector<Eigen::VectorXcd> vectors;
  /// Weight captured before the component weights were renormalized.
  double retained_weight = 1.0;

  std::size_t size() const { return vectors.size(); }
};

/// Builds the initial vector(s) of one mode in a dim-dimensional Fock space.
/// Coherent and squeezed states are obtained by exponentiating their
/// generators in a padded basis; throws TruncationError if more than
/// kTailTolerance of the population would sit at or beyond dim - kHeadroom.
FieldEnsemble initial_field_vector(const FieldModeState& state, const Mode& mode,
                                   int dim, const PhysicalConstants& c);

/// Fock dimension accepted by initial_field_vector.  It is the smallest one
/// whose tail stays below half the tolerance, so dim - 1 may still pass.
int required_fock_dim(const FieldModeState& state, const Mode& mode,
                      const PhysicalConstants& c);

/// Tensor product; component (i, k) has weight w_i u_k and vector
/// a_i (x) b_k with index n1 + N1 n2.
FieldEnsemble tensor_product(const FieldEnsemble& a, const FieldEnsemble& b);

/// <E(t)> and Var E(t) of the free field operator
/// E(t) = i E_n (a e^{-iwt} - a^dag e^{iwt}) in the given ensemble.
struct QuadratureStats {
  double mean;
  double variance;
};
QuadratureStats field_quadrature_stats(const FieldEnsemble& field,
                                       const Mode& mode, double t);

// ---------------------------------------------------------------------------
// Hamiltonian blocks
// ---------------------------------------------------------------------------

/// Dense single-mode block H(p).
Eigen::MatrixXd build_hamiltonian_block(double p, const Mode& mode,
                                        const FockBasis& basis,
                                        const PhysicalConstants& c);

/// Dense block on the tensor-product basis of several modes (index of mode 0
/// runs fastest).  Intended for small dimensions and cross-checks.
Eigen::MatrixXd build_hamiltonian_block(double p, std::span<const Mode> modes,
                                        std::span<const FockBasis> bases,
                                        const PhysicalConstants& c);

// ---------------------------------------------------------------------------
// Propagation and observables
// ---------------------------------------------------------------------------

/// chi(j, k): Fock component k of the field vector at grid point j.
struct JointState {
  Eigen::MatrixXcd chi;
  std::vector<int> dims;
  double t = 0.0;
};

struct Observables {
  double mean_x = 0.0;
  double var_x = 0.0;
  double mean_p = 0.0;
  double var_p = 0.0;
  double norm = 0.0;
  // Finite-difference route for the position moments.
  double mean_x_fd = 0.0;
  double var_x_fd = 0.0;
};

/// Moments of a joint state.  Throws AliasingError if the x-space density
/// reaches the edges of the DFT window.
Observables observables(const JointState& state, const MomentumGrid& grid,
                        const PhysicalConstants& c);

/// F(p_j1, p_j2, t) = w_j1 w_j2^* <chi_j2 | chi_j1>.
cplx overlap_F(const JointState& state, const MomentumGrid& grid,
               std::size_t j1, std::size_t j2);

struct OracleSample {
  double t;
  double mean_x;
  double var_x;
  double mean_p;
  double var_p;
  double norm;
  double energy;
  double mean_x_fd;
  double var_x_fd;
  /// Largest population found at index >= dim - kHeadroom of any mode.
  double edge_population;
};

class Propagator {
 public:
  /// dims[m] is the Fock dimension of modes[m]; one or two modes.
  Propagator(std::vector<Mode> modes, std::vector<int> dims, MomentumGrid grid,
             const PhysicalConstants& c);

  /// Exact joint state at time t for a pure initial field vector.
  JointState evolve(const Eigen::VectorXcd& field0, double t) const;

  /// <H> = sum_j |w_j|^2 <chi_j| H(p_j) |chi_j>.
  double energy(const JointState& state) const;

  /// Observables at each time, averaged over the ensemble with its weights.
  std::vector<OracleSample> run(const FieldEnsemble& field0,
                                std::span<const double> times) const;

  const MomentumGrid& grid() const { return grid_; }
  const std::vector<int>& dims() const { return dims_; }
  std::size_t state_dim() const;

 private:
  struct Spectrum {
    Eigen::VectorXd values;   // eigenvalues of the field part of H(p)
    Eigen::MatrixXd vectors;  // columns are eigenvectors
  };

  Spectrum mode_spectrum(std::size_t j, std::size_t mode) const;
  const Spectrum& spectrum(std::size_t j, std::size_t mode,
                           Spectrum& scratch) const;
  void evolve_point(std::size_t j, const Eigen::VectorXcd& field0,
                    std::span<const double> times,
                    std::span<JointState> out) const;

  std::vector<Mode> modes_;
  std::vector<int> dims_;
  MomentumGrid grid_;
  PhysicalConstants c_;
  std::vector<std::vector<Spectrum>> cache_;  // [j][mode], empty if too large
};

// ---------------------------------------------------------------------------
// One-call driver
// ---------------------------------------------------------------------------

struct OracleSetup {
  std::vector<Mode> modes;
  std::vector<FieldModeState> states;
  ElectronGaussian electron{10.0, 0.0, 0.0};
  /// Fock dimension per mode; 0 selects required_fock_dim.
  std::vector<int> fock_dims;
  int half_points = 256;
  double half_width_sigmas = 16.0;
};

struct OracleResult {
  std::vector<OracleSample> samples;
  std::vector<int> fock_dims;
  std::size_t grid_points = 0;
  double retained_weight = 1.0;
};

OracleResult run_oracle(const OracleSetup& setup, std::span<const double> times,
                        const PhysicalConstants& c);

}  // namespace qwp::oracle
