#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

#include "qwp/analytic.hpp"
#include "qwp/oracle.hpp"

using namespace qwp;
using namespace qwp::oracle;

namespace {

const PhysicalConstants au = PhysicalConstants::atomic();
constexpr double kPi = std::numbers::pi;

double rel(double a, double b, double scale) { return std::abs(a - b) / scale; }

// exp(-i H t) v for a dense Hermitian H.
Eigen::VectorXcd dense_evolve(const Eigen::MatrixXd& h, const Eigen::VectorXcd& v, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const Eigen::MatrixXcd u = es.eigenvectors().cast<cplx>();
  Eigen::VectorXcd c = u.adjoint() * v;
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -es.eigenvalues()[k] * t);
  return u * c;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
  return out;
}

}  // namespace

TEST_CASE("Fock basis operators") {
  const FockBasis b = make_fock_basis(12);
  const Eigen::MatrixXd comm = b.a * b.adag - b.adag * b.a;
  // [a, a^dag] = 1 except in the last row, where the truncation shows.
  CHECK((comm.topLeftCorner(11, 11) - Eigen::MatrixXd::Identity(11, 11)).norm() < 1e-13);
  CHECK(comm(11, 11) == doctest::Approx(-11.0));
  CHECK((b.adag * b.a - b.number).norm() < 1e-13);
  CHECK((b.quad_x - b.a - b.adag).norm() == 0.0);
  CHECK((b.quad_p - cplx{0, 1} * (b.a - b.adag).cast<cplx>()).norm() == 0.0);
  CHECK_THROWS_AS(make_fock_basis(0), std::invalid_argument);
}

TEST_CASE("Hamiltonian block") {
  const Mode m = Mode::from_gamma(0.05, 0.002, au);
  const FockBasis b = make_fock_basis(64);

  const Eigen::MatrixXd h0 = build_hamiltonian_block(0.0, m, b, au);
  CHECK((h0 - Eigen::MatrixXd(h0.diagonal().asDiagonal())).norm() == 0.0);
  for (int n = 0; n < 64; ++n) CHECK(h0(n, n) == doctest::Approx(0.05 * (n + 0.5)).epsilon(1e-15));

  for (double p : {-0.4, 0.1, 0.8}) {
    const Eigen::MatrixXd h = build_hamiltonian_block(p, m, b, au);
    CHECK((h - h.transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    const std::vector<Mode> one{m};
    const double expected = p * p / (2 * effective_mass(one, au)) + 0.05 / 2;
    CHECK(std::abs(es.eigenvalues()[0] - expected) / expected < 1e-8);
  }

  SUBCASE("two-mode block is the Kronecker sum") {
    const std::vector<Mode> modes{m, Mode::from_gamma(0.07, 0.01, au)};
    const std::vector<FockBasis> bases{make_fock_basis(5), make_fock_basis(4)};
    const double p = 0.3;
    const Eigen::MatrixXd h = build_hamiltonian_block(p, modes, bases, au);
    const Eigen::MatrixXd h1 = build_hamiltonian_block(p, modes[0], bases[0], au);
    const Eigen::MatrixXd h2 = build_hamiltonian_block(p, modes[1], bases[1], au);
    const double kin = p * p / 2;
    REQUIRE(h.rows() == 20);
    for (int i = 0; i < 20; ++i)
      for (int k = 0; k < 20; ++k) {
        const int i1 = i % 5, i2 = i / 5, k1 = k % 5, k2 = k / 5;
        double ref = 0.0;
        if (i2 == k2) ref += h1(i1, k1);
        if (i1 == k1) ref += h2(i2, k2);
        if (i == k) ref -= kin;
        CHECK(h(i, k) == doctest::Approx(ref).epsilon(1e-15));
      }
  }
}

TEST_CASE("initial field vectors") {
  const Mode m = Mode::from_gamma(0.05, 0.002, au);

  SUBCASE("vacuum and Fock") {
    const auto v0 = initial_field_vector(Coherent{{0.0, 0.0}}, m, 20, au);
    CHECK((v0.vectors[0] - Eigen::VectorXcd::Unit(20, 0)).norm() < 1e-15);
    const auto f3 = initial_field_vector(Fock{3}, m, 20, au);
    CHECK((f3.vectors[0] - Eigen::VectorXcd::Unit(20, 3)).norm() == 0.0);
  }

  SUBCASE("coherent photon statistics are Poissonian") {
    const cplx alpha{3.0, -4.0};
    const int dim = required_fock_dim(Coherent{alpha}, m, au);
    const auto e = initial_field_vector(Coherent{alpha}, m, dim, au);
    const double nbar = std::norm(alpha);
    for (int n = 0; n < dim; ++n) {
      const double poisson = std::exp(-nbar + n * std::log(nbar) - std::lgamma(n + 1.0));
      CHECK(std::abs(std::norm(e.vectors[0][n]) - poisson) < 1e-10);
    }
  }

  SUBCASE("squeezed vacuum closed form") {
    const double r = 1.0, theta = 0.7;
    const int dim = required_fock_dim(SqueezedCoherent{{}, r, theta}, m, au);
    const auto e = initial_field_vector(SqueezedCoherent{{}, r, theta}, m, dim, au);
    const cplx q = std::polar(std::tanh(r), theta);
    for (int k = 0; 2 * k < dim; ++k) {
      const double mag = std::exp(0.5 * std::lgamma(2 * k + 1.0) - k * std::log(2.0) -
                                  std::lgamma(k + 1.0)) /
                         std::sqrt(std::cosh(r));
      const cplx ref = std::pow(q, k) * mag;
      CHECK(std::abs(e.vectors[0][2 * k] - ref) < 1e-10);
      if (2 * k + 1 < dim) CHECK(std::abs(e.vectors[0][2 * k + 1]) < 1e-14);
    }
  }

  SUBCASE("headroom is enforced") {
    const FieldModeState s = SqueezedCoherent{{2.0, 1.0}, 0.5, 0.0};
    const int need = required_fock_dim(s, m, au);
    CHECK_NOTHROW(initial_field_vector(s, m, need, au));
    try {
      initial_field_vector(s, m, need - 4, au);
      FAIL("expected TruncationError");
    } catch (const TruncationError& e) {
      CHECK(e.required_dim == need);
    }
    CHECK_THROWS_AS(initial_field_vector(Fock{10}, m, 18, au), TruncationError);
    CHECK_NOTHROW(initial_field_vector(Fock{10}, m, 19, au));
  }

  SUBCASE("thermal mixture") {
    const double T = m.omega() / (au.k_boltzmann * std::log(2.0));  // n_bar = 1
    const int dim = required_fock_dim(Thermal{T}, m, au);
    const auto e = initial_field_vector(Thermal{T}, m, dim, au);
    CHECK(e.retained_weight > 1 - 1e-12);
    double sum = 0.0, nbar = 0.0;
    for (std::size_t n = 0; n < e.size(); ++n) {
      sum += e.weights[n];
      nbar += n * e.weights[n];
      if (n > 0) CHECK(e.weights[n] / e.weights[n - 1] == doctest::Approx(0.5).epsilon(1e-14));
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(nbar == doctest::Approx(1.0).epsilon(1e-10));
  }

  SUBCASE("tensor product ordering") {
    const auto a = initial_field_vector(Fock{1}, m, 10, au);
    const auto b = initial_field_vector(Fock{2}, m, 11, au);
    const auto ab = tensor_product(a, b);
    REQUIRE(ab.vectors[0].size() == 110);
    CHECK(std::abs(ab.vectors[0][1 + 10 * 2] - 1.0) < 1e-15);
  }
}

TEST_CASE("free-field quadrature statistics") {
  const Mode m = Mode::from_gamma(0.05, 0.002, au);
  const double T = m.omega() / (au.k_boltzmann * std::log(2.0));
  const std::vector<FieldModeState> states{Coherent{{1.0, 2.0}},
                                           SqueezedCoherent{{0.5, -1.0}, 1.2, 0.4},
                                           SqueezedCoherent{{}, 2.0, kPi}, Fock{4},
                                           Thermal{T}};
  const std::vector<Mode> one{m};
  for (const auto& s : states) {
    const auto e = initial_field_vector(s, m, required_fock_dim(s, m, au), au);
    const std::vector<FieldModeState> st{s};
    for (double t : {0.0, 11.0, 40.0, 93.0}) {
      const auto o = field_quadrature_stats(e, m, t);
      const auto a = analytic::field_waveform_stats(st, one, t, au);
      const double scale = m.amp_E() * m.amp_E();
      CHECK(std::abs(o.variance - a.variance) / a.variance < 1e-8);
      CHECK(std::abs(o.mean - a.mean) < 1e-8 * std::sqrt(scale) * (1 + std::abs(a.mean) / m.amp_E()));
    }
  }
}

TEST_CASE("propagation") {
  const ElectronGaussian electron{10.0, 0.1, 0.0};
  const MomentumGrid grid = make_momentum_grid(electron, au, 64, 12.0);
  CHECK(std::abs(grid.norm() - 1.0) < 1e-10);

  SUBCASE("identity at t = 0") {
    const Mode m = Mode::from_gamma(0.05, 0.002, au);
    const Propagator prop({m}, {40}, grid, au);
    const auto v = initial_field_vector(Coherent{{2.0, 1.0}}, m, 40, au).vectors[0];
    const JointState s = prop.evolve(v, 0.0);
    for (Eigen::Index j = 0; j < s.chi.rows(); ++j)
      CHECK((s.chi.row(j).transpose() - v).norm() < 1e-13);
  }

  SUBCASE("decoupled evolution is a phase") {
    const Mode m = Mode::from_gamma(0.05, 0.0, au);
    const Propagator prop({m}, {30}, grid, au);
    const auto v = initial_field_vector(Coherent{{1.5, 0.0}}, m, 30, au).vectors[0];
    const double t = 123.4;
    const JointState s = prop.evolve(v, t);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double p = grid.p[j];
      for (int n = 0; n < 30; ++n) {
        const cplx ref = std::polar(1.0, -(p * p / 2 + 0.05 * (n + 0.5)) * t) * v[n];
        CHECK(std::abs(s.chi(static_cast<Eigen::Index>(j), n) - ref) < 1e-12);
      }
    }
  }

  SUBCASE("coherent field returns after one period") {
    const Mode m = Mode::from_gamma(0.05, 0.002, au);
    const int dim = required_fock_dim(Coherent{{5.0, 0.0}}, m, au);
    const Propagator prop({m}, {dim}, grid, au);
    const auto v = initial_field_vector(Coherent{{5.0, 0.0}}, m, dim, au).vectors[0];
    const JointState s = prop.evolve(v, 2 * kPi / 0.05);
    for (Eigen::Index j = 0; j < s.chi.rows(); ++j)
      CHECK(std::abs(s.chi.row(j).conjugate().dot(v)) > 1 - 1e-8);
  }

  SUBCASE("two-mode factorized propagation matches the dense block") {
    const std::vector<Mode> modes{Mode::from_gamma(0.05, 0.02, au),
                                  Mode::from_gamma(0.08, 0.015, au)};
    const std::vector<int> dims{24, 12};
    const Propagator prop(modes, dims, grid, au);
    const auto v = tensor_product(initial_field_vector(Coherent{{0.8, 0.3}}, modes[0], 24, au),
                                  initial_field_vector(Fock{1}, modes[1], 12, au))
                       .vectors[0];
    const std::vector<FockBasis> bases{make_fock_basis(24), make_fock_basis(12)};
    const double t = 57.0;
    const JointState s = prop.evolve(v, t);
    for (std::size_t j : {std::size_t{0}, std::size_t{40}, std::size_t{64}, std::size_t{128}}) {
      const Eigen::MatrixXd h = build_hamiltonian_block(grid.p[j], modes, bases, au);
      const Eigen::VectorXcd ref = dense_evolve(h, v, t);
      CHECK((s.chi.row(static_cast<Eigen::Index>(j)).transpose() - ref).norm() < 1e-11);
    }
  }
}

TEST_CASE("momentum-space overlap") {
  const ElectronGaussian electron{10.0, 0.1, 0.0};
  const MomentumGrid grid = make_momentum_grid(electron, au, 64, 12.0);
  const Mode m = Mode::from_gamma(0.05, 0.05, au);
  const cplx alpha{2.0, 0.5};
  const int dim = required_fock_dim(Coherent{alpha}, m, au) + 16;
  const Propagator prop({m}, {dim}, grid, au);
  const auto v = initial_field_vector(Coherent{alpha}, m, dim, au).vectors[0];
  const std::vector<Mode> one{m};
  const double mg = effective_mass(one, au);

  const JointState s0 = prop.evolve(v, 0.0);
  for (std::size_t j1 : {10u, 64u, 100u}) {
    CHECK(std::abs(overlap_F(s0, grid, j1, 30) - grid.w[j1] * std::conj(grid.w[30])) < 1e-14);
  }

  for (double t : {17.0, 60.0, 200.0}) {
    const JointState s = prop.evolve(v, t);
    for (std::size_t j = 0; j < grid.size(); j += 16)
      CHECK(std::abs(overlap_F(s, grid, j, j) - std::norm(grid.w[j])) < 1e-14);

    // <alpha(p2,t)|alpha(p1,t)> with the dynamical and label phases.
    for (auto [j1, j2] : {std::pair<std::size_t, std::size_t>{50, 70}, {64, 64}, {30, 90}}) {
      const double p1 = grid.p[j1], p2 = grid.p[j2];
      const auto l1 = analytic::evolve_labels(Coherent{alpha}, m, p1, t);
      const auto l2 = analytic::evolve_labels(Coherent{alpha}, m, p2, t);
      const double e1 = p1 * p1 / (2 * mg) + 0.05 / 2, e2 = p2 * p2 / (2 * mg) + 0.05 / 2;
      const cplx field = std::exp(-0.5 * std::norm(l1.alpha_t) - 0.5 * std::norm(l2.alpha_t) +
                                  std::conj(l2.alpha_t) * l1.alpha_t);
      const cplx ref = grid.w[j1] * std::conj(grid.w[j2]) *
                       std::polar(1.0, -(e1 - e2) * t + (l1.delta_t - l2.delta_t)) * field;
      CHECK(std::abs(overlap_F(s, grid, j1, j2) - ref) < 1e-8 * std::abs(grid.w[j1] * grid.w[j2]));
    }
  }
}

TEST_CASE("observables against closed forms") {
  const ElectronGaussian electron{10.0, 0.1, 0.0};
  const double sp = 0.05;

  SUBCASE("free spreading") {
    OracleSetup setup;
    setup.modes = {Mode::from_gamma(0.05, 0.0, au)};
    setup.states = {Coherent{{2.0, 0.0}}};
    setup.electron = electron;
    const auto times = linspace(0.0, 3 * 2 * kPi / 0.05, 7);
    const auto res = run_oracle(setup, times, au);
    for (const auto& s : res.samples) {
      const double ref = 100.0 + sp * sp * s.t * s.t;
      CHECK(rel(s.var_x, ref, ref) < 1e-8);
      CHECK(rel(s.mean_x, 0.1 * s.t, std::sqrt(ref)) < 1e-8);
      CHECK(rel(s.mean_x_fd, s.mean_x, std::sqrt(ref)) < 1e-6);
      CHECK(rel(s.var_x_fd, s.var_x, ref) < 1e-6);
    }
  }

  SUBCASE("conservation over ten cycles") {
    OracleSetup setup;
    setup.modes = {Mode::from_gamma(0.05, 0.002, au)};
    setup.states = {SqueezedCoherent{{3.0, 1.0}, 0.8, 0.5}};
    setup.electron = electron;
    const auto times = linspace(0.0, 10 * 2 * kPi / 0.05, 11);
    const auto res = run_oracle(setup, times, au);
    const auto& first = res.samples.front();
    for (const auto& s : res.samples) {
      CHECK(std::abs(s.norm - first.norm) < 1e-12);
      CHECK(rel(s.energy, first.energy, std::abs(first.energy)) < 1e-10);
      CHECK(rel(s.mean_p, 0.1, 0.1) < 1e-10);
      CHECK(rel(s.var_p, sp * sp, sp * sp) < 1e-10);
      CHECK(s.edge_population < 1e-10);
    }
  }

  SUBCASE("doubling the Fock dimension changes nothing") {
    OracleSetup setup;
    setup.modes = {Mode::from_gamma(0.05, 0.002, au)};
    setup.states = {SqueezedCoherent{{1.0, 0.0}, 1.0, 0.0}};
    setup.electron = electron;
    const auto times = linspace(0.0, 2 * 2 * kPi / 0.05, 5);
    const auto a = run_oracle(setup, times, au);
    setup.fock_dims = {2 * a.fock_dims[0]};
    const auto b = run_oracle(setup, times, au);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double sx = std::sqrt(a.samples[i].var_x);
      CHECK(rel(a.samples[i].mean_x, b.samples[i].mean_x, std::max(std::abs(a.samples[i].mean_x), sx)) < 1e-8);
      CHECK(rel(a.samples[i].var_x, b.samples[i].var_x, a.samples[i].var_x) < 1e-8);
    }
  }

  SUBCASE("aliasing is detected") {
    OracleSetup setup;
    setup.modes = {Mode::from_gamma(0.05, 0.0, au)};
    setup.states = {Vacuum{}};
    setup.electron = electron;
    setup.half_points = 32;  // x window of about 500 bohr
    const std::vector<double> late{3000.0};
    CHECK_THROWS_AS(run_oracle(setup, late, au), AliasingError);
  }

  SUBCASE("grid that misses the packet is rejected") {
    CHECK_THROWS_AS(make_momentum_grid(electron, au, 64, 3.0), std::invalid_argument);
  }
}

TEST_CASE("chirped packet carries its position-momentum correlation") {
  // phi(p) ~ exp(-(p - p0)^2 / 4 sp^2 - i kappa (p - p0)^2): a Gaussian that has
  // already spread freely for a time 2 kappa.
  const double sp = 0.05, p0 = 0.1, kappa = 300.0;
  const double norm = std::pow(2 * kPi * sp * sp, -0.25);
  auto amp = [&](double p) {
    const double u = p - p0;
    return norm * std::exp(-u * u / (4 * sp * sp)) * std::polar(1.0, -kappa * u * u);
  };
  // The chirp makes the amplitude oscillate; sample it finely.
  const MomentumGrid grid = make_momentum_grid(amp, p0, 12 * sp, 768);
  const ElectronMoments moments{0.0, p0, 1 / (4 * sp * sp) + 4 * kappa * kappa * sp * sp, sp * sp,
                                4 * kappa * sp * sp};
  const Mode m = Mode::from_gamma(0.05, 0.01, au);
  const FieldModeState state = SqueezedCoherent{{1.0, 0.0}, 0.5, 0.0};
  const int dim = required_fock_dim(state, m, au);
  const Propagator prop({m}, {dim}, grid, au);
  const auto field = initial_field_vector(state, m, dim, au);
  const auto times = linspace(0.0, 2 * 2 * kPi / 0.05, 5);
  const auto samples = prop.run(field, times);
  const std::vector<Mode> modes{m};
  const std::vector<FieldModeState> states{state};
  for (const auto& s : samples) {
    const double var = analytic::position_variance(moments, states, modes, s.t, au).total;
    const double mean = analytic::position_mean(moments, states, modes, s.t, au);
    CHECK(rel(s.var_x, var, var) < 1e-6);
    CHECK(rel(s.mean_x, mean, std::sqrt(var)) < 1e-6);
  }
}

TEST_CASE("strong coupling") {
  // gamma = 0.3 puts the field term well above rounding of the free spread.
  const Mode m = Mode::from_gamma(0.05, 0.3, au);
  const std::vector<Mode> modes{m};
  const ElectronGaussian electron{3.0, 0.05, 1.0};
  const double T = m.omega() / (au.k_boltzmann * std::log(2.0));
  const std::vector<std::pair<FieldModeState, double>> cases{
      {Coherent{{1.0, -0.5}}, 1e-6}, {SqueezedCoherent{{0.5, 0.0}, 0.7, kPi}, 1e-6},
      {Fock{2}, 1e-6}, {Thermal{T}, 1e-5}};
  const auto times = linspace(0.0, 2 * kPi / 0.05, 7);
  for (const auto& [state, tol] : cases) {
    CAPTURE(describe(state));
    OracleSetup setup;
    setup.modes = modes;
    setup.states = {state};
    setup.electron = electron;
    const auto res = run_oracle(setup, times, au);
    const std::vector<FieldModeState> st{state};
    double field_part = 0.0;
    for (const auto& s : res.samples) {
      const auto v = analytic::position_variance(electron, st, modes, s.t, au);
      const double mean = analytic::position_mean(electron, st, modes, s.t, au);
      CHECK(rel(s.var_x, v.total, v.total) < tol);
      CHECK(rel(s.mean_x, mean, std::max(std::abs(mean), std::sqrt(v.total))) < tol);
      field_part = std::max(field_part, v.field_term / v.total);
    }
    CHECK(field_part > 1e-3);
  }
}
