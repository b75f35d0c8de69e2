#include "qwp/oracle.hpp"

#include <fftw3.h>
#include <lapacke.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "qwp/parallel.hpp"

namespace qwp::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kSpectrumCacheBytes = std::size_t{1} << 30;
constexpr std::size_t kSnapshotBytes = std::size_t{1} << 30;

// 8th-order central first derivative, offsets -4..4.
constexpr std::array<double, 9> kStencil = {1.0 / 280, -4.0 / 105, 1.0 / 5,
                                            -4.0 / 5,  0.0,        4.0 / 5,
                                            -1.0 / 5,  4.0 / 105,  -1.0 / 280};

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double tail_population(const Eigen::VectorXcd& v, Eigen::Index from) {
  if (from >= v.size()) return 0.0;
  return v.tail(v.size() - std::max<Eigen::Index>(from, 0)).squaredNorm();
}

// v <- exp(G) v for a generator with ||G||_1 <= bound, by scaled Taylor
// series (each sub-step has ||G/s|| <= 1/2).
template <typename Apply>
void expm_apply(Apply&& apply, double bound, Eigen::VectorXcd& v) {
  const long steps = std::max(1L, static_cast<long>(std::ceil(2.0 * bound)));
  const double h = 1.0 / static_cast<double>(steps);
  Eigen::VectorXcd term(v.size());
  Eigen::VectorXcd sum(v.size());
  for (long s = 0; s < steps; ++s) {
    term = v;
    sum = v;
    for (int k = 1; k <= 60; ++k) {
      term = apply(term) * (h / k);
      sum += term;
      if (term.squaredNorm() <= 1e-36 * sum.squaredNorm()) break;
    }
    v = sum;
  }
}

// (alpha a^dag - alpha^* a) v
Eigen::VectorXcd displacement_generator(cplx alpha, const Eigen::VectorXcd& v) {
  const Eigen::Index n = v.size();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k > 0) out[k] += alpha * std::sqrt(static_cast<double>(k)) * v[k - 1];
    if (k + 1 < n)
      out[k] -= std::conj(alpha) * std::sqrt(static_cast<double>(k + 1)) * v[k + 1];
  }
  return out;
}

// (z a^dag^2 - z^* a^2) v / 2
Eigen::VectorXcd squeeze_generator(cplx z, const Eigen::VectorXcd& v) {
  const Eigen::Index n = v.size();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto kd = static_cast<double>(k);
    if (k > 1) out[k] += 0.5 * z * std::sqrt(kd * (kd - 1.0)) * v[k - 2];
    if (k + 2 < n)
      out[k] -= 0.5 * std::conj(z) * std::sqrt((kd + 1.0) * (kd + 2.0)) * v[k + 2];
  }
  return out;
}

// D(alpha) S(z)|0> in a basis of the given size.
Eigen::VectorXcd gaussian_state(cplx alpha, cplx z, int dim) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v[0] = 1.0;
  if (std::abs(z) > 0.0) {
    expm_apply([&](const Eigen::VectorXcd& x) { return squeeze_generator(z, x); },
               std::abs(z) * (dim + 1.0), v);
  }
  if (std::abs(alpha) > 0.0) {
    expm_apply(
        [&](const Eigen::VectorXcd& x) { return displacement_generator(alpha, x); },
        2.0 * std::abs(alpha) * std::sqrt(static_cast<double>(dim)), v);
  }
  return v;
}

// Smallest N with population at indices >= N - kHeadroom below tolerance.
int required_dim_of(const Eigen::VectorXcd& v, double tol) {
  double tail = 0.0;
  Eigen::Index idx = v.size();
  for (Eigen::Index k = v.size() - 1; k >= 0; --k) {
    tail += std::norm(v[k]);
    if (tail > tol) break;
    idx = k;
  }
  return static_cast<int>(idx) + kHeadroom;
}

bool is_gaussian_pure(const FieldModeState& s, cplx& alpha, cplx& z) {
  if (std::holds_alternative<Vacuum>(s)) {
    alpha = 0.0;
    z = 0.0;
    return true;
  }
  if (auto* coh = std::get_if<Coherent>(&s)) {
    alpha = coh->alpha;
    z = 0.0;
    return true;
  }
  if (auto* sq = std::get_if<SqueezedCoherent>(&s)) {
    alpha = sq->alpha;
    z = std::polar(sq->r, sq->theta);
    return true;
  }
  return false;
}

struct ThermalWeights {
  std::vector<double> weights;
  double retained;
};

ThermalWeights thermal_weights(const Thermal& th, const Mode& mode,
                               const PhysicalConstants& c) {
  const double x = c.hbar * mode.omega() / (c.k_boltzmann * th.temperature);
  const double q = std::exp(-x);
  ThermalWeights out{{}, 0.0};
  double w = -std::expm1(-x);
  while (out.retained <= kThermalCoverage) {
    out.weights.push_back(w);
    out.retained += w;
    w *= q;
    if (out.weights.size() > 1000000)
      throw TruncationError("thermal state too hot for a Fock-space oracle",
                            static_cast<int>(out.weights.size()));
  }
  return out;
}

// Field part of the single-mode block: diagonal hbar w (n + 1/2),
// off-diagonal -(e/m) p A sqrt(n + 1).
void field_tridiagonal(double p, const Mode& mode, int dim,
                       const PhysicalConstants& c, Eigen::VectorXd& d,
                       Eigen::VectorXd& e) {
  d.resize(dim);
  e.resize(dim);
  const double coupling = -(c.charge_e / c.mass_e) * p * mode.amp_A();
  for (int n = 0; n < dim; ++n) {
    d[n] = c.hbar * mode.omega() * (n + 0.5);
    e[n] = coupling * std::sqrt(n + 1.0);
  }
  e[dim - 1] = 0.0;
}

Eigen::MatrixXd tridiagonal_apply(const Eigen::VectorXd& d,
                                  const Eigen::VectorXd& e,
                                  const Eigen::MatrixXd& x) {
  Eigen::MatrixXd y = d.asDiagonal() * x;
  const Eigen::Index n = d.size();
  if (n > 1) {
    y.topRows(n - 1) += e.head(n - 1).asDiagonal() * x.bottomRows(n - 1);
    y.bottomRows(n - 1) += e.head(n - 1).asDiagonal() * x.topRows(n - 1);
  }
  return y;
}

Eigen::MatrixXcd tridiagonal_apply(const Eigen::VectorXd& d,
                                   const Eigen::VectorXd& e,
                                   const Eigen::MatrixXcd& x) {
  Eigen::MatrixXcd y(x.rows(), x.cols());
  y.real() = tridiagonal_apply(d, e, Eigen::MatrixXd(x.real()));
  y.imag() = tridiagonal_apply(d, e, Eigen::MatrixXd(x.imag()));
  return y;
}

Eigen::MatrixXcd real_times(const Eigen::MatrixXd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows(), b.cols());
  out.real() = a * b.real();
  out.imag() = a * b.imag();
  return out;
}

Eigen::MatrixXcd times_real(const Eigen::MatrixXcd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXcd out(a.rows(), b.cols());
  out.real() = a.real() * b;
  out.imag() = a.imag() * b;
  return out;
}

struct FftwPlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

// In-place backward transforms of every column of x.
void fft_columns(Eigen::MatrixXcd& x) {
  const int n = static_cast<int>(x.rows());
  const int howmany = static_cast<int>(x.cols());
  auto* data = reinterpret_cast<fftw_complex*>(x.data());
  std::unique_ptr<fftw_plan_s, FftwPlanDeleter> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_many_dft(1, &n, howmany, data, nullptr, 1, n, data,
                                  nullptr, 1, n, FFTW_BACKWARD,
                                  FFTW_ESTIMATE | FFTW_UNALIGNED));
  }
  fftw_execute(plan.get());
}

}  // namespace

// ---------------------------------------------------------------------------

FockBasis make_fock_basis(int dim) {
  if (dim < 1) throw std::invalid_argument("Fock dimension must be >= 1");
  FockBasis b;
  b.dim = dim;
  b.a = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) b.a(n - 1, n) = std::sqrt(static_cast<double>(n));
  b.adag = b.a.transpose();
  b.number = b.adag * b.a;
  b.quad_x = b.a + b.adag;
  b.quad_p = cplx{0.0, 1.0} * (b.a - b.adag).cast<cplx>();
  return b;
}

double MomentumGrid::norm() const {
  double s = 0.0;
  for (const cplx& v : w) s += std::norm(v);
  return s;
}

MomentumGrid make_momentum_grid(const std::function<cplx(double)>& amplitude,
                                double center, double half_width,
                                int half_points) {
  if (half_points < 1 || !(half_width > 0.0))
    throw std::invalid_argument("momentum grid needs half_points >= 1 and a "
                                "positive half width");
  MomentumGrid g;
  g.center = center;
  g.half_points = half_points;
  g.dp = half_width / half_points;
  const int count = 2 * half_points + 1;
  g.p.resize(count);
  g.w.resize(count);
  const double root = std::sqrt(g.dp);
  for (int j = 0; j < count; ++j) {
    g.p[j] = center + (j - half_points) * g.dp;
    g.w[j] = amplitude(g.p[j]) * root;
  }
  if (std::abs(g.norm() - 1.0) > 1e-10)
    throw std::invalid_argument(
        "momentum grid does not cover the packet (sampled norm " +
        std::to_string(g.norm()) + "); widen the grid");
  return g;
}

MomentumGrid make_momentum_grid(const ElectronGaussian& e,
                                const PhysicalConstants& c, int half_points,
                                double half_width_sigmas) {
  validate(e);
  const double sigma_p = c.hbar / (2.0 * e.sigma_x);
  const double norm = std::pow(2.0 * kPi * sigma_p * sigma_p, -0.25);
  auto amplitude = [&](double p) {
    const double u = (p - e.p0) / sigma_p;
    return norm * std::exp(-0.25 * u * u) * std::polar(1.0, -p * e.x0 / c.hbar);
  };
  return make_momentum_grid(amplitude, e.p0, half_width_sigmas * sigma_p,
                            half_points);
}

// ---------------------------------------------------------------------------

int required_fock_dim(const FieldModeState& state, const Mode& mode,
                      const PhysicalConstants& c) {
  validate(state);
  if (auto* f = std::get_if<Fock>(&state)) return f->n + 1 + kHeadroom;
  if (auto* th = std::get_if<Thermal>(&state))
    return static_cast<int>(thermal_weights(*th, mode, c).weights.size()) + kHeadroom;
  cplx alpha, z;
  is_gaussian_pure(state, alpha, z);
  int padded = 64 + static_cast<int>(4.0 * std::norm(alpha)) +
               static_cast<int>(16.0 * std::pow(std::sinh(std::abs(z)), 2));
  for (;; padded *= 2) {
    if (padded > (1 << 17))
      throw TruncationError("state needs an impractically large Fock space", padded);
    const Eigen::VectorXcd v = gaussian_state(alpha, z, padded);
    if (tail_population(v, padded / 2) < 1e-3 * kTailTolerance)
      return required_dim_of(v, 0.5 * kTailTolerance);
  }
}

FieldEnsemble initial_field_vector(const FieldModeState& state, const Mode& mode,
                                   int dim, const PhysicalConstants& c) {
  validate(state);
  if (dim < 1) throw std::invalid_argument("Fock dimension must be >= 1");
  auto fail = [&]() -> TruncationError {
    const int need = required_fock_dim(state, mode, c);
    return TruncationError("Fock dimension " + std::to_string(dim) +
                               " leaves too little headroom for " +
                               describe(state) + "; need at least " +
                               std::to_string(need),
                           need);
  };

  FieldEnsemble out;
  if (auto* f = std::get_if<Fock>(&state)) {
    if (f->n >= dim - kHeadroom) throw fail();
    out.weights = {1.0};
    out.vectors.push_back(Eigen::VectorXcd::Unit(dim, f->n));
    return out;
  }
  if (auto* th = std::get_if<Thermal>(&state)) {
    const ThermalWeights tw = thermal_weights(*th, mode, c);
    if (static_cast<int>(tw.weights.size()) > dim - kHeadroom) throw fail();
    for (std::size_t n = 0; n < tw.weights.size(); ++n) {
      out.weights.push_back(tw.weights[n] / tw.retained);
      out.vectors.push_back(Eigen::VectorXcd::Unit(dim, static_cast<Eigen::Index>(n)));
    }
    out.retained_weight = tw.retained;
    return out;
  }

  cplx alpha, z;
  is_gaussian_pure(state, alpha, z);
  const int padded = std::max(2 * dim, dim + 64);
  const Eigen::VectorXcd v = gaussian_state(alpha, z, padded);
  if (tail_population(v, dim - kHeadroom) > kTailTolerance) throw fail();
  Eigen::VectorXcd head = v.head(dim);
  head.normalize();
  out.weights = {1.0};
  out.vectors.push_back(std::move(head));
  return out;
}

FieldEnsemble tensor_product(const FieldEnsemble& a, const FieldEnsemble& b) {
  FieldEnsemble out;
  out.retained_weight = a.retained_weight * b.retained_weight;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      const Eigen::Index n1 = a.vectors[i].size();
      const Eigen::Index n2 = b.vectors[k].size();
      Eigen::VectorXcd v(n1 * n2);
      Eigen::Map<Eigen::MatrixXcd>(v.data(), n1, n2) =
          a.vectors[i] * b.vectors[k].transpose();
      out.weights.push_back(a.weights[i] * b.weights[k]);
      out.vectors.push_back(std::move(v));
    }
  }
  return out;
}

QuadratureStats field_quadrature_stats(const FieldEnsemble& field,
                                       const Mode& mode, double t) {
  const cplx down = cplx{0.0, mode.amp_E()} * std::polar(1.0, -mode.omega() * t);
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Eigen::VectorXcd& v = field.vectors[i];
    const Eigen::Index n = v.size();
    // u = E v with E = down a + down^* a^dag (Hermitian).
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k + 1 < n) u[k] += down * std::sqrt(k + 1.0) * v[k + 1];
      if (k > 0) u[k] += std::conj(down) * std::sqrt(static_cast<double>(k)) * v[k - 1];
    }
    mean += field.weights[i] * v.dot(u).real();
    second += field.weights[i] * u.squaredNorm();
  }
  return {mean, second - mean * mean};
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd build_hamiltonian_block(double p, const Mode& mode,
                                        const FockBasis& basis,
                                        const PhysicalConstants& c) {
  const int n = basis.dim;
  Eigen::MatrixXd h =
      (p * p / (2.0 * c.mass_e)) * Eigen::MatrixXd::Identity(n, n) +
      c.hbar * mode.omega() *
          (basis.number + 0.5 * Eigen::MatrixXd::Identity(n, n)) -
      (c.charge_e / c.mass_e) * p * mode.amp_A() * basis.quad_x;
  return h;
}

Eigen::MatrixXd build_hamiltonian_block(double p, std::span<const Mode> modes,
                                        std::span<const FockBasis> bases,
                                        const PhysicalConstants& c) {
  if (modes.size() != bases.size() || modes.empty())
    throw std::invalid_argument("build_hamiltonian_block: one basis per mode");
  Eigen::Index total = 1;
  for (const auto& b : bases) total *= b.dim;
  Eigen::MatrixXd h =
      (p * p / (2.0 * c.mass_e)) * Eigen::MatrixXd::Identity(total, total);
  // Stride of mode m in the flattened index (mode 0 fastest).
  Eigen::Index stride = 1;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const Eigen::MatrixXd hm = build_hamiltonian_block(0.0, modes[m], bases[m], c) -
                               (c.charge_e / c.mass_e) * p * modes[m].amp_A() *
                                   bases[m].quad_x;
    const Eigen::Index dm = bases[m].dim;
    for (Eigen::Index i = 0; i < total; ++i) {
      const Eigen::Index digit = (i / stride) % dm;
      const Eigen::Index base = i - digit * stride;
      for (Eigen::Index k = 0; k < dm; ++k) h(i, base + k * stride) += hm(digit, k);
    }
    stride *= dm;
  }
  return h;
}

// ---------------------------------------------------------------------------

Observables observables(const JointState& state, const MomentumGrid& grid,
                        const PhysicalConstants& c) {
  const Eigen::Index J = static_cast<Eigen::Index>(grid.size());
  const Eigen::Index D = state.chi.cols();
  if (state.chi.rows() != J)
    throw std::invalid_argument("observables: state does not match the grid");
  const int M = grid.half_points;
  const double hbar = c.hbar;

  Eigen::MatrixXcd b(J, D);
  Eigen::VectorXd rho(J);
  for (Eigen::Index j = 0; j < J; ++j) {
    b.row(j) = grid.w[j] * state.chi.row(j);
    rho[j] = b.row(j).squaredNorm();
  }
  Observables o;
  o.norm = rho.sum();

  for (Eigen::Index j = 0; j < J; ++j) o.mean_p += grid.p[j] * rho[j];
  o.mean_p /= o.norm;
  for (Eigen::Index j = 0; j < J; ++j)
    o.var_p += std::pow(grid.p[j] - o.mean_p, 2) * rho[j];
  o.var_p /= o.norm;

  // Rough centre from the mean phase advance between neighbouring points:
  // a packet at x carries e^{-i p x / hbar}.
  cplx advance{};
  for (Eigen::Index j = 0; j + 1 < J; ++j) advance += b.row(j).dot(b.row(j + 1));
  const double x_rough = -hbar * std::arg(advance) / grid.dp;

  auto shifted = [&](double x_c, double extra_per_index) {
    Eigen::MatrixXcd s(J, D);
    for (Eigen::Index j = 0; j < J; ++j)
      s.row(j) = std::polar(1.0, (j - M) * grid.dp * x_c / hbar +
                                     extra_per_index * static_cast<double>(j)) *
                 b.row(j);
    return s;
  };

  // Finite differences in p, relative to the rough centre.
  {
    const Eigen::MatrixXcd s = shifted(x_rough, 0.0);
    Eigen::MatrixXcd ds = Eigen::MatrixXcd::Zero(J, D);
    for (Eigen::Index j = 0; j < J; ++j) {
      for (int o2 = -4; o2 <= 4; ++o2) {
        const Eigen::Index jj = j + o2;
        if (o2 == 0 || jj < 0 || jj >= J) continue;
        ds.row(j) += kStencil[o2 + 4] * s.row(jj);
      }
    }
    ds /= grid.dp;
    cplx first{};
    for (Eigen::Index j = 0; j < J; ++j) first += s.row(j).dot(ds.row(j));
    const double rel_mean = (cplx{0.0, hbar} * first).real() / o.norm;
    const double rel_second = hbar * hbar * ds.squaredNorm() / o.norm;
    o.mean_x_fd = x_rough + rel_mean;
    o.var_x_fd = rel_second - rel_mean * rel_mean;
  }

  // DFT onto x_k = x_c + (k - M) dx, dx = 2 pi hbar / (J dp).
  {
    const double x_c = o.mean_x_fd;
    Eigen::MatrixXcd f = shifted(x_c, -2.0 * kPi * M / static_cast<double>(J));
    fft_columns(f);
    const double dx = 2.0 * kPi * hbar / (static_cast<double>(J) * grid.dp);
    Eigen::VectorXd density(J);
    for (Eigen::Index k = 0; k < J; ++k)
      density[k] = f.row(k).squaredNorm() / static_cast<double>(J);
    const double total = density.sum();
    const Eigen::Index edge = J / 16;
    const double edge_mass =
        density.head(edge).sum() + density.tail(edge).sum();
    if (edge_mass > kAliasTolerance * total)
      throw AliasingError(
          "position density reaches the edge of the DFT window (edge mass " +
          std::to_string(edge_mass / total) +
          "); use a finer momentum spacing or more grid points");
    double m1 = 0.0;
    for (Eigen::Index k = 0; k < J; ++k) m1 += (k - M) * dx * density[k];
    m1 /= total;
    double m2 = 0.0;
    for (Eigen::Index k = 0; k < J; ++k)
      m2 += std::pow((k - M) * dx - m1, 2) * density[k];
    o.mean_x = x_c + m1;
    o.var_x = m2 / total;
  }
  return o;
}

cplx overlap_F(const JointState& state, const MomentumGrid& grid,
               std::size_t j1, std::size_t j2) {
  const auto r1 = static_cast<Eigen::Index>(j1);
  const auto r2 = static_cast<Eigen::Index>(j2);
  return grid.w[j1] * std::conj(grid.w[j2]) *
         state.chi.row(r2).dot(state.chi.row(r1));
}

// ---------------------------------------------------------------------------

Propagator::Propagator(std::vector<Mode> modes, std::vector<int> dims,
                       MomentumGrid grid, const PhysicalConstants& c)
    : modes_(std::move(modes)), dims_(std::move(dims)), grid_(std::move(grid)), c_(c) {
  if (modes_.empty() || modes_.size() > 2)
    throw std::invalid_argument("the oracle supports one or two modes");
  if (dims_.size() != modes_.size())
    throw std::invalid_argument("one Fock dimension per mode is required");
  for (int d : dims_)
    if (d < 1) throw std::invalid_argument("Fock dimension must be >= 1");

  std::size_t bytes = 0;
  for (int d : dims_) bytes += static_cast<std::size_t>(d) * (d + 1) * sizeof(double);
  bytes *= grid_.size();
  if (bytes <= kSpectrumCacheBytes) {
    cache_.resize(grid_.size());
    parallel_for(grid_.size(), [&](std::size_t j) {
      for (std::size_t m = 0; m < modes_.size(); ++m)
        cache_[j].push_back(mode_spectrum(j, m));
    });
  }
}

std::size_t Propagator::state_dim() const {
  std::size_t d = 1;
  for (int n : dims_) d *= static_cast<std::size_t>(n);
  return d;
}

Propagator::Spectrum Propagator::mode_spectrum(std::size_t j,
                                               std::size_t mode) const {
  const int n = dims_[mode];
  Eigen::VectorXd d, e;
  field_tridiagonal(grid_.p[j], modes_[mode], n, c_, d, e);
  Spectrum s;
  s.values.resize(n);
  s.vectors.resize(n, n);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dstevr(
      LAPACK_COL_MAJOR, 'V', 'A', n, d.data(), e.data(), 0.0, 0.0, 0, 0, 0.0,
      &found, s.values.data(), s.vectors.data(), n, support.data());
  if (info != 0 || found != n)
    throw std::runtime_error("tridiagonal eigensolver failed (info " +
                             std::to_string(info) + ")");
  return s;
}

const Propagator::Spectrum& Propagator::spectrum(std::size_t j, std::size_t mode,
                                                 Spectrum& scratch) const {
  if (!cache_.empty()) return cache_[j][mode];
  scratch = mode_spectrum(j, mode);
  return scratch;
}

void Propagator::evolve_point(std::size_t j, const Eigen::VectorXcd& field0,
                              std::span<const double> times,
                              std::span<JointState> out) const {
  const double p = grid_.p[j];
  const double kinetic = p * p / (2.0 * c_.mass_e);
  const auto row = static_cast<Eigen::Index>(j);
  Spectrum scratch0, scratch1;
  const Spectrum& s1 = spectrum(j, 0, scratch0);
  const Eigen::Index n1 = dims_[0];

  if (modes_.size() == 1) {
    Eigen::VectorXcd coeff(n1);
    coeff.real() = s1.vectors.transpose() * field0.real();
    coeff.imag() = s1.vectors.transpose() * field0.imag();
    Eigen::MatrixXcd phased(n1, static_cast<Eigen::Index>(times.size()));
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double t = times[i];
      for (Eigen::Index k = 0; k < n1; ++k)
        phased(k, static_cast<Eigen::Index>(i)) =
            std::polar(1.0, -(s1.values[k] + kinetic) * t / c_.hbar) * coeff[k];
    }
    const Eigen::MatrixXcd chi = real_times(s1.vectors, phased);
    for (std::size_t i = 0; i < times.size(); ++i)
      out[i].chi.row(row) = chi.col(static_cast<Eigen::Index>(i)).transpose();
    return;
  }

  const Spectrum& s2 = spectrum(j, 1, scratch1);
  const Eigen::Index n2 = dims_[1];
  const Eigen::Map<const Eigen::MatrixXcd> m0(field0.data(), n1, n2);
  const Eigen::MatrixXcd coeff =
      times_real(real_times(s1.vectors.transpose(), m0), s2.vectors);
  const Eigen::MatrixXd v2t = s2.vectors.transpose();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    Eigen::MatrixXcd phased(n1, n2);
    for (Eigen::Index k2 = 0; k2 < n2; ++k2)
      for (Eigen::Index k1 = 0; k1 < n1; ++k1)
        phased(k1, k2) =
            std::polar(1.0, -(s1.values[k1] + s2.values[k2] + kinetic) * t / c_.hbar) *
            coeff(k1, k2);
    const Eigen::MatrixXcd m = times_real(real_times(s1.vectors, phased), v2t);
    out[i].chi.row(row) = Eigen::Map<const Eigen::RowVectorXcd>(m.data(), n1 * n2);
  }
}

JointState Propagator::evolve(const Eigen::VectorXcd& field0, double t) const {
  if (static_cast<std::size_t>(field0.size()) != state_dim())
    throw std::invalid_argument("initial field vector has the wrong dimension");
  std::vector<JointState> out(1);
  out[0].chi.resize(static_cast<Eigen::Index>(grid_.size()),
                    static_cast<Eigen::Index>(state_dim()));
  out[0].dims = dims_;
  out[0].t = t;
  const double times[] = {t};
  parallel_for(grid_.size(), [&](std::size_t j) {
    evolve_point(j, field0, times, out);
  });
  return out[0];
}

double Propagator::energy(const JointState& state) const {
  const Eigen::Index n1 = dims_[0];
  const Eigen::Index n2 = dims_.size() > 1 ? dims_[1] : 1;
  double total = 0.0;
  double norm = 0.0;
  for (std::size_t j = 0; j < grid_.size(); ++j) {
    const double p = grid_.p[j];
    const Eigen::RowVectorXcd chi_row = state.chi.row(static_cast<Eigen::Index>(j));
    const Eigen::Map<const Eigen::MatrixXcd> m(chi_row.data(), n1, n2);
    Eigen::VectorXd d, e;
    field_tridiagonal(p, modes_[0], dims_[0], c_, d, e);
    Eigen::MatrixXcd hm = tridiagonal_apply(d, e, Eigen::MatrixXcd(m));
    if (dims_.size() > 1) {
      field_tridiagonal(p, modes_[1], dims_[1], c_, d, e);
      hm += tridiagonal_apply(d, e, Eigen::MatrixXcd(m.transpose())).transpose();
    }
    hm += (p * p / (2.0 * c_.mass_e)) * m;
    const double weight = std::norm(grid_.w[j]);
    total += weight * (m.conjugate().cwiseProduct(hm)).sum().real();
    norm += weight * m.squaredNorm();
  }
  return total / norm;
}

std::vector<OracleSample> Propagator::run(const FieldEnsemble& field0,
                                          std::span<const double> times) const {
  const std::size_t J = grid_.size();
  const std::size_t D = state_dim();
  const std::size_t batch =
      std::max<std::size_t>(1, kSnapshotBytes / (J * D * sizeof(cplx)));

  std::vector<OracleSample> acc(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) acc[i] = OracleSample{times[i], 0, 0, 0, 0, 0, 0, 0, 0, 0};
  // Raw second moments are accumulated in var_* and converted at the end.
  for (std::size_t comp = 0; comp < field0.size(); ++comp) {
    const double weight = field0.weights[comp];
    const Eigen::VectorXcd& v = field0.vectors[comp];
    if (static_cast<std::size_t>(v.size()) != D)
      throw std::invalid_argument("initial field vector has the wrong dimension");
    for (std::size_t start = 0; start < times.size(); start += batch) {
      const std::size_t count = std::min(batch, times.size() - start);
      const auto chunk = times.subspan(start, count);
      std::vector<JointState> states(count);
      for (std::size_t i = 0; i < count; ++i) {
        states[i].chi.resize(static_cast<Eigen::Index>(J), static_cast<Eigen::Index>(D));
        states[i].dims = dims_;
        states[i].t = chunk[i];
      }
      parallel_for(J, [&](std::size_t j) { evolve_point(j, v, chunk, states); });

      std::vector<OracleSample> part(count);
      parallel_for(count, [&](std::size_t i) {
        const Observables o = observables(states[i], grid_, c_);
        double edge = 0.0;
        const Eigen::Index n1 = dims_[0];
        const Eigen::Index n2 = dims_.size() > 1 ? dims_[1] : 1;
        for (std::size_t m = 0; m < dims_.size(); ++m) {
          double pop = 0.0;
          for (std::size_t j = 0; j < J; ++j) {
            const Eigen::RowVectorXcd r = states[i].chi.row(static_cast<Eigen::Index>(j));
            const Eigen::Map<const Eigen::MatrixXcd> mat(r.data(), n1, n2);
            const double w2 = std::norm(grid_.w[j]);
            if (m == 0)
              pop += w2 * mat.bottomRows(std::min<Eigen::Index>(kHeadroom, n1)).squaredNorm();
            else
              pop += w2 * mat.rightCols(std::min<Eigen::Index>(kHeadroom, n2)).squaredNorm();
          }
          edge = std::max(edge, pop / o.norm);
        }
        part[i] = OracleSample{chunk[i],
                               o.mean_x,
                               o.var_x + o.mean_x * o.mean_x,
                               o.mean_p,
                               o.var_p + o.mean_p * o.mean_p,
                               o.norm,
                               energy(states[i]),
                               o.mean_x_fd,
                               o.var_x_fd + o.mean_x_fd * o.mean_x_fd,
                               edge};
      });
      for (std::size_t i = 0; i < count; ++i) {
        OracleSample& a = acc[start + i];
        const OracleSample& s = part[i];
        a.mean_x += weight * s.mean_x;
        a.var_x += weight * s.var_x;
        a.mean_p += weight * s.mean_p;
        a.var_p += weight * s.var_p;
        a.norm += weight * s.norm;
        a.energy += weight * s.energy;
        a.mean_x_fd += weight * s.mean_x_fd;
        a.var_x_fd += weight * s.var_x_fd;
        a.edge_population = std::max(a.edge_population, s.edge_population);
      }
    }
  }
  for (OracleSample& a : acc) {
    a.var_x -= a.mean_x * a.mean_x;
    a.var_p -= a.mean_p * a.mean_p;
    a.var_x_fd -= a.mean_x_fd * a.mean_x_fd;
  }
  return acc;
}

// ---------------------------------------------------------------------------

OracleResult run_oracle(const OracleSetup& setup, std::span<const double> times,
                        const PhysicalConstants& c) {
  if (setup.modes.size() != setup.states.size())
    throw std::invalid_argument("run_oracle: one field state per mode is required");
  if (setup.modes.empty() || setup.modes.size() > 2)
    throw std::invalid_argument("run_oracle: one or two modes are supported");
  OracleResult result;
  FieldEnsemble field;
  for (std::size_t m = 0; m < setup.modes.size(); ++m) {
    int dim = m < setup.fock_dims.size() ? setup.fock_dims[m] : 0;
    if (dim <= 0) dim = required_fock_dim(setup.states[m], setup.modes[m], c);
    result.fock_dims.push_back(dim);
    FieldEnsemble single = initial_field_vector(setup.states[m], setup.modes[m], dim, c);
    field = m == 0 ? std::move(single) : tensor_product(field, single);
  }
  result.retained_weight = field.retained_weight;
  MomentumGrid grid = make_momentum_grid(setup.electron, c, setup.half_points,
                                         setup.half_width_sigmas);
  result.grid_points = grid.size();
  const Propagator prop(setup.modes, result.fock_dims, std::move(grid), c);
  result.samples = prop.run(field, times);
  return result;
}

}  // namespace qwp::oracle
