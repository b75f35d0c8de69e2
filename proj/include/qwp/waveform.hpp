#pragma once

#include <functional>

namespace qwp {

/// A classical driving field given by its electric waveform E_cl(t), the
/// vector potential A_cl(t) (E = -dA/dt) and the running integral
/// Abar_cl(t) = int_0^t A_cl.  All three are callables of time in a.u.
struct ClassicalWaveform {
  std::function<double(double)> field;
  std::function<double(double)> vector_potential;
  std::function<double(double)> vector_potential_integral;
};

}  // namespace qwp
