#pragma once

// Independent reference computations for the tests.  Everything here
// deliberately avoids the library's eigensolver propagator, tensor
// embedding and index-contraction paths: exponentials are Taylor series,
// class operators are accumulated projector products, and interferometer
// amplitudes are closed-form arithmetic.

#include <cmath>
#include <vector>

#include "qhist/model.hpp"

namespace oracle {

using qhist::Complex;
using qhist::Matrix;
using qhist::Vector;

// exp(-i H t) by scaling and squaring on the Taylor series.
inline Matrix expm_minus_iht(const Matrix& h, double t) {
  const Eigen::Index n = h.rows();
  Matrix a = Complex(0.0, -t) * h;
  int squarings = 0;
  while (a.norm() > 0.5) {
    a /= 2.0;
    ++squarings;
  }
  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 24; ++k) {
    term = (term * a) / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

// Product of the model's segment unitaries (or series exponentials) from
// grid index `from` to grid index `to`, t0 being index -1.
inline Matrix propagator(const qhist::SystemModel& model, int from, int to) {
  Matrix u = Matrix::Identity(model.dim(), model.dim());
  if (model.evolution().is_hamiltonian()) {
    const double t_from = from < 0 ? model.support().t0()
                                   : model.support().times()[static_cast<std::size_t>(from)];
    const double t_to = to < 0 ? model.support().t0()
                               : model.support().times()[static_cast<std::size_t>(to)];
    return expm_minus_iht(model.evolution().generator(), t_to - t_from);
  }
  for (int k = from + 1; k <= to; ++k) {
    u = model.evolution().unitaries()[static_cast<std::size_t>(k)] * u;
  }
  return u;
}

// Class operator of a homogeneous history given as one projector per grid
// time, built as the time-ordered product of Heisenberg projectors with
// the latest time leftmost.
inline Matrix class_operator(const qhist::SystemModel& model,
                             const std::vector<Matrix>& slots) {
  Matrix c = Matrix::Identity(model.dim(), model.dim());
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const Matrix u = propagator(model, -1, static_cast<int>(k));
    c = (u.adjoint() * slots[k] * u) * c;
  }
  return c;
}

inline Complex dfunc(const qhist::SystemModel& model, const Matrix& ca,
                     const Matrix& cb) {
  return (ca * model.initial_state().matrix() * cb.adjoint()).trace();
}

// Probability of a projector sequence by explicit state collapse:
// tr(P_n U_n ... P_1 U_1 rho U_1^+ P_1 ... U_n^+ P_n).
inline double collapse_chain(const qhist::SystemModel& model,
                             const std::vector<Matrix>& slots) {
  Matrix rho = model.initial_state().matrix();
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const Matrix u = propagator(model, static_cast<int>(k) - 1,
                                static_cast<int>(k));
    rho = u * rho * u.adjoint();
    rho = slots[k] * rho * slots[k].adjoint();
  }
  return rho.trace().real();
}

// Closed-form two-arm interferometer amplitudes for source |0>, splitter
// (1/sqrt2)[[1,i],[i,1]], phase shifter diag(e^{i phi},1) on arm 0 and the
// detector on port 1 (bright at phi = 0).
struct MziAmplitudes {
  Complex upper;       // arm 0 then detector
  Complex lower;       // arm 1 then detector
  double brightness;   // detector probability with no arm projector
};

inline MziAmplitudes mzi_amplitudes(double phase) {
  MziAmplitudes a;
  const Complex i(0.0, 1.0);
  const Complex phase_factor = std::exp(i * phase);
  a.upper = i * phase_factor / 2.0;
  a.lower = i / 2.0;
  a.brightness = std::cos(phase / 2.0) * std::cos(phase / 2.0);
  return a;
}

}  // namespace oracle
