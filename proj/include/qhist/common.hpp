#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qhist {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// --------------------------- tolerance ----------------------------------

// Absolute tolerance on operator norms, shared by every operation that is
// not given an explicit override.
double default_tolerance();

// Must be positive.
void set_default_tolerance(double tol);

// --------------------------- error taxonomy -----------------------------

// Base class for every failure raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Construction-time invariant violation (shape, hermiticity, trace, ...).
struct ValidationError : Error {
  using Error::Error;
};

// Scenario text could not be read as a structured document at all.
struct ParseError : Error {
  using Error::Error;
};

// A requested time is neither the fiducial time nor a grid time.
struct NonGridTime : Error {
  using Error::Error;
};

// Cross-operation between histories whose temporal supports differ.
struct SupportMismatch : Error {
  using Error::Error;
};

// Conjunction or disjunction of propositions that do not commute.
struct NonCommuting : Error {
  using Error::Error;
};

// Conditioning on a proposition whose probability is below tolerance.
struct DegenerateConditioning : Error {
  using Error::Error;
};

// Candidate Boolean family is not closed under conjunction.
struct NotBooleanClosed : Error {
  using Error::Error;
};

// Probability vector does not sum to one within tolerance.
struct NotNormalized : Error {
  using Error::Error;
};

// Entropy requested over sets that are not exclusive and exhaustive
// together.
struct NotCoExclusive : Error {
  using Error::Error;
};

// --------------------------- small helpers ------------------------------

// Frobenius norm comparison; shapes must agree.
bool nearly_equal(const Matrix& a, const Matrix& b, double tol);

bool nearly_zero(const Matrix& a, double tol);

// Deterministic stream splitter for seeded generators (splitmix64 step).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace qhist
