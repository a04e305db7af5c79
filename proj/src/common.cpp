#include "qhist/common.hpp"

#include <atomic>

namespace qhist {

namespace {
std::atomic<double> g_tolerance{1e-10};
}

double default_tolerance() { return g_tolerance.load(); }

void set_default_tolerance(double tol) {
  if (!(tol > 0.0)) {
    throw ValidationError("set_default_tolerance: tolerance must be positive");
  }
  g_tolerance.store(tol);
}

bool nearly_equal(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return (a - b).norm() <= tol;
}

bool nearly_zero(const Matrix& a, double tol) { return a.norm() <= tol; }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace qhist
