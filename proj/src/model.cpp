#include "qhist/model.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>
#include <random>
#include <sstream>
#include <utility>

namespace qhist {

namespace {

std::string fmt(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

void require_square(const Matrix& m, const char* who) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw ValidationError(std::string(who) + ": matrix must be square and non-empty");
  }
}

void require_hermitian(const Matrix& m, double tol, const char* who) {
  if (!nearly_equal(m, m.adjoint(), tol)) {
    throw ValidationError(std::string(who) + ": matrix is not Hermitian within tolerance");
  }
}

void require_unitary(const Matrix& m, double tol, const char* who) {
  Matrix gram = m.adjoint() * m;
  if (!nearly_equal(gram, Matrix::Identity(m.rows(), m.cols()), tol)) {
    throw ValidationError(std::string(who) + ": matrix is not unitary within tolerance");
  }
}

// Eigendecomposition of a Hermitian matrix; failure is a validation issue
// because inputs are checked Hermitian first.
Eigen::SelfAdjointEigenSolver<Matrix> eigensystem(const Matrix& h, const char* who) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw ValidationError(std::string(who) + ": eigendecomposition failed");
  }
  return solver;
}

}  // namespace

// --------------------------- TemporalSupport ----------------------------

TemporalSupport::TemporalSupport(double t0, std::vector<double> times)
    : t0_(t0), times_(std::move(times)) {
  if (times_.empty()) {
    throw ValidationError("TemporalSupport: at least one grid time is required");
  }
  double prev = t0_;
  for (double t : times_) {
    if (!(t > prev)) {
      throw ValidationError("TemporalSupport: times must increase strictly after t0");
    }
    prev = t;
  }
}

int TemporalSupport::grid_index(double t) const {
  if (t == t0_) return -1;
  for (int k = 0; k < size(); ++k) {
    if (times_[static_cast<std::size_t>(k)] == t) return k;
  }
  throw NonGridTime("TemporalSupport: time " + fmt(t) + " is not on the grid");
}

bool TemporalSupport::contains(double t) const {
  if (t == t0_) return true;
  for (double grid : times_) {
    if (grid == t) return true;
  }
  return false;
}

bool TemporalSupport::operator==(const TemporalSupport& other) const {
  return t0_ == other.t0_ && times_ == other.times_;
}

// --------------------------- DensityMatrix ------------------------------

DensityMatrix::DensityMatrix(Matrix rho, double tol) : m_(std::move(rho)) {
  require_square(m_, "DensityMatrix");
  require_hermitian(m_, tol, "DensityMatrix");
  if (std::abs(m_.trace().real() - 1.0) > tol || std::abs(m_.trace().imag()) > tol) {
    throw ValidationError("DensityMatrix: trace must equal one within tolerance");
  }
  auto solver = eigensystem(m_, "DensityMatrix");
  if (solver.eigenvalues().minCoeff() < -tol) {
    throw ValidationError("DensityMatrix: matrix is not positive semidefinite");
  }
}

// --------------------------- Projector ----------------------------------

Projector::Projector(Matrix p, double tol) : m_(std::move(p)) {
  require_square(m_, "Projector");
  require_hermitian(m_, tol, "Projector");
  if (!nearly_equal(m_ * m_, m_, tol)) {
    throw ValidationError("Projector: matrix is not idempotent within tolerance");
  }
}

Projector Projector::identity(Eigen::Index dim) {
  return Projector(Matrix::Identity(dim, dim));
}

Projector Projector::basis_state(Eigen::Index dim, Eigen::Index k) {
  if (k < 0 || k >= dim) {
    throw ValidationError("Projector::basis_state: index out of range");
  }
  Matrix p = Matrix::Zero(dim, dim);
  p(k, k) = Complex(1.0, 0.0);
  return Projector(std::move(p));
}

Eigen::Index Projector::rank() const {
  return static_cast<Eigen::Index>(std::llround(m_.trace().real()));
}

// --------------------------- ProjectorFamily ----------------------------

ProjectorFamily::ProjectorFamily(std::vector<Projector> members, double tol)
    : members_(std::move(members)) {
  if (members_.empty()) {
    throw ValidationError("ProjectorFamily: family must not be empty");
  }
  const Eigen::Index d = members_.front().dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const Projector& p : members_) {
    if (p.dim() != d) {
      throw ValidationError("ProjectorFamily: members must share one dimension");
    }
    sum += p.matrix();
  }
  for (std::size_t i = 0; i < members_.size(); ++i) {
    for (std::size_t j = i + 1; j < members_.size(); ++j) {
      if (!nearly_zero(members_[i].matrix() * members_[j].matrix(), tol)) {
        throw ValidationError("ProjectorFamily: members are not pairwise orthogonal");
      }
    }
  }
  if (!nearly_equal(sum, Matrix::Identity(d, d), tol)) {
    throw ValidationError("ProjectorFamily: members must sum to the identity");
  }
}

const Projector& ProjectorFamily::member(int i) const {
  if (i < 0 || i >= size()) {
    throw ValidationError("ProjectorFamily: member index out of range");
  }
  return members_[static_cast<std::size_t>(i)];
}

// --------------------------- EvolutionLaw -------------------------------

EvolutionLaw::EvolutionLaw(std::variant<Matrix, std::vector<Matrix>> body)
    : body_(std::move(body)) {}

EvolutionLaw EvolutionLaw::hamiltonian(Matrix h, double tol) {
  require_square(h, "EvolutionLaw::hamiltonian");
  require_hermitian(h, tol, "EvolutionLaw::hamiltonian");
  return EvolutionLaw(std::variant<Matrix, std::vector<Matrix>>(std::move(h)));
}

EvolutionLaw EvolutionLaw::segments(std::vector<Matrix> unitaries, double tol) {
  if (unitaries.empty()) {
    throw ValidationError("EvolutionLaw::segments: at least one segment is required");
  }
  const Eigen::Index d = unitaries.front().rows();
  for (const Matrix& u : unitaries) {
    require_square(u, "EvolutionLaw::segments");
    if (u.rows() != d) {
      throw ValidationError("EvolutionLaw::segments: segments must share one dimension");
    }
    require_unitary(u, tol, "EvolutionLaw::segments");
  }
  return EvolutionLaw(std::variant<Matrix, std::vector<Matrix>>(std::move(unitaries)));
}

bool EvolutionLaw::is_hamiltonian() const {
  return std::holds_alternative<Matrix>(body_);
}

const Matrix& EvolutionLaw::generator() const {
  if (!is_hamiltonian()) {
    throw ValidationError("EvolutionLaw: generator requested from segment form");
  }
  return std::get<Matrix>(body_);
}

const std::vector<Matrix>& EvolutionLaw::unitaries() const {
  if (is_hamiltonian()) {
    throw ValidationError("EvolutionLaw: unitaries requested from Hamiltonian form");
  }
  return std::get<std::vector<Matrix>>(body_);
}

Eigen::Index EvolutionLaw::dim() const {
  return is_hamiltonian() ? generator().rows() : unitaries().front().rows();
}

// --------------------------- SystemModel --------------------------------

SystemModel::SystemModel(int dim, TemporalSupport support, EvolutionLaw evolution,
                         DensityMatrix initial_state,
                         std::vector<ProjectorFamily> families, double tol)
    : dim_(dim),
      support_(std::move(support)),
      evolution_(std::move(evolution)),
      state_(std::move(initial_state)),
      families_(std::move(families)) {
  (void)tol;
  if (dim_ < 1 || dim_ > 16) {
    throw ValidationError("SystemModel: dimension must lie in [1, 16]");
  }
  if (state_.dim() != dim_) {
    throw ValidationError("SystemModel: initial state dimension mismatch");
  }
  if (evolution_.dim() != dim_) {
    throw ValidationError("SystemModel: evolution dimension mismatch");
  }
  if (!evolution_.is_hamiltonian() &&
      static_cast<int>(evolution_.unitaries().size()) != support_.size()) {
    throw ValidationError("SystemModel: one evolution segment per grid time is required");
  }
  if (static_cast<int>(families_.size()) != support_.size()) {
    throw ValidationError("SystemModel: one projector family per grid time is required");
  }
  for (const ProjectorFamily& family : families_) {
    if (family.dim() != dim_) {
      throw ValidationError("SystemModel: family dimension mismatch");
    }
  }
}

const ProjectorFamily& SystemModel::family(int k) const {
  if (k < 0 || k >= static_cast<int>(families_.size())) {
    throw ValidationError("SystemModel: family index out of range");
  }
  return families_[static_cast<std::size_t>(k)];
}

// --------------------------- propagator ---------------------------------

Matrix propagator(const SystemModel& model, double from, double to) {
  const int i = model.support().grid_index(from);
  const int j = model.support().grid_index(to);
  if (i > j) {
    throw ValidationError("propagator: interval is reversed (from is later than to)");
  }
  const int d = model.dim();
  if (i == j) return Matrix::Identity(d, d);

  if (model.evolution().is_hamiltonian()) {
    auto solver = eigensystem(model.evolution().generator(), "propagator");
    const double dt = to - from;
    Eigen::VectorXcd phases(d);
    for (int k = 0; k < d; ++k) {
      phases(k) = std::exp(Complex(0.0, -solver.eigenvalues()(k) * dt));
    }
    const Matrix& v = solver.eigenvectors();
    return v * phases.asDiagonal() * v.adjoint();
  }

  // Segment s spans (grid time s-1, grid time s]; later factors multiply
  // from the left.
  Matrix u = Matrix::Identity(d, d);
  for (int s = i + 1; s <= j; ++s) {
    u = model.evolution().unitaries()[static_cast<std::size_t>(s)] * u;
  }
  return u;
}

// --------------------------- heisenberg ---------------------------------

Projector heisenberg(const SystemModel& model, const Projector& p, double t,
                     double tol) {
  if (p.dim() != model.dim()) {
    throw ValidationError("heisenberg: projector dimension mismatch");
  }
  const Matrix u = propagator(model, model.support().t0(), t);
  return Projector(u.adjoint() * p.matrix() * u, tol);
}

// --------------------------- random instances ---------------------------

namespace {

Matrix gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex(re, im);
    }
  }
  return g;
}

// QR of a complex Gaussian matrix with the phase convention that makes the
// distribution Haar.
Matrix haar_unitary(int dim, std::mt19937_64& rng) {
  const Matrix g = gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k) {
    const Complex rkk = r(k, k);
    const double mag = std::abs(rkk);
    const Complex phase = mag > 0.0 ? rkk / mag : Complex(1.0, 0.0);
    q.col(k) *= phase;
  }
  return q;
}

ProjectorFamily conjugated_basis_family(int dim, const Matrix& q) {
  std::vector<Projector> members;
  members.reserve(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    const Matrix basis = Projector::basis_state(dim, k).matrix();
    members.emplace_back(q * basis * q.adjoint());
  }
  return ProjectorFamily(std::move(members));
}

}  // namespace

Matrix random_unitary(int dim, std::uint64_t seed) {
  if (dim < 1) {
    throw ValidationError("random_unitary: dimension must be positive");
  }
  std::mt19937_64 rng(seed);
  return haar_unitary(dim, rng);
}

SystemModel random_instance(int dim, int n_times, std::uint64_t seed,
                            const RandomModelOptions& options) {
  if (dim < 1 || dim > 16) {
    throw ValidationError("random_instance: dimension must lie in [1, 16]");
  }
  if (n_times < 1) {
    throw ValidationError("random_instance: at least one grid time is required");
  }
  std::mt19937_64 rng(seed);

  // Draw order is part of the seed contract: state, then families, then
  // evolution segments.
  Matrix rho;
  if (options.pure_state) {
    Vector v = gaussian_matrix(dim, 1, rng).col(0);
    v /= v.norm();
    rho = v * v.adjoint();
  } else {
    const Matrix g = gaussian_matrix(dim, dim, rng);
    const Matrix gram = g * g.adjoint();
    rho = gram / gram.trace().real();
  }

  std::vector<ProjectorFamily> families;
  families.reserve(static_cast<std::size_t>(n_times));
  Matrix shared_basis;
  if (options.commuting) {
    shared_basis = haar_unitary(dim, rng);
    for (int k = 0; k < n_times; ++k) {
      families.push_back(conjugated_basis_family(dim, shared_basis));
    }
  } else {
    for (int k = 0; k < n_times; ++k) {
      families.push_back(conjugated_basis_family(dim, haar_unitary(dim, rng)));
    }
  }

  std::vector<Matrix> segments;
  segments.reserve(static_cast<std::size_t>(n_times));
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (int k = 0; k < n_times; ++k) {
    if (options.commuting) {
      Eigen::VectorXcd phases(dim);
      for (int b = 0; b < dim; ++b) {
        phases(b) = std::exp(Complex(0.0, angle(rng)));
      }
      segments.push_back(shared_basis * phases.asDiagonal() * shared_basis.adjoint());
    } else {
      segments.push_back(haar_unitary(dim, rng));
    }
  }

  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(n_times));
  for (int k = 1; k <= n_times; ++k) times.push_back(static_cast<double>(k));

  return SystemModel(dim, TemporalSupport(0.0, std::move(times)),
                     EvolutionLaw::segments(std::move(segments)),
                     DensityMatrix(std::move(rho)), std::move(families));
}

}  // namespace qhist
