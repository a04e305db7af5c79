#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "qhist/common.hpp"

namespace qhist {

// --------------------------- time grid ----------------------------------

// Fiducial time t0 followed by strictly increasing grid times.
// Grid lookup uses exact comparison: supports are shared value-identically
// between a model and its histories, never re-measured.
class TemporalSupport {
 public:
  TemporalSupport(double t0, std::vector<double> times);

  double t0() const { return t0_; }
  const std::vector<double>& times() const { return times_; }
  int size() const { return static_cast<int>(times_.size()); }

  // t0 maps to -1, times()[k] maps to k; throws NonGridTime otherwise.
  int grid_index(double t) const;

  bool contains(double t) const;

  bool operator==(const TemporalSupport& other) const;
  bool operator!=(const TemporalSupport& other) const { return !(*this == other); }

 private:
  double t0_;
  std::vector<double> times_;
};

// --------------------------- operators ----------------------------------

// Hermitian, positive semidefinite, unit trace.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix rho, double tol = default_tolerance());

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

// Hermitian idempotent.
class Projector {
 public:
  explicit Projector(Matrix p, double tol = default_tolerance());

  static Projector identity(Eigen::Index dim);
  static Projector basis_state(Eigen::Index dim, Eigen::Index k);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  // Trace of a projector counts its rank.
  Eigen::Index rank() const;

 private:
  Matrix m_;
};

// Exclusive and exhaustive: pairwise orthogonal projectors summing to the
// identity.
class ProjectorFamily {
 public:
  explicit ProjectorFamily(std::vector<Projector> members,
                           double tol = default_tolerance());

  const std::vector<Projector>& members() const { return members_; }
  const Projector& member(int i) const;
  int size() const { return static_cast<int>(members_.size()); }
  Eigen::Index dim() const { return members_.front().dim(); }

 private:
  std::vector<Projector> members_;
};

// --------------------------- evolution ----------------------------------

// Unitary dynamics between grid times: either generated by a constant
// Hamiltonian (hbar = 1) or given directly as one unitary per segment,
// segment k spanning (grid time k-1, grid time k] with segment 0 starting
// at t0.
class EvolutionLaw {
 public:
  static EvolutionLaw hamiltonian(Matrix h, double tol = default_tolerance());
  static EvolutionLaw segments(std::vector<Matrix> unitaries,
                               double tol = default_tolerance());

  bool is_hamiltonian() const;
  const Matrix& generator() const;                // Hamiltonian form only
  const std::vector<Matrix>& unitaries() const;   // segment form only
  Eigen::Index dim() const;

 private:
  explicit EvolutionLaw(std::variant<Matrix, std::vector<Matrix>> body);
  std::variant<Matrix, std::vector<Matrix>> body_;
};

// --------------------------- system model -------------------------------

// Immutable bundle of dimension, time grid, evolution, initial state and
// one exclusive-exhaustive family per grid time.  Dimensions up to 16.
class SystemModel {
 public:
  SystemModel(int dim, TemporalSupport support, EvolutionLaw evolution,
              DensityMatrix initial_state, std::vector<ProjectorFamily> families,
              double tol = default_tolerance());

  int dim() const { return dim_; }
  const TemporalSupport& support() const { return support_; }
  const EvolutionLaw& evolution() const { return evolution_; }
  const DensityMatrix& initial_state() const { return state_; }
  const std::vector<ProjectorFamily>& families() const { return families_; }
  const ProjectorFamily& family(int k) const;

 private:
  int dim_;
  TemporalSupport support_;
  EvolutionLaw evolution_;
  DensityMatrix state_;
  std::vector<ProjectorFamily> families_;
};

// --------------------------- operations ---------------------------------

// Unitary mapping states at `from` to states at `to`.  Both endpoints must
// lie on the grid (t0 included) with from <= to.  Hamiltonian evolution is
// exponentiated through an eigendecomposition of the (Hermitian) generator.
Matrix propagator(const SystemModel& model, double from, double to);

// Heisenberg picture projector at grid time t relative to the fiducial
// time: U^dagger(t - t0) p U(t - t0).
Projector heisenberg(const SystemModel& model, const Projector& p, double t,
                     double tol = default_tolerance());

// Haar-distributed unitary, deterministic in the seed.
Matrix random_unitary(int dim, std::uint64_t seed);

struct RandomModelOptions {
  // Rank-1 initial state instead of a normalized Gram matrix.
  bool pure_state = false;
  // Families and evolution share one random eigenbasis, so every operator
  // in the model commutes with every other.
  bool commuting = false;
};

// Deterministic in (dim, n_times, seed, options): equal inputs produce
// bitwise-identical models.  Grid is t0 = 0 with times 1..n_times; each
// family is a conjugated rank-1 basis family.
SystemModel random_instance(int dim, int n_times, std::uint64_t seed,
                            const RandomModelOptions& options = {});

}  // namespace qhist
