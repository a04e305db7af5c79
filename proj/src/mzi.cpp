#include "qhist/mzi.hpp"

#include <cmath>

namespace qhist {

Matrix beam_splitter() {
  Matrix b(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  b << Complex(r, 0.0), Complex(0.0, r), Complex(0.0, r), Complex(r, 0.0);
  return b;
}

MziScenario build_mzi(const MziConfig& config) {
  if (!std::isfinite(config.phase)) {
    throw ValidationError("build_mzi: phase must be finite");
  }

  const Matrix splitter = beam_splitter();
  Matrix shifter = Matrix::Identity(2, 2);
  shifter(0, 0) = std::exp(Complex(0.0, config.phase));

  Vector source = Vector::Zero(2);
  source(0) = Complex(1.0, 0.0);

  // Detector e is the port that is bright at phase zero under this splitter
  // convention.
  const Vector reference = splitter * splitter * source;
  const int bright = std::norm(reference(0)) >= std::norm(reference(1)) ? 0 : 1;

  TemporalSupport support(0.0, {1.0, 2.0});
  EvolutionLaw evolution =
      EvolutionLaw::segments({splitter, splitter * shifter});
  DensityMatrix state(source * source.adjoint());

  ProjectorFamily arms({Projector::basis_state(2, 0), Projector::basis_state(2, 1)});
  ProjectorFamily ports = arms;

  SystemModel model(2, support, evolution, state, {arms, ports});

  const Projector upper = Projector::basis_state(2, 0);
  const Projector lower = Projector::basis_state(2, 1);
  const Projector port_e = Projector::basis_state(2, bright);

  MziScenario scenario{
      model,
      embed(model, HomogeneousHistory(support, {upper, port_e})),
      embed(model, HomogeneousHistory(support, {lower, port_e})),
      embed(model, HomogeneousHistory(support, {Projector::identity(2), port_e})),
      bright,
      config};
  return scenario;
}

}  // namespace qhist
