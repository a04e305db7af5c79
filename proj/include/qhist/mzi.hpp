#pragma once

#include "qhist/history.hpp"

namespace qhist {

// Two-arm interferometer with a balanced splitter on each leg and a phase
// shifter on the upper arm between them.
struct MziConfig {
  double phase = 0.0;
  // Include the arm projectors at the intermediate time in requested
  // analyses; the brightness curve itself does not depend on this.
  bool path_detection = true;
};

struct MziScenario {
  SystemModel model;
  // Upper arm then detector, lower arm then detector, detector alone.
  // alpha_e equals the operator sum alpha_u + alpha_d.
  HistoryProposition alpha_u;
  HistoryProposition alpha_d;
  HistoryProposition alpha_e;
  // Output port with constructive interference at phase zero; the detector
  // is defined behaviorally so the histories do not depend on the
  // beam-splitter convention.
  int detector_port = 0;
  MziConfig config;
};

// Balanced splitter (1/sqrt(2)) [[1, i], [i, 1]].
Matrix beam_splitter();

// Source mode |0>, splitter to t1, phase shifter diag(e^{i phase}, 1)
// followed by a second splitter to t2.  Arm family at t1, port family at
// t2.
MziScenario build_mzi(const MziConfig& config);

}  // namespace qhist
