#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qhist/entropy.hpp"
#include "qhist/mzi.hpp"
#include "qhist/search.hpp"

namespace qhist {

// --------------------------- file model ----------------------------------

// One history in a scenario, in exactly one of three forms: one family
// slot index per grid time (null means identity at that time), a
// disjunction of such slot lists, or an explicit operator on the n-fold
// tensor space.
struct HistorySpec {
  std::optional<std::vector<std::optional<int>>> slots;
  std::optional<std::vector<std::vector<std::optional<int>>>> blocks;
  std::optional<Matrix> matrix;
};

struct AnalysisRequest {
  enum class Kind { Classify, Audit, Lp, Entropy, Search };
  Kind kind = Kind::Classify;
  // Classify, audit, lp: history indices to analyse; empty means all.
  std::vector<int> set;
  // Audit: optional mixture weights, one per analysed history.
  std::vector<double> weights;
  // Entropy: index lists into the histories array.
  std::vector<int> set_a;
  std::vector<int> set_b;
  // Search: violation kind and trial budget.
  ViolationKind target = ViolationKind::NonQuasi;
  long long budget = 1000;
};

// In-memory form of a scenario document.  Evolution is either a constant
// Hamiltonian or one unitary per grid segment; the initial state is a
// density matrix.
struct ScenarioFile {
  int version = 1;
  std::string description;
  int dimension = 0;
  double t0 = 0.0;
  std::vector<double> times;
  std::optional<Matrix> hamiltonian;
  std::vector<Matrix> unitaries;
  Matrix initial_state;
  std::vector<std::vector<Matrix>> families;  // one family per grid time
  std::vector<HistorySpec> histories;
  std::vector<AnalysisRequest> analyses;
  double tolerance = 1e-10;
  ConsistencyMode mode = ConsistencyMode::Strong;
  std::uint64_t seed = 0;
};

// --------------------------- parsing and emission ------------------------

// Strict parser: version must equal 1, unknown fields are rejected, and
// every diagnostic names the offending field path.  Complex numbers are
// [re, im] pairs; matrices are row-major nested arrays.
ScenarioFile parse_scenario(const std::string& text);
ScenarioFile load_scenario(const std::string& path);

// Stable key order and shortest round-trip number formatting, so equal
// scenarios serialize byte-identically.
std::string serialize_scenario(const ScenarioFile& file);

SystemModel build_model(const ScenarioFile& file);
std::vector<HistoryProposition> build_histories(const ScenarioFile& file,
                                                const SystemModel& model);

// --------------------------- execution -----------------------------------

struct RunOverrides {
  std::optional<double> tolerance;
  std::optional<ConsistencyMode> mode;
  std::optional<std::uint64_t> seed;
  std::optional<long long> budget;  // applies to search analyses
};

struct RunResult {
  // True when any analysis reports an inconsistency: a failed consistency
  // verdict, an order violation, a linear-positivity failure, an audit
  // failure or a search hit.
  bool flagged = false;
  // 0 clean, 1 flagged; input errors surface as exceptions and map to 2.
  int exit_code = 0;
  std::string text_report;
  std::string machine_report;  // structured document, byte-stable
};

// Executes the requested analyses in declared order, deterministically in
// the seed.
RunResult run_scenario(const ScenarioFile& file, const RunOverrides& overrides = {});

// --------------------------- builders ------------------------------------

// Interferometer scenario with arm and detector histories and a default
// classify + audit request; records the behavioral detector convention in
// the description.
ScenarioFile mzi_scenario(const MziConfig& config);

// Standalone document reproducing a search witness: the witness model,
// the witness set and the analysis that exhibits the violation.
ScenarioFile reproduction_scenario(const SearchWitness& witness, double tol);

}  // namespace qhist
