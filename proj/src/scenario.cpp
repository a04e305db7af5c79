#include "qhist/scenario.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace qhist {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ParseError(path + ": " + message);
}

std::string item(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

std::string field(const std::string& path, const std::string& key) {
  return path + "." + key;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& entry : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (entry.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) fail(field(path, entry.key()), "unknown field");
  }
}

const json& require(const json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing field \"") + key + "\"");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

Complex as_complex(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    fail(path, "expected a complex number as [re, im]");
  }
  return Complex(v[0].get<double>(), v[1].get<double>());
}

Matrix as_matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a nonempty array of rows");
  const std::size_t rows = v.size();
  std::size_t cols = 0;
  Matrix m;
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = v[r];
    const std::string row_path = item(path, r);
    if (!row.is_array() || row.empty()) fail(row_path, "expected a nonempty row");
    if (r == 0) {
      cols = row.size();
      m = Matrix::Zero(static_cast<Eigen::Index>(rows),
                       static_cast<Eigen::Index>(cols));
    } else if (row.size() != cols) {
      fail(row_path, "row length differs from the first row");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          as_complex(row[c], item(row_path, c));
    }
  }
  return m;
}

json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json pairs_json(const std::vector<std::pair<int, int>>& pairs) {
  json out = json::array();
  for (const auto& [i, j] : pairs) out.push_back(json::array({i, j}));
  return out;
}

const char* mode_name(ConsistencyMode mode) {
  return mode == ConsistencyMode::Strong ? "strong" : "medium";
}

const char* kind_name(AnalysisRequest::Kind kind) {
  switch (kind) {
    case AnalysisRequest::Kind::Classify: return "classify";
    case AnalysisRequest::Kind::Audit: return "audit";
    case AnalysisRequest::Kind::Lp: return "lp";
    case AnalysisRequest::Kind::Entropy: return "entropy";
    case AnalysisRequest::Kind::Search: return "search";
  }
  return "classify";
}

const char* target_name(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::NonLp: return "non_lp";
    case ViolationKind::NonQuasi: return "non_quasi";
    case ViolationKind::OrderViolation: return "order_violation";
  }
  return "non_quasi";
}

const char* source_name(ProbabilitySource source) {
  return source == ProbabilitySource::LinearPositive ? "linear_positive"
                                                     : "decoherence";
}

ViolationKind parse_target(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  const std::string s = v.get<std::string>();
  if (s == "non_lp") return ViolationKind::NonLp;
  if (s == "non_quasi") return ViolationKind::NonQuasi;
  if (s == "order_violation") return ViolationKind::OrderViolation;
  fail(path, "expected non_lp, non_quasi or order_violation");
}

std::vector<int> parse_index_list(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of history indices");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_int(v[i], item(path, i)));
  }
  return out;
}

AnalysisRequest parse_analysis(const json& v, const std::string& path) {
  AnalysisRequest request;
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "classify") request.kind = AnalysisRequest::Kind::Classify;
    else if (s == "audit") request.kind = AnalysisRequest::Kind::Audit;
    else if (s == "lp") request.kind = AnalysisRequest::Kind::Lp;
    else if (s == "entropy") fail(path, "entropy requires an object with set_a and set_b");
    else if (s == "search") fail(path, "search requires an object with a target");
    else fail(path, "unknown analysis \"" + s + "\"");
    return request;
  }
  if (!v.is_object()) fail(path, "expected a string or an object");

  const json& kind = require(v, "kind", path);
  if (!kind.is_string()) fail(field(path, "kind"), "expected a string");
  const std::string s = kind.get<std::string>();
  if (s == "classify" || s == "audit" || s == "lp") {
    request.kind = s == "classify" ? AnalysisRequest::Kind::Classify
                 : s == "audit"    ? AnalysisRequest::Kind::Audit
                                   : AnalysisRequest::Kind::Lp;
    if (s == "audit") {
      check_keys(v, path, {"kind", "set", "weights"});
      if (v.contains("weights")) {
        const json& w = v["weights"];
        if (!w.is_array()) fail(field(path, "weights"), "expected an array");
        for (std::size_t i = 0; i < w.size(); ++i) {
          request.weights.push_back(as_number(w[i], item(field(path, "weights"), i)));
        }
      }
    } else {
      check_keys(v, path, {"kind", "set"});
    }
    if (v.contains("set")) {
      request.set = parse_index_list(v["set"], field(path, "set"));
    }
  } else if (s == "entropy") {
    check_keys(v, path, {"kind", "set_a", "set_b"});
    request.kind = AnalysisRequest::Kind::Entropy;
    request.set_a = parse_index_list(require(v, "set_a", path), field(path, "set_a"));
    request.set_b = parse_index_list(require(v, "set_b", path), field(path, "set_b"));
  } else if (s == "search") {
    check_keys(v, path, {"kind", "target", "budget"});
    request.kind = AnalysisRequest::Kind::Search;
    request.target = parse_target(require(v, "target", path), field(path, "target"));
    if (v.contains("budget")) {
      if (!v["budget"].is_number_integer()) {
        fail(field(path, "budget"), "expected an integer");
      }
      request.budget = v["budget"].get<long long>();
      if (request.budget < 1) fail(field(path, "budget"), "budget must be >= 1");
    }
  } else {
    fail(field(path, "kind"), "unknown analysis \"" + s + "\"");
  }
  return request;
}

json analysis_to_json(const AnalysisRequest& request) {
  json v = json::object();
  v["kind"] = kind_name(request.kind);
  switch (request.kind) {
    case AnalysisRequest::Kind::Classify:
    case AnalysisRequest::Kind::Lp:
      if (!request.set.empty()) v["set"] = request.set;
      break;
    case AnalysisRequest::Kind::Audit:
      if (!request.set.empty()) v["set"] = request.set;
      if (!request.weights.empty()) v["weights"] = request.weights;
      break;
    case AnalysisRequest::Kind::Entropy:
      v["set_a"] = request.set_a;
      v["set_b"] = request.set_b;
      break;
    case AnalysisRequest::Kind::Search:
      v["target"] = target_name(request.target);
      v["budget"] = request.budget;
      break;
  }
  return v;
}

json scenario_to_json(const ScenarioFile& file) {
  json doc = json::object();
  doc["version"] = file.version;
  if (!file.description.empty()) doc["description"] = file.description;
  doc["dimension"] = file.dimension;
  doc["t0"] = file.t0;
  doc["times"] = file.times;
  json evolution = json::object();
  if (file.hamiltonian) {
    evolution["hamiltonian"] = matrix_json(*file.hamiltonian);
  } else {
    json us = json::array();
    for (const Matrix& u : file.unitaries) us.push_back(matrix_json(u));
    evolution["unitaries"] = std::move(us);
  }
  doc["evolution"] = std::move(evolution);
  doc["initial_state"] = matrix_json(file.initial_state);
  json families = json::object();
  for (std::size_t k = 0; k < file.families.size(); ++k) {
    json members = json::array();
    for (const Matrix& m : file.families[k]) members.push_back(matrix_json(m));
    families[std::to_string(k)] = std::move(members);
  }
  doc["families"] = std::move(families);
  json histories = json::array();
  for (const HistorySpec& h : file.histories) {
    json spec = json::object();
    auto slots_json = [](const std::vector<std::optional<int>>& list) {
      json slots = json::array();
      for (const std::optional<int>& s : list) {
        if (s) slots.push_back(*s);
        else slots.push_back(nullptr);
      }
      return slots;
    };
    if (h.slots) {
      spec["slots"] = slots_json(*h.slots);
    } else if (h.blocks) {
      json blocks = json::array();
      for (const auto& block : *h.blocks) blocks.push_back(slots_json(block));
      spec["blocks"] = std::move(blocks);
    } else if (h.matrix) {
      spec["matrix"] = matrix_json(*h.matrix);
    }
    histories.push_back(std::move(spec));
  }
  doc["histories"] = std::move(histories);
  json analyses = json::array();
  for (const AnalysisRequest& request : file.analyses) {
    analyses.push_back(analysis_to_json(request));
  }
  doc["analyses"] = std::move(analyses);
  doc["tolerance"] = file.tolerance;
  doc["mode"] = mode_name(file.mode);
  doc["seed"] = file.seed;
  return doc;
}

}  // namespace

// --------------------------- parsing and emission ------------------------

ScenarioFile parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("document: expected an object");
  check_keys(doc, "document",
             {"version", "description", "dimension", "t0", "times", "evolution",
              "initial_state", "families", "histories", "analyses", "tolerance",
              "mode", "seed"});

  ScenarioFile file;
  const json& version = require(doc, "version", "document");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    fail("document.version", "expected the integer 1");
  }

  if (doc.contains("description")) {
    if (!doc["description"].is_string()) {
      fail("document.description", "expected a string");
    }
    file.description = doc["description"].get<std::string>();
  }

  file.dimension = as_int(require(doc, "dimension", "document"), "document.dimension");

  file.t0 = as_number(require(doc, "t0", "document"), "document.t0");
  const json& times = require(doc, "times", "document");
  if (!times.is_array() || times.empty()) {
    fail("document.times", "expected a nonempty array of grid times");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    file.times.push_back(as_number(times[i], item("document.times", i)));
  }

  const json& evolution = require(doc, "evolution", "document");
  if (!evolution.is_object()) fail("document.evolution", "expected an object");
  check_keys(evolution, "document.evolution", {"hamiltonian", "unitaries"});
  if (evolution.contains("hamiltonian") == evolution.contains("unitaries")) {
    fail("document.evolution", "expected exactly one of hamiltonian or unitaries");
  }
  if (evolution.contains("hamiltonian")) {
    file.hamiltonian =
        as_matrix(evolution["hamiltonian"], "document.evolution.hamiltonian");
  } else {
    const json& us = evolution["unitaries"];
    if (!us.is_array() || us.empty()) {
      fail("document.evolution.unitaries", "expected a nonempty array");
    }
    for (std::size_t i = 0; i < us.size(); ++i) {
      file.unitaries.push_back(
          as_matrix(us[i], item("document.evolution.unitaries", i)));
    }
  }

  const json& state = require(doc, "initial_state", "document");
  if (!state.is_array() || state.empty()) {
    fail("document.initial_state", "expected a state vector or a density matrix");
  }
  if (state[0].is_array() && !state[0].empty() && state[0][0].is_number()) {
    // State vector of [re, im] pairs; normalized into a pure density matrix.
    Vector v(static_cast<Eigen::Index>(state.size()));
    for (std::size_t i = 0; i < state.size(); ++i) {
      v(static_cast<Eigen::Index>(i)) =
          as_complex(state[i], item("document.initial_state", i));
    }
    const double norm = v.norm();
    if (norm <= 0.0) fail("document.initial_state", "state vector is zero");
    v /= norm;
    file.initial_state = v * v.adjoint();
  } else {
    file.initial_state = as_matrix(state, "document.initial_state");
  }

  const json& families = require(doc, "families", "document");
  if (!families.is_object()) {
    fail("document.families", "expected an object keyed by time index");
  }
  if (families.size() != file.times.size()) {
    fail("document.families", "expected exactly one family per grid time");
  }
  for (std::size_t k = 0; k < file.times.size(); ++k) {
    const std::string key = std::to_string(k);
    const auto it = families.find(key);
    if (it == families.end()) {
      fail("document.families", "missing family \"" + key + "\"");
    }
    const std::string path = field("document.families", key);
    if (!it->is_array() || it->empty()) fail(path, "expected a nonempty array");
    std::vector<Matrix> members;
    for (std::size_t i = 0; i < it->size(); ++i) {
      members.push_back(as_matrix((*it)[i], item(path, i)));
    }
    file.families.push_back(std::move(members));
  }

  if (doc.contains("histories")) {
    const json& histories = doc["histories"];
    if (!histories.is_array()) fail("document.histories", "expected an array");
    for (std::size_t i = 0; i < histories.size(); ++i) {
      const json& h = histories[i];
      const std::string path = item("document.histories", i);
      if (!h.is_object()) fail(path, "expected an object");
      check_keys(h, path, {"slots", "matrix", "blocks"});
      if (h.size() != 1) {
        fail(path, "expected exactly one of slots, matrix or blocks");
      }
      HistorySpec spec;
      if (h.contains("slots")) {
        const json& slots = h["slots"];
        const std::string slots_path = field(path, "slots");
        if (!slots.is_array() || slots.size() != file.times.size()) {
          fail(slots_path, "expected one slot per grid time");
        }
        std::vector<std::optional<int>> list;
        for (std::size_t k = 0; k < slots.size(); ++k) {
          if (slots[k].is_null()) list.push_back(std::nullopt);
          else list.push_back(as_int(slots[k], item(slots_path, k)));
        }
        spec.slots = std::move(list);
      } else if (h.contains("matrix")) {
        spec.matrix = as_matrix(h["matrix"], field(path, "matrix"));
      } else {
        // Disjunction of product blocks, stored as an explicit operator at
        // build time.
        const json& blocks = h["blocks"];
        const std::string blocks_path = field(path, "blocks");
        if (!blocks.is_array() || blocks.empty()) {
          fail(blocks_path, "expected a nonempty array of slot lists");
        }
        std::vector<std::vector<std::optional<int>>> parsed;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
          const json& block = blocks[b];
          const std::string block_path = item(blocks_path, b);
          if (!block.is_array() || block.size() != file.times.size()) {
            fail(block_path, "expected one slot per grid time");
          }
          std::vector<std::optional<int>> list;
          for (std::size_t k = 0; k < block.size(); ++k) {
            if (block[k].is_null()) list.push_back(std::nullopt);
            else list.push_back(as_int(block[k], item(block_path, k)));
          }
          parsed.push_back(std::move(list));
        }
        spec.blocks = std::move(parsed);
      }
      file.histories.push_back(std::move(spec));
    }
  }

  if (doc.contains("analyses")) {
    const json& analyses = doc["analyses"];
    if (!analyses.is_array()) fail("document.analyses", "expected an array");
    for (std::size_t i = 0; i < analyses.size(); ++i) {
      file.analyses.push_back(
          parse_analysis(analyses[i], item("document.analyses", i)));
    }
  }

  if (doc.contains("tolerance")) {
    file.tolerance = as_number(doc["tolerance"], "document.tolerance");
    if (!(file.tolerance > 0.0)) fail("document.tolerance", "expected a positive number");
  }
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) fail("document.mode", "expected a string");
    const std::string s = doc["mode"].get<std::string>();
    if (s == "strong") file.mode = ConsistencyMode::Strong;
    else if (s == "medium") file.mode = ConsistencyMode::Medium;
    else fail("document.mode", "expected strong or medium");
  }
  if (doc.contains("seed")) {
    const json& seed = doc["seed"];
    if (!seed.is_number_integer() ||
        (!seed.is_number_unsigned() && seed.get<long long>() < 0)) {
      fail("document.seed", "expected a nonnegative integer");
    }
    file.seed = seed.get<std::uint64_t>();
  }
  return file;
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string serialize_scenario(const ScenarioFile& file) {
  return scenario_to_json(file).dump(2) + "\n";
}

// --------------------------- model assembly ------------------------------

SystemModel build_model(const ScenarioFile& file) {
  const double tol = file.tolerance;
  TemporalSupport support(file.t0, file.times);
  EvolutionLaw evolution =
      file.hamiltonian ? EvolutionLaw::hamiltonian(*file.hamiltonian, tol)
                       : EvolutionLaw::segments(file.unitaries, tol);
  DensityMatrix state(file.initial_state, tol);
  std::vector<ProjectorFamily> families;
  families.reserve(file.families.size());
  for (const std::vector<Matrix>& members : file.families) {
    std::vector<Projector> projectors;
    projectors.reserve(members.size());
    for (const Matrix& m : members) projectors.emplace_back(m, tol);
    families.emplace_back(std::move(projectors), tol);
  }
  return SystemModel(file.dimension, std::move(support), std::move(evolution),
                     std::move(state), std::move(families), tol);
}

namespace {

HistoryProposition build_slots(const ScenarioFile& file, const SystemModel& model,
                               const std::vector<std::optional<int>>& slots,
                               const std::string& path) {
  std::vector<Projector> projectors;
  projectors.reserve(slots.size());
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (!slots[k]) {
      projectors.push_back(Projector::identity(model.dim()));
      continue;
    }
    const int index = *slots[k];
    const ProjectorFamily& family = model.family(static_cast<int>(k));
    if (index < 0 || index >= family.size()) {
      throw ValidationError(path + ": slot index " + std::to_string(index) +
                            " outside family " + std::to_string(k));
    }
    projectors.push_back(family.member(index));
  }
  return embed(model, HomogeneousHistory(model.support(), std::move(projectors)),
               file.tolerance);
}

}  // namespace

std::vector<HistoryProposition> build_histories(const ScenarioFile& file,
                                                const SystemModel& model) {
  std::vector<HistoryProposition> out;
  out.reserve(file.histories.size());
  for (std::size_t i = 0; i < file.histories.size(); ++i) {
    const HistorySpec& spec = file.histories[i];
    const std::string path = item("histories", i);
    if (spec.slots) {
      out.push_back(build_slots(file, model, *spec.slots, path));
    } else if (spec.blocks) {
      HistoryProposition h =
          build_slots(file, model, spec.blocks->front(), path);
      for (std::size_t b = 1; b < spec.blocks->size(); ++b) {
        h = disj(h, build_slots(file, model, (*spec.blocks)[b], path),
                 file.tolerance);
      }
      out.push_back(std::move(h));
    } else if (spec.matrix) {
      out.push_back(HistoryProposition(model.support(), model.dim(),
                                       *spec.matrix, file.tolerance));
    } else {
      throw ValidationError(path + ": empty history specification");
    }
  }
  return out;
}

// --------------------------- execution -----------------------------------

namespace {

std::vector<HistoryProposition> pick_set(
    const std::vector<HistoryProposition>& histories, const std::vector<int>& idx,
    const char* what) {
  if (histories.empty()) {
    throw ValidationError(std::string(what) + ": scenario defines no histories");
  }
  if (idx.empty()) return histories;
  std::vector<HistoryProposition> out;
  out.reserve(idx.size());
  for (int i : idx) {
    if (i < 0 || i >= static_cast<int>(histories.size())) {
      throw ValidationError(std::string(what) + ": history index " +
                            std::to_string(i) + " out of range");
    }
    out.push_back(histories[static_cast<std::size_t>(i)]);
  }
  return out;
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json matrixd_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

void print_values(std::ostringstream& text, const char* label,
                  const std::vector<double>& values) {
  text << "    " << label << ":";
  for (double v : values) text << " " << v;
  text << "\n";
}

}  // namespace

RunResult run_scenario(const ScenarioFile& input, const RunOverrides& overrides) {
  ScenarioFile file = input;
  if (overrides.tolerance) file.tolerance = *overrides.tolerance;
  if (overrides.mode) file.mode = *overrides.mode;
  if (overrides.seed) file.seed = *overrides.seed;
  if (overrides.budget) {
    for (AnalysisRequest& request : file.analyses) {
      if (request.kind == AnalysisRequest::Kind::Search) {
        request.budget = *overrides.budget;
      }
    }
  }
  const double tol = file.tolerance;

  const SystemModel model = build_model(file);
  const std::vector<HistoryProposition> histories = build_histories(file, model);

  json machine = json::object();
  machine["version"] = 1;
  if (!file.description.empty()) machine["description"] = file.description;
  machine["tolerance"] = tol;
  machine["mode"] = mode_name(file.mode);
  machine["seed"] = file.seed;
  json model_info = json::object();
  model_info["dimension"] = model.dim();
  model_info["t0"] = model.support().t0();
  model_info["times"] = model.support().times();
  json family_sizes = json::array();
  for (int k = 0; k < model.support().size(); ++k) {
    family_sizes.push_back(model.family(k).size());
  }
  model_info["family_sizes"] = std::move(family_sizes);
  model_info["histories"] = histories.size();
  machine["model"] = std::move(model_info);

  std::ostringstream text;
  text << std::setprecision(12);
  if (!file.description.empty()) text << file.description << "\n";
  text << "model: dimension " << model.dim() << ", " << model.support().size()
       << " grid times, " << histories.size() << " histories, tolerance " << tol
       << ", mode " << mode_name(file.mode) << "\n";

  bool flagged = false;
  json analyses = json::array();
  for (std::size_t n = 0; n < file.analyses.size(); ++n) {
    const AnalysisRequest& request = file.analyses[n];
    json a = json::object();
    a["kind"] = kind_name(request.kind);
    text << "[" << (n + 1) << "] " << kind_name(request.kind) << ":";

    switch (request.kind) {
      case AnalysisRequest::Kind::Classify: {
        const std::vector<HistoryProposition> set =
            pick_set(histories, request.set, "classify");
        const ConsistencyVerdict verdict = classify(model, set, file.mode, tol);
        std::vector<double> probabilities;
        for (const HistoryProposition& h : set) {
          probabilities.push_back(probability(model, h, tol));
        }
        a["consistent"] = verdict.is_consistent;
        a["complete"] = verdict.is_complete;
        a["max_offdiag"] = verdict.max_offdiag;
        a["probabilities"] = probabilities;
        a["realisability"] = verdict.realisability;
        a["quasi_constant"] = optional_json(verdict.quasi_constant);
        a["order_violations"] = pairs_json(verdict.order_violations);
        const bool bad =
            !verdict.is_consistent || !verdict.order_violations.empty();
        flagged = flagged || bad;
        text << " consistent=" << (verdict.is_consistent ? "yes" : "no")
             << " complete=" << (verdict.is_complete ? "yes" : "no")
             << " max_offdiag=" << verdict.max_offdiag << " K=";
        if (verdict.quasi_constant) text << *verdict.quasi_constant;
        else text << "none";
        text << " order_violations=" << verdict.order_violations.size() << "\n";
        print_values(text, "probabilities", probabilities);
        print_values(text, "realisability", verdict.realisability);
        break;
      }
      case AnalysisRequest::Kind::Audit: {
        const std::vector<HistoryProposition> set =
            pick_set(histories, request.set, "audit");
        const AuditReport report =
            audit(model, set, request.weights, file.mode, ProbabilitySource::Auto,
                  tol);
        a["consistent"] = report.verdict.is_consistent;
        a["source"] = source_name(report.source);
        a["probabilities"] = report.probabilities;
        a["neg_probabilities"] = report.neg_probabilities;
        a["conditionals"] = matrixd_json(report.conditionals);
        a["degenerate_conditionals"] = pairs_json(report.degenerate_conditionals);
        a["unbounded_conditionals"] = pairs_json(report.unbounded_conditionals);
        a["max_negneg_residual"] = report.max_negneg_residual;
        a["weights"] = report.weights;
        a["mixture_values"] = report.mixture_values;
        a["max_mixture_residual"] = report.max_mixture_residual;
        a["max_posterior_residual"] = report.max_posterior_residual;
        a["max_exhaustive_posterior_residual"] =
            report.max_exhaustive_posterior_residual;
        a["max_ratio_residual"] = report.max_ratio_residual;
        a["or_table_matches"] = report.or_table_matches;
        a["quasi_constant"] = optional_json(report.quasi_constant);
        a["context_weight"] = report.context_weight;
        a["a_priori_constant"] = optional_json(report.a_priori_constant);
        json cox = json::object();
        cox["associativity_residual"] = report.cox.associativity_residual;
        cox["commutativity_residual"] = report.cox.commutativity_residual;
        cox["product_rule_residual"] = report.cox.product_rule_residual;
        cox["source"] = source_name(report.cox.source);
        a["cox"] = std::move(cox);
        a["bayes_consistent"] = report.bayes_consistent;
        a["failures"] = report.failures;
        const bool bad = !report.verdict.is_consistent || !report.bayes_consistent;
        flagged = flagged || bad;
        text << " consistent=" << (report.verdict.is_consistent ? "yes" : "no")
             << " bayes_consistent=" << (report.bayes_consistent ? "yes" : "no")
             << " source=" << source_name(report.source) << " K=";
        if (report.quasi_constant) text << *report.quasi_constant;
        else text << "none";
        text << "\n";
        print_values(text, "probabilities", report.probabilities);
        print_values(text, "mixture", report.mixture_values);
        for (const std::string& failure : report.failures) {
          text << "    failure: " << failure << "\n";
        }
        break;
      }
      case AnalysisRequest::Kind::Lp: {
        const std::vector<HistoryProposition> set =
            pick_set(histories, request.set, "lp");
        const LpReport report = is_lp_set(model, set, tol);
        json entries = json::array();
        std::vector<double> probabilities;
        for (const LpEntry& entry : report.entries) {
          json e = json::object();
          e["value"] = complex_json(entry.value);
          e["probability"] = entry.probability;
          e["neg_probability"] = entry.neg_probability;
          e["realisability_sum"] = entry.realisability_sum;
          e["positive"] = entry.positive;
          entries.push_back(std::move(e));
          probabilities.push_back(entry.probability);
        }
        a["is_lp"] = report.is_lp;
        a["completed_with_remainder"] = report.completed_with_remainder;
        a["entries"] = std::move(entries);
        a["order_violations"] = pairs_json(report.order_violations);
        const bool bad = !report.is_lp || !report.order_violations.empty();
        flagged = flagged || bad;
        text << " is_lp=" << (report.is_lp ? "yes" : "no")
             << " completed_with_remainder="
             << (report.completed_with_remainder ? "yes" : "no")
             << " order_violations=" << report.order_violations.size() << "\n";
        print_values(text, "lp probabilities", probabilities);
        break;
      }
      case AnalysisRequest::Kind::Entropy: {
        const std::vector<HistoryProposition> set_a =
            pick_set(histories, request.set_a, "entropy set_a");
        const std::vector<HistoryProposition> set_b =
            pick_set(histories, request.set_b, "entropy set_b");
        const EntropyReport report = entropy_identities(
            model, set_a, set_b, ContextLabel{}, file.mode, tol);
        a["set_a"] = request.set_a;
        a["set_b"] = request.set_b;
        a["entropy_a"] = report.entropy_a;
        a["entropy_b"] = report.entropy_b;
        a["entropy_joint"] = report.entropy_joint;
        a["conditional_b_given_a"] = report.conditional_b_given_a;
        a["conditional_a_given_b"] = report.conditional_a_given_b;
        a["additivity_residual_ab"] = report.additivity_residual_ab;
        a["additivity_residual_ba"] = report.additivity_residual_ba;
        a["concavity_margin_b"] = report.concavity_margin_b;
        a["concavity_margin_a"] = report.concavity_margin_a;
        const bool bad = report.additivity_residual_ab > tol ||
                         report.additivity_residual_ba > tol ||
                         report.concavity_margin_b < -tol ||
                         report.concavity_margin_a < -tol;
        flagged = flagged || bad;
        text << " H(a)=" << report.entropy_a << " H(b)=" << report.entropy_b
             << " H(joint)=" << report.entropy_joint
             << " H(b|a)=" << report.conditional_b_given_a
             << " H(a|b)=" << report.conditional_a_given_b << "\n";
        break;
      }
      case AnalysisRequest::Kind::Search: {
        const SearchOutcome outcome = search_violations(
            request.target, request.budget, file.seed, SearchEnsemble::Generic,
            tol);
        a["target"] = target_name(request.target);
        a["budget"] = request.budget;
        a["trials_used"] = outcome.trials_used;
        a["found"] = outcome.witness.has_value();
        if (outcome.witness) {
          const SearchWitness& witness = *outcome.witness;
          json w = json::object();
          w["dim"] = witness.dim;
          w["times"] = witness.n_times;
          w["trial"] = witness.trial;
          w["model_seed"] = witness.model_seed;
          w["value"] = witness.value;
          if (witness.kind == ViolationKind::OrderViolation) {
            w["pair"] = json::array({witness.pair.first, witness.pair.second});
          }
          w["reproduction"] = scenario_to_json(reproduction_scenario(witness, tol));
          a["witness"] = std::move(w);
          flagged = true;
          text << " found=yes trial=" << witness.trial << " dim=" << witness.dim
               << " times=" << witness.n_times << " value=" << witness.value
               << "\n";
        } else {
          a["witness"] = nullptr;
          text << " found=no trials_used=" << outcome.trials_used << "\n";
        }
        break;
      }
    }
    analyses.push_back(std::move(a));
  }
  machine["analyses"] = std::move(analyses);
  machine["flagged"] = flagged;
  text << "flagged: " << (flagged ? "yes" : "no") << "\n";

  RunResult result;
  result.flagged = flagged;
  result.exit_code = flagged ? 1 : 0;
  result.text_report = text.str();
  result.machine_report = machine.dump(2) + "\n";
  return result;
}

// --------------------------- builders ------------------------------------

ScenarioFile mzi_scenario(const MziConfig& config) {
  const MziScenario scenario = build_mzi(config);
  const SystemModel& model = scenario.model;

  ScenarioFile file;
  std::ostringstream description;
  description << std::setprecision(12) << "Mach-Zehnder interferometer, phase "
              << config.phase << " rad; balanced splitter (1/sqrt(2))[[1,i],[i,1]]"
              << "; detector e = output port " << scenario.detector_port
              << ", the bright port at phase zero";
  if (config.path_detection) {
    description << "; histories: upper arm to e, lower arm to e, e alone";
  } else {
    description << "; histories: e and its complement, no path detection";
  }
  file.description = description.str();
  file.dimension = 2;
  file.t0 = model.support().t0();
  file.times = model.support().times();
  file.unitaries = model.evolution().unitaries();
  file.initial_state = model.initial_state().matrix();
  for (int k = 0; k < model.support().size(); ++k) {
    std::vector<Matrix> members;
    for (const Projector& p : model.family(k).members()) {
      members.push_back(p.matrix());
    }
    file.families.push_back(std::move(members));
  }

  const int e = scenario.detector_port;
  if (config.path_detection) {
    HistorySpec upper;
    upper.slots = std::vector<std::optional<int>>{0, e};
    HistorySpec lower;
    lower.slots = std::vector<std::optional<int>>{1, e};
    HistorySpec detector;
    detector.slots = std::vector<std::optional<int>>{std::nullopt, e};
    file.histories = {upper, lower, detector};

    AnalysisRequest classify_all;
    classify_all.kind = AnalysisRequest::Kind::Classify;
    AnalysisRequest audit_arms;
    audit_arms.kind = AnalysisRequest::Kind::Audit;
    audit_arms.set = {0, 1};
    AnalysisRequest lp_all;
    lp_all.kind = AnalysisRequest::Kind::Lp;
    file.analyses = {classify_all, audit_arms, lp_all};
  } else {
    HistorySpec detector;
    detector.slots = std::vector<std::optional<int>>{std::nullopt, e};
    HistorySpec complement;
    complement.slots = std::vector<std::optional<int>>{std::nullopt, 1 - e};
    file.histories = {detector, complement};

    AnalysisRequest classify_all;
    classify_all.kind = AnalysisRequest::Kind::Classify;
    AnalysisRequest lp_all;
    lp_all.kind = AnalysisRequest::Kind::Lp;
    file.analyses = {classify_all, lp_all};
  }
  return file;
}

ScenarioFile reproduction_scenario(const SearchWitness& witness, double tol) {
  const SystemModel& model = witness.model;

  ScenarioFile file;
  std::ostringstream description;
  description << "search reproduction: " << target_name(witness.kind) << ", dim "
              << witness.dim << ", " << witness.n_times << " times, trial "
              << witness.trial << ", model seed " << witness.model_seed;
  file.description = description.str();
  file.dimension = model.dim();
  file.t0 = model.support().t0();
  file.times = model.support().times();
  if (model.evolution().is_hamiltonian()) {
    file.hamiltonian = model.evolution().generator();
  } else {
    file.unitaries = model.evolution().unitaries();
  }
  file.initial_state = model.initial_state().matrix();
  for (int k = 0; k < model.support().size(); ++k) {
    std::vector<Matrix> members;
    for (const Projector& p : model.family(k).members()) {
      members.push_back(p.matrix());
    }
    file.families.push_back(std::move(members));
  }

  for (const auto& blocks : witness.member_blocks) {
    HistorySpec spec;
    if (blocks.size() == 1) {
      std::vector<std::optional<int>> slots;
      for (int s : blocks.front()) slots.emplace_back(s);
      spec.slots = std::move(slots);
    } else {
      std::vector<std::vector<std::optional<int>>> lists;
      for (const std::vector<int>& block : blocks) {
        std::vector<std::optional<int>> slots;
        for (int s : block) slots.emplace_back(s);
        lists.push_back(std::move(slots));
      }
      spec.blocks = std::move(lists);
    }
    file.histories.push_back(std::move(spec));
  }

  AnalysisRequest request;
  request.kind = witness.kind == ViolationKind::NonLp
                     ? AnalysisRequest::Kind::Lp
                     : AnalysisRequest::Kind::Classify;
  file.analyses = {request};
  file.tolerance = tol;
  file.seed = witness.model_seed;
  return file;
}

}  // namespace qhist
