#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qhist/scenario.hpp"

namespace {

qhist::ConsistencyMode parse_mode(const std::string& mode) {
  return mode == "medium" ? qhist::ConsistencyMode::Medium
                          : qhist::ConsistencyMode::Strong;
}

qhist::ViolationKind parse_kind(const std::string& kind) {
  if (kind == "non_lp") return qhist::ViolationKind::NonLp;
  if (kind == "order_violation") return qhist::ViolationKind::OrderViolation;
  return qhist::ViolationKind::NonQuasi;
}

void print_report(const qhist::RunResult& result, const std::string& output) {
  std::cout << (output == "machine" ? result.machine_report : result.text_report);
}

int write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return 2;
  }
  out << content;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-dimensional quantum histories analysis"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "execute the analyses in a scenario file");
  std::string run_path;
  run->add_option("file", run_path, "scenario file")->required();
  std::optional<double> run_tolerance;
  std::optional<std::string> run_mode;
  std::optional<std::uint64_t> run_seed;
  std::optional<long long> run_budget;
  std::string run_output = "text";
  run->add_option("--tolerance", run_tolerance, "numerical tolerance");
  run->add_option("--mode", run_mode, "consistency mode")
      ->check(CLI::IsMember({"strong", "medium"}));
  run->add_option("--seed", run_seed, "seed override");
  run->add_option("--budget", run_budget, "trial budget for search analyses");
  run->add_option("--output", run_output, "report format")
      ->check(CLI::IsMember({"text", "machine"}));

  // search
  auto* search =
      app.add_subcommand("search", "look for a violation witness in random models");
  std::string search_kind;
  search->add_option("--kind", search_kind, "violation kind")
      ->required()
      ->check(CLI::IsMember({"non_lp", "non_quasi", "order_violation"}));
  long long search_budget = 1000;
  std::uint64_t search_seed = 0;
  double search_tolerance = 1e-10;
  std::string search_ensemble = "generic";
  std::string search_output = "text";
  std::string search_repro;
  search->add_option("--budget", search_budget, "number of random models to try");
  search->add_option("--seed", search_seed, "search seed");
  search->add_option("--tolerance", search_tolerance, "numerical tolerance");
  search->add_option("--ensemble", search_ensemble, "model ensemble")
      ->check(CLI::IsMember({"generic", "commuting"}));
  search->add_option("--output", search_output, "report format")
      ->check(CLI::IsMember({"text", "machine"}));
  search->add_option("--repro", search_repro,
                     "write a reproduction scenario file here when found");

  // mzi
  auto* mzi = app.add_subcommand("mzi", "build and analyse the interferometer");
  double mzi_phase = 0.0;
  bool mzi_no_paths = false;
  std::string mzi_emit;
  std::string mzi_output = "text";
  std::optional<double> mzi_tolerance;
  std::optional<std::string> mzi_mode;
  mzi->add_option("--phase", mzi_phase, "phase shift in radians");
  mzi->add_flag("--no-path-detection", mzi_no_paths,
                "analyse only the detector history and its complement");
  mzi->add_option("--emit", mzi_emit, "write the scenario file here");
  mzi->add_option("--tolerance", mzi_tolerance, "numerical tolerance");
  mzi->add_option("--mode", mzi_mode, "consistency mode")
      ->check(CLI::IsMember({"strong", "medium"}));
  mzi->add_option("--output", mzi_output, "report format")
      ->check(CLI::IsMember({"text", "machine"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      qhist::RunOverrides overrides;
      overrides.tolerance = run_tolerance;
      if (run_mode) overrides.mode = parse_mode(*run_mode);
      overrides.seed = run_seed;
      overrides.budget = run_budget;
      const qhist::RunResult result =
          qhist::run_scenario(qhist::load_scenario(run_path), overrides);
      print_report(result, run_output);
      return result.exit_code;
    }

    if (search->parsed()) {
      const qhist::SearchOutcome outcome = qhist::search_violations(
          parse_kind(search_kind), search_budget, search_seed,
          search_ensemble == "commuting" ? qhist::SearchEnsemble::Commuting
                                         : qhist::SearchEnsemble::Generic,
          search_tolerance);
      if (outcome.witness) {
        const qhist::ScenarioFile reproduction =
            qhist::reproduction_scenario(*outcome.witness, search_tolerance);
        if (search_output == "machine") {
          std::cout << qhist::serialize_scenario(reproduction);
        } else {
          std::cout << "found " << search_kind << " witness: dim "
                    << outcome.witness->dim << ", " << outcome.witness->n_times
                    << " times, trial " << outcome.witness->trial << ", value "
                    << outcome.witness->value << " (" << outcome.trials_used
                    << " trials used)\n";
        }
        if (!search_repro.empty()) {
          const int code =
              write_file(search_repro, qhist::serialize_scenario(reproduction));
          if (code != 0) return code;
        }
        return 1;
      }
      std::cout << "no " << search_kind << " witness in " << outcome.trials_used
                << " trials\n";
      return 0;
    }

    // mzi
    qhist::MziConfig config;
    config.phase = mzi_phase;
    config.path_detection = !mzi_no_paths;
    qhist::ScenarioFile file = qhist::mzi_scenario(config);
    if (mzi_tolerance) file.tolerance = *mzi_tolerance;
    if (mzi_mode) file.mode = parse_mode(*mzi_mode);
    if (!mzi_emit.empty()) {
      const int code = write_file(mzi_emit, qhist::serialize_scenario(file));
      if (code != 0) return code;
    }
    const qhist::RunResult result = qhist::run_scenario(file);
    print_report(result, mzi_output);
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
