// predlab: batch front-end for prediction-game scenarios.
//
//   predlab run --config scenario.json [--out report.json] [--trials-csv t.csv] [--seed S]
//   predlab enumerate --q-max 3 [--output-stable] [--strict] [--restricted] [--witnessed] [--out counts.json]
//   predlab analyze (--input bits.csv | --bits-file raw.bin | --rule NAME --n N) [--cycle] [--normality --blocks L]
//   predlab demo dyadic|mealy-em|qubit-ec [--out DIR]

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "predlab/cli.hpp"

int main(int argc, char** argv) {
  using namespace predlab;

  CLI::App app{"Prediction-game laboratory"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  cli::RunOptions run;
  std::optional<std::uint64_t> run_seed;
  auto* run_cmd = app.add_subcommand("run", "Evaluate the scenario(s) in a config file");
  run_cmd->add_option("--config", run.config_path, "Scenario JSON")->required();
  run_cmd->add_option("--out", run.out, "Report JSON path (stdout when absent)");
  run_cmd->add_option("--trials-csv", run.trials_csv, "Per-trial CSV path");
  run_cmd->add_option("--seed", run_seed, "Override fresh-noise and Born seeds");

  cli::EnumerateOptions enumerate;
  bool stable = false, strict = false, restricted = false, witnessed = false;
  auto* enum_cmd = app.add_subcommand("enumerate", "Count Mealy automata over {x,z} satisfying predicates");
  enum_cmd->add_option("--q-max", enumerate.q_max, "Largest state count (<= 4)")->required();
  enum_cmd->add_flag("--output-stable", stable);
  enum_cmd->add_flag("--strict", strict);
  enum_cmd->add_flag("--restricted", restricted);
  enum_cmd->add_flag("--witnessed", witnessed);
  enum_cmd->add_option("--exemplars", enumerate.exemplars, "Automata satisfying all predicates to include");
  enum_cmd->add_option("--out", enumerate.out, "Counts JSON path (stdout when absent)");

  cli::AnalyzeOptions analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Cycle and normality diagnostics on a bit sequence");
  analyze_cmd->add_option("--input", analyze.input_csv, "CSV with an outcome or bit column");
  analyze_cmd->add_option("--bits-file", analyze.bits_file, "Raw bytes, MSB first");
  analyze_cmd->add_option("--rule", analyze.rule, "Stream rule, or 'noise' with --seed");
  analyze_cmd->add_option("--n", analyze.n, "Prefix length for --rule");
  analyze_cmd->add_option("--seed", analyze.seed, "Seed for --rule noise");
  analyze_cmd->add_flag("--cycle", analyze.cycle, "Detect eventual periodicity");
  analyze_cmd->add_option("--bound", analyze.bound, "Cycle search bound (default: whole input)");
  analyze_cmd->add_flag("--normality", analyze.normality, "Block-frequency normality check");
  analyze_cmd->add_option("--blocks", analyze.blocks, "Largest block length");
  analyze_cmd->add_option("--out", analyze.out, "Report JSON path (stdout when absent)");

  std::string demo_name;
  std::optional<std::string> demo_out;
  auto* demo_cmd = app.add_subcommand("demo", "Run a built-in scenario");
  demo_cmd->add_option("name", demo_name, "dyadic, mealy-em or qubit-ec")->required();
  demo_cmd->add_option("--out", demo_out, "Directory for report and trial CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string message = e.what();
    for (char& c : message) {
      if (c == '\n') c = ' ';
    }
    return cli::report_error(std::cerr, cli::kExitInvalid, "INVALID_ARGUMENT: " + message);
  }

  if (*run_cmd) {
    run.seed = run_seed;
    return cli::cmd_run(run, std::cout, std::cerr);
  }
  if (*enum_cmd) {
    if (stable) enumerate.predicates.push_back(mealy::Predicate::kOutputStable);
    if (strict) enumerate.predicates.push_back(mealy::Predicate::kStrict);
    if (restricted) enumerate.predicates.push_back(mealy::Predicate::kRestricted);
    if (witnessed) enumerate.predicates.push_back(mealy::Predicate::kWitnessed);
    return cli::cmd_enumerate(enumerate, std::cout, std::cerr);
  }
  if (*analyze_cmd) return cli::cmd_analyze(analyze, std::cout, std::cerr);
  return cli::cmd_demo(demo_name, demo_out, std::cout, std::cerr);
}
