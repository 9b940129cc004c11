#pragma once

// Batch commands behind the predlab executable. Each returns the process exit
// code: 0 for a completed command (whatever the verdict), 2 for invalid
// input or configuration, 3 for failures while running. Errors are reported
// as one line on `err`:  predlab: error: <CODE>: <message>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "predlab/analysis.hpp"
#include "predlab/bitstreams.hpp"
#include "predlab/mealy.hpp"
#include "predlab/report_io.hpp"
#include "predlab/scenario.hpp"

namespace predlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitRuntime = 3;

inline int report_error(std::ostream& err, int code, std::string_view message) {
  std::string line(message);
  std::replace(line.begin(), line.end(), '\n', ' ');
  err << "predlab: error: " << line << '\n';
  return code;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// run

struct RunOptions {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::string> trials_csv;
  std::optional<std::uint64_t> seed;
};

inline int cmd_run_json(const Json& config, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  std::vector<Scenario> scenarios;
  const bool multiple = config.is_object() && config.contains("scenarios");
  try {
    Overrides overrides;
    overrides.seed = opts.seed;
    overrides.fuel = fuel_from_environment();
    if (multiple) {
      if (!config.at("scenarios").is_array() || config.at("scenarios").empty()) {
        fail(ErrorCode::kInvalidConfig, "'scenarios' must be a non-empty array");
      }
      for (const auto& c : config.at("scenarios")) scenarios.push_back(scenario_from_json(c, overrides));
    } else {
      scenarios.push_back(scenario_from_json(config, overrides));
    }
  } catch (const Error& e) {
    return report_error(err, kExitInvalid, e.what());
  } catch (const std::exception& e) {
    return report_error(err, kExitInvalid, std::string("INVALID_CONFIG: ") + e.what());
  }

  // Scenarios own their experiments, so they run side by side.
  std::vector<RunReport> reports(scenarios.size());
  std::vector<std::optional<std::string>> failures(scenarios.size());
  {
    auto work = [&](std::size_t i) {
      try {
        reports[i] = run_scenario(scenarios[i]);
      } catch (const std::exception& e) {
        failures[i] = scenarios[i].name + ": " + e.what();
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < scenarios.size(); ++i) pool.emplace_back(work, i);
    work(0);
    for (auto& t : pool) t.join();
  }
  for (const auto& f : failures) {
    if (f) return report_error(err, kExitRuntime, *f);
  }

  try {
    Json combined = Json::array();
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      const Scenario& s = scenarios[i];
      RunReport& r = reports[i];
      std::optional<std::string> csv_path = s.trials_csv_path;
      if (!multiple && opts.trials_csv) csv_path = opts.trials_csv;
      if (csv_path) write_file_atomic(*csv_path, trials_csv(r.evaluation.trials));
      if (!s.report_trials) r.evaluation.trials.clear();
      combined.push_back(to_json(r));
      if (multiple && s.report_path) write_file_atomic(*s.report_path, dump(to_json(r)));
    }
    const Json body = multiple ? Json{{"runs", combined}} : combined[0];
    std::optional<std::string> report_path = opts.out;
    if (!report_path && !multiple) report_path = scenarios[0].report_path;
    if (report_path) {
      write_file_atomic(*report_path, dump(body));
      for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const auto& e = reports[i].evaluation;
        out << scenarios[i].name << ": " << to_string(e.verdict) << " (correct " << e.counts.correct << ", incorrect "
            << e.counts.incorrect << ", withheld " << e.counts.withheld << ", trials " << e.n_used << ")\n";
      }
    } else if (!multiple || std::none_of(scenarios.begin(), scenarios.end(),
                                         [](const Scenario& s) { return s.report_path.has_value(); })) {
      out << dump(body);
    }
  } catch (const std::exception& e) {
    return report_error(err, kExitRuntime, e.what());
  }
  return kExitOk;
}

inline int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  Json config;
  try {
    config = Json::parse(read_text_file(opts.config_path));
  } catch (const Error& e) {
    return report_error(err, kExitInvalid, e.what());
  } catch (const nlohmann::json::exception& e) {
    return report_error(err, kExitInvalid, std::string("INVALID_CONFIG: ") + opts.config_path + ": " + e.what());
  }
  return cmd_run_json(config, opts, out, err);
}

// ---------------------------------------------------------------------------
// demo

inline int cmd_demo(std::string_view name, const std::optional<std::string>& out_dir, std::ostream& out,
                    std::ostream& err) {
  Json config;
  try {
    config = demo_config(name);
  } catch (const Error& e) {
    return report_error(err, kExitInvalid, e.what());
  }
  if (out_dir) {
    const std::filesystem::path dir(*out_dir);
    config["output"] = {{"report", (dir / (std::string(name) + ".json")).string()},
                        {"trials_csv", (dir / (std::string(name) + ".csv")).string()}};
  }
  return cmd_run_json(config, RunOptions{}, out, err);
}

// ---------------------------------------------------------------------------
// enumerate

struct EnumerateOptions {
  std::size_t q_max = 1;
  std::vector<mealy::Predicate> predicates;  // empty means all four
  std::size_t exemplars = 0;
  std::optional<std::string> out;
};

inline std::string conjunction_name(const std::vector<mealy::Predicate>& predicates, std::size_t mask) {
  if (mask == 0) return "any";
  std::string name;
  for (std::size_t i = 0; i < predicates.size(); ++i) {
    if (mask & (std::size_t{1} << i)) {
      if (!name.empty()) name += "&";
      name += mealy::to_string(predicates[i]);
    }
  }
  return name;
}

inline Json enumeration_json(const mealy::EnumerationSummary& summary, std::size_t q_max) {
  Json predicates = Json::array();
  for (auto p : summary.predicates) predicates.push_back(mealy::to_string(p));
  Json sizes = Json::array();
  for (const auto& s : summary.sizes) {
    Json counts = Json::object();
    for (std::size_t mask = 0; mask < s.conjunction.size(); ++mask) {
      counts[conjunction_name(summary.predicates, mask)] = s.conjunction[mask];
    }
    sizes.push_back(Json{{"states", s.states}, {"total", s.total}, {"counts", counts}});
  }
  Json exemplars = Json::array();
  for (const auto& m : summary.exemplars) exemplars.push_back(mealy::print_automaton(m));
  return Json{{"q_max", q_max}, {"predicates", predicates}, {"sizes", sizes}, {"exemplars", exemplars}};
}

inline int cmd_enumerate(const EnumerateOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.q_max < 1 || opts.q_max > mealy::kMaxEnumerationStates) {
    return report_error(err, kExitInvalid,
                        "ENUMERATION_TOO_LARGE: q_max=" + std::to_string(opts.q_max) + " must be in 1.." +
                            std::to_string(mealy::kMaxEnumerationStates));
  }
  std::vector<mealy::Predicate> predicates = opts.predicates;
  if (predicates.empty()) {
    predicates = {mealy::Predicate::kOutputStable, mealy::Predicate::kStrict, mealy::Predicate::kRestricted,
                  mealy::Predicate::kWitnessed};
  }
  try {
    const auto summary = mealy::enumerate_automata(opts.q_max, predicates, opts.exemplars);
    const std::string body = dump(enumeration_json(summary, opts.q_max));
    if (opts.out) {
      write_file_atomic(*opts.out, body);
      for (const auto& s : summary.sizes) {
        out << "|Q|=" << s.states << ": " << s.total << " automata, "
            << conjunction_name(predicates, s.conjunction.size() - 1) << " " << s.conjunction.back() << "\n";
      }
    } else {
      out << body;
    }
  } catch (const std::exception& e) {
    return report_error(err, kExitRuntime, e.what());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  std::optional<std::string> input_csv;  // CSV with an outcome/bit column
  std::optional<std::string> bits_file;  // raw bytes, MSB first
  std::optional<std::string> rule;       // stream rule name, or "noise"
  std::uint64_t n = 0;                   // prefix length for rule input
  std::optional<std::uint64_t> seed;     // for rule "noise"
  bool cycle = false;
  std::optional<std::uint64_t> bound;    // defaults to the whole input
  bool normality = false;
  unsigned blocks = 2;
  std::optional<std::string> out;
};

inline int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err) {
  const int sources = opts.input_csv.has_value() + opts.bits_file.has_value() + opts.rule.has_value();
  if (sources != 1) return report_error(err, kExitInvalid, "INVALID_ARGUMENT: give exactly one of --input, --bits-file, --rule");
  if (!opts.cycle && !opts.normality) {
    return report_error(err, kExitInvalid, "INVALID_ARGUMENT: request --cycle and/or --normality");
  }

  BitString bits;
  std::string description;
  try {
    if (opts.input_csv) {
      std::ifstream in(*opts.input_csv);
      if (!in) fail(ErrorCode::kIoError, "cannot read '" + *opts.input_csv + "'");
      bits = bits_from_csv(in);
      description = "csv(" + *opts.input_csv + ")";
    } else if (opts.bits_file) {
      const BitStream s = BitStream::from_file(*opts.bits_file);
      bits = s.prefix(*s.length());
      description = s.describe();
    } else {
      if (opts.n == 0) fail(ErrorCode::kInvalidArgument, "--n is required with --rule");
      const BitStream s = *opts.rule == "noise" ? BitStream::seeded_noise(opts.seed.value_or(0))
                                                : make_rule_stream(*opts.rule);
      bits = s.prefix(opts.n);
      description = s.describe();
    }
  } catch (const Error& e) {
    return report_error(err, kExitInvalid, e.what());
  }

  Json report{{"input", description}, {"n", bits.size()}};
  try {
    if (opts.cycle) {
      const std::uint64_t bound = opts.bound.value_or(bits.size());
      if (bound < 2 || bound > bits.size()) {
        return report_error(err, kExitInvalid, "INVALID_ARGUMENT: cycle bound must be in 2..n");
      }
      report["cycle"] = to_json(analysis::detect_cycle(bits, bound));
    }
    if (opts.normality) report["normality"] = to_json(analysis::borel_normality_check(bits, opts.blocks));
    if (opts.out) {
      write_file_atomic(*opts.out, dump(report));
      if (report.contains("cycle")) {
        const auto& c = report["cycle"];
        out << "cycle: " << (c["found"].get<bool>() ? "found" : "not found") << " transient " << c["transient"]
            << " period " << c["period"] << "\n";
      }
      if (report.contains("normality")) {
        out << "normality: " << (report["normality"]["pass"].get<bool>() ? "pass" : "fail") << "\n";
      }
    } else {
      out << dump(report);
    }
  } catch (const std::exception& e) {
    return report_error(err, kExitRuntime, e.what());
  }
  return kExitOk;
}

}  // namespace predlab::cli
