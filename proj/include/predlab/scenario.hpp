#pragma once

// Scenario configuration: JSON description of one evaluation run, resolved
// against the registries of experiments, extractors, predictors and
// repetition procedures.
//
//   {
//     "name": "dyadic-demo",
//     "experiment": {"kind": "dyadic", "k": 3, "seeds": {"kind": "fresh-noise", "seed": 2024}},
//     "extractor": {"id": "window", "lo": 4, "hi": 4},
//     "predictor": {"id": "identity"},
//     "repetition": {"kind": "fresh-seed"},
//     "k": 100, "n_max": 100,
//     "output": {"report": "dyadic.json", "trials_csv": "dyadic.csv"}
//   }

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "predlab/bitstreams.hpp"
#include "predlab/core.hpp"
#include "predlab/dyadic.hpp"
#include "predlab/mealy.hpp"
#include "predlab/quantum.hpp"
#include "predlab/report_io.hpp"

namespace predlab {

struct Overrides {
  std::optional<std::uint64_t> seed;  // replaces fresh-noise and Born seeds
  std::optional<std::uint64_t> fuel;
};

struct Scenario {
  std::string name;
  Json config;
  std::unique_ptr<Experiment> experiment;
  std::optional<Extractor> extractor;
  std::optional<Predictor> predictor;
  std::optional<RepetitionProcedure> repetition;
  std::uint64_t k = 1;
  std::uint64_t n_max = 1;
  std::optional<std::string> report_path;
  std::optional<std::string> trials_csv_path;
  bool report_trials = false;
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& message) { fail(ErrorCode::kInvalidConfig, message); }

inline const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) config_error(where + " is missing '" + key + "'");
  return j.at(key);
}

template <typename T>
T get(const Json& j, const char* key, const std::string& where) {
  const Json& v = require(j, key, where);
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    config_error(where + "." + key + " has the wrong type");
  }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return get<T>(j, key, where);
}

}  // namespace detail

// {"kind": "rule", "rule": "pi-prime-index"} | {"kind": "noise", "seed": 42} |
// {"kind": "periodic", "prefix": "", "cycle": "01"} | {"kind": "file", "path": "...", "bits": N}
inline BitStream stream_from_json(const Json& j, const std::string& where) {
  const auto kind = detail::get<std::string>(j, "kind", where);
  if (kind == "rule") {
    RuleParams params;
    params.constant_bit = detail::get_or<Bit>(j, "bit", 0, where);
    return make_rule_stream(detail::get<std::string>(j, "rule", where), params);
  }
  if (kind == "noise") return BitStream::seeded_noise(detail::get<std::uint64_t>(j, "seed", where));
  if (kind == "periodic") {
    return BitStream::periodic(BitString::parse(detail::get_or<std::string>(j, "prefix", "", where)),
                               BitString::parse(detail::get<std::string>(j, "cycle", where)));
  }
  if (kind == "file") {
    std::optional<std::uint64_t> bits;
    if (j.contains("bits")) bits = detail::get<std::uint64_t>(j, "bits", where);
    return BitStream::from_file(detail::get<std::string>(j, "path", where), bits);
  }
  detail::config_error(where + " has unknown stream kind '" + kind + "'");
}

namespace detail {

inline SeedSource seeds_from_json(const Json& j, const Overrides& overrides) {
  const std::string where = "experiment.seeds";
  const auto kind = get<std::string>(j, "kind", where);
  if (kind == "fresh-noise") {
    return dyadic::fresh_noise_seeds(overrides.seed.value_or(get_or<std::uint64_t>(j, "seed", 0, where)));
  }
  if (kind == "fixed") return dyadic::fixed_seed(stream_from_json(require(j, "stream", where), where + ".stream"));
  if (kind == "list") {
    std::vector<BitStream> streams;
    for (const auto& s : require(j, "streams", where)) streams.push_back(stream_from_json(s, where + ".streams"));
    if (streams.empty()) config_error(where + ".streams is empty");
    return dyadic::seed_list(std::move(streams));
  }
  config_error(where + " has unknown kind '" + kind + "'");
}

inline mealy::MealyAutomaton automaton_from_json(const Json& j) {
  if (j.is_string() && j.get<std::string>() == "canonical") return mealy::canonical_example();
  if (j.is_object() && j.contains("text")) return mealy::parse_automaton(j.at("text").get<std::string>());
  if (j.is_object() && j.contains("file")) {
    const auto path = j.at("file").get<std::string>();
    std::ifstream in(path);
    if (!in) fail(ErrorCode::kIoError, "cannot open automaton file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return mealy::parse_automaton(buf.str());
  }
  config_error("experiment.automaton must be \"canonical\", {\"text\": ...} or {\"file\": ...}");
}

// [re0, im0, re1, im1] or {"theta": t, "phase": p}
inline quantum::QubitState qubit_from_json(const Json& j, const std::string& where) {
  if (j.is_array()) {
    if (j.size() != 4) config_error(where + " must have four numbers");
    return quantum::QubitState({j[0].get<double>(), j[1].get<double>()}, {j[2].get<double>(), j[3].get<double>()});
  }
  return quantum::QubitState::bloch(get<double>(j, "theta", where), get_or<double>(j, "phase", 0.0, where));
}

inline std::unique_ptr<Experiment> experiment_from_json(const Json& j, const Overrides& overrides) {
  const std::string where = "experiment";
  const auto kind = get<std::string>(j, "kind", where);
  if (kind == "dyadic") {
    const auto k = get<std::uint64_t>(j, "k", where);
    if (k < 1) config_error("experiment.k must be >= 1");
    return std::make_unique<dyadic::DyadicExperiment>(k, seeds_from_json(require(j, "seeds", where), overrides));
  }
  if (kind == "mealy-em") {
    mealy::MealyAutomaton m = automaton_from_json(require(j, "automaton", where));
    mealy::StateId start = 0;
    if (j.contains("start")) {
      const auto name = get<std::string>(j, "start", where);
      const auto q = m.find_state(name);
      if (!q) config_error("experiment.start names unknown state '" + name + "'");
      start = *q;
    }
    return std::make_unique<mealy::EmExperiment>(mealy::BlackBox(std::move(m), start));
  }
  if (kind == "qubit-ec") {
    const Json& source = require(j, "source", where);
    const auto mode = get<std::string>(source, "mode", "experiment.source");
    quantum::OutcomeSource src;
    if (mode == "born") {
      src = quantum::OutcomeSource::born(overrides.seed.value_or(get_or<std::uint64_t>(source, "seed", 0, where)));
    } else if (mode == "scripted") {
      src = quantum::OutcomeSource::scripted(stream_from_json(require(source, "stream", where), "experiment.source.stream"));
    } else {
      config_error("experiment.source.mode must be 'born' or 'scripted'");
    }
    return std::make_unique<quantum::EcExperiment>(qubit_from_json(require(j, "psi", where), "experiment.psi"),
                                                   qubit_from_json(require(j, "phi", where), "experiment.phi"), src);
  }
  config_error("unknown experiment kind '" + kind + "'");
}

inline Extractor extractor_from_json(const Json& j) {
  const std::string where = "extractor";
  const auto id = get<std::string>(j, "id", where);
  if (id == "window") return dyadic::window_extractor(get<std::uint64_t>(j, "lo", where), get<std::uint64_t>(j, "hi", where));
  if (id == "window+index") {
    return dyadic::window_with_index_extractor(get<std::uint64_t>(j, "lo", where), get<std::uint64_t>(j, "hi", where));
  }
  if (id == "trial-index") return trial_index_extractor();
  if (id == "null") return null_extractor();
  if (id == "history") return mealy::history_extractor();
  if (id == "io-log") return mealy::io_log_extractor();
  if (id == "hidden-state") return mealy::state_extractor();
  if (id == "preparation") return quantum::preparation_extractor();
  if (id == "hidden-value") return quantum::script_extractor();
  config_error("unknown extractor id '" + id + "'");
}

inline Predictor predictor_from_json(const Json& j, const Experiment& experiment) {
  const auto id = get<std::string>(j, "id", "predictor");
  if (id == "identity") return dyadic::identity_predictor();
  if (id == "constant-0") return constant_predictor(0);
  if (id == "constant-1") return constant_predictor(1);
  if (id == "majority") return majority_predictor();
  if (id == "withhold") return withhold_predictor();
  if (id == "negate-last") return negate_last_predictor();
  if (id == "automaton-oracle") {
    const auto* em = dynamic_cast<const mealy::EmExperiment*>(&experiment);
    if (em == nullptr) config_error("predictor 'automaton-oracle' needs a mealy-em experiment");
    return mealy::automaton_predictor(em->box().automaton());
  }
  config_error("unknown predictor id '" + id + "'");
}

inline RepetitionProcedure repetition_from_json(const Json& j, const Experiment& experiment,
                                                const Extractor& extractor, const Predictor& predictor) {
  const std::string where = "repetition";
  const auto kind = get<std::string>(j, "kind", where);
  if (kind == "reset" || kind == "fresh-seed") {
    RepetitionProcedure r = reset_repetition();
    return {kind, [r](std::uint64_t t, std::span<const TrialRecord> h) { return r.next(t, h); }};
  }
  if (kind == "same-box") return same_box_repetition(get_or<std::string>(j, "feed", "x", where));
  if (kind == "adversarial") {
    const auto* dy = dynamic_cast<const dyadic::DyadicExperiment*>(&experiment);
    if (dy == nullptr) config_error("adversarial repetition needs a dyadic experiment");
    const auto l = get<std::uint64_t>(j, "l", where);
    return dyadic::adversarial_repetition(predictor, extractor, l, dy->k());
  }
  config_error("unknown repetition kind '" + kind + "'");
}

}  // namespace detail

// Builds a runnable scenario. Configuration problems raise INVALID_CONFIG
// (or the more specific construction error, e.g. UNKNOWN_RULE).
inline Scenario scenario_from_json(const Json& config, const Overrides& overrides = {}) {
  using detail::get;
  using detail::get_or;
  using detail::require;
  if (!config.is_object()) detail::config_error("scenario must be a JSON object");
  Scenario s;
  s.config = config;
  s.name = get_or<std::string>(config, "name", "scenario", "scenario");
  s.experiment = detail::experiment_from_json(require(config, "experiment", "scenario"), overrides);
  s.extractor = detail::extractor_from_json(require(config, "extractor", "scenario"));
  s.predictor = detail::predictor_from_json(require(config, "predictor", "scenario"), *s.experiment);
  if (overrides.fuel) s.predictor = s.predictor->with_fuel(*overrides.fuel);
  const Json default_repetition{{"kind", "reset"}};
  s.repetition = detail::repetition_from_json(config.contains("repetition") ? config.at("repetition") : default_repetition,
                                              *s.experiment, *s.extractor, *s.predictor);
  s.k = get<std::uint64_t>(config, "k", "scenario");
  s.n_max = get<std::uint64_t>(config, "n_max", "scenario");
  if (s.k < 1) detail::config_error("k must be >= 1");
  if (s.k > s.n_max) detail::config_error("k must not exceed n_max");
  if (!s.experiment->offered_scope().covers(s.extractor->scope())) {
    detail::config_error("extractor '" + s.extractor->id() + "' is not admissible for " + s.experiment->name());
  }
  if (config.contains("output")) {
    const Json& out = config.at("output");
    if (out.contains("report")) s.report_path = get<std::string>(out, "report", "output");
    if (out.contains("trials_csv")) s.trials_csv_path = get<std::string>(out, "trials_csv", "output");
    s.report_trials = get_or<bool>(out, "report_trials", false, "output");
  }
  return s;
}

// Executes the evaluation. Errors here are runtime failures (e.g.
// PREDICTOR_NONTOTAL), not configuration problems.
inline RunReport run_scenario(Scenario& s) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.scenario = s.config;
  report.experiment = s.experiment->name();
  report.extractor = s.extractor->id();
  report.predictor = s.predictor->id();
  report.repetition = s.repetition->id();
  report.evaluation = run_trials(*s.experiment, *s.repetition, *s.extractor, *s.predictor, s.k, s.n_max, true);
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// PREDLAB_FUEL, when set, overrides the default predictor step budget.
inline std::optional<std::uint64_t> fuel_from_environment() {
  const char* value = std::getenv("PREDLAB_FUEL");
  if (value == nullptr || *value == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long fuel = std::strtoull(value, &end, 10);
  if (*end != '\0' || fuel == 0) {
    fail(ErrorCode::kInvalidConfig, "PREDLAB_FUEL must be a positive integer, got '" + std::string(value) + "'");
  }
  return fuel;
}

// Built-in scenarios: the dyadic map, the Mealy black box and the qubit.
inline Json demo_config(std::string_view name) {
  if (name == "dyadic") {
    return Json::parse(R"({
      "name": "dyadic",
      "experiment": {"kind": "dyadic", "k": 3, "seeds": {"kind": "fresh-noise", "seed": 2024}},
      "extractor": {"id": "window", "lo": 4, "hi": 4},
      "predictor": {"id": "identity"},
      "repetition": {"kind": "fresh-seed"},
      "k": 100, "n_max": 100
    })");
  }
  if (name == "mealy-em") {
    return Json::parse(R"({
      "name": "mealy-em",
      "experiment": {"kind": "mealy-em", "automaton": "canonical", "start": "q0"},
      "extractor": {"id": "history"},
      "predictor": {"id": "negate-last"},
      "repetition": {"kind": "same-box", "feed": "x"},
      "k": 100, "n_max": 101
    })");
  }
  if (name == "qubit-ec") {
    return Json::parse(R"({
      "name": "qubit-ec",
      "experiment": {"kind": "qubit-ec",
                     "psi": {"theta": 0.0},
                     "phi": {"theta": 1.5707963267948966},
                     "source": {"mode": "scripted", "stream": {"kind": "rule", "rule": "pi-prime-index"}}},
      "extractor": {"id": "preparation"},
      "predictor": {"id": "withhold"},
      "repetition": {"kind": "reset"},
      "k": 100, "n_max": 100
    })");
  }
  fail(ErrorCode::kInvalidConfig, "unknown demo '" + std::string(name) + "' (dyadic, mealy-em, qubit-ec)");
}

}  // namespace predlab
