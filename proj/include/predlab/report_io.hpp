#pragma once

// JSON / CSV serialisation of evaluation, cycle and normality reports, plus
// atomic file output.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "predlab/analysis.hpp"
#include "predlab/core.hpp"
#include "predlab/error.hpp"

namespace predlab {

inline constexpr std::string_view kToolName = "predlab";
inline constexpr std::string_view kToolVersion = "1.0.0";

using Json = nlohmann::json;

namespace detail {

template <typename E, std::size_t N>
E enum_from(std::string_view text, const E (&values)[N], std::string_view what) {
  for (E v : values) {
    if (to_string(v) == text) return v;
  }
  fail(ErrorCode::kParseError, "unknown " + std::string(what) + " '" + std::string(text) + "'");
}

inline constexpr Prediction kPredictions[] = {Prediction::kZero, Prediction::kOne, Prediction::kWithheld};
inline constexpr Classification kClassifications[] = {Classification::kCorrect, Classification::kIncorrect,
                                                      Classification::kWithheld};
inline constexpr Verdict kVerdicts[] = {Verdict::kRefuted, Verdict::kAttainedK, Verdict::kInconclusive};

}  // namespace detail

inline Json to_json(const TrialRecord& r) {
  return Json{{"index", r.index},
              {"extracted", r.extracted.to_string()},
              {"prediction", to_string(r.prediction)},
              {"outcome", r.outcome},
              {"classification", to_string(r.classification)}};
}

inline TrialRecord trial_from_json(const Json& j) {
  TrialRecord r;
  r.index = j.at("index").get<std::uint64_t>();
  r.extracted = BitString::parse(j.at("extracted").get<std::string>());
  r.prediction = detail::enum_from(j.at("prediction").get<std::string>(), detail::kPredictions, "prediction");
  r.outcome = j.at("outcome").get<Bit>();
  r.classification =
      detail::enum_from(j.at("classification").get<std::string>(), detail::kClassifications, "classification");
  return r;
}

inline Json to_json(const EvaluationReport& r) {
  Json j{{"k", r.k},
         {"n_max", r.n_max},
         {"n_used", r.n_used},
         {"counts", {{"correct", r.counts.correct}, {"incorrect", r.counts.incorrect}, {"withheld", r.counts.withheld}}},
         {"verdict", to_string(r.verdict)}};
  if (!r.trials.empty()) {
    Json trials = Json::array();
    for (const auto& t : r.trials) trials.push_back(to_json(t));
    j["trials"] = std::move(trials);
  }
  return j;
}

inline EvaluationReport evaluation_from_json(const Json& j) {
  EvaluationReport r;
  r.k = j.at("k").get<std::uint64_t>();
  r.n_max = j.at("n_max").get<std::uint64_t>();
  r.n_used = j.at("n_used").get<std::uint64_t>();
  const Json& c = j.at("counts");
  r.counts = {c.at("correct").get<std::uint64_t>(), c.at("incorrect").get<std::uint64_t>(),
              c.at("withheld").get<std::uint64_t>()};
  r.verdict = detail::enum_from(j.at("verdict").get<std::string>(), detail::kVerdicts, "verdict");
  if (j.contains("trials")) {
    for (const auto& t : j.at("trials")) r.trials.push_back(trial_from_json(t));
  }
  return r;
}

// Evaluation result together with what produced it.
struct RunReport {
  std::string tool_version{kToolVersion};
  Json scenario;
  std::string experiment;
  std::string extractor;
  std::string predictor;
  std::string repetition;
  EvaluationReport evaluation;
  double wall_time_ms = 0.0;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

inline Json to_json(const RunReport& r) {
  Json j = to_json(r.evaluation);
  j["tool"] = kToolName;
  j["version"] = r.tool_version;
  j["scenario"] = r.scenario;
  j["experiment"] = r.experiment;
  j["extractor"] = r.extractor;
  j["predictor"] = r.predictor;
  j["repetition"] = r.repetition;
  j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

inline RunReport run_report_from_json(const Json& j) {
  RunReport r;
  r.tool_version = j.at("version").get<std::string>();
  r.scenario = j.at("scenario");
  r.experiment = j.at("experiment").get<std::string>();
  r.extractor = j.at("extractor").get<std::string>();
  r.predictor = j.at("predictor").get<std::string>();
  r.repetition = j.at("repetition").get<std::string>();
  r.evaluation = evaluation_from_json(j);
  r.wall_time_ms = j.at("wall_time_ms").get<double>();
  return r;
}

// index,extracted,prediction,outcome,classification
inline std::string trials_csv(const std::vector<TrialRecord>& trials) {
  std::ostringstream out;
  out << "index,extracted,prediction,outcome,classification\n";
  for (const auto& t : trials) {
    out << t.index << ',' << t.extracted.to_string() << ',' << to_string(t.prediction) << ','
        << static_cast<int>(t.outcome) << ',' << to_string(t.classification) << '\n';
  }
  return out.str();
}

// Bits from a CSV with a header row: the "outcome" column if present, else
// "bit", else the only column.
inline BitString bits_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::kParseError, "empty CSV");
  std::vector<std::string> header;
  {
    std::istringstream cells(line);
    for (std::string cell; std::getline(cells, cell, ',');) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      header.push_back(cell);
    }
  }
  std::size_t column = header.size();
  for (std::string_view name : {"outcome", "bit"}) {
    for (std::size_t i = 0; i < header.size() && column == header.size(); ++i) {
      if (header[i] == name) column = i;
    }
  }
  if (column == header.size()) {
    if (header.size() != 1) fail(ErrorCode::kParseError, "CSV has no 'outcome' or 'bit' column");
    column = 0;
  }
  BitString bits;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::istringstream cells(line);
    std::string cell;
    for (std::size_t i = 0; i <= column; ++i) {
      if (!std::getline(cells, cell, ',')) fail(ErrorCode::kParseError, "CSV row " + std::to_string(row) + " is short");
    }
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    if (cell != "0" && cell != "1") {
      fail(ErrorCode::kParseError, "CSV row " + std::to_string(row) + " holds '" + cell + "', expected 0 or 1");
    }
    bits.push_back(static_cast<Bit>(cell[0] - '0'));
  }
  return bits;
}

inline Json to_json(const analysis::CycleReport& r) {
  return Json{{"found", r.found}, {"transient", r.transient}, {"period", r.period}, {"bound", r.bound}};
}

inline Json to_json(const analysis::NormalityReport& r) {
  Json blocks = Json::array();
  for (const auto& b : r.blocks) {
    blocks.push_back(Json{{"length", b.length},
                          {"frequencies", b.frequencies},
                          {"max_deviation", b.max_deviation},
                          {"threshold", b.threshold},
                          {"pass", b.pass}});
  }
  return Json{{"n", r.n}, {"pass", r.pass}, {"blocks", std::move(blocks)}};
}

// Write to a sibling temporary, then rename over the destination.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIoError, "cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out) fail(ErrorCode::kIoError, "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::kIoError, "cannot rename onto '" + path.string() + "': " + ec.message());
}

}  // namespace predlab
