#pragma once

// Prediction model: experiments expose a hidden parameter per trial,
// extractors read a declared part of it, predictors turn the extracted bits
// into 0 / 1 / withheld, and the evaluator applies the correctness criterion
// at a finite level (k, n_max).

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "predlab/bit_string.hpp"
#include "predlab/bitstreams.hpp"
#include "predlab/error.hpp"

namespace predlab {

enum class Prediction { kZero, kOne, kWithheld };
enum class Classification { kCorrect, kIncorrect, kWithheld };
enum class Verdict { kRefuted, kAttainedK, kInconclusive };

constexpr std::string_view to_string(Prediction p) {
  switch (p) {
    case Prediction::kZero: return "ZERO";
    case Prediction::kOne: return "ONE";
    case Prediction::kWithheld: return "WITHHELD";
  }
  return "?";
}

constexpr std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::kCorrect: return "CORRECT";
    case Classification::kIncorrect: return "INCORRECT";
    case Classification::kWithheld: return "WITHHELD";
  }
  return "?";
}

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kRefuted: return "REFUTED";
    case Verdict::kAttainedK: return "ATTAINED_K";
    case Verdict::kInconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

constexpr Prediction predict_bit(Bit b) { return b ? Prediction::kOne : Prediction::kZero; }

constexpr Classification classify(Prediction prediction, Bit outcome) {
  if (prediction == Prediction::kWithheld) return Classification::kWithheld;
  return predict_bit(outcome) == prediction ? Classification::kCorrect : Classification::kIncorrect;
}

// ---------------------------------------------------------------------------
// Visibility scopes

inline constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

// Inclusive 1-based range of seed positions.
struct SeedRange {
  std::uint64_t lo = 1;
  std::uint64_t hi = kUnbounded;

  bool contains(std::uint64_t j) const { return lo <= j && j <= hi; }
  bool contains(const SeedRange& other) const { return lo <= other.lo && other.hi <= hi; }
  friend bool operator==(const SeedRange&, const SeedRange&) = default;
};

// Components of a trial's hidden parameter. An experiment offers a scope;
// an extractor declares the scope it needs; the framework only hands the
// extractor a view restricted to what it declared.
struct Scope {
  std::optional<SeedRange> seed_bits;
  bool trial_index = false;
  bool io_log = false;       // input/output log of a black box, incl. past outcomes
  bool preparation = false;  // description of the prepared state
  bool hidden_state = false; // internal state that determines the outcome

  // True when every component of `requested` is available here.
  bool covers(const Scope& requested) const {
    if (requested.seed_bits && !(seed_bits && seed_bits->contains(*requested.seed_bits))) return false;
    return (!requested.trial_index || trial_index) && (!requested.io_log || io_log) &&
           (!requested.preparation || preparation) && (!requested.hidden_state || hidden_state);
  }

  std::string describe() const {
    std::string out;
    auto add = [&out](const std::string& part) {
      if (!out.empty()) out += ",";
      out += part;
    };
    if (seed_bits) {
      add("seed[" + std::to_string(seed_bits->lo) + ".." +
          (seed_bits->hi == kUnbounded ? std::string("inf") : std::to_string(seed_bits->hi)) + "]");
    }
    if (trial_index) add("trial-index");
    if (io_log) add("io-log");
    if (preparation) add("preparation");
    if (hidden_state) add("hidden-state");
    return out.empty() ? "none" : out;
  }

  friend bool operator==(const Scope&, const Scope&) = default;
};

struct IoEntry {
  char symbol;
  Bit output;
  bool preparation;  // fed by the repetition procedure, not part of a trial
  friend bool operator==(const IoEntry&, const IoEntry&) = default;
};

using IoLog = std::vector<IoEntry>;

// Everything an experiment knows about the prepared trial (lambda_i). The
// pointers refer into the experiment and stay valid until it is mutated.
struct HiddenParameter {
  const BitStream* seed = nullptr;
  std::uint64_t trial_index = 0;
  const IoLog* io_log = nullptr;
  const BitString* outcome_history = nullptr;
  const BitString* preparation = nullptr;
  const BitString* hidden_state = nullptr;
};

// Read-only, scope-enforcing handle given to extractors.
class TrialView {
 public:
  TrialView(const HiddenParameter& lambda, Scope granted) : lambda_(lambda), scope_(std::move(granted)) {}

  Bit seed_bit(std::uint64_t j) const {
    if (!scope_.seed_bits || !scope_.seed_bits->contains(j)) {
      deny("seed bit " + std::to_string(j));
    }
    if (lambda_.seed == nullptr) deny("seed (experiment has none)");
    return lambda_.seed->bit(j);
  }

  BitString seed_bits(std::uint64_t lo, std::uint64_t hi) const {
    BitString out;
    for (std::uint64_t j = lo; j <= hi; ++j) out.push_back(seed_bit(j));
    return out;
  }

  std::uint64_t trial_index() const {
    if (!scope_.trial_index) deny("trial index");
    return lambda_.trial_index;
  }

  const IoLog& io_log() const {
    if (!scope_.io_log || lambda_.io_log == nullptr) deny("io-log");
    return *lambda_.io_log;
  }

  const BitString& outcome_history() const {
    if (!scope_.io_log || lambda_.outcome_history == nullptr) deny("outcome history");
    return *lambda_.outcome_history;
  }

  const BitString& preparation() const {
    if (!scope_.preparation || lambda_.preparation == nullptr) deny("preparation");
    return *lambda_.preparation;
  }

  const BitString& hidden_state() const {
    if (!scope_.hidden_state || lambda_.hidden_state == nullptr) deny("hidden state");
    return *lambda_.hidden_state;
  }

  const Scope& scope() const noexcept { return scope_; }

 private:
  [[noreturn]] void deny(const std::string& what) const {
    fail(ErrorCode::kScopeViolation, "extractor read " + what + " outside scope {" + scope_.describe() + "}");
  }

  const HiddenParameter& lambda_;
  Scope scope_;
};

// ---------------------------------------------------------------------------
// Extractors and predictors

class Extractor {
 public:
  using Function = std::function<BitString(const TrialView&)>;

  Extractor(std::string id, Scope scope, Function fn)
      : id_(std::move(id)), scope_(std::move(scope)), fn_(std::move(fn)) {}

  BitString operator()(const HiddenParameter& lambda) const { return fn_(TrialView(lambda, scope_)); }

  const std::string& id() const noexcept { return id_; }
  const Scope& scope() const noexcept { return scope_; }

 private:
  std::string id_;
  Scope scope_;
  Function fn_;
};

inline constexpr std::uint64_t kDefaultFuel = 1'000'000;

// Step budget for one predictor invocation.
class Fuel {
 public:
  explicit Fuel(std::uint64_t budget) : remaining_(budget) {}

  void burn(std::uint64_t steps = 1) {
    if (steps > remaining_) {
      remaining_ = 0;
      fail(ErrorCode::kPredictorNontotal, "predictor exceeded its step budget");
    }
    remaining_ -= steps;
  }

  std::uint64_t remaining() const noexcept { return remaining_; }

 private:
  std::uint64_t remaining_;
};

class Predictor {
 public:
  using Function = std::function<Prediction(const BitString&, Fuel&)>;

  Predictor(std::string id, Function fn, std::uint64_t fuel = kDefaultFuel)
      : id_(std::move(id)), fn_(std::move(fn)), fuel_(fuel) {}

  // Every invocation costs at least one step.
  Prediction operator()(const BitString& input) const {
    Fuel fuel(fuel_);
    fuel.burn();
    return fn_(input, fuel);
  }

  Predictor with_fuel(std::uint64_t fuel) const {
    Predictor copy = *this;
    copy.fuel_ = fuel;
    return copy;
  }

  const std::string& id() const noexcept { return id_; }
  std::uint64_t fuel() const noexcept { return fuel_; }

 private:
  std::string id_;
  Function fn_;
  std::uint64_t fuel_;
};

// ---------------------------------------------------------------------------
// Experiments

struct ResetPreparation {};
struct SeedPreparation {
  BitStream seed;
};
struct FeedPreparation {
  std::string symbols;
};

using Preparation = std::variant<ResetPreparation, SeedPreparation, FeedPreparation>;

// A repeatable process emitting one outcome bit per trial. Trials are
// numbered from 1; prepare() sets up the next trial, parameter() exposes its
// hidden parameter, perform() runs it.
class Experiment {
 public:
  virtual ~Experiment() = default;

  virtual std::string name() const = 0;
  virtual Scope offered_scope() const = 0;

  void prepare(const Preparation& prep) {
    do_prepare(prep, trials_done_ + 1);
    prepared_ = true;
  }

  HiddenParameter parameter() const {
    if (!prepared_) fail(ErrorCode::kInvalidArgument, "experiment parameter read before preparation");
    HiddenParameter lambda = do_parameter();
    lambda.trial_index = trials_done_ + 1;
    return lambda;
  }

  Bit perform() {
    if (!prepared_) prepare(ResetPreparation{});
    const Bit outcome = do_perform();
    ++trials_done_;
    prepared_ = false;
    return outcome;
  }

  std::uint64_t trials_done() const noexcept { return trials_done_; }

 protected:
  Experiment() = default;
  Experiment(const Experiment&) = default;
  Experiment& operator=(const Experiment&) = default;

  virtual void do_prepare(const Preparation& prep, std::uint64_t trial) = 0;
  virtual HiddenParameter do_parameter() const = 0;
  virtual Bit do_perform() = 0;

  [[noreturn]] void unsupported(const Preparation& prep) const {
    static constexpr std::string_view kNames[] = {"reset", "seed", "feed"};
    fail(ErrorCode::kInvalidArgument,
         name() + " does not accept " + std::string(kNames[prep.index()]) + " preparations");
  }

 private:
  std::uint64_t trials_done_ = 0;
  bool prepared_ = false;
};

struct TrialRecord {
  std::uint64_t index = 0;
  BitString extracted;
  Prediction prediction = Prediction::kWithheld;
  Bit outcome = 0;
  Classification classification = Classification::kWithheld;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

// Algorithmic reset-and-repeat rule: the next preparation depends only on the
// procedure's own parameters, the trial index and the visible history.
class RepetitionProcedure {
 public:
  using Function = std::function<Preparation(std::uint64_t trial, std::span<const TrialRecord> history)>;

  RepetitionProcedure(std::string id, Function fn) : id_(std::move(id)), fn_(std::move(fn)) {}

  Preparation next(std::uint64_t trial, std::span<const TrialRecord> history) const {
    return fn_(trial, history);
  }

  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
  Function fn_;
};

inline RepetitionProcedure reset_repetition() {
  return {"reset", [](std::uint64_t, std::span<const TrialRecord>) -> Preparation { return ResetPreparation{}; }};
}

using SeedSource = std::function<BitStream(std::uint64_t trial)>;

inline RepetitionProcedure fresh_seed_repetition(SeedSource source) {
  return {"fresh-seed", [source = std::move(source)](std::uint64_t trial, std::span<const TrialRecord>)
                            -> Preparation { return SeedPreparation{source(trial)}; }};
}

inline RepetitionProcedure same_box_repetition(std::string feed = "x") {
  return {"same-box", [feed = std::move(feed)](std::uint64_t, std::span<const TrialRecord>) -> Preparation {
            return FeedPreparation{feed};
          }};
}

// ---------------------------------------------------------------------------
// Evaluation

struct Counts {
  std::uint64_t correct = 0;
  std::uint64_t incorrect = 0;
  std::uint64_t withheld = 0;

  void add(Classification c) {
    switch (c) {
      case Classification::kCorrect: ++correct; break;
      case Classification::kIncorrect: ++incorrect; break;
      case Classification::kWithheld: ++withheld; break;
    }
  }
  friend bool operator==(const Counts&, const Counts&) = default;
};

struct EvaluationReport {
  std::uint64_t k = 0;
  std::uint64_t n_max = 0;
  std::uint64_t n_used = 0;
  Counts counts;
  Verdict verdict = Verdict::kInconclusive;
  std::vector<TrialRecord> trials;

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

constexpr Verdict verdict_for(const Counts& counts, std::uint64_t k) {
  if (counts.incorrect >= 1) return Verdict::kRefuted;
  if (counts.correct >= k) return Verdict::kAttainedK;
  return Verdict::kInconclusive;
}

inline void check_admissible(const Experiment& experiment, const Extractor& extractor) {
  if (!experiment.offered_scope().covers(extractor.scope())) {
    fail(ErrorCode::kScopeViolation, "extractor '" + extractor.id() + "' declares scope {" +
                                         extractor.scope().describe() + "} but " + experiment.name() +
                                         " offers {" + experiment.offered_scope().describe() + "}");
  }
}

namespace detail {

inline TrialRecord run_prepared(Experiment& experiment, const Extractor& extractor, const Predictor& predictor) {
  TrialRecord record;
  record.index = experiment.trials_done() + 1;
  {
    const HiddenParameter lambda = experiment.parameter();
    record.extracted = extractor(lambda);
  }
  record.prediction = predictor(record.extracted);
  record.outcome = experiment.perform();
  record.classification = classify(record.prediction, record.outcome);
  return record;
}

}  // namespace detail

// One prepared trial; the experiment advances by exactly one trial.
inline TrialRecord single_trial(Experiment& experiment, const Extractor& extractor, const Predictor& predictor,
                                const Preparation& prep = ResetPreparation{}) {
  check_admissible(experiment, extractor);
  experiment.prepare(prep);
  return detail::run_prepared(experiment, extractor, predictor);
}

// Finite form of the correctness criterion: stop at the first incorrect
// prediction (REFUTED) or once k predictions are correct (ATTAINED_K);
// otherwise run n_max trials (INCONCLUSIVE).
inline EvaluationReport run_trials(Experiment& experiment, const RepetitionProcedure& repetition,
                                   const Extractor& extractor, const Predictor& predictor, std::uint64_t k,
                                   std::uint64_t n_max, bool keep_trials = true) {
  if (k < 1) fail(ErrorCode::kInvalidArgument, "k must be at least 1");
  if (n_max < k) fail(ErrorCode::kInvalidArgument, "n_max must be at least k");
  check_admissible(experiment, extractor);

  EvaluationReport report;
  report.k = k;
  report.n_max = n_max;
  std::vector<TrialRecord> history;
  while (report.n_used < n_max) {
    const std::uint64_t trial = report.n_used + 1;
    experiment.prepare(repetition.next(trial, history));
    TrialRecord record = detail::run_prepared(experiment, extractor, predictor);
    record.index = trial;
    report.counts.add(record.classification);
    ++report.n_used;
    history.push_back(std::move(record));
    if (report.counts.incorrect > 0 || report.counts.correct >= k) break;
  }
  report.verdict = verdict_for(report.counts, k);
  if (keep_trials) report.trials = std::move(history);
  return report;
}

// ---------------------------------------------------------------------------
// Extractor sets

// A catalogue of extractors closed under a documented policy; registration
// rejects members that violate it.
class ExtractorSet {
 public:
  using Policy = std::function<bool(const Extractor&)>;

  ExtractorSet(std::string name, std::string policy_description, Policy policy)
      : name_(std::move(name)), policy_description_(std::move(policy_description)), policy_(std::move(policy)) {}

  void add(Extractor extractor) {
    if (!policy_(extractor)) {
      fail(ErrorCode::kPolicyViolation, "extractor '" + extractor.id() + "' with scope {" +
                                            extractor.scope().describe() + "} violates policy of " + name_ +
                                            ": " + policy_description_);
    }
    members_.push_back(std::move(extractor));
  }

  bool admits(const Extractor& extractor) const { return policy_(extractor); }

  const Extractor* find(std::string_view id) const {
    for (const auto& e : members_) {
      if (e.id() == id) return &e;
    }
    return nullptr;
  }

  const std::string& name() const noexcept { return name_; }
  const std::string& policy() const noexcept { return policy_description_; }
  const std::vector<Extractor>& members() const noexcept { return members_; }

 private:
  std::string name_;
  std::string policy_description_;
  Policy policy_;
  std::vector<Extractor> members_;
};

// Policy helper: an extractor passes when its scope fits inside `allowed`.
inline ExtractorSet::Policy scope_within(Scope allowed) {
  return [allowed = std::move(allowed)](const Extractor& e) { return allowed.covers(e.scope()); };
}

// ---------------------------------------------------------------------------
// Generic extractors and predictors

inline Extractor null_extractor() {
  return {"null", Scope{}, [](const TrialView&) { return BitString{}; }};
}

inline Extractor trial_index_extractor() {
  Scope scope;
  scope.trial_index = true;
  return {"trial-index", scope, [](const TrialView& v) { return BitString::from_uint(v.trial_index()); }};
}

inline Predictor constant_predictor(Bit value) {
  return {value ? "constant-1" : "constant-0",
          [p = predict_bit(value)](const BitString&, Fuel&) { return p; }};
}

inline Predictor withhold_predictor() {
  return {"withhold", [](const BitString&, Fuel&) { return Prediction::kWithheld; }};
}

// More ones than zeros predicts ONE, more zeros ZERO; ties and empty input withhold.
inline Predictor majority_predictor() {
  return {"majority", [](const BitString& input, Fuel& fuel) {
            fuel.burn(input.size());
            const std::size_t ones = input.count_ones();
            const std::size_t zeros = input.size() - ones;
            if (ones > zeros) return Prediction::kOne;
            if (zeros > ones) return Prediction::kZero;
            return Prediction::kWithheld;
          }};
}

// Predicts the negation of the last input bit; withholds on empty input.
inline Predictor negate_last_predictor() {
  return {"negate-last", [](const BitString& input, Fuel&) {
            if (input.empty()) return Prediction::kWithheld;
            return predict_bit(static_cast<Bit>(1 - input.back()));
          }};
}

}  // namespace predlab
