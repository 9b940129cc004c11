#pragma once

// Mealy automata M = (Q, Sigma, Theta, delta, omega) with Theta = {0,1} as
// value-definite toy models of measurement, the stability / complementarity
// predicates, the black-box experiment E_M, and exhaustive enumeration.

#include <array>
#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "predlab/analysis.hpp"
#include "predlab/bit_string.hpp"
#include "predlab/core.hpp"
#include "predlab/error.hpp"

namespace predlab::mealy {

using StateId = std::uint32_t;

class MealyAutomaton {
 public:
  // All transitions start as self-loops with output 0.
  explicit MealyAutomaton(std::size_t states, std::string inputs = "xz", std::vector<std::string> names = {})
      : inputs_(std::move(inputs)), names_(std::move(names)) {
    if (states < 1) fail(ErrorCode::kInvalidArgument, "automaton needs at least one state");
    if (inputs_.empty()) fail(ErrorCode::kInvalidArgument, "automaton needs at least one input symbol");
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
      if (inputs_.find(inputs_[i], i + 1) != std::string::npos) {
        fail(ErrorCode::kInvalidArgument, "duplicate input symbol '" + std::string(1, inputs_[i]) + "'");
      }
    }
    if (names_.empty()) {
      for (std::size_t q = 0; q < states; ++q) names_.push_back(std::to_string(q));
    }
    if (names_.size() != states) fail(ErrorCode::kInvalidArgument, "state name count does not match state count");
    next_.resize(states * inputs_.size());
    out_.assign(states * inputs_.size(), 0);
    for (std::size_t q = 0; q < states; ++q) {
      for (std::size_t i = 0; i < inputs_.size(); ++i) next_[q * inputs_.size() + i] = static_cast<StateId>(q);
    }
  }

  std::size_t num_states() const noexcept { return names_.size(); }
  std::size_t num_inputs() const noexcept { return inputs_.size(); }
  const std::string& inputs() const noexcept { return inputs_; }
  const std::string& state_name(StateId q) const { return names_.at(q); }

  std::size_t input_index(char a) const {
    const auto pos = inputs_.find(a);
    if (pos == std::string::npos) fail(ErrorCode::kInvalidArgument, "unknown input symbol '" + std::string(1, a) + "'");
    return pos;
  }

  std::optional<StateId> find_state(std::string_view name) const {
    for (std::size_t q = 0; q < names_.size(); ++q) {
      if (names_[q] == name) return static_cast<StateId>(q);
    }
    return std::nullopt;
  }

  StateId next(StateId q, std::size_t input) const { return next_[q * inputs_.size() + input]; }
  Bit output(StateId q, std::size_t input) const { return out_[q * inputs_.size() + input]; }

  StateId delta(StateId q, char a) const { return next(q, input_index(a)); }
  Bit omega(StateId q, char a) const { return output(q, input_index(a)); }

  void set(StateId q, char a, StateId next_state, Bit output) {
    if (q >= num_states() || next_state >= num_states()) fail(ErrorCode::kInvalidArgument, "state out of range");
    if (output > 1) fail(ErrorCode::kInvalidArgument, "output must be 0 or 1");
    const std::size_t idx = q * inputs_.size() + input_index(a);
    next_[idx] = next_state;
    out_[idx] = output;
  }

  friend bool operator==(const MealyAutomaton&, const MealyAutomaton&) = default;

 private:
  std::string inputs_;
  std::vector<std::string> names_;
  std::vector<StateId> next_;
  std::vector<Bit> out_;
};

// ---------------------------------------------------------------------------
// Predicates

struct Witness {
  std::optional<StateId> state;  // empty for a non-vacuity failure
  char input = 0;
  std::string equation;
};

struct PredicateReport {
  bool holds = false;
  std::optional<Witness> witness;
};

namespace detail {

// Predicate kernels over anything with num_states(), next(q, i), output(q, i).
// They return the offending / witnessing state and input index or nothing.

struct Hit {
  StateId state;
  std::size_t input;
};

template <typename Tables>
std::optional<Hit> stability_violation(const Tables& m) {
  for (StateId q = 0; q < m.num_states(); ++q) {
    for (std::size_t a = 0; a < m.num_inputs(); ++a) {
      if (m.output(q, a) != m.output(m.next(q, a), a)) return Hit{q, a};
    }
  }
  return std::nullopt;
}

// First s with omega(s, a) != omega(delta(s, b), a).
template <typename Tables>
std::optional<StateId> disturbance_witness(const Tables& m, std::size_t a, std::size_t b) {
  for (StateId s = 0; s < m.num_states(); ++s) {
    if (m.output(s, a) != m.output(m.next(s, b), a)) return s;
  }
  return std::nullopt;
}

// First q (and the measured input) where measuring it leaves the other
// observable's output unchanged. Checks the x direction before z per state.
template <typename Tables>
std::optional<Hit> strict_violation(const Tables& m, std::size_t x, std::size_t z) {
  for (StateId q = 0; q < m.num_states(); ++q) {
    if (m.output(q, z) == m.output(m.next(q, x), z)) return Hit{q, x};
    if (m.output(q, x) == m.output(m.next(q, z), x)) return Hit{q, z};
  }
  return std::nullopt;
}

enum class RestrictedFailure { kNone, kViolation, kVacuous };

struct RestrictedResult {
  RestrictedFailure failure = RestrictedFailure::kNone;
  Hit hit{0, 0};
};

template <typename Tables>
RestrictedResult restricted_check(const Tables& m, std::size_t x, std::size_t z) {
  const std::array<std::pair<std::size_t, std::size_t>, 2> directions{{{x, z}, {z, x}}};
  for (const auto& [moved, observed] : directions) {
    bool any_moving = false;
    for (StateId q = 0; q < m.num_states(); ++q) {
      const StateId after = m.next(q, moved);
      if (after == q) continue;
      any_moving = true;
      if (m.output(q, observed) == m.output(after, observed)) {
        return {RestrictedFailure::kViolation, Hit{q, moved}};
      }
    }
    if (!any_moving) return {RestrictedFailure::kVacuous, Hit{0, moved}};
  }
  return {};
}

template <typename Tables>
bool has_fixed_point(const Tables& m, std::size_t a) {
  for (StateId q = 0; q < m.num_states(); ++q) {
    if (m.next(q, a) == q) return true;
  }
  return false;
}

inline std::string bitstr(Bit b) { return b ? "1" : "0"; }

}  // namespace detail

// omega(q, a) == omega(delta(q, a), a) for every q, a.
inline PredicateReport output_stable(const MealyAutomaton& m) {
  const auto hit = detail::stability_violation(m);
  if (!hit) return {true, std::nullopt};
  const char a = m.inputs()[hit->input];
  const StateId next = m.next(hit->state, hit->input);
  return {false, Witness{hit->state, a,
                         "omega(" + m.state_name(hit->state) + "," + a + ")=" +
                             detail::bitstr(m.output(hit->state, hit->input)) + " != omega(" + m.state_name(next) +
                             "," + a + ")=" + detail::bitstr(m.output(next, hit->input))}};
}

// Exists s with omega(s, a) != omega(delta(s, b), a): measuring b can change
// the outcome of a. The witness state is returned when it holds.
inline PredicateReport complementary_witnessed(const MealyAutomaton& m, char a, char b) {
  if (a == b) fail(ErrorCode::kInvalidArgument, "complementarity needs two distinct inputs");
  const std::size_t ai = m.input_index(a);
  const std::size_t bi = m.input_index(b);
  const auto s = detail::disturbance_witness(m, ai, bi);
  if (!s) return {false, std::nullopt};
  const StateId after = m.next(*s, bi);
  return {true, Witness{*s, b,
                        "omega(" + m.state_name(*s) + "," + a + ")=" + detail::bitstr(m.output(*s, ai)) +
                            " != omega(delta(" + m.state_name(*s) + "," + b + ")=" + m.state_name(after) + "," +
                            a + ")=" + detail::bitstr(m.output(after, ai))}};
}

namespace detail {

inline Witness equality_witness(const MealyAutomaton& m, StateId q, std::size_t moved, std::size_t observed) {
  const char mv = m.inputs()[moved];
  const char ob = m.inputs()[observed];
  const StateId after = m.next(q, moved);
  return Witness{q, mv,
                 "omega(" + m.state_name(q) + "," + ob + ")=" + bitstr(m.output(q, observed)) + " == omega(delta(" +
                     m.state_name(q) + "," + mv + ")=" + m.state_name(after) + "," + ob +
                     ")=" + bitstr(m.output(after, observed))};
}

}  // namespace detail

// For every q: omega(q, z) != omega(delta(q, x), z) and
// omega(q, x) != omega(delta(q, z), x). The counterexample's input is the
// symbol that was measured first.
inline PredicateReport complementary_strict(const MealyAutomaton& m, char x = 'x', char z = 'z') {
  if (x == z) fail(ErrorCode::kInvalidArgument, "complementarity needs two distinct inputs");
  const std::size_t xi = m.input_index(x);
  const std::size_t zi = m.input_index(z);
  const auto hit = detail::strict_violation(m, xi, zi);
  if (!hit) return {true, std::nullopt};
  return {false, detail::equality_witness(m, hit->state, hit->input, hit->input == xi ? zi : xi)};
}

// The strict condition restricted to states that the measured input moves,
// plus non-vacuity: each input must move at least one state.
inline PredicateReport complementary_restricted(const MealyAutomaton& m, char x = 'x', char z = 'z') {
  if (x == z) fail(ErrorCode::kInvalidArgument, "complementarity needs two distinct inputs");
  const std::size_t xi = m.input_index(x);
  const std::size_t zi = m.input_index(z);
  const auto r = detail::restricted_check(m, xi, zi);
  switch (r.failure) {
    case detail::RestrictedFailure::kNone: return {true, std::nullopt};
    case detail::RestrictedFailure::kViolation:
      return {false, detail::equality_witness(m, r.hit.state, r.hit.input, r.hit.input == xi ? zi : xi)};
    case detail::RestrictedFailure::kVacuous: {
      const char a = m.inputs()[r.hit.input];
      return {false, Witness{std::nullopt, a, std::string("delta(q,") + a + ")=q for every state q"}};
    }
  }
  return {false, std::nullopt};
}

// { q : delta(q, a) = q }.
inline std::vector<StateId> eigenstates(const MealyAutomaton& m, char a) {
  const std::size_t ai = m.input_index(a);
  std::vector<StateId> out;
  for (StateId q = 0; q < m.num_states(); ++q) {
    if (m.next(q, ai) == q) out.push_back(q);
  }
  return out;
}

// Four-state qubit-like automaton. p_a is the x-eigenstate with x-value a,
// q_b the z-eigenstate with z-value b:
//   delta(p_a, x) = p_a     omega(p_a, x) = a
//   delta(p_a, z) = q_a     omega(p_a, z) = a
//   delta(q_b, z) = q_b     omega(q_b, z) = b
//   delta(q_b, x) = p_!b    omega(q_b, x) = !b
// States are numbered p0=0, p1=1, q0=2, q1=3.
inline MealyAutomaton canonical_example() {
  MealyAutomaton m(4, "xz", {"p0", "p1", "q0", "q1"});
  constexpr StateId p[2] = {0, 1};
  constexpr StateId q[2] = {2, 3};
  for (Bit a = 0; a < 2; ++a) {
    m.set(p[a], 'x', p[a], a);
    m.set(p[a], 'z', q[a], a);
    m.set(q[a], 'z', q[a], a);
    m.set(q[a], 'x', p[1 - a], static_cast<Bit>(1 - a));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Black box and E_M

// Hidden automaton and state; only the io-log is observable.
class BlackBox {
 public:
  explicit BlackBox(MealyAutomaton m, StateId start = 0) : m_(std::move(m)), state_(start) {
    if (start >= m_.num_states()) fail(ErrorCode::kInvalidArgument, "start state out of range");
  }

  Bit feed(char a, bool preparation = false) {
    const std::size_t ai = m_.input_index(a);
    const Bit out = m_.output(state_, ai);
    state_ = m_.next(state_, ai);
    log_.push_back({a, out, preparation});
    return out;
  }

  // One E_M trial from the current state: feed x then z, return the z output.
  Bit trial() {
    feed('x');
    const Bit out = feed('z');
    outcomes_.push_back(out);
    return out;
  }

  const IoLog& io_log() const noexcept { return log_; }
  const BitString& outcomes() const noexcept { return outcomes_; }

  // Hidden internals, for experiment plumbing and tests only.
  const MealyAutomaton& automaton() const noexcept { return m_; }
  StateId state() const noexcept { return state_; }

 private:
  MealyAutomaton m_;
  StateId state_;
  IoLog log_;
  BitString outcomes_;
};

// Same-box repetition: each round feeds x as preparation (output discarded),
// then runs the xz trial and records the z output.
inline BitString run_em(BlackBox& box, std::uint64_t repetitions) {
  if (repetitions < 1) fail(ErrorCode::kInvalidArgument, "run_em needs at least one repetition");
  BitString out;
  out.reserve(repetitions);
  for (std::uint64_t r = 0; r < repetitions; ++r) {
    box.feed('x', true);
    out.push_back(box.trial());
  }
  return out;
}

// State at each repetition boundary is f(q) = delta(delta(delta(q,x),x),z).
inline StateId em_round(const MealyAutomaton& m, StateId q) {
  return m.delta(m.delta(m.delta(q, 'x'), 'x'), 'z');
}

// Exact (transient, period) of the repetition-boundary state sequence.
inline std::pair<std::uint64_t, std::uint64_t> em_state_cycle(const MealyAutomaton& m, StateId start) {
  return analysis::floyd_cycle([&m](StateId q) { return em_round(m, q); }, start);
}

class EmExperiment final : public Experiment {
 public:
  explicit EmExperiment(BlackBox box) : box_(std::move(box)) {}

  std::string name() const override { return "mealy-em"; }

  // The hidden state is offered so that unrestricted extractors can be
  // studied; the complementarity-restricted set never admits it.
  Scope offered_scope() const override {
    Scope s;
    s.trial_index = true;
    s.io_log = true;
    s.hidden_state = true;
    return s;
  }

  const BlackBox& box() const noexcept { return box_; }

 protected:
  void do_prepare(const Preparation& prep, std::uint64_t) override {
    if (const auto* f = std::get_if<FeedPreparation>(&prep)) {
      for (char a : f->symbols) box_.feed(a, true);
    } else if (!std::holds_alternative<ResetPreparation>(prep)) {
      unsupported(prep);
    }
    hidden_ = BitString::from_uint(box_.state());
  }

  HiddenParameter do_parameter() const override {
    HiddenParameter lambda;
    lambda.io_log = &box_.io_log();
    lambda.outcome_history = &box_.outcomes();
    lambda.hidden_state = &hidden_;
    return lambda;
  }

  Bit do_perform() override { return box_.trial(); }

 private:
  BlackBox box_;
  BitString hidden_;
};

inline EmExperiment em_experiment(BlackBox box) { return EmExperiment(std::move(box)); }

// Past trial outcomes, oldest first.
inline Extractor history_extractor() {
  Scope scope;
  scope.io_log = true;
  return {"history", scope, [](const TrialView& v) { return v.outcome_history(); }};
}

// Every output bit in the io-log, preparation outputs included.
inline Extractor io_log_extractor() {
  Scope scope;
  scope.io_log = true;
  return {"io-log", scope, [](const TrialView& v) {
            BitString out;
            for (const auto& e : v.io_log()) out.push_back(e.output);
            return out;
          }};
}

// Reads the hidden automaton state. Not admissible under complementarity.
inline Extractor state_extractor() {
  Scope scope;
  scope.hidden_state = true;
  return {"hidden-state", scope, [](const TrialView& v) { return v.hidden_state(); }};
}

// Knows the tables; from the state bits computes the xz outcome.
inline Predictor automaton_predictor(MealyAutomaton m) {
  return {"automaton-oracle", [m = std::move(m)](const BitString& state_bits, Fuel& fuel) {
            fuel.burn(state_bits.size());
            std::uint64_t q = 0;
            for (Bit b : state_bits) q = (q << 1) | b;
            if (state_bits.empty() || q >= m.num_states()) return Prediction::kWithheld;
            return predict_bit(m.omega(m.delta(static_cast<StateId>(q), 'x'), 'z'));
          }};
}

// Xi_C: extractors limited to the io-log and the trial index.
inline ExtractorSet complementarity_restricted_set() {
  Scope allowed;
  allowed.io_log = true;
  allowed.trial_index = true;
  ExtractorSet set("xi-c", "reads only the io-log and trial index, never the automaton state or tables",
                   scope_within(allowed));
  set.add(history_extractor());
  set.add(io_log_extractor());
  set.add(trial_index_extractor());
  set.add(null_extractor());
  return set;
}

// ---------------------------------------------------------------------------
// Enumeration

enum class Predicate : unsigned {
  kOutputStable,
  kStrict,
  kRestricted,
  kWitnessed,  // complementary_witnessed(z, x)
};

constexpr std::string_view to_string(Predicate p) {
  switch (p) {
    case Predicate::kOutputStable: return "output-stable";
    case Predicate::kStrict: return "strict";
    case Predicate::kRestricted: return "restricted";
    case Predicate::kWitnessed: return "witnessed";
  }
  return "?";
}

inline constexpr std::size_t kMaxEnumerationStates = 4;

struct SizeSummary {
  std::size_t states = 0;
  std::uint64_t total = 0;
  // conjunction[mask] counts automata satisfying every predicate whose bit is
  // set in mask (bit i refers to predicates[i]); mask 0 is the total.
  std::vector<std::uint64_t> conjunction;
};

struct EnumerationSummary {
  std::vector<Predicate> predicates;
  std::vector<SizeSummary> sizes;
  std::vector<MealyAutomaton> exemplars;  // satisfy every requested predicate
};

namespace detail {

// Fixed-capacity tables over Sigma = {x, z}; x is input 0, z is input 1.
struct SmallTables {
  std::size_t n = 0;
  std::array<StateId, 2 * kMaxEnumerationStates> nxt{};
  std::array<Bit, 2 * kMaxEnumerationStates> out{};

  std::size_t num_states() const { return n; }
  std::size_t num_inputs() const { return 2; }
  StateId next(StateId q, std::size_t a) const { return nxt[2 * q + a]; }
  Bit output(StateId q, std::size_t a) const { return out[2 * q + a]; }

  MealyAutomaton to_automaton() const {
    MealyAutomaton m(n, "xz");
    for (StateId q = 0; q < n; ++q) {
      m.set(q, 'x', next(q, 0), output(q, 0));
      m.set(q, 'z', next(q, 1), output(q, 1));
    }
    return m;
  }
};

inline bool evaluate(Predicate p, const SmallTables& t) {
  switch (p) {
    case Predicate::kOutputStable: return !stability_violation(t);
    case Predicate::kStrict: return !strict_violation(t, 0, 1);
    case Predicate::kRestricted: return restricted_check(t, 0, 1).failure == RestrictedFailure::kNone;
    case Predicate::kWitnessed: return disturbance_witness(t, 1, 0).has_value();
  }
  return false;
}

inline std::uint64_t ipow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

// Decodes delta index d (base-n digits, state-major, x before z) and omega
// index o (bit i = output of transition i).
inline void decode(SmallTables& t, std::uint64_t d, std::uint64_t o) {
  for (std::size_t i = 0; i < 2 * t.n; ++i) {
    t.nxt[i] = static_cast<StateId>(d % t.n);
    d /= t.n;
    t.out[i] = static_cast<Bit>((o >> i) & 1U);
  }
}

}  // namespace detail

// Raw enumeration (no isomorphism reduction) of every automaton over {x, z}
// with 1..q_max states. Delta tables are split across threads; per-thread
// histograms are merged in order, so results are deterministic.
inline EnumerationSummary enumerate_automata(std::size_t q_max, std::vector<Predicate> predicates,
                                             std::size_t max_exemplars = 0, unsigned threads = 0) {
  if (q_max < 1) fail(ErrorCode::kInvalidArgument, "q_max must be >= 1");
  if (q_max > kMaxEnumerationStates) {
    fail(ErrorCode::kEnumerationTooLarge,
         "q_max=" + std::to_string(q_max) + " exceeds " + std::to_string(kMaxEnumerationStates));
  }
  if (predicates.size() > 4) fail(ErrorCode::kInvalidArgument, "at most four predicates");
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());

  EnumerationSummary summary;
  summary.predicates = predicates;
  const std::size_t masks = std::size_t{1} << predicates.size();
  const std::size_t all = masks - 1;

  for (std::size_t n = 1; n <= q_max; ++n) {
    const std::uint64_t deltas = detail::ipow(n, 2 * n);
    const std::uint64_t omegas = std::uint64_t{1} << (2 * n);

    struct Partial {
      std::vector<std::uint64_t> hist;
      std::vector<MealyAutomaton> exemplars;
    };
    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, deltas));
    std::vector<Partial> partials(workers, Partial{std::vector<std::uint64_t>(masks, 0), {}});
    auto work = [&](unsigned w) {
      Partial& part = partials[w];
      detail::SmallTables t;
      t.n = n;
      const std::uint64_t begin = deltas * w / workers;
      const std::uint64_t end = deltas * (w + 1) / workers;
      for (std::uint64_t d = begin; d < end; ++d) {
        for (std::uint64_t o = 0; o < omegas; ++o) {
          detail::decode(t, d, o);
          std::size_t bits = 0;
          for (std::size_t i = 0; i < predicates.size(); ++i) {
            if (detail::evaluate(predicates[i], t)) bits |= std::size_t{1} << i;
          }
          ++part.hist[bits];
          if (bits == all && part.exemplars.size() < max_exemplars) part.exemplars.push_back(t.to_automaton());
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w);
    work(0);
    for (auto& th : pool) th.join();

    std::vector<std::uint64_t> hist(masks, 0);
    for (auto& part : partials) {
      for (std::size_t b = 0; b < masks; ++b) hist[b] += part.hist[b];
      for (auto& e : part.exemplars) {
        if (summary.exemplars.size() < max_exemplars) summary.exemplars.push_back(std::move(e));
      }
    }
    SizeSummary size;
    size.states = n;
    size.total = deltas * omegas;
    size.conjunction.assign(masks, 0);
    for (std::size_t mask = 0; mask < masks; ++mask) {
      for (std::size_t b = 0; b < masks; ++b) {
        if ((b & mask) == mask) size.conjunction[mask] += hist[b];
      }
    }
    summary.sizes.push_back(std::move(size));
  }
  return summary;
}

// Visits every automaton over {x, z} with exactly n states (n <= 4).
template <typename F>
void for_each_automaton(std::size_t n, F&& visit) {
  if (n < 1 || n > kMaxEnumerationStates) fail(ErrorCode::kEnumerationTooLarge, "n out of range");
  detail::SmallTables t;
  t.n = n;
  const std::uint64_t deltas = detail::ipow(n, 2 * n);
  const std::uint64_t omegas = std::uint64_t{1} << (2 * n);
  for (std::uint64_t d = 0; d < deltas; ++d) {
    for (std::uint64_t o = 0; o < omegas; ++o) {
      detail::decode(t, d, o);
      visit(t.to_automaton());
    }
  }
}

// ---------------------------------------------------------------------------
// Text format
//
//   # comment
//   states p0 p1 q0 q1
//   inputs xz
//   p0 x -> p0 0
//   ...
//
// One transition line per (state, input) pair, each exactly once. Blank lines
// and '#' comments are ignored by the parser; print() emits the canonical
// form (no comments, state-major then input order) and parse(print(m)) == m.

inline std::string print_automaton(const MealyAutomaton& m) {
  std::ostringstream out;
  out << "states";
  for (StateId q = 0; q < m.num_states(); ++q) out << ' ' << m.state_name(q);
  out << "\ninputs " << m.inputs() << '\n';
  for (StateId q = 0; q < m.num_states(); ++q) {
    for (std::size_t a = 0; a < m.num_inputs(); ++a) {
      out << m.state_name(q) << ' ' << m.inputs()[a] << " -> " << m.state_name(m.next(q, a)) << ' '
          << static_cast<int>(m.output(q, a)) << '\n';
    }
  }
  return out.str();
}

inline MealyAutomaton parse_automaton(std::string_view text) {
  std::vector<std::string> names;
  std::string inputs;
  std::optional<MealyAutomaton> m;
  std::vector<bool> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto error = [&line_no](const std::string& what) {
    fail(ErrorCode::kParseError, "automaton line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::vector<std::string> words;
    for (std::string w; tokens >> w;) words.push_back(w);
    if (words.empty()) continue;
    if (words[0] == "states") {
      if (!names.empty()) error("duplicate states line");
      names.assign(words.begin() + 1, words.end());
      if (names.empty()) error("no states");
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (std::find(names.begin() + static_cast<std::ptrdiff_t>(i) + 1, names.end(), names[i]) != names.end()) {
          error("duplicate state '" + names[i] + "'");
        }
      }
    } else if (words[0] == "inputs") {
      if (!inputs.empty()) error("duplicate inputs line");
      if (words.size() != 2) error("inputs line takes one word of symbols");
      inputs = words[1];
    } else {
      if (names.empty() || inputs.empty()) error("transition before states/inputs header");
      if (!m) {
        try {
          m.emplace(names.size(), inputs, names);
        } catch (const Error& e) {
          error(e.what());
        }
        seen.assign(names.size() * inputs.size(), false);
      }
      if (words.size() != 5 || words[2] != "->" || words[1].size() != 1) {
        error("expected '<state> <input> -> <state> <bit>'");
      }
      const auto from = m->find_state(words[0]);
      const auto to = m->find_state(words[3]);
      if (!from) error("unknown state '" + words[0] + "'");
      if (!to) error("unknown state '" + words[3] + "'");
      const char a = words[1][0];
      if (inputs.find(a) == std::string::npos) error("unknown input '" + words[1] + "'");
      if (words[4] != "0" && words[4] != "1") error("output must be 0 or 1");
      const std::size_t idx = *from * inputs.size() + inputs.find(a);
      if (seen[idx]) error("duplicate transition for (" + words[0] + "," + words[1] + ")");
      seen[idx] = true;
      m->set(*from, a, *to, static_cast<Bit>(words[4][0] - '0'));
    }
  }
  if (!m) fail(ErrorCode::kParseError, "automaton has no transitions");
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      fail(ErrorCode::kParseError, "missing transition for (" + m->state_name(static_cast<StateId>(i / inputs.size())) +
                                       "," + std::string(1, inputs[i % inputs.size()]) + ")");
    }
  }
  return *m;
}

}  // namespace predlab::mealy
