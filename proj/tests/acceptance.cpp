// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "predlab/analysis.hpp"
#include "predlab/bitstreams.hpp"
#include "predlab/core.hpp"
#include "predlab/dyadic.hpp"
#include "predlab/mealy.hpp"
#include "predlab/quantum.hpp"

using namespace predlab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back(what);
    }
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// AC1: window(k+1) with the identity predictor attains k_correct = 1000.
Outcome ac1() {
  Outcome o;
  for (std::uint64_t k : {1U, 8U, 32U}) {
    const auto start = Clock::now();
    auto e = dyadic::dyadic_experiment(k, dyadic::fresh_noise_seeds(0xACE1 + k));
    const auto r = run_trials(e, reset_repetition(), dyadic::window_extractor(k + 1, k + 1),
                              dyadic::identity_predictor(), 1000, 1000, false);
    const double t = seconds_since(start);
    o.require(r.verdict == Verdict::kAttainedK, "k=" + std::to_string(k) + " verdict " + std::string(to_string(r.verdict)));
    o.require(r.counts.correct == 1000 && r.counts.incorrect == 0, "k=" + std::to_string(k) + " counts");
    o.require(t < 1.0, "k=" + std::to_string(k) + " took " + fmt(t) + " s");
    o.notes.push_back("k=" + std::to_string(k) + " " + fmt(t) + " s");
  }
  return o;
}

// AC2: the adversary leaves every shipped predictor with zero correct
// predictions for every window inside the precision bound.
Outcome ac2() {
  Outcome o;
  const std::uint64_t k = 8;
  const std::uint64_t trials = 10000;
  const auto start = Clock::now();
  std::size_t runs = 0;
  for (std::uint64_t l = 1; l <= k; ++l) {
    for (std::uint64_t lo = 1; lo <= l; ++lo) {
      for (std::uint64_t hi = lo; hi <= l; ++hi) {
        const Extractor x = dyadic::window_extractor(lo, hi);
        for (const auto& p : dyadic::shipped_predictors()) {
          auto e = dyadic::dyadic_experiment(k, dyadic::fresh_noise_seeds(l));
          const auto r = run_trials(e, dyadic::adversarial_repetition(p, x, l, k), x, p, trials, trials, false);
          ++runs;
          const bool all_withheld = r.counts.withheld == r.n_used && r.n_used == trials;
          o.require(r.counts.correct == 0 && (r.verdict == Verdict::kRefuted || all_withheld),
                    x.id() + " " + p.id() + " l=" + std::to_string(l) + " correct=" + std::to_string(r.counts.correct));
        }
      }
    }
  }
  const double t = seconds_since(start);
  o.require(t < 5.0, "took " + fmt(t) + " s");
  o.notes.push_back(std::to_string(runs) + " runs, " + fmt(t) + " s");
  return o;
}

// AC3: E_M output is period two on the canonical box and eventually periodic
// within |Q| repetitions for every automaton with |Q| <= 3.
Outcome ac3() {
  Outcome o;
  const auto start = Clock::now();
  mealy::BlackBox box(mealy::canonical_example(), 2);
  const BitString out = mealy::run_em(box, 10000);
  bool alternating = true;
  for (std::size_t i = 0; i < out.size(); ++i) alternating = alternating && out[i] == (i % 2 == 0 ? 1 : 0);
  o.require(alternating, "canonical output is not 1,0,1,0,...");
  const auto canonical = analysis::detect_cycle(out, out.size());
  o.require(canonical.found && canonical.transient == 0 && canonical.period == 2, "canonical cycle report");

  std::uint64_t checked = 0, violations = 0;
  for (std::size_t n = 1; n <= 3; ++n) {
    mealy::for_each_automaton(n, [&](const mealy::MealyAutomaton& m) {
      for (mealy::StateId q = 0; q < n; ++q) {
        ++checked;
        const auto [transient, period] = mealy::em_state_cycle(m, q);
        mealy::BlackBox b(m, q);
        const BitString seq = mealy::run_em(b, 4 * n);
        const auto c = analysis::detect_cycle(seq, 4 * n);
        if (transient + period > n || !c.found || c.transient + c.period > n) ++violations;
      }
    });
  }
  o.require(violations == 0, std::to_string(violations) + " automata exceed transient + period <= |Q|");
  const double t = seconds_since(start);
  o.require(t < 60.0, "took " + fmt(t) + " s");
  o.notes.push_back(std::to_string(checked) + " (automaton, start) pairs, " + fmt(t) + " s");
  return o;
}

// AC4: predicate algebra.
Outcome ac4() {
  Outcome o;
  std::uint64_t strict = 0, counterexamples = 0;
  for (std::size_t n = 1; n <= 3; ++n) {
    mealy::for_each_automaton(n, [&](const mealy::MealyAutomaton& m) {
      if (!mealy::complementary_strict(m).holds) return;
      ++strict;
      if (!mealy::eigenstates(m, 'x').empty() || !mealy::eigenstates(m, 'z').empty()) ++counterexamples;
    });
  }
  o.require(counterexamples == 0, std::to_string(counterexamples) + " strict automata with eigenstates");
  const auto c = mealy::canonical_example();
  o.require(mealy::output_stable(c).holds, "canonical not output-stable");
  o.require(mealy::complementary_restricted(c).holds, "canonical not restricted-complementary");
  const auto one = mealy::enumerate_automata(1, {mealy::Predicate::kStrict, mealy::Predicate::kOutputStable});
  o.require(one.sizes[0].conjunction[1] == 0, "|Q|=1 strict count " + std::to_string(one.sizes[0].conjunction[1]));
  o.require(one.sizes[0].conjunction[2] == 4, "|Q|=1 output-stable count " + std::to_string(one.sizes[0].conjunction[2]));
  o.notes.push_back(std::to_string(strict) + " strict automata, " + std::to_string(counterexamples) + " counterexamples");
  return o;
}

// AC5: Born frequency and repeatability.
Outcome ac5() {
  Outcome o;
  const auto start = Clock::now();
  const quantum::QubitState psi = quantum::QubitState::zero();
  const quantum::QubitState phi(0.5, std::sqrt(0.75));
  o.require(std::abs(quantum::overlap(psi, phi) * quantum::overlap(psi, phi) - 0.25) < 1e-12, "overlap^2 != 0.25");
  auto e = quantum::ec_experiment(psi, phi, quantum::OutcomeSource::born(2024));
  const std::uint64_t n = 100000;
  std::uint64_t ones = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    e.prepare(ResetPreparation{});
    ones += e.perform();
  }
  const double freq = static_cast<double>(ones) / static_cast<double>(n);
  o.require(std::abs(freq - 0.25) <= 0.0041, "frequency " + fmt(freq));

  SplitMix64 draws(77);
  std::uint64_t mismatches = 0;
  quantum::QubitState state = psi;
  for (int i = 0; i < 10000; ++i) {
    const quantum::ProjectiveMeasurement m{i % 2 ? phi : psi};
    const auto [first, post] = quantum::measure(state, m, draws.uniform());
    const auto [second, post2] = quantum::measure(post, m, draws.uniform());
    if (first != second) ++mismatches;
    state = post2;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " repeat-measurement mismatches");
  const double t = seconds_since(start);
  o.require(t < 2.0, "took " + fmt(t) + " s");
  o.notes.push_back("frequency " + fmt(freq) + ", " + fmt(t) + " s");
  return o;
}

// AC6: scripted transcript and pi hex digits.
Outcome ac6() {
  Outcome o;
  const BitStream script = make_rule_stream("pi-prime-index");
  auto e = quantum::ec_experiment(quantum::QubitState::zero(), quantum::QubitState(0.5, std::sqrt(0.75)),
                                  quantum::OutcomeSource::scripted(script));
  BitString transcript;
  for (int i = 0; i < 1000; ++i) {
    e.prepare(ResetPreparation{});
    transcript.push_back(e.perform());
  }
  o.require(transcript == script.prefix(1000), "scripted transcript differs from pi-prime-index");

  std::ifstream in(std::string(PREDLAB_GOLDEN_DIR) + "/pi_hex_1000.txt");
  std::string published;
  in >> published;
  o.require(published.size() == 1000, "golden pi digits missing");
  std::size_t mismatches = 0;
  for (std::size_t n = 1; n <= published.size(); ++n) {
    if ("0123456789ABCDEF"[bbp_hex_digit(n)] != published[n - 1]) ++mismatches;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " hex digit mismatches");
  return o;
}

// AC7: normality diagnostics with pinned golden deviations.
Outcome ac7() {
  Outcome o;
  const auto alt = analysis::borel_normality_check(make_rule_stream("alternating").prefix(1 << 14), 2);
  o.require(!alt.pass, "alternating passed");
  const auto constant = analysis::borel_normality_check(make_rule_stream("constant(0)").prefix(1 << 14), 1);
  o.require(!constant.pass, "constant passed");

  struct Golden {
    const char* label;
    BitStream stream;
    std::vector<double> deviations;
  };
  const std::vector<Golden> goldens = {
      {"champernowne-binary", make_rule_stream("champernowne-binary"), {0.020832061767578125, 0.0291748046875}},
      {"noise(42)", make_seeded_noise_stream(42), {0.00012969970703125, 0.00215911865234375}},
  };
  for (const auto& g : goldens) {
    const auto r = analysis::borel_normality_check(g.stream.prefix(1 << 18), 2);
    for (std::size_t l = 0; l < 2; ++l) {
      o.require(std::abs(r.blocks[l].max_deviation - g.deviations[l]) < 1e-15,
                std::string(g.label) + " golden deviation mismatch at l=" + std::to_string(l + 1));
    }
    std::string detail = std::string(g.label) + " n=2^18 L=2";
    for (const auto& b : r.blocks) {
      detail += " l=" + std::to_string(b.length) + ":" + fmt(b.max_deviation) + (b.pass ? "<=" : ">") + fmt(b.threshold);
    }
    o.require(r.pass, detail + " FAILS");
    if (r.pass) o.notes.push_back(detail);
  }
  return o;
}

// AC8: evaluator monotonicity and determinism over generated cases.
Outcome ac8() {
  Outcome o;
  std::mt19937_64 rng(0x5EED);
  std::uint64_t checked = 0;
  while (checked < 1000) {
    const auto c = testgen::random_case(rng);
    if (!c.make()->offered_scope().covers(c.extractor.scope())) continue;
    const std::string violation = testgen::check_evaluator_invariants(c, rng);
    o.require(violation.empty(), violation + " [" + c.label + " " + c.extractor.id() + " " + c.predictor.id() + "]");
    ++checked;
  }
  o.notes.push_back(std::to_string(checked) + " generated cases");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 dyadic window(k+1) + identity attains 1000 correct for k in {1,8,32}, < 1 s each", ac1},
      {"AC2 adversary yields 0 correct for all shipped predictors and windows hi <= l <= k = 8, < 5 s", ac2},
      {"AC3 E_M period 2 on canonical box; transient + period <= |Q| for |Q| <= 3, < 60 s", ac3},
      {"AC4 strict => no eigenstates; canonical stable and restricted; |Q|=1 counts 0 and 4", ac4},
      {"AC5 Born frequency within 0.25 +- 0.0041 at n = 1e5; repeat measurement certain, < 2 s", ac5},
      {"AC6 scripted pi-prime-index transcript; hex digits 1..1000 of pi", ac6},
      {"AC7 normality: alternating/constant fail; champernowne and noise(42) pass at L = 2, n = 2^18", ac7},
      {"AC8 evaluator monotonicity and determinism over >= 1000 generated cases", ac8},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.notes.push_back(std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << "\n";
    for (const auto& note : o.notes) std::cout << "       " << note << "\n";
    if (!o.pass) ++failures;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed") << "\n";
  return failures == 0 ? 0 : 1;
}
