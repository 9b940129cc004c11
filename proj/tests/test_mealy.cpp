#include <fstream>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "predlab/analysis.hpp"
#include "predlab/mealy.hpp"
#include "predlab/report_io.hpp"

using namespace predlab;
using namespace predlab::mealy;

namespace {

constexpr StateId kP0 = 0, kP1 = 1, kQ0 = 2, kQ1 = 3;

MealyAutomaton identity_automaton(std::size_t states, Bit z_output) {
  MealyAutomaton m(states);
  for (StateId q = 0; q < states; ++q) {
    m.set(q, 'x', q, 0);
    m.set(q, 'z', q, z_output);
  }
  return m;
}

MealyAutomaton strict_two_state() {
  MealyAutomaton m(2);
  m.set(0, 'x', 1, 0);
  m.set(1, 'x', 0, 1);
  m.set(0, 'z', 1, 0);
  m.set(1, 'z', 0, 1);
  return m;
}

// Re-evaluate a predicate's witness against the tables.
bool stable_violation_reproduces(const MealyAutomaton& m, const Witness& w) {
  const StateId q = *w.state;
  return m.omega(q, w.input) != m.omega(m.delta(q, w.input), w.input);
}

bool equality_reproduces(const MealyAutomaton& m, const Witness& w, char x, char z) {
  const char moved = w.input;
  const char observed = moved == x ? z : x;
  const StateId q = *w.state;
  return m.omega(q, observed) == m.omega(m.delta(q, moved), observed);
}

}  // namespace

TEST(Canonical, Tables) {
  const auto m = canonical_example();
  EXPECT_EQ(m.num_states(), 4U);
  EXPECT_EQ(m.delta(kP0, 'x'), kP0);
  EXPECT_EQ(m.omega(kP1, 'x'), 1);
  EXPECT_EQ(m.delta(kP1, 'z'), kQ1);
  EXPECT_EQ(m.delta(kQ0, 'x'), kP1);
  EXPECT_EQ(m.omega(kQ0, 'x'), 1);
  EXPECT_EQ(m.state_name(kQ1), "q1");
}

TEST(Canonical, FeedTrace) {
  BlackBox box(canonical_example(), kQ0);
  EXPECT_EQ(box.feed('x', true), 1);
  EXPECT_EQ(box.feed('x'), 1);
  EXPECT_EQ(box.feed('z'), 1);
  EXPECT_EQ(box.state(), kQ1);
  ASSERT_EQ(box.io_log().size(), 3U);
  EXPECT_TRUE(box.io_log()[0].preparation);
  EXPECT_FALSE(box.io_log()[2].preparation);
}

TEST(OutputStable, Examples) {
  EXPECT_TRUE(output_stable(canonical_example()).holds);
  std::mt19937_64 rng(41);
  for (int i = 0; i < 8; ++i) EXPECT_TRUE(output_stable(testgen::random_automaton(rng, 1)).holds);

  MealyAutomaton m(2, "xz", {"q0", "q1"});
  m.set(0, 'x', 1, 0);
  m.set(1, 'x', 1, 1);
  const auto r = output_stable(m);
  ASSERT_FALSE(r.holds);
  ASSERT_TRUE(r.witness && r.witness->state);
  EXPECT_EQ(*r.witness->state, 0U);
  EXPECT_EQ(r.witness->input, 'x');
  EXPECT_TRUE(stable_violation_reproduces(m, *r.witness));
}

TEST(Witnessed, Examples) {
  const auto r = complementary_witnessed(canonical_example(), 'z', 'x');
  ASSERT_TRUE(r.holds);
  EXPECT_EQ(*r.witness->state, kQ0);
  EXPECT_FALSE(complementary_witnessed(identity_automaton(3, 1), 'z', 'x').holds);
  std::mt19937_64 rng(42);
  for (int i = 0; i < 8; ++i) EXPECT_FALSE(complementary_witnessed(testgen::random_automaton(rng, 1), 'z', 'x').holds);
  EXPECT_THROW(complementary_witnessed(canonical_example(), 'x', 'x'), Error);
}

TEST(Strict, Examples) {
  const auto r = complementary_strict(canonical_example());
  ASSERT_FALSE(r.holds);
  EXPECT_EQ(*r.witness->state, kP0);
  EXPECT_EQ(r.witness->input, 'x');
  EXPECT_TRUE(equality_reproduces(canonical_example(), *r.witness, 'x', 'z'));
  std::mt19937_64 rng(43);
  for (int i = 0; i < 8; ++i) EXPECT_FALSE(complementary_strict(testgen::random_automaton(rng, 1)).holds);
  EXPECT_TRUE(complementary_strict(strict_two_state()).holds);
}

TEST(Restricted, Examples) {
  EXPECT_TRUE(complementary_restricted(canonical_example()).holds);
  const auto vacuous = complementary_restricted(identity_automaton(3, 0));
  EXPECT_FALSE(vacuous.holds);
  ASSERT_TRUE(vacuous.witness);
  EXPECT_FALSE(vacuous.witness->state.has_value());
  EXPECT_TRUE(complementary_restricted(strict_two_state()).holds);
}

TEST(Eigenstates, Examples) {
  EXPECT_EQ(eigenstates(canonical_example(), 'x'), (std::vector<StateId>{kP0, kP1}));
  EXPECT_EQ(eigenstates(canonical_example(), 'z'), (std::vector<StateId>{kQ0, kQ1}));
  EXPECT_TRUE(eigenstates(strict_two_state(), 'x').empty());
}

TEST(RunEm, Examples) {
  BlackBox from_q0(canonical_example(), kQ0);
  EXPECT_EQ(run_em(from_q0, 6).to_string(), "101010");
  BlackBox from_q1(canonical_example(), kQ1);
  EXPECT_EQ(run_em(from_q1, 4).to_string(), "0101");
  BlackBox still(identity_automaton(2, 0), 1);
  EXPECT_EQ(run_em(still, 5).to_string(), "00000");
  EXPECT_THROW(run_em(still, 0), Error);
}

TEST(RunEm, CanonicalStaysPeriodTwo) {
  BlackBox box(canonical_example(), kQ0);
  const BitString out = run_em(box, 10000);
  for (std::size_t i = 0; i < out.size(); ++i) ASSERT_EQ(out[i], i % 2 == 0 ? 1 : 0);
}

TEST(EmExperiment, Examples) {
  {
    auto e = em_experiment(BlackBox(canonical_example(), kQ0));
    const auto r = run_trials(e, same_box_repetition(), io_log_extractor(), constant_predictor(1), 3, 10);
    EXPECT_EQ(r.verdict, Verdict::kRefuted);
    EXPECT_EQ(r.n_used, 2U);
    EXPECT_EQ(r.trials[1].outcome, 0);
  }
  {
    auto e = em_experiment(BlackBox(canonical_example(), kQ0));
    const auto r = run_trials(e, same_box_repetition(), history_extractor(), negate_last_predictor(), 100, 101);
    EXPECT_EQ(r.verdict, Verdict::kAttainedK);
    EXPECT_EQ(r.counts, (Counts{100, 0, 1}));
  }
  {
    auto e = em_experiment(BlackBox(identity_automaton(3, 0), 2));
    const auto r = run_trials(e, same_box_repetition(), null_extractor(), constant_predictor(0), 50, 50);
    EXPECT_EQ(r.verdict, Verdict::kAttainedK);
  }
}

TEST(EmExperiment, StateExtractorNotInRestrictedSet) {
  ExtractorSet set = mealy::complementarity_restricted_set();
  EXPECT_FALSE(set.admits(state_extractor()));
  EXPECT_THROW(set.add(state_extractor()), Error);
  for (const auto& x : set.members()) EXPECT_FALSE(x.scope().hidden_state);
}

TEST(EmExperiment, OracleWithStateAccessAttains) {
  auto e = em_experiment(BlackBox(canonical_example(), kQ0));
  const auto r = run_trials(e, same_box_repetition(), state_extractor(), automaton_predictor(canonical_example()), 100, 100);
  EXPECT_EQ(r.verdict, Verdict::kAttainedK);
}

TEST(Properties, PigeonholePeriodicity) {
  for (std::size_t n = 1; n <= 3; ++n) {
    for_each_automaton(n, [n](const MealyAutomaton& m) {
      for (StateId start = 0; start < n; ++start) {
        const auto [transient, period] = em_state_cycle(m, start);
        ASSERT_GE(period, 1U);
        ASSERT_LE(transient + period, n);
        BlackBox box(m, start);
        const BitString out = run_em(box, 4 * n + transient + period);
        for (std::size_t i = transient; i + period < out.size(); ++i) ASSERT_EQ(out[i], out[i + period]);
      }
    });
  }
}

TEST(Properties, EmStateCycleMatchesBruteForce) {
  std::mt19937_64 rng(44);
  for (int round = 0; round < 500; ++round) {
    const auto m = testgen::random_automaton(rng, rng() % 4 + 1);
    const auto start = static_cast<StateId>(rng() % m.num_states());
    std::vector<StateId> seen{start};
    for (;;) {
      const StateId next = em_round(m, seen.back());
      const auto it = std::find(seen.begin(), seen.end(), next);
      if (it != seen.end()) {
        const auto t = static_cast<std::uint64_t>(it - seen.begin());
        ASSERT_EQ(em_state_cycle(m, start), std::make_pair(t, seen.size() - t));
        break;
      }
      seen.push_back(next);
    }
  }
}

TEST(Properties, StrictImpliesNoEigenstates) {
  for (std::size_t n = 1; n <= 3; ++n) {
    for_each_automaton(n, [](const MealyAutomaton& m) {
      if (!complementary_strict(m).holds) return;
      ASSERT_TRUE(eigenstates(m, 'x').empty());
      ASSERT_TRUE(eigenstates(m, 'z').empty());
      ASSERT_TRUE(complementary_restricted(m).holds);
    });
  }
}

TEST(Properties, WitnessesReproduce) {
  std::mt19937_64 rng(45);
  for (int round = 0; round < 3000; ++round) {
    const auto m = testgen::random_automaton(rng, rng() % 4 + 1);
    if (const auto r = output_stable(m); !r.holds) {
      ASSERT_TRUE(stable_violation_reproduces(m, *r.witness));
    }
    if (const auto r = complementary_strict(m); !r.holds) {
      ASSERT_TRUE(equality_reproduces(m, *r.witness, 'x', 'z'));
    }
    if (const auto r = complementary_restricted(m); !r.holds) {
      ASSERT_TRUE(r.witness);
      if (r.witness->state) {
        ASSERT_NE(m.delta(*r.witness->state, r.witness->input), *r.witness->state);
        ASSERT_TRUE(equality_reproduces(m, *r.witness, 'x', 'z'));
      } else {
        for (StateId q = 0; q < m.num_states(); ++q) ASSERT_EQ(m.delta(q, r.witness->input), q);
      }
    }
    if (const auto r = complementary_witnessed(m, 'z', 'x'); r.holds) {
      const StateId s = *r.witness->state;
      ASSERT_NE(m.omega(s, 'z'), m.omega(m.delta(s, 'x'), 'z'));
    }
  }
}

TEST(Enumeration, SingleStateCounts) {
  const auto s = enumerate_automata(1, {Predicate::kStrict, Predicate::kOutputStable});
  ASSERT_EQ(s.sizes.size(), 1U);
  EXPECT_EQ(s.sizes[0].total, 4U);
  EXPECT_EQ(s.sizes[0].conjunction[1], 0U);
  EXPECT_EQ(s.sizes[0].conjunction[2], 4U);
}

TEST(Enumeration, MatchesGoldenCounts) {
  std::ifstream in(std::string(PREDLAB_GOLDEN_DIR) + "/enumeration_q3.json");
  ASSERT_TRUE(in);
  const Json golden = Json::parse(in);
  const std::vector<Predicate> all = {Predicate::kOutputStable, Predicate::kStrict, Predicate::kRestricted,
                                      Predicate::kWitnessed};
  const auto s = enumerate_automata(3, all);
  ASSERT_EQ(s.sizes.size(), golden.size());
  for (std::size_t i = 0; i < s.sizes.size(); ++i) {
    EXPECT_EQ(s.sizes[i].total, golden[i]["total"].get<std::uint64_t>());
    for (std::size_t mask = 0; mask < 16; ++mask) {
      std::string name;
      for (std::size_t b = 0; b < 4; ++b) {
        if (mask >> b & 1) name += (name.empty() ? "" : "&") + std::string(to_string(all[b]));
      }
      if (name.empty()) name = "any";
      EXPECT_EQ(s.sizes[i].conjunction[mask], golden[i]["counts"][name].get<std::uint64_t>()) << name;
    }
  }
}

TEST(Enumeration, DeterministicAcrossThreadCounts) {
  const std::vector<Predicate> ps = {Predicate::kRestricted, Predicate::kWitnessed};
  const auto one = enumerate_automata(3, ps, 5, 1);
  const auto four = enumerate_automata(3, ps, 5, 4);
  for (std::size_t i = 0; i < one.sizes.size(); ++i) EXPECT_EQ(one.sizes[i].conjunction, four.sizes[i].conjunction);
  ASSERT_EQ(one.exemplars.size(), 5U);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_TRUE(one.exemplars[i] == four.exemplars[i]);
    EXPECT_TRUE(complementary_restricted(one.exemplars[i]).holds);
  }
}

TEST(Enumeration, TooLarge) {
  try {
    enumerate_automata(5, {Predicate::kStrict});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEnumerationTooLarge);
  }
}

TEST(TextFormat, RoundTrip) {
  const auto m = canonical_example();
  const std::string text = print_automaton(m);
  EXPECT_TRUE(parse_automaton(text) == m);
  EXPECT_EQ(print_automaton(parse_automaton(text)), text);
  std::mt19937_64 rng(46);
  for (int i = 0; i < 200; ++i) {
    const auto r = testgen::random_automaton(rng, rng() % 4 + 1);
    ASSERT_TRUE(parse_automaton(print_automaton(r)) == r);
  }
}

TEST(TextFormat, CommentsAndErrors) {
  const auto m = parse_automaton(
      "# two states\n"
      "states a b\n"
      "inputs xz\n"
      "a x -> b 1   # flip\n"
      "a z -> a 0\n"
      "b x -> a 0\n"
      "b z -> b 1\n");
  EXPECT_EQ(m.delta(0, 'x'), 1U);
  EXPECT_EQ(m.omega(1, 'z'), 1);
  for (const char* bad : {"states a\ninputs xz\na x -> c 0\n", "states a\ninputs xz\na x -> a 2\n",
                          "a x -> a 0\n", "states a\ninputs xz\na x -> a 0\na x -> a 1\n",
                          "states a\ninputs xz\na x a 0\n", ""}) {
    try {
      parse_automaton(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParseError) << bad;
    }
  }
}
