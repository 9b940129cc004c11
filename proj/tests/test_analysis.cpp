#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "predlab/analysis.hpp"
#include "predlab/bitstreams.hpp"
#include "predlab/mealy.hpp"

using namespace predlab;
using namespace predlab::analysis;

namespace {

// Brute force over every (transient, period) pair.
CycleReport brute_force_cycle(const BitString& seq, std::uint64_t bound) {
  CycleReport best;
  best.bound = bound;
  for (std::uint64_t t = 0; t < bound; ++t) {
    for (std::uint64_t p = 1; t + 2 * p <= bound; ++p) {
      bool ok = true;
      for (std::uint64_t i = t; i + p < bound; ++i) ok = ok && seq[i] == seq[i + p];
      if (!ok) continue;
      if (!best.found || t + p < best.transient + best.period ||
          (t + p == best.transient + best.period && p < best.period)) {
        best = {true, t, p, bound};
      }
    }
  }
  return best;
}

BitString eventually_periodic(std::mt19937_64& rng) {
  const BitString pre = testgen::random_bits(rng, rng() % 6);
  const BitString cyc = testgen::random_bits(rng, rng() % 6 + 1);
  return BitStream::periodic(pre, cyc).prefix(rng() % 30 + 2);
}

}  // namespace

TEST(Floyd, FindsTransientAndPeriod) {
  // 0 -> 1 -> 2 -> 3 -> 4 -> 2
  auto f = [](int x) { return x == 4 ? 2 : x + 1; };
  EXPECT_EQ(floyd_cycle(f, 0), std::make_pair(std::uint64_t{2}, std::uint64_t{3}));
  EXPECT_EQ(floyd_cycle([](int) { return 7; }, 7), std::make_pair(std::uint64_t{0}, std::uint64_t{1}));
}

TEST(DetectCycle, Examples) {
  EXPECT_EQ(detect_cycle(BitString::parse("101010"), 6), (CycleReport{true, 0, 2, 6}));
  EXPECT_EQ(detect_cycle(BitString::parse("0000"), 4), (CycleReport{true, 0, 1, 4}));
  EXPECT_EQ(detect_cycle(BitString::parse("01111"), 5), (CycleReport{true, 1, 1, 5}));
}

TEST(DetectCycle, NotFoundWithoutTwoPeriods) {
  EXPECT_FALSE(detect_cycle(BitString::parse("01"), 2).found);
  EXPECT_FALSE(detect_cycle(BitString::parse("0010"), 4).found);
}

TEST(DetectCycle, BoundLimitsTheView) {
  const BitString s = BitString::parse("1010100000");
  EXPECT_EQ(detect_cycle(s, 6), (CycleReport{true, 0, 2, 6}));
  EXPECT_EQ(detect_cycle(s, 10).transient, 5U);
}

TEST(DetectCycle, Preconditions) {
  EXPECT_THROW(detect_cycle(BitString::parse("0101"), 1), Error);
  EXPECT_THROW(detect_cycle(BitString::parse("0101"), 5), Error);
}

TEST(Properties, DetectCycleMatchesBruteForce) {
  std::mt19937_64 rng(61);
  for (int round = 0; round < 3000; ++round) {
    const BitString s = rng() % 3 ? eventually_periodic(rng) : testgen::random_bits(rng, rng() % 20 + 2);
    const std::uint64_t bound = rng() % (s.size() - 1) + 2;
    ASSERT_EQ(detect_cycle(s, bound), brute_force_cycle(s, bound)) << s.to_string() << " bound " << bound;
  }
}

TEST(Properties, DetectCycleInvariantAndMinimality) {
  std::mt19937_64 rng(62);
  for (int round = 0; round < 3000; ++round) {
    const BitString s = eventually_periodic(rng);
    const std::uint64_t bound = s.size();
    const auto r = detect_cycle(s, bound);
    if (!r.found) continue;
    for (std::uint64_t i = r.transient; i + r.period < bound; ++i) ASSERT_EQ(s[i], s[i + r.period]);
    for (std::uint64_t p = 1; r.transient + 2 * p <= bound; ++p) {
      if (consistent_cycle(s, bound, r.transient, p)) {
        ASSERT_EQ(p % r.period, 0U) << s.to_string() << " p=" << p << " reported " << r.period;
      }
    }
  }
}

TEST(Properties, RunEmOutputCycles) {
  for (std::size_t n = 1; n <= 3; ++n) {
    mealy::for_each_automaton(n, [n](const mealy::MealyAutomaton& m) {
      for (mealy::StateId start = 0; start < n; ++start) {
        mealy::BlackBox box(m, start);
        const BitString out = mealy::run_em(box, 4 * n);
        const auto r = detect_cycle(out, 4 * n);
        ASSERT_TRUE(r.found);
        ASSERT_LE(r.transient + r.period, n);
      }
    });
  }
}

TEST(BlockFrequencies, Examples) {
  EXPECT_EQ(block_frequencies(BitString::parse("010101"), 2), (std::vector<double>{0, 1, 0, 0}));
  EXPECT_EQ(block_frequencies(BitString::parse("0011"), 1), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(block_frequencies(BitString::parse("1111"), 2), (std::vector<double>{0, 0, 0, 1}));
  EXPECT_EQ(block_frequencies(BitString::parse("10110"), 2), (std::vector<double>{0, 0, 0.5, 0.5}));
}

TEST(Properties, FrequenciesSumToOne) {
  std::mt19937_64 rng(63);
  for (int round = 0; round < 500; ++round) {
    const BitString s = testgen::random_bits(rng, rng() % 200 + 8);
    const unsigned l = static_cast<unsigned>(rng() % 8 + 1);
    if (s.size() < l) continue;
    const auto f = block_frequencies(s, l);
    ASSERT_NEAR(std::accumulate(f.begin(), f.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(Normality, Threshold) {
  EXPECT_NEAR(normality_threshold(1, 1 << 18), 0.008286407592029853, 1e-15);
  EXPECT_NEAR(normality_threshold(2, 1 << 18), 0.01171875, 1e-15);
}

TEST(Normality, AlternatingFailsAtTwo) {
  const auto r = borel_normality_check(make_rule_stream("alternating").prefix(1 << 14), 2);
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(r.blocks[0].pass);
  EXPECT_FALSE(r.blocks[1].pass);
  EXPECT_DOUBLE_EQ(r.blocks[1].max_deviation, 0.75);
  EXPECT_DOUBLE_EQ(r.blocks[1].frequencies[1], 1.0);
}

TEST(Normality, ConstantFails) {
  const auto r = borel_normality_check(make_rule_stream("constant(0)").prefix(1 << 14), 1);
  EXPECT_FALSE(r.pass);
  EXPECT_DOUBLE_EQ(r.blocks[0].max_deviation, 0.5);
}

TEST(Normality, SeededNoiseGolden) {
  const auto r = borel_normality_check(make_seeded_noise_stream(42).prefix(1 << 18), 3);
  EXPECT_TRUE(r.pass);
  ASSERT_EQ(r.blocks.size(), 3U);
  EXPECT_DOUBLE_EQ(r.blocks[0].max_deviation, 0.00012969970703125);
  EXPECT_DOUBLE_EQ(r.blocks[1].max_deviation, 0.00215911865234375);
  EXPECT_DOUBLE_EQ(r.blocks[2].max_deviation, 0.002570638926082336);
}

TEST(Normality, ChampernowneGolden) {
  // Leading ones in every numeral bias short prefixes; the deviations decay
  // only like 1/log n.
  const auto r = borel_normality_check(make_rule_stream("champernowne-binary").prefix(1 << 18), 2);
  ASSERT_EQ(r.blocks.size(), 2U);
  EXPECT_DOUBLE_EQ(r.blocks[0].max_deviation, 0.020832061767578125);
  EXPECT_DOUBLE_EQ(r.blocks[1].max_deviation, 0.0291748046875);
}

TEST(Normality, InsufficientLength) {
  try {
    borel_normality_check(BitString::parse("0101010101010101010101010101010"), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientLength);
  }
  EXPECT_NO_THROW(borel_normality_check(make_rule_stream("alternating").prefix(32), 2));
}
