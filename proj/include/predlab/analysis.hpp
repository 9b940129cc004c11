#pragma once

// Sequence diagnostics: eventual periodicity and block-frequency normality.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "predlab/bit_string.hpp"
#include "predlab/error.hpp"

namespace predlab::analysis {

// Floyd's tortoise-and-hare cycle finding for an iterated map x_{i+1} = f(x_i).
// Returns (transient, period): x_transient is the first element that repeats
// and the cycle length is period. Both are exact and minimal.
template <typename T, typename F>
std::pair<std::uint64_t, std::uint64_t> floyd_cycle(F&& f, const T& x0) {
  T tortoise = f(x0);
  T hare = f(f(x0));
  while (!(tortoise == hare)) {
    tortoise = f(tortoise);
    hare = f(f(hare));
  }
  std::uint64_t transient = 0;
  tortoise = x0;
  while (!(tortoise == hare)) {
    tortoise = f(tortoise);
    hare = f(hare);
    ++transient;
  }
  std::uint64_t period = 1;
  hare = f(tortoise);
  while (!(tortoise == hare)) {
    hare = f(hare);
    ++period;
  }
  return {transient, period};
}

struct CycleReport {
  bool found = false;
  std::uint64_t transient = 0;
  std::uint64_t period = 0;
  std::uint64_t bound = 0;
  friend bool operator==(const CycleReport&, const CycleReport&) = default;
};

// True when seq[i] == seq[i + period] for transient <= i < bound - period.
inline bool consistent_cycle(const BitString& seq, std::uint64_t bound, std::uint64_t transient,
                             std::uint64_t period) {
  if (period == 0 || transient + period > bound) return false;
  for (std::uint64_t i = transient; i + period < bound; ++i) {
    if (seq[i] != seq[i + period]) return false;
  }
  return true;
}

// Eventual periodicity on the first `bound` elements of seq. A candidate
// (transient, period) must be consistent and its periodic part must show at
// least two full periods. The reported pair minimises transient + period,
// then period.
//
// For a fixed period the smallest consistent transient is found by scanning
// back from the end for the last mismatch; the search is O(bound^2) in the
// worst case and stops once no longer period can beat the best pair.
inline CycleReport detect_cycle(const BitString& seq, std::uint64_t bound) {
  if (bound < 2 || seq.size() < bound) {
    fail(ErrorCode::kInvalidArgument, "detect_cycle needs 2 <= bound <= |seq|");
  }
  CycleReport best;
  best.bound = bound;
  for (std::uint64_t period = 1; 2 * period <= bound; ++period) {
    if (best.found && period >= best.transient + best.period) break;
    std::uint64_t transient = 0;
    for (std::uint64_t i = bound - period; i-- > 0;) {
      if (seq[i] != seq[i + period]) {
        transient = i + 1;
        break;
      }
    }
    if (bound - transient < 2 * period) continue;
    if (!best.found || transient + period < best.transient + best.period) {
      best.found = true;
      best.transient = transient;
      best.period = period;
    }
  }
  return best;
}

// Frequencies of the floor(n / l) non-overlapping l-blocks, indexed by the
// block's value read most significant bit first.
inline std::vector<double> block_frequencies(const BitString& seq, unsigned l) {
  if (l < 1 || l > 24) fail(ErrorCode::kInvalidArgument, "block length must be in 1..24");
  if (seq.size() < l) fail(ErrorCode::kInsufficientLength, "sequence shorter than one block");
  const std::size_t blocks = seq.size() / l;
  std::vector<std::uint64_t> counts(std::size_t{1} << l, 0);
  for (std::size_t b = 0; b < blocks; ++b) {
    std::size_t value = 0;
    for (unsigned i = 0; i < l; ++i) value = (value << 1) | seq[b * l + i];
    ++counts[value];
  }
  std::vector<double> freq(counts.size());
  for (std::size_t v = 0; v < counts.size(); ++v) {
    freq[v] = static_cast<double>(counts[v]) / static_cast<double>(blocks);
  }
  return freq;
}

// Default tolerance sqrt(l * log2(n) / n).
inline double normality_threshold(unsigned l, std::uint64_t n) {
  const double nd = static_cast<double>(n);
  return std::sqrt(static_cast<double>(l) * std::log2(nd) / nd);
}

struct BlockResult {
  unsigned length = 0;
  std::vector<double> frequencies;
  double max_deviation = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct NormalityReport {
  std::uint64_t n = 0;
  std::vector<BlockResult> blocks;
  bool pass = false;
};

inline constexpr std::uint64_t kMinBlocks = 16;

// Checks block lengths 1..max_length on the whole of seq (n = |seq|). A block
// length passes when every block frequency is within the threshold of 2^-l.
inline NormalityReport borel_normality_check(const BitString& seq, unsigned max_length) {
  if (max_length < 1) fail(ErrorCode::kInvalidArgument, "max block length must be >= 1");
  const std::uint64_t n = seq.size();
  if (n / max_length < kMinBlocks) {
    fail(ErrorCode::kInsufficientLength, std::to_string(n) + " bits give fewer than " +
                                             std::to_string(kMinBlocks) + " blocks of length " +
                                             std::to_string(max_length));
  }
  NormalityReport report;
  report.n = n;
  report.pass = true;
  for (unsigned l = 1; l <= max_length; ++l) {
    BlockResult r;
    r.length = l;
    r.frequencies = block_frequencies(seq, l);
    const double expected = std::ldexp(1.0, -static_cast<int>(l));
    for (double f : r.frequencies) r.max_deviation = std::max(r.max_deviation, std::abs(f - expected));
    r.threshold = normality_threshold(l, n);
    r.pass = r.max_deviation <= r.threshold;
    report.pass = report.pass && r.pass;
    report.blocks.push_back(std::move(r));
  }
  return report;
}

}  // namespace predlab::analysis
