#pragma once

// Dyadic map d(x1 x2 x3 ...) = x2 x3 ... on seed sequences. Experiment E_k
// iterates the map k times and reports the first bit, i.e. seed bit k+1.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "predlab/bitstreams.hpp"
#include "predlab/core.hpp"

namespace predlab::dyadic {

// ---------------------------------------------------------------------------
// Seed sources

inline SeedSource fixed_seed(BitStream seed) {
  return [seed = std::move(seed)](std::uint64_t) { return seed; };
}

// Trial i gets the noise stream seeded with the i-th SplitMix64 word of base.
inline SeedSource fresh_noise_seeds(std::uint64_t base) {
  return [base](std::uint64_t trial) { return BitStream::seeded_noise(splitmix64_word(base, trial - 1)); };
}

// Cycles through the list.
inline SeedSource seed_list(std::vector<BitStream> seeds) {
  if (seeds.empty()) fail(ErrorCode::kInvalidArgument, "seed list is empty");
  return [seeds = std::move(seeds)](std::uint64_t trial) { return seeds[(trial - 1) % seeds.size()]; };
}

// ---------------------------------------------------------------------------
// Experiment

class DyadicExperiment final : public Experiment {
 public:
  DyadicExperiment(std::uint64_t k, SeedSource source) : k_(k), source_(std::move(source)) {
    if (k_ < 1) fail(ErrorCode::kInvalidArgument, "dyadic experiment needs k >= 1");
  }

  std::string name() const override { return "dyadic(k=" + std::to_string(k_) + ")"; }

  Scope offered_scope() const override {
    Scope s;
    s.seed_bits = SeedRange{};
    s.trial_index = true;
    return s;
  }

  std::uint64_t k() const noexcept { return k_; }
  const std::optional<BitStream>& seed() const noexcept { return seed_; }

 protected:
  void do_prepare(const Preparation& prep, std::uint64_t trial) override {
    if (std::holds_alternative<ResetPreparation>(prep)) {
      seed_ = source_(trial);
    } else if (const auto* s = std::get_if<SeedPreparation>(&prep)) {
      seed_ = s->seed;
    } else {
      unsupported(prep);
    }
  }

  HiddenParameter do_parameter() const override {
    HiddenParameter lambda;
    lambda.seed = &*seed_;
    return lambda;
  }

  Bit do_perform() override { return BitStream::shifted(*seed_, k_).bit(1); }

 private:
  std::uint64_t k_;
  SeedSource source_;
  std::optional<BitStream> seed_;
};

inline DyadicExperiment dyadic_experiment(std::uint64_t k, SeedSource source) {
  return DyadicExperiment(k, std::move(source));
}

// ---------------------------------------------------------------------------
// Extractors

// Seed bits lo..hi, 1-based inclusive.
struct WindowExtractor {
  std::uint64_t lo = 1;
  std::uint64_t hi = 1;

  Extractor extractor() const {
    if (lo < 1 || lo > hi) fail(ErrorCode::kInvalidArgument, "window needs 1 <= lo <= hi");
    Scope scope;
    scope.seed_bits = SeedRange{lo, hi};
    return {"window(" + std::to_string(lo) + "," + std::to_string(hi) + ")", scope,
            [lo = lo, hi = hi](const TrialView& v) { return v.seed_bits(lo, hi); }};
  }

  operator Extractor() const { return extractor(); }  // NOLINT(google-explicit-constructor)
};

inline Extractor window_extractor(std::uint64_t lo, std::uint64_t hi) { return WindowExtractor{lo, hi}; }

// Window plus the trial index appended as a binary numeral.
inline Extractor window_with_index_extractor(std::uint64_t lo, std::uint64_t hi) {
  Extractor window = window_extractor(lo, hi);
  Scope scope = window.scope();
  scope.trial_index = true;
  return {"window(" + std::to_string(lo) + "," + std::to_string(hi) + ")+trial-index", scope,
          [lo, hi](const TrialView& v) {
            BitString out = v.seed_bits(lo, hi);
            out.append(BitString::from_uint(v.trial_index()));
            return out;
          }};
}

// Extractors that read no seed bit beyond position l, plus the trial index.
inline ExtractorSet precision_limited_family(std::uint64_t l) {
  if (l < 1) fail(ErrorCode::kInvalidArgument, "precision bound must be >= 1");
  Scope allowed;
  allowed.seed_bits = SeedRange{1, l};
  allowed.trial_index = true;
  ExtractorSet family("precision-limited(l=" + std::to_string(l) + ")",
                      "reads at most seed bits 1.." + std::to_string(l) + " and the trial index",
                      scope_within(allowed));
  for (std::uint64_t lo = 1; lo <= l; ++lo) {
    for (std::uint64_t hi = lo; hi <= l; ++hi) family.add(window_extractor(lo, hi));
  }
  family.add(trial_index_extractor());
  return family;
}

// ---------------------------------------------------------------------------
// Predictors

// Passes the last input bit through; withholds on empty input.
inline Predictor identity_predictor() {
  return {"identity", [](const BitString& input, Fuel&) {
            if (input.empty()) return Prediction::kWithheld;
            return predict_bit(input.back());
          }};
}

inline std::vector<Predictor> shipped_predictors() {
  return {identity_predictor(), constant_predictor(0), constant_predictor(1), majority_predictor(),
          withhold_predictor()};
}

// ---------------------------------------------------------------------------
// Adversary

// Builds each trial's seed so the predictor is wrong whenever it commits:
// bits 1..l come from `visible` (all zero by default), the extractor and
// predictor are evaluated on that seed, and bit k+1 is set to the negation of
// a committed prediction (0 after a withheld one). All other bits are 0.
// Requires the extractor to see no seed bit past l, and l <= k.
inline RepetitionProcedure adversarial_repetition(Predictor predictor, Extractor extractor, std::uint64_t l,
                                                  std::uint64_t k, std::optional<SeedSource> visible = {}) {
  const Scope& scope = extractor.scope();
  if (l > k) {
    fail(ErrorCode::kScopeTooWide, "precision bound l=" + std::to_string(l) + " exceeds k=" + std::to_string(k));
  }
  if (scope.seed_bits && scope.seed_bits->hi > l) {
    fail(ErrorCode::kScopeTooWide, "extractor '" + extractor.id() + "' reads seed bits up to " +
                                       std::to_string(scope.seed_bits->hi) + " > l=" + std::to_string(l));
  }
  if (scope.io_log || scope.preparation || scope.hidden_state) {
    fail(ErrorCode::kScopeTooWide, "extractor '" + extractor.id() + "' reads beyond seed bits and trial index");
  }
  return {"adversarial(" + predictor.id() + "," + extractor.id() + ",l=" + std::to_string(l) + ")",
          [predictor = std::move(predictor), extractor = std::move(extractor), l, k,
           visible = std::move(visible)](std::uint64_t trial, std::span<const TrialRecord>) -> Preparation {
            BitString bits = visible ? (*visible)(trial).prefix(l) : BitString(std::vector<Bit>(l, 0));
            for (std::uint64_t j = l + 1; j <= k; ++j) bits.push_back(0);
            const BitStream candidate = BitStream::padded(bits);
            HiddenParameter lambda;
            lambda.seed = &candidate;
            lambda.trial_index = trial;
            const Prediction p = predictor(extractor(lambda));
            bits.push_back(p == Prediction::kZero ? 1 : 0);
            return SeedPreparation{BitStream::padded(std::move(bits))};
          }};
}

inline RepetitionProcedure adversarial_repetition(Predictor predictor, const WindowExtractor& window,
                                                  std::uint64_t l, std::uint64_t k) {
  return adversarial_repetition(std::move(predictor), window.extractor(), l, k);
}

}  // namespace predlab::dyadic
