#pragma once

// Two-dimensional toy measurement E_C: prepare |psi>, project onto |phi>.
// Outcomes come either from Born weights driven by a seeded generator or
// from a hidden script of predetermined values. hbar = 1; outcome 1 is the
// projection onto |phi>.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "predlab/bitstreams.hpp"
#include "predlab/core.hpp"
#include "predlab/error.hpp"

namespace predlab::quantum {

using Complex = std::complex<double>;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kCommuteTolerance = 1e-9;
// Born weights this close to 0 or 1 are treated as certain.
inline constexpr double kCertainty = 1e-12;

class QubitState {
 public:
  // Throws NOT_NORMALISED unless |a0|^2 + |a1|^2 = 1 within 1e-12.
  QubitState(Complex a0, Complex a1) : a0_(a0), a1_(a1) {
    const double norm = std::norm(a0) + std::norm(a1);
    if (!(std::abs(norm - 1.0) <= kNormTolerance)) {
      fail(ErrorCode::kNotNormalised, "qubit state has squared norm " + std::to_string(norm));
    }
  }

  static QubitState normalised(Complex a0, Complex a1) {
    const double norm = std::sqrt(std::norm(a0) + std::norm(a1));
    if (norm == 0.0) fail(ErrorCode::kNotNormalised, "zero vector cannot be normalised");
    return {a0 / norm, a1 / norm};
  }

  // cos(theta/2)|0> + e^{i phi_} sin(theta/2)|1>.
  static QubitState bloch(double theta, double phase = 0.0) {
    return {Complex(std::cos(theta / 2), 0.0), std::polar(std::sin(theta / 2), phase)};
  }

  static QubitState zero() { return {1.0, 0.0}; }
  static QubitState one() { return {0.0, 1.0}; }

  const Complex& a0() const noexcept { return a0_; }
  const Complex& a1() const noexcept { return a1_; }

  // Unit vector orthogonal to this one.
  QubitState orthogonal() const { return {-std::conj(a1_), std::conj(a0_)}; }

  friend bool operator==(const QubitState&, const QubitState&) = default;

 private:
  Complex a0_;
  Complex a1_;
};

inline Complex inner(const QubitState& psi, const QubitState& phi) {
  return std::conj(psi.a0()) * phi.a0() + std::conj(psi.a1()) * phi.a1();
}

// |<psi|phi>| clamped to [0, 1].
inline double overlap(const QubitState& psi, const QubitState& phi) {
  return std::min(1.0, std::abs(inner(psi, phi)));
}

// Projectors onto psi and phi fail to commute iff 0 < |<psi|phi>| < 1.
inline bool non_commuting(const QubitState& psi, const QubitState& phi) {
  const double o = overlap(psi, phi);
  return o > kCommuteTolerance && o < 1.0 - kCommuteTolerance;
}

// Projective measurement onto |target>.
struct ProjectiveMeasurement {
  QubitState target;
};

// Outcome 1 iff draw < |<state|target>|^2; the post-state is target on 1 and
// the normalised component of state orthogonal to target on 0.
inline std::pair<Bit, QubitState> measure(const QubitState& state, const ProjectiveMeasurement& m, double draw) {
  if (!(draw >= 0.0 && draw < 1.0)) fail(ErrorCode::kInvalidArgument, "draw must lie in [0, 1)");
  const Complex amp = inner(m.target, state);
  const double p1 = std::norm(amp);
  if (p1 >= 1.0 - kCertainty) return {1, m.target};
  if (p1 <= kCertainty) return {0, state};
  if (draw < p1) return {1, m.target};
  const Complex r0 = state.a0() - amp * m.target.a0();
  const Complex r1 = state.a1() - amp * m.target.a1();
  return {0, QubitState::normalised(r0, r1)};
}

// ---------------------------------------------------------------------------
// E_C

struct OutcomeSource {
  enum class Mode { kBorn, kScripted };

  Mode mode = Mode::kBorn;
  std::uint64_t seed = 0;
  std::optional<BitStream> script;

  static OutcomeSource born(std::uint64_t seed) { return {Mode::kBorn, seed, std::nullopt}; }
  static OutcomeSource scripted(BitStream script) { return {Mode::kScripted, 0, std::move(script)}; }
};

// 256-bit description of the prepared state: the IEEE-754 patterns of
// Re a0, Im a0, Re a1, Im a1.
inline BitString describe_preparation(const QubitState& psi) {
  BitString out;
  for (double v : {psi.a0().real(), psi.a0().imag(), psi.a1().real(), psi.a1().imag()}) {
    const auto word = std::bit_cast<std::uint64_t>(v);
    for (int b = 63; b >= 0; --b) out.push_back(static_cast<Bit>((word >> b) & 1U));
  }
  return out;
}

// Each trial resets to psi and measures the projector onto phi. Scripted mode
// emits the next script bit and collapses to the matching eigenstate; when
// the outcome is certain (overlap 0 or 1) the certain value is emitted and
// the script is not consumed.
class EcExperiment final : public Experiment {
 public:
  EcExperiment(QubitState psi, QubitState phi, OutcomeSource source)
      : psi_(psi), phi_(phi), source_(std::move(source)), state_(psi), rng_(source_.seed),
        preparation_(describe_preparation(psi)) {
    if (source_.mode == OutcomeSource::Mode::kScripted) {
      if (!source_.script) fail(ErrorCode::kInvalidArgument, "scripted outcome source needs a script");
      cursor_.emplace(*source_.script);
    }
  }

  std::string name() const override { return "qubit-ec"; }

  // The script is offered as hidden state so that unrestricted extractors
  // can be studied; Born mode has no pre-existing value to offer.
  Scope offered_scope() const override {
    Scope s;
    s.trial_index = true;
    s.preparation = true;
    s.hidden_state = source_.mode == OutcomeSource::Mode::kScripted;
    return s;
  }

  // Overlap 0 or 1: commuting projectors, no complementarity.
  bool degenerate() const { return !non_commuting(psi_, phi_); }

  const QubitState& state() const noexcept { return state_; }

 protected:
  void do_prepare(const Preparation& prep, std::uint64_t) override {
    if (!std::holds_alternative<ResetPreparation>(prep)) unsupported(prep);
    state_ = psi_;
    if (cursor_) hidden_ = BitString{cursor_->peek()};
  }

  HiddenParameter do_parameter() const override {
    HiddenParameter lambda;
    lambda.preparation = &preparation_;
    if (cursor_) lambda.hidden_state = &hidden_;
    return lambda;
  }

  Bit do_perform() override {
    const ProjectiveMeasurement m{phi_};
    if (source_.mode == OutcomeSource::Mode::kBorn) {
      auto [bit, post] = measure(state_, m, rng_.uniform());
      state_ = post;
      return bit;
    }
    const double p1 = std::norm(inner(phi_, state_));
    Bit bit;
    if (p1 >= 1.0 - kCertainty) {
      bit = 1;
    } else if (p1 <= kCertainty) {
      bit = 0;
    } else {
      bit = cursor_->next();
    }
    state_ = bit ? phi_ : phi_.orthogonal();
    return bit;
  }

 private:
  QubitState psi_;
  QubitState phi_;
  OutcomeSource source_;
  QubitState state_;
  SplitMix64 rng_;
  std::optional<BitCursor> cursor_;
  BitString preparation_;
  BitString hidden_;
};

inline EcExperiment ec_experiment(QubitState psi, QubitState phi, OutcomeSource source) {
  return EcExperiment(psi, phi, std::move(source));
}

inline Extractor preparation_extractor() {
  Scope scope;
  scope.preparation = true;
  return {"preparation", scope, [](const TrialView& v) { return v.preparation(); }};
}

// Reads the predetermined value for the coming trial. Not admissible under
// complementarity.
inline Extractor script_extractor() {
  Scope scope;
  scope.hidden_state = true;
  return {"hidden-value", scope, [](const TrialView& v) { return v.hidden_state(); }};
}

// Extractors restricted by complementarity: preparation description and
// trial index only.
inline ExtractorSet complementarity_restricted_set() {
  Scope allowed;
  allowed.preparation = true;
  allowed.trial_index = true;
  ExtractorSet set("xi-complementarity", "reads only the preparation description and trial index",
                   scope_within(allowed));
  set.add(preparation_extractor());
  set.add(trial_index_extractor());
  set.add(null_extractor());
  return set;
}

}  // namespace predlab::quantum
