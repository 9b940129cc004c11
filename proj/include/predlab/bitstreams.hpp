#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "predlab/bbp.hpp"
#include "predlab/bit_string.hpp"
#include "predlab/error.hpp"

namespace predlab {

// SplitMix64 (Steele, Lea, Flood 2014). The w-th output (0-based) for a seed
// is mix(seed + (w + 1) * 0x9E3779B97F4A7C15), so any word is reachable in
// O(1) and the generator doubles as a counter-based stream.
inline constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t splitmix64_word(std::uint64_t seed, std::uint64_t word) {
  return splitmix64_mix(seed + (word + 1) * kSplitMixGamma);
}

// Sequential form, for callers that want an engine.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    state_ += kSplitMixGamma;
    return splitmix64_mix(state_);
  }

  // Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Primes

namespace detail {

inline std::vector<std::uint64_t> sieve_first_primes(std::uint64_t count) {
  if (count == 0) return {};
  // Rosser's bound p_n < n (ln n + ln ln n) for n >= 6.
  const double n = static_cast<double>(std::max<std::uint64_t>(count, 6));
  const auto limit = static_cast<std::size_t>(n * (std::log(n) + std::log(std::log(n)))) + 16;
  std::vector<bool> composite(limit + 1, false);
  std::vector<std::uint64_t> primes;
  primes.reserve(count);
  for (std::size_t i = 2; i <= limit && primes.size() < count; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::size_t m = i * i; m <= limit; m += i) composite[m] = true;
  }
  return primes;
}

inline constexpr std::uint64_t kCachedPrimes = 100'000;

inline const std::vector<std::uint64_t>& cached_primes() {
  static const std::vector<std::uint64_t> primes = sieve_first_primes(kCachedPrimes);
  return primes;
}

}  // namespace detail

// j-th prime, 1-based: 2, 3, 5, 7, 11, ...
inline std::uint64_t nth_prime(std::uint64_t j) {
  if (j == 0) fail(ErrorCode::kInvalidArgument, "prime index is 1-based");
  if (j <= detail::kCachedPrimes) return detail::cached_primes()[j - 1];
  return detail::sieve_first_primes(j).back();
}

// ---------------------------------------------------------------------------
// Streams

enum class Rule { kChampernowneBinary, kPiBinary, kPiPrimeIndex, kConstant, kAlternating };

struct RuleParams {
  Bit constant_bit = 0;
};

class BitStream;

namespace detail {

struct PeriodicKind {
  BitString prefix;
  BitString cycle;
};

struct RuleKind {
  Rule rule;
  RuleParams params;
};

struct NoiseKind {
  std::uint64_t seed;
};

struct FileKind {
  std::string path;
  std::shared_ptr<const std::vector<std::uint8_t>> bytes;
  std::uint64_t total_bits;
};

// d^k applied to a base stream: bit j of the result is bit j + k of the base.
struct ShiftedKind {
  std::shared_ptr<const BitStream> base;
  std::uint64_t shift;
};

inline Bit champernowne_bit(std::uint64_t j) {
  // Numerals of width w occupy w * 2^(w-1) consecutive bits.
  std::uint64_t offset = j - 1;
  for (unsigned width = 1; width < 63; ++width) {
    const std::uint64_t count = std::uint64_t{1} << (width - 1);
    const std::uint64_t span = count * width;
    if (offset < span) {
      const std::uint64_t value = count + offset / width;
      const unsigned pos = static_cast<unsigned>(offset % width);
      return static_cast<Bit>((value >> (width - 1 - pos)) & 1U);
    }
    offset -= span;
  }
  fail(ErrorCode::kInvalidArgument, "champernowne index out of range");
}

inline Bit pi_bit(std::uint64_t j) {
  const std::uint64_t digit = bbp_hex_digit((j - 1) / 4 + 1);
  return static_cast<Bit>((digit >> (3 - (j - 1) % 4)) & 1U);
}

inline BitString pi_prefix(std::uint64_t n) {
  BitString out;
  out.reserve(n);
  for (std::uint64_t hex = 1; out.size() < n; hex += 16) {
    const std::uint64_t block = bbp_hex_block(hex);
    for (int b = 63; b >= 0 && out.size() < n; --b) {
      out.push_back(static_cast<Bit>((block >> b) & 1U));
    }
  }
  return out;
}

}  // namespace detail

// Lazy infinite bit source. A stream is an immutable descriptor; bit j is a
// pure function of the descriptor and j, so copies and concurrent readers
// always agree. Positions are 1-based.
class BitStream {
 public:
  static BitStream periodic(BitString prefix, BitString cycle) {
    if (cycle.empty()) fail(ErrorCode::kInvalidArgument, "periodic stream needs a non-empty cycle");
    return BitStream(detail::PeriodicKind{std::move(prefix), std::move(cycle)});
  }

  // Finite string followed by zeros.
  static BitStream padded(BitString bits) { return periodic(std::move(bits), BitString{0}); }

  static BitStream rule(Rule r, RuleParams params = {}) {
    if (params.constant_bit > 1) fail(ErrorCode::kInvalidArgument, "constant rule bit must be 0 or 1");
    return BitStream(detail::RuleKind{r, params});
  }

  static BitStream seeded_noise(std::uint64_t seed) { return BitStream(detail::NoiseKind{seed}); }

  // Raw bytes, most significant bit first within each byte.
  static BitStream from_file(const std::string& path, std::optional<std::uint64_t> total_bits = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::kIoError, "cannot open bit file '" + path + "'");
    auto bytes = std::make_shared<std::vector<std::uint8_t>>(
        std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    const std::uint64_t available = bytes->size() * 8;
    const std::uint64_t total = total_bits.value_or(available);
    if (total > available) {
      fail(ErrorCode::kInvalidArgument, "bit file '" + path + "' holds " +
                                            std::to_string(available) + " bits, " +
                                            std::to_string(total) + " declared");
    }
    return BitStream(detail::FileKind{path, std::move(bytes), total});
  }

  // d^k(stream): drop the first k bits.
  static BitStream shifted(const BitStream& base, std::uint64_t k) {
    if (const auto* s = std::get_if<detail::ShiftedKind>(&base.kind_)) {
      return BitStream(detail::ShiftedKind{s->base, s->shift + k});
    }
    return BitStream(detail::ShiftedKind{std::make_shared<const BitStream>(base), k});
  }

  // Bit at 1-based position j.
  Bit bit(std::uint64_t j) const {
    if (j == 0) fail(ErrorCode::kInvalidArgument, "stream positions are 1-based");
    return std::visit([j](const auto& k) { return bit_of(k, j); }, kind_);
  }

  // Bits 1..n.
  BitString prefix(std::uint64_t n) const {
    if (const auto* f = std::get_if<detail::FileKind>(&kind_)) {
      if (n > f->total_bits) exhausted(*f, n);
    }
    if (const auto* r = std::get_if<detail::RuleKind>(&kind_)) {
      if (r->rule == Rule::kPiBinary) return detail::pi_prefix(n);
      if (r->rule == Rule::kPiPrimeIndex) {
        if (n == 0) return {};
        const BitString pi = detail::pi_prefix(nth_prime(n));
        BitString out;
        out.reserve(n);
        const auto& cached = detail::cached_primes();
        const auto primes = n <= cached.size() ? cached : detail::sieve_first_primes(n);
        for (std::uint64_t i = 0; i < n; ++i) out.push_back(pi[primes[i] - 1]);
        return out;
      }
    }
    BitString out;
    out.reserve(n);
    for (std::uint64_t j = 1; j <= n; ++j) out.push_back(bit(j));
    return out;
  }

  // Total number of readable bits, or nullopt for infinite streams.
  std::optional<std::uint64_t> length() const {
    if (const auto* f = std::get_if<detail::FileKind>(&kind_)) return f->total_bits;
    if (const auto* s = std::get_if<detail::ShiftedKind>(&kind_)) {
      const auto base = s->base->length();
      if (!base) return std::nullopt;
      return *base > s->shift ? *base - s->shift : 0;
    }
    return std::nullopt;
  }

  std::string describe() const {
    return std::visit([](const auto& k) { return describe_kind(k); }, kind_);
  }

 private:
  using Kind = std::variant<detail::PeriodicKind, detail::RuleKind, detail::NoiseKind,
                            detail::FileKind, detail::ShiftedKind>;

  explicit BitStream(Kind kind) : kind_(std::move(kind)) {}

  static Bit bit_of(const detail::PeriodicKind& k, std::uint64_t j) {
    if (j <= k.prefix.size()) return k.prefix[j - 1];
    return k.cycle[(j - k.prefix.size() - 1) % k.cycle.size()];
  }

  static Bit bit_of(const detail::RuleKind& k, std::uint64_t j) {
    switch (k.rule) {
      case Rule::kChampernowneBinary: return detail::champernowne_bit(j);
      case Rule::kPiBinary: return detail::pi_bit(j);
      case Rule::kPiPrimeIndex: return detail::pi_bit(nth_prime(j));
      case Rule::kConstant: return k.params.constant_bit;
      case Rule::kAlternating: return static_cast<Bit>((j + 1) % 2);
    }
    return 0;
  }

  static Bit bit_of(const detail::NoiseKind& k, std::uint64_t j) {
    const std::uint64_t word = splitmix64_word(k.seed, (j - 1) / 64);
    return static_cast<Bit>((word >> (63 - (j - 1) % 64)) & 1U);
  }

  static Bit bit_of(const detail::FileKind& k, std::uint64_t j) {
    if (j > k.total_bits) exhausted(k, j);
    const std::uint8_t byte = (*k.bytes)[(j - 1) / 8];
    return static_cast<Bit>((byte >> (7 - (j - 1) % 8)) & 1U);
  }

  static Bit bit_of(const detail::ShiftedKind& k, std::uint64_t j) {
    return k.base->bit(j + k.shift);
  }

  [[noreturn]] static void exhausted(const detail::FileKind& k, std::uint64_t j) {
    fail(ErrorCode::kStreamExhausted, "bit " + std::to_string(j) + " requested from '" + k.path +
                                          "' which holds " + std::to_string(k.total_bits));
  }

  static std::string describe_kind(const detail::PeriodicKind& k) {
    return "periodic(prefix=" + k.prefix.to_string() + ",cycle=" + k.cycle.to_string() + ")";
  }
  static std::string describe_kind(const detail::RuleKind& k) {
    switch (k.rule) {
      case Rule::kChampernowneBinary: return "rule(champernowne-binary)";
      case Rule::kPiBinary: return "rule(pi-binary)";
      case Rule::kPiPrimeIndex: return "rule(pi-prime-index)";
      case Rule::kConstant: return "rule(constant(" + std::to_string(k.params.constant_bit) + "))";
      case Rule::kAlternating: return "rule(alternating)";
    }
    return "rule(?)";
  }
  static std::string describe_kind(const detail::NoiseKind& k) {
    return "seeded-noise(" + std::to_string(k.seed) + ")";
  }
  static std::string describe_kind(const detail::FileKind& k) {
    return "file(" + k.path + "," + std::to_string(k.total_bits) + ")";
  }
  static std::string describe_kind(const detail::ShiftedKind& k) {
    return "shift(" + k.base->describe() + "," + std::to_string(k.shift) + ")";
  }

  Kind kind_;
};

// Rule lookup by name. Accepts champernowne-binary, pi-binary,
// pi-prime-index, alternating (0101...), constant (bit from params) and the
// inline forms constant(0) / constant(1).
inline BitStream make_rule_stream(std::string_view rule_id, RuleParams params = {}) {
  if (rule_id == "champernowne-binary") return BitStream::rule(Rule::kChampernowneBinary);
  if (rule_id == "pi-binary") return BitStream::rule(Rule::kPiBinary);
  if (rule_id == "pi-prime-index") return BitStream::rule(Rule::kPiPrimeIndex);
  if (rule_id == "alternating") return BitStream::rule(Rule::kAlternating);
  if (rule_id == "constant") return BitStream::rule(Rule::kConstant, params);
  if (rule_id == "constant(0)") return BitStream::rule(Rule::kConstant, {0});
  if (rule_id == "constant(1)") return BitStream::rule(Rule::kConstant, {1});
  fail(ErrorCode::kUnknownRule, "unknown stream rule '" + std::string(rule_id) + "'");
}

inline BitStream make_seeded_noise_stream(std::uint64_t seed) { return BitStream::seeded_noise(seed); }

inline BitString prefix(const BitStream& stream, std::uint64_t n) { return stream.prefix(n); }

// Packs bits most significant first, zero-padding the final byte.
inline void write_bit_file(const std::string& path, const BitString& bits) {
  std::vector<char> bytes((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) bytes[i / 8] = static_cast<char>(bytes[i / 8] | (0x80 >> (i % 8)));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot write bit file '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

// Sequential reader over a stream; the stream itself is never mutated.
class BitCursor {
 public:
  explicit BitCursor(BitStream stream) : stream_(std::move(stream)) {}

  Bit next() { return stream_.bit(next_++); }
  Bit peek() const { return stream_.bit(next_); }
  std::uint64_t position() const noexcept { return next_; }
  const BitStream& stream() const noexcept { return stream_; }

 private:
  BitStream stream_;
  std::uint64_t next_ = 1;
};

}  // namespace predlab
