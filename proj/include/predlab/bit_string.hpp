#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "predlab/error.hpp"

namespace predlab {

using Bit = std::uint8_t;

// Finite ordered sequence of 0/1 values. Element access is 0-based like any
// container; stream positions elsewhere in the library are 1-based.
class BitString {
 public:
  BitString() = default;

  BitString(std::initializer_list<int> bits) {
    bits_.reserve(bits.size());
    for (int b : bits) push_back(check(b));
  }

  explicit BitString(std::vector<Bit> bits) : bits_(std::move(bits)) {
    for (Bit b : bits_) check(b);
  }

  // Parses a string of '0'/'1' characters.
  static BitString parse(std::string_view text) {
    BitString out;
    out.bits_.reserve(text.size());
    for (char c : text) {
      if (c != '0' && c != '1') {
        fail(ErrorCode::kInvalidArgument,
             "bit string contains non-binary character '" + std::string(1, c) + "'");
      }
      out.bits_.push_back(static_cast<Bit>(c - '0'));
    }
    return out;
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }

  Bit operator[](std::size_t i) const { return bits_[i]; }
  Bit back() const { return bits_.back(); }

  void push_back(Bit b) { bits_.push_back(check(b)); }
  void append(const BitString& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
  }
  void reserve(std::size_t n) { bits_.reserve(n); }

  BitString substr(std::size_t pos, std::size_t count) const {
    BitString out;
    if (pos >= bits_.size()) return out;
    const std::size_t end = std::min(bits_.size(), pos + count);
    out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(pos),
                     bits_.begin() + static_cast<std::ptrdiff_t>(end));
    return out;
  }

  bool starts_with(const BitString& other) const {
    if (other.size() > size()) return false;
    for (std::size_t i = 0; i < other.size(); ++i) {
      if (bits_[i] != other.bits_[i]) return false;
    }
    return true;
  }

  std::size_t count_ones() const {
    std::size_t n = 0;
    for (Bit b : bits_) n += b;
    return n;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (Bit b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
  }

  const std::vector<Bit>& bits() const noexcept { return bits_; }
  auto begin() const noexcept { return bits_.begin(); }
  auto end() const noexcept { return bits_.end(); }

  friend bool operator==(const BitString&, const BitString&) = default;

  // Binary numeral of value, most significant bit first; "0" for zero.
  static BitString from_uint(std::uint64_t value) {
    BitString out;
    if (value == 0) {
      out.push_back(0);
      return out;
    }
    int top = 63;
    while (((value >> top) & 1U) == 0) --top;
    for (int i = top; i >= 0; --i) out.push_back(static_cast<Bit>((value >> i) & 1U));
    return out;
  }

 private:
  static Bit check(int b) {
    if (b != 0 && b != 1) fail(ErrorCode::kInvalidArgument, "bit value must be 0 or 1");
    return static_cast<Bit>(b);
  }

  std::vector<Bit> bits_;
};

}  // namespace predlab
