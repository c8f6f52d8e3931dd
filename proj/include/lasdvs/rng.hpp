#pragma once
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "lasdvs/shake.hpp"

namespace lasdvs {

// Deterministic randomness stream: SHAKE128 expansion of a 32-byte seed plus a
// domain-separation label. Same seed, label and draw sequence always yield the
// same bytes. Single-owner; fork() derives an independent labelled child.
class RandomSource {
 public:
  static constexpr size_t kSeedBytes = 32;
  using Seed = std::array<uint8_t, kSeedBytes>;

  explicit RandomSource(const Seed& seed, std::string_view label = "")
      : seed_(seed), xof_(Xof::shake128()) {
    xof_.absorb(std::string_view("LaSDVS-v1-RNG"));
    xof_.absorb(seed_.data(), seed_.size());
    xof_.absorb(label);
    xof_.finalize();
  }

  // Seed from 64 hex characters.
  static RandomSource from_hex(std::string_view hex, std::string_view label = "") {
    if (hex.size() != 2 * kSeedBytes)
      throw std::invalid_argument("seed must be 64 hex characters");
    Seed s{};
    auto nib = [](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      if (c >= 'A' && c <= 'F') return c - 'A' + 10;
      throw std::invalid_argument("invalid hex digit in seed");
    };
    for (size_t i = 0; i < kSeedBytes; i++)
      s[i] = static_cast<uint8_t>(nib(hex[2 * i]) << 4 | nib(hex[2 * i + 1]));
    return RandomSource(s, label);
  }

  static RandomSource from_entropy(std::string_view label = "") {
    Seed s{};
    std::random_device rd;
    for (size_t i = 0; i < kSeedBytes; i += 4) {
      uint32_t w = rd();
      for (size_t j = 0; j < 4; j++) s[i + j] = static_cast<uint8_t>(w >> (8 * j));
    }
    return RandomSource(s, label);
  }

  // Child stream: 32 fresh bytes from this stream re-keyed under `label`.
  RandomSource fork(std::string_view label) {
    Seed child{};
    fill(child.data(), child.size());
    return RandomSource(child, label);
  }

  void fill(uint8_t* out, size_t len) {
    xof_.squeeze(out, len);
    position_ += len;
  }

  uint64_t next_u64() {
    uint8_t b[8];
    fill(b, 8);
    uint64_t v = 0;
    for (int i = 7; i >= 0; i--) v = (v << 8) | b[i];
    return v;
  }

  uint8_t next_byte() {
    uint8_t b;
    fill(&b, 1);
    return b;
  }

  // Unbiased uniform draw from [0, bound).
  uint64_t uniform_below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: zero bound");
    if ((bound & (bound - 1)) == 0) return next_u64() & (bound - 1);
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
      uint64_t v = next_u64();
      if (v < limit) return v % bound;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal deviate (Box-Muller, deterministic given the stream).
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = next_double01();
    } while (u1 <= 0.0);
    u2 = next_double01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  uint64_t position() const { return position_; }
  const Seed& seed() const { return seed_; }

  RandomSource(const RandomSource&) = delete;
  RandomSource& operator=(const RandomSource&) = delete;
  RandomSource(RandomSource&&) = default;
  RandomSource& operator=(RandomSource&&) = default;

 private:
  Seed seed_;
  Xof xof_;
  uint64_t position_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace lasdvs
