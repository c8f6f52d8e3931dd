#pragma once
#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>
#include <vector>

namespace lasdvs {

namespace detail {

inline constexpr uint64_t rotl64(uint64_t x, unsigned s) {
  return (x << s) | (x >> (64 - s));
}

inline void keccak_f1600(uint64_t st[25]) {
  static constexpr uint64_t kRoundConst[24] = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
  };
  static constexpr unsigned kRho[24] = {1,  3,  6,  10, 15, 21, 28, 36,
                                        45, 55, 2,  14, 27, 41, 56, 8,
                                        25, 43, 62, 18, 39, 61, 20, 44};
  static constexpr unsigned kPi[24] = {10, 7,  11, 17, 18, 3,  5,  16,
                                       8,  21, 24, 4,  15, 23, 19, 13,
                                       12, 2,  20, 14, 22, 9,  6,  1};
  for (unsigned round = 0; round < 24; round++) {
    uint64_t c[5];
    for (unsigned x = 0; x < 5; x++)
      c[x] = st[x] ^ st[x + 5] ^ st[x + 10] ^ st[x + 15] ^ st[x + 20];
    for (unsigned x = 0; x < 5; x++) {
      uint64_t d = c[(x + 4) % 5] ^ rotl64(c[(x + 1) % 5], 1);
      for (unsigned y = 0; y < 25; y += 5) st[x + y] ^= d;
    }
    uint64_t t = st[1];
    for (unsigned i = 0; i < 24; i++) {
      unsigned j = kPi[i];
      uint64_t tmp = st[j];
      st[j] = rotl64(t, kRho[i]);
      t = tmp;
    }
    for (unsigned y = 0; y < 25; y += 5) {
      uint64_t row[5];
      for (unsigned x = 0; x < 5; x++) row[x] = st[y + x];
      for (unsigned x = 0; x < 5; x++)
        st[y + x] = row[x] ^ (~row[(x + 1) % 5] & row[(x + 2) % 5]);
    }
    st[0] ^= kRoundConst[round];
  }
}

}  // namespace detail

// FIPS-202 extendable-output function (sponge over Keccak-f[1600]).
// Shake128 has 256-bit capacity, Shake256 has 512-bit capacity.
class Xof {
 public:
  explicit Xof(size_t rate_bytes) : rate_(rate_bytes) { st_.fill(0); }

  static Xof shake128() { return Xof(168); }
  static Xof shake256() { return Xof(136); }

  void absorb(const uint8_t* data, size_t len) {
    for (size_t i = 0; i < len; i++) {
      xor_byte(pos_, data[i]);
      if (++pos_ == rate_) {
        detail::keccak_f1600(st_.data());
        pos_ = 0;
      }
    }
  }
  void absorb(std::span<const uint8_t> data) { absorb(data.data(), data.size()); }
  void absorb(std::string_view s) {
    absorb(reinterpret_cast<const uint8_t*>(s.data()), s.size());
  }

  // SHAKE domain separation suffix 0x1F, final bit 0x80.
  void finalize() {
    xor_byte(pos_, 0x1f);
    xor_byte(rate_ - 1, 0x80);
    detail::keccak_f1600(st_.data());
    pos_ = 0;
    squeezing_ = true;
  }

  void squeeze(uint8_t* out, size_t len) {
    if (!squeezing_) finalize();
    for (size_t i = 0; i < len; i++) {
      if (pos_ == rate_) {
        detail::keccak_f1600(st_.data());
        pos_ = 0;
      }
      out[i] = byte_at(pos_++);
    }
  }
  std::vector<uint8_t> squeeze(size_t len) {
    std::vector<uint8_t> out(len);
    squeeze(out.data(), len);
    return out;
  }

 private:
  void xor_byte(size_t idx, uint8_t v) {
    st_[idx / 8] ^= static_cast<uint64_t>(v) << (8 * (idx % 8));
  }
  uint8_t byte_at(size_t idx) const {
    return static_cast<uint8_t>(st_[idx / 8] >> (8 * (idx % 8)));
  }

  std::array<uint64_t, 25> st_;
  size_t rate_;
  size_t pos_ = 0;
  bool squeezing_ = false;
};

inline std::vector<uint8_t> shake128(std::span<const uint8_t> input, size_t outlen) {
  Xof x = Xof::shake128();
  x.absorb(input);
  return x.squeeze(outlen);
}

}  // namespace lasdvs
