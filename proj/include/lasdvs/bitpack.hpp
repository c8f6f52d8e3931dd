#pragma once
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace lasdvs {

// Little-endian bit packing: values are appended least-significant bit first,
// bytes fill from bit 0 upward.
class BitWriter {
 public:
  void put(uint64_t value, unsigned nbits) {
    if (nbits > 64) throw std::invalid_argument("BitWriter: nbits > 64");
    for (unsigned i = 0; i < nbits; i++) {
      if (bit_ == 0) bytes_.push_back(0);
      if ((value >> i) & 1) bytes_.back() |= static_cast<uint8_t>(1u << bit_);
      bit_ = (bit_ + 1) & 7;
      bits_total_++;
    }
  }

  // Zero-pad to the next byte boundary.
  void align() { bit_ = 0; }

  size_t bits_written() const { return bits_total_; }
  const std::vector<uint8_t>& bytes() const { return bytes_; }
  std::vector<uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<uint8_t> bytes_;
  unsigned bit_ = 0;
  size_t bits_total_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  uint64_t get(unsigned nbits) {
    if (nbits > 64) throw std::invalid_argument("BitReader: nbits > 64");
    uint64_t v = 0;
    for (unsigned i = 0; i < nbits; i++) {
      size_t byte = pos_ >> 3;
      if (byte >= bytes_.size()) throw std::out_of_range("BitReader: out of data");
      if ((bytes_[byte] >> (pos_ & 7)) & 1) v |= uint64_t{1} << i;
      pos_++;
    }
    return v;
  }

  void align() { pos_ = (pos_ + 7) & ~size_t{7}; }

  size_t bits_consumed() const { return pos_; }
  size_t bits_available() const { return bytes_.size() * 8 - pos_; }

 private:
  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
};

}  // namespace lasdvs
