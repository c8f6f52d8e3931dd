#pragma once
#include <bit>
#include <cstdint>
#include <vector>

#include "lasdvs/bitpack.hpp"
#include "lasdvs/ring.hpp"

namespace lasdvs {

inline uint32_t coeff_bits(uint64_t q) {
  return static_cast<uint32_t>(std::bit_width(q - 1));
}

// Canonical coefficients, little-endian bit packing, exactly coeff_bits(q)
// bits each, zero-padded to a byte boundary per element.
inline void pack_ring_element(BitWriter& w, const RingElement& e) {
  const uint32_t kb = coeff_bits(e.q());
  for (uint32_t i = 0; i < e.n(); i++) w.put(e.coeff(i), kb);
  w.align();
}

inline std::vector<uint8_t> ring_element_bytes(const RingElement& e) {
  BitWriter w;
  pack_ring_element(w, e);
  return w.take();
}

inline RingElement unpack_ring_element(BitReader& r, uint32_t n, uint64_t q) {
  const uint32_t kb = coeff_bits(q);
  RingElement e(n, q);
  for (uint32_t i = 0; i < n; i++) {
    uint64_t c = r.get(kb);
    if (c >= q) throw std::out_of_range("ring coefficient out of range");
    e.set_coeff(i, c);
  }
  r.align();
  return e;
}

inline void pack_ring_vector(BitWriter& w, const RingVector& v) {
  for (size_t i = 0; i < v.size(); i++) pack_ring_element(w, v[i]);
}

inline RingVector unpack_ring_vector(BitReader& r, size_t len, uint32_t n, uint64_t q) {
  RingVector v;
  for (size_t i = 0; i < len; i++) v.push_back(unpack_ring_element(r, n, q));
  return v;
}

}  // namespace lasdvs
