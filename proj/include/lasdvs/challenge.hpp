#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "lasdvs/encoding.hpp"
#include "lasdvs/params.hpp"
#include "lasdvs/ring.hpp"
#include "lasdvs/shake.hpp"

namespace lasdvs {

// Sparse challenge: exactly kappa coefficients, each +1 or -1 (stored as q-1).
// Euclidean norm is sqrt(kappa).
class ChallengeElement {
 public:
  struct Term {
    uint32_t pos;
    int8_t sign;  // +1 or -1
    bool operator==(const Term&) const = default;
  };

  ChallengeElement() = default;
  ChallengeElement(uint32_t n, uint64_t q, std::vector<Term> terms)
      : n_(n), q_(q), terms_(std::move(terms)) {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return a.pos < b.pos; });
    for (size_t i = 0; i < terms_.size(); i++) {
      if (terms_[i].pos >= n_) throw std::invalid_argument("challenge position out of range");
      if (terms_[i].sign != 1 && terms_[i].sign != -1)
        throw std::invalid_argument("challenge sign must be +-1");
      if (i > 0 && terms_[i].pos == terms_[i - 1].pos)
        throw std::invalid_argument("duplicate challenge position");
    }
  }

  uint32_t n() const { return n_; }
  uint64_t q() const { return q_; }
  uint32_t weight() const { return static_cast<uint32_t>(terms_.size()); }
  const std::vector<Term>& terms() const { return terms_; }
  double norm() const { return std::sqrt(static_cast<double>(terms_.size())); }

  RingElement to_ring() const {
    RingElement e(n_, q_);
    for (const auto& t : terms_) e.set_coeff(t.pos, t.sign > 0 ? 1 : q_ - 1);
    return e;
  }

  static ChallengeElement from_ring(const RingElement& e, uint32_t kappa) {
    std::vector<Term> terms;
    for (uint32_t i = 0; i < e.n(); i++) {
      uint64_t c = e.coeff(i);
      if (c == 0) continue;
      if (c == 1) terms.push_back({i, 1});
      else if (c == e.q() - 1) terms.push_back({i, -1});
      else throw std::invalid_argument("challenge coefficient not in {0, +-1}");
    }
    if (terms.size() != kappa) throw std::invalid_argument("challenge weight != kappa");
    return ChallengeElement(e.n(), e.q(), std::move(terms));
  }

  bool operator==(const ChallengeElement& o) const {
    return n_ == o.n_ && q_ == o.q_ && terms_ == o.terms_;
  }
  bool operator!=(const ChallengeElement& o) const { return !(*this == o); }

 private:
  uint32_t n_ = 0;
  uint64_t q_ = 0;
  std::vector<Term> terms_;
};

// a * c for a sparse challenge c, negacyclic, O(n * kappa).
inline RingElement mul_sparse(const RingElement& a, const ChallengeElement& c) {
  if (a.n() != c.n() || a.q() != c.q())
    throw std::invalid_argument("ring dimension/modulus mismatch");
  const uint32_t n = a.n();
  const int64_t q = static_cast<int64_t>(a.q());
  std::vector<int64_t> acc(n, 0);
  for (const auto& term : c.terms()) {
    for (uint32_t t = 0; t < n; t++) {
      int64_t v = a.centered_coeff(t);
      uint32_t idx = t + term.pos;
      int64_t s = term.sign;
      if (idx >= n) {
        idx -= n;
        s = -s;
      }
      acc[idx] += s * v;
    }
  }
  RingElement r(n, a.q());
  for (uint32_t t = 0; t < n; t++) {
    int64_t v = acc[t] % q;
    if (v < 0) v += q;
    r.set_coeff(t, static_cast<uint64_t>(v));
  }
  return r;
}

inline RingVector scalar_mul_sparse(const RingVector& v, const ChallengeElement& c) {
  RingVector out;
  for (size_t i = 0; i < v.size(); i++) out.push_back(mul_sparse(v[i], c));
  return out;
}

// Unambiguous framing of the hash input (w || t || s || mu): domain label,
// then each ring element length-prefixed (4-byte big-endian) in the packed
// coefficient encoding, message bytes last.
inline std::vector<uint8_t> hash_input_encode(const RingElement& w, const RingElement& t,
                                              const RingElement& s,
                                              std::span<const uint8_t> mu) {
  require_same_shape(w, t);
  require_same_shape(w, s);
  std::vector<uint8_t> out;
  const std::string_view label = "LaSDVS-v1-H";
  out.insert(out.end(), label.begin(), label.end());
  for (const RingElement* e : {&w, &t, &s}) {
    auto bytes = ring_element_bytes(*e);
    uint32_t len = static_cast<uint32_t>(bytes.size());
    out.push_back(static_cast<uint8_t>(len >> 24));
    out.push_back(static_cast<uint8_t>(len >> 16));
    out.push_back(static_cast<uint8_t>(len >> 8));
    out.push_back(static_cast<uint8_t>(len));
    out.insert(out.end(), bytes.begin(), bytes.end());
  }
  out.insert(out.end(), mu.begin(), mu.end());
  return out;
}

namespace detail {

// Unbiased uniform draw from [0, range) on 32-bit little-endian lanes,
// rejecting biased values.
inline uint32_t stream_uniform32(Xof& stream, uint32_t range) {
  const uint64_t span = uint64_t{1} << 32;
  const uint64_t limit = span - span % range;
  for (;;) {
    uint8_t b[4];
    stream.squeeze(b, 4);
    uint64_t v = uint64_t(b[0]) | uint64_t(b[1]) << 8 | uint64_t(b[2]) << 16 |
                 uint64_t(b[3]) << 24;
    if (v < limit) return static_cast<uint32_t>(v % range);
  }
}

}  // namespace detail

// Expand an XOF stream into a weight-kappa challenge: kappa distinct
// positions by a partial Fisher-Yates shuffle, then one sign bit each.
inline ChallengeElement expand_challenge(Xof& stream, const Params& pp) {
  std::vector<uint32_t> idx(pp.n);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<ChallengeElement::Term> terms(pp.kappa);
  for (uint32_t i = 0; i < pp.kappa; i++) {
    uint32_t j = i + detail::stream_uniform32(stream, pp.n - i);
    std::swap(idx[i], idx[j]);
    terms[i].pos = idx[i];
  }
  uint8_t reservoir = 0;
  unsigned bits_left = 0;
  for (uint32_t i = 0; i < pp.kappa; i++) {
    if (bits_left == 0) {
      stream.squeeze(&reservoir, 1);
      bits_left = 8;
    }
    terms[i].sign = (reservoir & 1) ? 1 : -1;
    reservoir >>= 1;
    bits_left--;
  }
  return ChallengeElement(pp.n, pp.q, std::move(terms));
}

// H(w || t || s || mu): SHAKE over the framed input, expanded to a challenge.
inline ChallengeElement hash_challenge(const RingElement& w, const RingElement& t,
                                       const RingElement& s, std::span<const uint8_t> mu,
                                       const Params& pp) {
  Xof x = Xof::shake128();
  x.absorb(hash_input_encode(w, t, s, mu));
  return expand_challenge(x, pp);
}

}  // namespace lasdvs
