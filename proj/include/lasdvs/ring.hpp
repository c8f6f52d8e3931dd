#pragma once
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace lasdvs {

using u128 = unsigned __int128;

// Element of R_q = Z_q[x]/(x^n + 1). Coefficients are always kept canonical
// in [0, q); centering is applied only for norms and decoding.
class RingElement {
 public:
  RingElement() = default;
  RingElement(uint32_t n, uint64_t q) : n_(n), q_(q), c_(n, 0) { check_shape(n, q); }

  static RingElement constant(uint32_t n, uint64_t q, uint64_t v) {
    RingElement r(n, q);
    r.c_[0] = v % q;
    return r;
  }
  static RingElement one(uint32_t n, uint64_t q) { return constant(n, q, 1); }

  static RingElement from_coeffs(uint32_t n, uint64_t q, std::span<const uint64_t> coeffs) {
    if (coeffs.size() != n) throw std::invalid_argument("coefficient count != n");
    RingElement r(n, q);
    for (uint32_t i = 0; i < n; i++) {
      if (coeffs[i] >= q) throw std::invalid_argument("coefficient out of range");
      r.c_[i] = coeffs[i];
    }
    return r;
  }

  static RingElement from_centered(uint32_t n, uint64_t q, std::span<const int64_t> coeffs) {
    if (coeffs.size() != n) throw std::invalid_argument("coefficient count != n");
    RingElement r(n, q);
    for (uint32_t i = 0; i < n; i++) {
      int64_t v = coeffs[i] % static_cast<int64_t>(q);
      if (v < 0) v += static_cast<int64_t>(q);
      r.c_[i] = static_cast<uint64_t>(v);
    }
    return r;
  }

  uint32_t n() const { return n_; }
  uint64_t q() const { return q_; }
  uint64_t coeff(uint32_t i) const { return c_[i]; }
  void set_coeff(uint32_t i, uint64_t v) {
    if (v >= q_) throw std::invalid_argument("coefficient out of range");
    c_[i] = v;
  }
  std::span<const uint64_t> coeffs() const { return c_; }

  // Centered representative of one coefficient: the interval (-q/2, q/2] for
  // even q, (-(q-1)/2, (q-1)/2] for odd q.
  int64_t centered_coeff(uint32_t i) const { return center(c_[i], q_); }

  std::vector<int64_t> centered() const {
    std::vector<int64_t> out(n_);
    for (uint32_t i = 0; i < n_; i++) out[i] = center(c_[i], q_);
    return out;
  }

  bool is_zero() const {
    for (uint64_t v : c_)
      if (v != 0) return false;
    return true;
  }

  bool operator==(const RingElement& o) const {
    return o.n_ == n_ && o.q_ == q_ && o.c_ == c_;
  }
  bool operator!=(const RingElement& o) const { return !(*this == o); }

  static int64_t center(uint64_t c, uint64_t q) {
    return (2 * c > q) ? static_cast<int64_t>(c) - static_cast<int64_t>(q)
                       : static_cast<int64_t>(c);
  }

 private:
  static void check_shape(uint32_t n, uint64_t q) {
    if (n == 0) throw std::invalid_argument("ring degree must be positive");
    if (q < 2) throw std::invalid_argument("modulus must be at least 2");
    if (q > (uint64_t{1} << 48)) throw std::invalid_argument("modulus too large");
  }

  uint32_t n_ = 0;
  uint64_t q_ = 0;
  std::vector<uint64_t> c_;
};

inline void require_same_shape(const RingElement& a, const RingElement& b) {
  if (a.n() != b.n() || a.q() != b.q())
    throw std::invalid_argument("ring dimension/modulus mismatch");
}

inline RingElement ring_add(const RingElement& a, const RingElement& b) {
  require_same_shape(a, b);
  RingElement r(a.n(), a.q());
  for (uint32_t i = 0; i < a.n(); i++) {
    uint64_t s = a.coeff(i) + b.coeff(i);
    r.set_coeff(i, s >= a.q() ? s - a.q() : s);
  }
  return r;
}

inline RingElement ring_sub(const RingElement& a, const RingElement& b) {
  require_same_shape(a, b);
  RingElement r(a.n(), a.q());
  for (uint32_t i = 0; i < a.n(); i++) {
    uint64_t av = a.coeff(i), bv = b.coeff(i);
    r.set_coeff(i, av >= bv ? av - bv : av + a.q() - bv);
  }
  return r;
}

inline RingElement ring_neg(const RingElement& a) {
  RingElement r(a.n(), a.q());
  for (uint32_t i = 0; i < a.n(); i++)
    r.set_coeff(i, a.coeff(i) == 0 ? 0 : a.q() - a.coeff(i));
  return r;
}

// Negacyclic convolution: polynomial product reduced by x^n = -1.
// Schoolbook; q = 2^k is not NTT-friendly and desk-scale n keeps O(n^2) cheap.
inline RingElement ring_mul(const RingElement& a, const RingElement& b) {
  require_same_shape(a, b);
  const uint32_t n = a.n();
  const uint64_t q = a.q();
  RingElement r(n, q);
  const bool fits64 = (u128(n) * (q - 1) * (q - 1)) >> 64 == 0;
  if (fits64) {
    std::vector<uint64_t> pos(n, 0), neg(n, 0);
    for (uint32_t i = 0; i < n; i++) {
      uint64_t ai = a.coeff(i);
      if (ai == 0) continue;
      uint32_t wrap = n - i;
      for (uint32_t j = 0; j < wrap; j++) pos[i + j] += ai * b.coeff(j);
      for (uint32_t j = wrap; j < n; j++) neg[i + j - n] += ai * b.coeff(j);
    }
    for (uint32_t t = 0; t < n; t++) {
      uint64_t p = pos[t] % q, m = neg[t] % q;
      r.set_coeff(t, p >= m ? p - m : p + q - m);
    }
  } else {
    std::vector<u128> pos(n, 0), neg(n, 0);
    for (uint32_t i = 0; i < n; i++) {
      uint64_t ai = a.coeff(i);
      if (ai == 0) continue;
      uint32_t wrap = n - i;
      for (uint32_t j = 0; j < wrap; j++) pos[i + j] += u128(ai) * b.coeff(j);
      for (uint32_t j = wrap; j < n; j++) neg[i + j - n] += u128(ai) * b.coeff(j);
    }
    for (uint32_t t = 0; t < n; t++) {
      uint64_t p = static_cast<uint64_t>(pos[t] % q), m = static_cast<uint64_t>(neg[t] % q);
      r.set_coeff(t, p >= m ? p - m : p + q - m);
    }
  }
  return r;
}

// Sequence of ring elements sharing one (n, q); length l, k or l+k by context.
class RingVector {
 public:
  RingVector() = default;
  RingVector(uint32_t len, uint32_t n, uint64_t q) : e_(len, RingElement(n, q)) {}
  explicit RingVector(std::vector<RingElement> entries) : e_(std::move(entries)) {
    for (size_t i = 1; i < e_.size(); i++) require_same_shape(e_[0], e_[i]);
  }

  size_t size() const { return e_.size(); }
  bool empty() const { return e_.empty(); }
  RingElement& operator[](size_t i) { return e_[i]; }
  const RingElement& operator[](size_t i) const { return e_[i]; }
  void push_back(RingElement e) {
    if (!e_.empty()) require_same_shape(e_[0], e);
    e_.push_back(std::move(e));
  }

  uint32_t n() const { return e_.empty() ? 0 : e_[0].n(); }
  uint64_t q() const { return e_.empty() ? 0 : e_[0].q(); }

  bool operator==(const RingVector& o) const { return e_ == o.e_; }
  bool operator!=(const RingVector& o) const { return !(*this == o); }

  // All centered coefficients, entry-major (the coefficient embedding).
  std::vector<int64_t> centered_embedding() const {
    std::vector<int64_t> out;
    out.reserve(e_.size() * n());
    for (const auto& e : e_)
      for (uint32_t i = 0; i < e.n(); i++) out.push_back(e.centered_coeff(i));
    return out;
  }

 private:
  std::vector<RingElement> e_;
};

inline void require_same_length(const RingVector& u, const RingVector& v) {
  if (u.size() != v.size()) throw std::invalid_argument("ring vector length mismatch");
}

inline RingElement inner_product(const RingVector& u, const RingVector& v) {
  require_same_length(u, v);
  if (u.empty()) throw std::invalid_argument("inner product of empty vectors");
  RingElement acc(u.n(), u.q());
  for (size_t i = 0; i < u.size(); i++) acc = ring_add(acc, ring_mul(u[i], v[i]));
  return acc;
}

inline RingVector scalar_mul(const RingVector& v, const RingElement& c) {
  RingVector out;
  for (size_t i = 0; i < v.size(); i++) out.push_back(ring_mul(v[i], c));
  return out;
}

inline RingVector vec_add(const RingVector& u, const RingVector& v) {
  require_same_length(u, v);
  RingVector out;
  for (size_t i = 0; i < u.size(); i++) out.push_back(ring_add(u[i], v[i]));
  return out;
}

inline RingVector vec_sub(const RingVector& u, const RingVector& v) {
  require_same_length(u, v);
  RingVector out;
  for (size_t i = 0; i < u.size(); i++) out.push_back(ring_sub(u[i], v[i]));
  return out;
}

// Exact integer sum of squares over the full coefficient embedding.
inline u128 norm_sq(const RingVector& v) {
  u128 acc = 0;
  for (size_t i = 0; i < v.size(); i++)
    for (uint32_t j = 0; j < v[i].n(); j++) {
      int64_t c = v[i].centered_coeff(j);
      acc += u128(c < 0 ? -c : c) * u128(c < 0 ? -c : c);
    }
  return acc;
}

inline double euclid_norm(const RingVector& v) {
  return std::sqrt(static_cast<double>(norm_sq(v)));
}

inline double euclid_norm(const RingElement& e) {
  u128 acc = 0;
  for (uint32_t j = 0; j < e.n(); j++) {
    int64_t c = e.centered_coeff(j);
    acc += u128(c < 0 ? -c : c) * u128(c < 0 ? -c : c);
  }
  return std::sqrt(static_cast<double>(acc));
}

}  // namespace lasdvs
