#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "lasdvs/params.hpp"
#include "lasdvs/ring.hpp"
#include "lasdvs/rng.hpp"

namespace lasdvs {

// Gaussian weights follow rho_{sigma,c}(x) = exp(-pi (x-c)^2 / sigma^2), so
// sigma is the Gaussian parameter and the standard deviation is sigma/sqrt(2 pi).
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct GaussParams {
  double sigma = 0;
  double center = 0;
  double tail_cut = 13.0;
};

// Inverse-CDF table over the truncated support {x = residue (mod stride),
// |x - center| <= tail_cut * sigma}; 64-bit fixed-point cumulative weights.
class DiscreteGaussianTable {
 public:
  DiscreteGaussianTable(double sigma, double center, int64_t stride, int64_t residue,
                        double tail_cut) {
    if (sigma <= 0) throw std::invalid_argument("gaussian width must be positive");
    if (stride < 1) throw std::invalid_argument("stride must be positive");
    if (tail_cut < 6.0) throw std::invalid_argument("tail cut must be at least 6");
    double radius = tail_cut * sigma;
    // First coset point >= center - radius.
    double lo_real = center - radius;
    int64_t q0 = static_cast<int64_t>(std::floor((lo_real - residue) / stride));
    int64_t lo = residue + q0 * stride;
    while (lo < lo_real - 1e-12) lo += stride;
    int64_t hi = lo;
    while (hi + stride <= center + radius + 1e-12) hi += stride;
    if (hi < lo) {  // empty window; keep the nearest coset point
      lo = hi = residue + static_cast<int64_t>(std::llround((center - residue) / stride)) * stride;
    }
    lo_ = lo;
    stride_ = stride;
    size_t count = static_cast<size_t>((hi - lo) / stride) + 1;
    std::vector<long double> w(count);
    long double total = 0;
    for (size_t i = 0; i < count; i++) {
      long double x = static_cast<long double>(lo_ + static_cast<int64_t>(i) * stride_);
      long double dx = x - static_cast<long double>(center);
      w[i] = std::exp(-static_cast<long double>(M_PI) * dx * dx /
                      (static_cast<long double>(sigma) * sigma));
      total += w[i];
    }
    cdf_.resize(count);
    long double run = 0;
    const long double scale = 18446744073709551616.0L;  // 2^64
    for (size_t i = 0; i < count; i++) {
      run += w[i];
      long double v = run / total * scale;
      uint64_t u = v >= scale ? UINT64_MAX : static_cast<uint64_t>(v);
      cdf_[i] = std::max(u, i > 0 ? cdf_[i - 1] : 0);
    }
    cdf_.back() = UINT64_MAX;
  }

  int64_t draw(RandomSource& rng) const {
    uint64_t u = rng.next_u64();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    size_t idx = it == cdf_.end() ? cdf_.size() - 1 : static_cast<size_t>(it - cdf_.begin());
    return lo_ + static_cast<int64_t>(idx) * stride_;
  }

  // Exact truncated pmf, for statistical oracles.
  std::vector<std::pair<int64_t, double>> pmf() const {
    std::vector<std::pair<int64_t, double>> out(cdf_.size());
    const double scale = 18446744073709551616.0;
    uint64_t prev = 0;
    for (size_t i = 0; i < cdf_.size(); i++) {
      out[i] = {lo_ + static_cast<int64_t>(i) * stride_,
                static_cast<double>(cdf_[i] - prev) / scale};
      prev = cdf_[i];
    }
    return out;
  }

  int64_t support_lo() const { return lo_; }
  int64_t support_hi() const { return lo_ + static_cast<int64_t>(cdf_.size() - 1) * stride_; }

 private:
  int64_t lo_ = 0;
  int64_t stride_ = 1;
  std::vector<uint64_t> cdf_;
};

namespace detail {

struct TableKey {
  uint64_t sigma_bits, center_bits, tail_bits;
  int64_t stride, residue;
  bool operator<(const TableKey& o) const {
    return std::tie(sigma_bits, center_bits, tail_bits, stride, residue) <
           std::tie(o.sigma_bits, o.center_bits, o.tail_bits, o.stride, o.residue);
  }
};

inline uint64_t double_bits(double v) {
  uint64_t b;
  static_assert(sizeof(b) == sizeof(v));
  std::memcpy(&b, &v, sizeof(b));
  return b;
}

inline const DiscreteGaussianTable& cached_table(double sigma, double center,
                                                 int64_t stride, int64_t residue,
                                                 double tail_cut) {
  static std::mutex mu;
  static std::map<TableKey, std::unique_ptr<DiscreteGaussianTable>> cache;
  TableKey key{double_bits(sigma), double_bits(center), double_bits(tail_cut), stride, residue};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<DiscreteGaussianTable>(
                                sigma, center, stride, residue, tail_cut)).first;
  }
  return *it->second;
}

}  // namespace detail

// Integer discrete Gaussian D_{Z, sigma, c} truncated at tail_cut * sigma.
inline int64_t sample_z_gaussian(RandomSource& rng, const GaussParams& g) {
  return detail::cached_table(g.sigma, g.center, 1, 0, g.tail_cut).draw(rng);
}

// Draw from the coset stride*Z + residue with weights rho_{sigma,0}.
inline int64_t sample_z_coset(RandomSource& rng, double sigma, int64_t stride,
                              int64_t residue, double tail_cut = 13.0) {
  int64_t r = residue % stride;
  if (r < 0) r += stride;
  return detail::cached_table(sigma, 0.0, stride, r, tail_cut).draw(rng);
}

// Randomized rounding: integer x near the real center, weights
// rho_{sigma,center}(x). Centers are snapped to a 1/4096 grid so the tables
// can be cached; the snap moves the center by at most 2^-13.
class RoundingSampler {
 public:
  explicit RoundingSampler(double sigma, double tail_cut = 13.0)
      : sigma_(sigma), tail_(tail_cut), grid_(kGrid + 1, nullptr) {}

  int64_t sample(RandomSource& rng, double center) const {
    double base = std::floor(center);
    double frac = center - base;
    int gi = static_cast<int>(std::llround(frac * kGrid));
    const DiscreteGaussianTable*& slot = grid_[static_cast<size_t>(gi)];
    if (slot == nullptr)
      slot = &detail::cached_table(sigma_, double(gi) / kGrid, 1, 0, tail_);
    return static_cast<int64_t>(base) + slot->draw(rng);
  }

 private:
  static constexpr int kGrid = 4096;
  double sigma_;
  double tail_;
  mutable std::vector<const DiscreteGaussianTable*> grid_;
};

// Uniform element of R_q; rejection-free k-bit masking when q = 2^k.
inline RingElement sample_uniform_ring(RandomSource& rng, const Params& pp) {
  RingElement e(pp.n, pp.q);
  if ((pp.q & (pp.q - 1)) == 0) {
    const uint64_t mask = pp.q - 1;
    for (uint32_t i = 0; i < pp.n; i++) e.set_coeff(i, rng.next_u64() & mask);
  } else {
    for (uint32_t i = 0; i < pp.n; i++) e.set_coeff(i, rng.uniform_below(pp.q));
  }
  return e;
}

// Signer secret: l+k scalars uniform in {-d,...,d}, embedded as constant
// polynomials, which keeps sk_S at (l+k)*ceil(log2(2d+1)) bits on the wire.
inline RingVector sample_bounded(RandomSource& rng, const Params& pp) {
  if (pp.d < 1) throw std::invalid_argument("sample_bounded: d must be at least 1");
  RingVector v(pp.lk(), pp.n, pp.q);
  for (uint32_t i = 0; i < pp.lk(); i++) {
    int64_t c = static_cast<int64_t>(rng.uniform_below(2 * uint64_t(pp.d) + 1)) -
                static_cast<int64_t>(pp.d);
    v[i].set_coeff(0, c < 0 ? pp.q + static_cast<uint64_t>(c) : static_cast<uint64_t>(c));
  }
  return v;
}

// len ring elements with all n*len coefficients drawn from D_{Z, sigma}.
inline RingVector sample_ring_gaussian(RandomSource& rng, const Params& pp, double sigma,
                                       uint32_t len) {
  if (len < 1) throw std::invalid_argument("sample_ring_gaussian: len must be at least 1");
  const auto& table = detail::cached_table(sigma, 0.0, 1, 0, pp.tail_cut);
  RingVector v(len, pp.n, pp.q);
  const int64_t q = static_cast<int64_t>(pp.q);
  for (uint32_t i = 0; i < len; i++)
    for (uint32_t j = 0; j < pp.n; j++) {
      int64_t c = table.draw(rng) % q;
      if (c < 0) c += q;
      v[i].set_coeff(j, static_cast<uint64_t>(c));
    }
  return v;
}

// Accept z (= shift + fresh Gaussian) with probability
// min(1, rho_sigma(z) / (M * rho_{sigma,shift}(z))), evaluated over the
// centered embeddings; on acceptance the output law is D_sigma independent of
// the shift, up to the usual 2^-100 clipping mass.
inline bool rejection_accept(RandomSource& rng, const RingVector& z, const RingVector& shift,
                             double sigma, double M) {
  require_same_length(z, shift);
  auto zc = z.centered_embedding();
  auto sc = shift.centered_embedding();
  long double dot = 0, ss = 0;
  for (size_t i = 0; i < zc.size(); i++) {
    dot += static_cast<long double>(zc[i]) * sc[i];
    ss += static_cast<long double>(sc[i]) * sc[i];
  }
  const long double s = static_cast<long double>(sigma) / std::sqrt(static_cast<long double>(kTwoPi));
  long double expo = (-2.0L * dot + ss) / (2.0L * s * s);
  if (expo > 700.0L) return true;  // ratio/M certainly above 1
  long double threshold = std::exp(expo) / static_cast<long double>(M);
  return static_cast<long double>(rng.next_double01()) < threshold;
}

}  // namespace lasdvs
