#pragma once
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lasdvs/gaussian.hpp"
#include "lasdvs/params.hpp"
#include "lasdvs/ring.hpp"
#include "lasdvs/rng.hpp"

namespace lasdvs {

// Rounding width used when discretizing perturbation samples.
inline constexpr double kSigmaRound = 2.5;

inline uint64_t gadget_entry(uint32_t j) { return uint64_t{1} << j; }

// e * c for an integer constant c, mod q.
inline RingElement ring_scale(const RingElement& e, uint64_t c) {
  RingElement r(e.n(), e.q());
  c %= e.q();
  for (uint32_t i = 0; i < e.n(); i++)
    r.set_coeff(i, static_cast<uint64_t>(u128(e.coeff(i)) * c % e.q()));
  return r;
}

// Invertibility of h in R_q. For q = 2^k, h is invertible iff it is a unit
// mod 2, i.e. iff its coefficient sum is odd. Only h = 1 is used by the
// scheme; other tags are accepted when checkable.
inline bool ring_is_invertible(const RingElement& h) {
  if ((h.q() & (h.q() - 1)) == 0) {
    uint64_t parity = 0;
    for (uint32_t i = 0; i < h.n(); i++) parity ^= h.coeff(i) & 1;
    return parity == 1;
  }
  throw std::invalid_argument("invertibility check only supported for q = 2^k");
}

// The verifier's secret: l x k array of small ring elements with tag h such
// that a^T [R; I_k] = h g^T exactly.
struct TrapdoorMatrix {
  uint32_t l = 0, k = 0;
  std::vector<RingElement> r;  // row-major, entry (i, j) at i*k + j
  RingElement h;

  const RingElement& at(uint32_t i, uint32_t j) const { return r[size_t(i) * k + j]; }
  RingElement& at(uint32_t i, uint32_t j) { return r[size_t(i) * k + j]; }

  // Lazily built preimage-sampling state (Cholesky of the perturbation
  // covariance); keyed by the widths it was built for.
  struct SamplerCache;
  mutable std::shared_ptr<SamplerCache> cache;
};

// Public vector a = (a0, a1) with a1 = h g - R^T a0.
struct TaggedPublicVector {
  RingVector vec;  // length l+k
  uint32_t l = 0, k = 0;

  const RingElement& a0(uint32_t i) const { return vec[i]; }
  const RingElement& a1(uint32_t j) const { return vec[size_t(l) + j]; }
};

// Lemma-1 style trapdoor generation: R drawn entry-wise from D_{R, sigma_e},
// a1 per gadget column so the trapdoor identity holds exactly.
inline std::pair<TaggedPublicVector, TrapdoorMatrix> ring_gen_trap(
    RandomSource& rng, const Params& pp, const RingVector* a0_in = nullptr,
    const RingElement* h_in = nullptr) {
  RingElement h = h_in ? *h_in : RingElement::one(pp.n, pp.q);
  if (h != RingElement::one(pp.n, pp.q) && !ring_is_invertible(h))
    throw std::invalid_argument("ring_gen_trap: tag h is not invertible");

  RingVector a0;
  if (a0_in) {
    if (a0_in->size() != pp.l) throw std::invalid_argument("ring_gen_trap: a0 must have length l");
    a0 = *a0_in;
  } else {
    for (uint32_t i = 0; i < pp.l; i++) a0.push_back(sample_uniform_ring(rng, pp));
  }

  TrapdoorMatrix R;
  R.l = pp.l;
  R.k = pp.k;
  R.h = h;
  R.r.reserve(size_t(pp.l) * pp.k);
  for (uint32_t i = 0; i < pp.l; i++) {
    RingVector row = sample_ring_gaussian(rng, pp, pp.sigma_e, pp.k);
    for (uint32_t j = 0; j < pp.k; j++) R.r.push_back(row[j]);
  }

  TaggedPublicVector pub;
  pub.l = pp.l;
  pub.k = pp.k;
  for (uint32_t i = 0; i < pp.l; i++) pub.vec.push_back(a0[i]);
  for (uint32_t j = 0; j < pp.k; j++) {
    RingElement acc = ring_scale(h, gadget_entry(j));
    for (uint32_t i = 0; i < pp.l; i++) acc = ring_sub(acc, ring_mul(a0[i], R.at(i, j)));
    pub.vec.push_back(acc);
  }
  return {std::move(pub), std::move(R)};
}

inline bool trapdoor_identity_ok(const TaggedPublicVector& a, const TrapdoorMatrix& R) {
  for (uint32_t j = 0; j < R.k; j++) {
    RingElement acc = a.a1(j);
    for (uint32_t i = 0; i < R.l; i++) acc = ring_add(acc, ring_mul(a.a0(i), R.at(i, j)));
    if (acc != ring_scale(R.h, gadget_entry(j))) return false;
  }
  return true;
}

// Invert b_g = g s + e for q = 2^k by per-coefficient bit recovery. Entry
// k-1-j carries bit j of s once the low bits are subtracted; the bit is read
// off from whether the centered residue sits nearer 2^(k-1) than 0. A residue
// on the decision boundary |.| = q/4 signals inputs outside the error band.
inline std::optional<std::pair<RingElement, RingVector>> gadget_decode(const Params& pp,
                                                                       const RingVector& bg) {
  if (bg.size() != pp.k) throw std::invalid_argument("gadget_decode: expected k entries");
  if ((pp.q & (pp.q - 1)) != 0)
    throw std::invalid_argument("gadget_decode: requires q = 2^k");
  const uint64_t q = pp.q;
  RingElement s(pp.n, q);
  for (uint32_t t = 0; t < pp.n; t++) {
    uint64_t st = 0;
    for (uint32_t j = 0; j < pp.k; j++) {
      uint32_t i = pp.k - 1 - j;
      uint64_t sub = (st << i) & (q - 1);
      uint64_t val = bg[i].coeff(t) >= sub ? bg[i].coeff(t) - sub
                                           : bg[i].coeff(t) + q - sub;
      int64_t c = RingElement::center(val, q);
      uint64_t dist = static_cast<uint64_t>(c < 0 ? -c : c);
      if (4 * dist == q) return std::nullopt;  // boundary: outside error band
      if (4 * dist > q) st |= uint64_t{1} << j;
    }
    s.set_coeff(t, st);
  }
  RingVector e;
  for (uint32_t i = 0; i < pp.k; i++) e.push_back(ring_sub(bg[i], ring_scale(s, gadget_entry(i))));
  return std::make_pair(std::move(s), std::move(e));
}

// Lemma-3 inversion: fold b through the trapdoor onto the gadget, decode s,
// then recover e by subtraction so that a s + e = b holds identically. The
// recovered error must look like an honest LWE error; anything larger than
// B_e is reported as a failure rather than returned.
struct InvertResult {
  RingElement s;
  RingVector e;
};

inline std::optional<InvertResult> ring_invert(const Params& pp, const TrapdoorMatrix& R,
                                               const TaggedPublicVector& a,
                                               const RingVector& b) {
  if (R.h != RingElement::one(pp.n, pp.q))
    throw std::invalid_argument("ring_invert: only tag h = 1 is supported");
  if (b.size() != pp.lk()) throw std::invalid_argument("ring_invert: expected l+k entries");
  RingVector bg;
  for (uint32_t j = 0; j < pp.k; j++) {
    RingElement acc = b[size_t(pp.l) + j];
    for (uint32_t i = 0; i < pp.l; i++) acc = ring_add(acc, ring_mul(b[i], R.at(i, j)));
    bg.push_back(std::move(acc));
  }
  auto decoded = gadget_decode(pp, bg);
  if (!decoded) return std::nullopt;
  const RingElement& s = decoded->first;
  RingVector e;
  for (uint32_t i = 0; i < pp.lk(); i++) e.push_back(ring_sub(b[i], ring_mul(a.vec[i], s)));
  if (euclid_norm(e) > pp.B_e()) return std::nullopt;
  return InvertResult{s, std::move(e)};
}

// Gaussian sampling over the gadget coset: z with g^T z = v mod q, built per
// ring coefficient by the sequential bit sampler z_j <- D_{2Z + v_j, sigma_g},
// v_{j+1} = (v_j - z_j) / 2. Raw integers, k entries of n coefficients each.
inline std::vector<std::vector<int64_t>> gadget_coset_sample_ints(RandomSource& rng,
                                                                  const Params& pp,
                                                                  const RingElement& v,
                                                                  double sigma_g) {
  if ((pp.q & (pp.q - 1)) != 0)
    throw std::invalid_argument("gadget_coset_sample: requires q = 2^k");
  std::vector<std::vector<int64_t>> z(pp.k, std::vector<int64_t>(pp.n));
  for (uint32_t t = 0; t < pp.n; t++) {
    int64_t c = static_cast<int64_t>(v.coeff(t));
    for (uint32_t j = 0; j < pp.k; j++) {
      int64_t parity = ((c % 2) + 2) % 2;
      int64_t zj = sample_z_coset(rng, sigma_g, 2, parity, pp.tail_cut);
      c = (c - zj) / 2;
      z[j][t] = zj;
    }
  }
  return z;
}

inline RingVector gadget_coset_sample(RandomSource& rng, const Params& pp,
                                      const RingElement& v, double sigma_g) {
  auto ints = gadget_coset_sample_ints(rng, pp, v, sigma_g);
  RingVector z(pp.k, pp.n, pp.q);
  const int64_t q = static_cast<int64_t>(pp.q);
  for (uint32_t j = 0; j < pp.k; j++)
    for (uint32_t t = 0; t < pp.n; t++) {
      int64_t canon = ints[j][t] % q;
      if (canon < 0) canon += q;
      z[j].set_coeff(t, static_cast<uint64_t>(canon));
    }
  return z;
}

namespace detail {

using RealPoly = std::vector<double>;

// Negacyclic convolution over the reals.
inline RealPoly real_negacyclic(const RealPoly& a, const RealPoly& b) {
  const size_t n = a.size();
  RealPoly out(n, 0.0);
  for (size_t i = 0; i < n; i++) {
    double ai = a[i];
    if (ai == 0.0) continue;
    for (size_t j = 0; j < n; j++) {
      size_t t = i + j;
      if (t < n) out[t] += ai * b[j];
      else out[t - n] -= ai * b[j];
    }
  }
  return out;
}

// Conjugate r*(x) = r(x^-1) mod x^n+1: transpose of the negacyclic matrix.
inline RealPoly real_conj(const RealPoly& a) {
  const size_t n = a.size();
  RealPoly out(n, 0.0);
  out[0] = a[0];
  for (size_t t = 1; t < n; t++) out[t] = -a[n - t];
  return out;
}

inline RealPoly centered_real(const RingElement& e) {
  RealPoly out(e.n());
  for (uint32_t i = 0; i < e.n(); i++) out[i] = static_cast<double>(e.centered_coeff(i));
  return out;
}

inline std::vector<int64_t> centered_int(const RingElement& e) {
  std::vector<int64_t> out(e.n());
  for (uint32_t i = 0; i < e.n(); i++) out[i] = e.centered_coeff(i);
  return out;
}

// Integer negacyclic convolution; inputs small enough that int64 never
// overflows at supported shapes.
inline void int_negacyclic_add(std::vector<int64_t>& acc, std::span<const int64_t> a,
                               std::span<const int64_t> b) {
  const size_t n = a.size();
  for (size_t i = 0; i < n; i++) {
    int64_t ai = a[i];
    if (ai == 0) continue;
    for (size_t j = 0; j < n; j++) {
      size_t t = i + j;
      if (t < n) acc[t] += ai * b[j];
      else acc[t - n] -= ai * b[j];
    }
  }
}

}  // namespace detail

// Largest singular value of R's integer matrix representation, via power
// iteration on E^T E with E = [R; I] (eigenvalues there are 1 + s1(R)^2).
inline double estimate_s1(const TrapdoorMatrix& R, uint32_t n, unsigned iters = 20,
                          double rel_tol = 1e-6) {
  const uint32_t l = R.l, k = R.k;
  std::vector<detail::RealPoly> rc(size_t(l) * k), rconj(size_t(l) * k);
  for (uint32_t i = 0; i < l; i++)
    for (uint32_t j = 0; j < k; j++) {
      rc[size_t(i) * k + j] = detail::centered_real(R.at(i, j));
      rconj[size_t(i) * k + j] = detail::real_conj(rc[size_t(i) * k + j]);
    }
  std::vector<detail::RealPoly> w(k, detail::RealPoly(n));
  for (uint32_t j = 0; j < k; j++)
    for (uint32_t t = 0; t < n; t++) w[j][t] = 1.0 + 0.01 * double((j * n + t) % 7);
  double lambda = 0.0;
  for (unsigned it = 0; it < iters; it++) {
    std::vector<detail::RealPoly> u(l, detail::RealPoly(n, 0.0));
    for (uint32_t i = 0; i < l; i++)
      for (uint32_t j = 0; j < k; j++) {
        auto prod = detail::real_negacyclic(rc[size_t(i) * k + j], w[j]);
        for (uint32_t t = 0; t < n; t++) u[i][t] += prod[t];
      }
    std::vector<detail::RealPoly> w2 = w;  // the identity block of E^T E
    for (uint32_t j = 0; j < k; j++)
      for (uint32_t i = 0; i < l; i++) {
        auto prod = detail::real_negacyclic(rconj[size_t(i) * k + j], u[i]);
        for (uint32_t t = 0; t < n; t++) w2[j][t] += prod[t];
      }
    double norm_w = 0, norm_w2 = 0;
    for (uint32_t j = 0; j < k; j++)
      for (uint32_t t = 0; t < n; t++) {
        norm_w += w[j][t] * w[j][t];
        norm_w2 += w2[j][t] * w2[j][t];
      }
    double next = std::sqrt(norm_w2 / norm_w);
    double inv = 1.0 / std::sqrt(norm_w2);
    for (uint32_t j = 0; j < k; j++)
      for (uint32_t t = 0; t < n; t++) w[j][t] = w2[j][t] * inv;
    if (it > 0 && std::abs(next - lambda) <= rel_tol * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda - 1.0, 0.0));
}

// Perturbation sampler: integer vector over the (l+k)n embedding with
// covariance (sigma_p^2 I - sigma_g^2 E E^T) / (2 pi), E = [R; I]. Realized by
// a block symmetric factorization of the covariance in floating point (the
// identity block is spherical, the R block is conditioned on it and uses a
// dense Cholesky of the ln x ln Schur complement) followed by coordinate-wise
// randomized rounding with width kSigmaRound.
class PerturbationSampler {
 public:
  PerturbationSampler(const Params& pp, const TrapdoorMatrix& R, double sigma_p,
                      double sigma_g)
      : n_(pp.n), l_(R.l), k_(R.k), round_(kSigmaRound, pp.tail_cut) {
    s1_ = estimate_s1(R, pp.n);
    double bound = sigma_g * sigma_g * (1.0 + s1_ * s1_) + kSigmaRound * kSigmaRound;
    if (sigma_p * sigma_p <= bound)
      throw std::invalid_argument("perturbation covariance not positive definite: "
                                  "sigma_p^2 must exceed sigma_g^2 (1 + s1(R)^2)");
    vp2_ = sigma_p * sigma_p / kTwoPi;
    vg2_ = sigma_g * sigma_g / kTwoPi;
    r2_ = kSigmaRound * kSigmaRound / kTwoPi;
    d2_ = vp2_ - vg2_ - r2_;

    rc_.resize(size_t(l_) * k_);
    for (uint32_t i = 0; i < l_; i++)
      for (uint32_t j = 0; j < k_; j++) rc_[size_t(i) * k_ + j] = detail::centered_real(R.at(i, j));

    build_cholesky();
  }

  double s1() const { return s1_; }

  // Embedding-ordered integer perturbation (slot-major: slot i coefficient t
  // at index i*n + t).
  std::vector<int64_t> sample(RandomSource& rng) const {
    const size_t dim1 = size_t(l_) * n_, dim2 = size_t(k_) * n_;
    std::vector<double> y2(dim2);
    const double sd2 = std::sqrt(d2_);
    for (auto& v : y2) v = sd2 * rng.next_gaussian();

    // Conditional mean of the R block given y2: (-vg2/d2) R y2.
    std::vector<double> mean1(dim1, 0.0);
    detail::RealPoly tmp(n_);
    for (uint32_t j = 0; j < k_; j++) {
      detail::RealPoly yj(y2.begin() + size_t(j) * n_, y2.begin() + size_t(j + 1) * n_);
      for (uint32_t i = 0; i < l_; i++) {
        auto prod = detail::real_negacyclic(rc_[size_t(i) * k_ + j], yj);
        for (uint32_t t = 0; t < n_; t++) mean1[size_t(i) * n_ + t] += prod[t];
      }
    }
    const double cscale = -vg2_ / d2_;
    for (auto& v : mean1) v *= cscale;

    std::vector<double> g(dim1);
    for (auto& v : g) v = rng.next_gaussian();
    std::vector<double> y1 = mean1;
    for (size_t row = 0; row < dim1; row++) {
      double acc = 0;
      const double* lrow = &chol_[row * dim1];
      for (size_t col = 0; col <= row; col++) acc += lrow[col] * g[col];
      y1[row] += acc;
    }

    std::vector<int64_t> p(dim1 + dim2);
    for (size_t i = 0; i < dim1; i++) p[i] = round_.sample(rng, y1[i]);
    for (size_t i = 0; i < dim2; i++) p[dim1 + i] = round_.sample(rng, y2[i]);
    return p;
  }

 private:
  void build_cholesky() {
    const size_t dim = size_t(l_) * n_;
    // Gram blocks rho_{i,i'} = sum_j r_ij (x) conj(r_i'j).
    std::vector<detail::RealPoly> gram(size_t(l_) * l_, detail::RealPoly(n_, 0.0));
    for (uint32_t i = 0; i < l_; i++)
      for (uint32_t i2 = 0; i2 < l_; i2++)
        for (uint32_t j = 0; j < k_; j++) {
          auto prod = detail::real_negacyclic(rc_[size_t(i) * k_ + j],
                                              detail::real_conj(rc_[size_t(i2) * k_ + j]));
          for (uint32_t t = 0; t < n_; t++) gram[size_t(i) * l_ + i2][t] += prod[t];
        }
    // Schur complement S = (vp2 - r2) I - vg2 (vp2 - r2) / d2 * R R^T.
    const double diag = vp2_ - r2_;
    const double gscale = vg2_ * (vp2_ - r2_) / d2_;
    std::vector<double> S(dim * dim, 0.0);
    for (uint32_t i = 0; i < l_; i++)
      for (uint32_t i2 = 0; i2 < l_; i2++) {
        const auto& rho = gram[size_t(i) * l_ + i2];
        for (uint32_t t = 0; t < n_; t++)
          for (uint32_t t2 = 0; t2 < n_; t2++) {
            double v = t >= t2 ? rho[t - t2] : -rho[n_ + t - t2];
            S[(size_t(i) * n_ + t) * dim + (size_t(i2) * n_ + t2)] = -gscale * v;
          }
      }
    for (size_t row = 0; row < dim; row++) S[row * dim + row] += diag;

    chol_.assign(dim * dim, 0.0);
    for (size_t row = 0; row < dim; row++) {
      for (size_t col = 0; col <= row; col++) {
        double acc = S[row * dim + col];
        for (size_t t = 0; t < col; t++) acc -= chol_[row * dim + t] * chol_[col * dim + t];
        if (row == col) {
          if (acc <= 0.0)
            throw std::invalid_argument("perturbation covariance not positive definite");
          chol_[row * dim + row] = std::sqrt(acc);
        } else {
          chol_[row * dim + col] = acc / chol_[col * dim + col];
        }
      }
    }
  }

  uint32_t n_, l_, k_;
  double vp2_ = 0, vg2_ = 0, r2_ = 0, d2_ = 0, s1_ = 0;
  std::vector<detail::RealPoly> rc_;
  std::vector<double> chol_;  // row-major lower triangular, (l n)^2
  RoundingSampler round_;
};

struct TrapdoorMatrix::SamplerCache {
  std::mutex mu;
  double sigma_p = 0, sigma_g = 0;
  std::shared_ptr<const PerturbationSampler> sampler;
};

inline std::shared_ptr<const PerturbationSampler> perturbation_sampler(
    const Params& pp, const TrapdoorMatrix& R, double sigma_p, double sigma_g) {
  if (!R.cache) R.cache = std::make_shared<TrapdoorMatrix::SamplerCache>();
  std::lock_guard<std::mutex> lock(R.cache->mu);
  if (!R.cache->sampler || R.cache->sigma_p != sigma_p || R.cache->sigma_g != sigma_g) {
    R.cache->sampler = std::make_shared<const PerturbationSampler>(pp, R, sigma_p, sigma_g);
    R.cache->sigma_p = sigma_p;
    R.cache->sigma_g = sigma_g;
  }
  return R.cache->sampler;
}

inline RingVector int_embedding_to_ring(const Params& pp, std::span<const int64_t> v) {
  RingVector out(pp.lk(), pp.n, pp.q);
  const int64_t q = static_cast<int64_t>(pp.q);
  for (uint32_t i = 0; i < pp.lk(); i++)
    for (uint32_t t = 0; t < pp.n; t++) {
      int64_t c = v[size_t(i) * pp.n + t] % q;
      if (c < 0) c += q;
      out[i].set_coeff(t, static_cast<uint64_t>(c));
    }
  return out;
}

inline RingVector perturbation_sample(RandomSource& rng, const Params& pp,
                                      const TrapdoorMatrix& R, double sigma_p,
                                      double sigma_g) {
  auto sampler = perturbation_sampler(pp, R, sigma_p, sigma_g);
  return int_embedding_to_ring(pp, sampler->sample(rng));
}

// Lemma-4 preimage sampling: x = p + [R; I] z with z on the gadget coset of
// v = u - a p, so a x = u mod q exactly and x is spherical of width sigma_p.
inline RingVector ring_sample(RandomSource& rng, const Params& pp, const TrapdoorMatrix& R,
                              const TaggedPublicVector& a, const RingElement& h,
                              const RingElement& u, double sigma_g) {
  if (h != RingElement::one(pp.n, pp.q) || R.h != h)
    throw std::invalid_argument("ring_sample: only tag h = 1 is supported");

  auto sampler = perturbation_sampler(pp, R, pp.sigma_p, sigma_g);
  std::vector<int64_t> p = sampler->sample(rng);
  RingVector p_ring = int_embedding_to_ring(pp, p);

  RingElement v = ring_sub(u, inner_product(a.vec, p_ring));
  std::vector<std::vector<int64_t>> zc = gadget_coset_sample_ints(rng, pp, v, sigma_g);

  std::vector<int64_t> x(p.begin(), p.end());
  for (uint32_t i = 0; i < pp.l; i++) {
    std::vector<int64_t> acc(pp.n, 0);
    for (uint32_t j = 0; j < pp.k; j++)
      detail::int_negacyclic_add(acc, detail::centered_int(R.at(i, j)), zc[j]);
    for (uint32_t t = 0; t < pp.n; t++) x[size_t(i) * pp.n + t] += acc[t];
  }
  for (uint32_t j = 0; j < pp.k; j++)
    for (uint32_t t = 0; t < pp.n; t++) x[size_t(pp.l + j) * pp.n + t] += zc[j][t];

  return int_embedding_to_ring(pp, x);
}

}  // namespace lasdvs
