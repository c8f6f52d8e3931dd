#pragma once
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lasdvs/challenge.hpp"
#include "lasdvs/gaussian.hpp"
#include "lasdvs/params.hpp"
#include "lasdvs/ring.hpp"
#include "lasdvs/rng.hpp"
#include "lasdvs/trapdoor.hpp"

namespace lasdvs {

struct SignerKeyPair {
  RingElement t;  // pk: t = a . s mod q
  RingVector s;   // sk: l+k bounded constants
};

struct VerifierKeyPair {
  TaggedPublicVector b0, b1;  // pk
  TrapdoorMatrix r0, r1;      // sk
};

struct Signature {
  RingVector c0;
  ChallengeElement c1;
  RingVector z;
};

struct SignStats {
  uint32_t attempts = 0;
};

// Strict norm window 0 < ||z|| < bound.
inline bool norm_in_window(const RingVector& z, double bound) {
  u128 nsq = norm_sq(z);
  if (nsq == 0) return false;
  return std::sqrt(static_cast<double>(nsq)) < bound;
}

inline SignerKeyPair sign_keygen(RandomSource& rng, const Params& pp) {
  SignerKeyPair kp;
  kp.s = sample_bounded(rng, pp);
  kp.t = inner_product(pp.a, kp.s);
  return kp;
}

inline VerifierKeyPair ver_keygen(RandomSource& rng, const Params& pp) {
  auto gen_one = [&](TaggedPublicVector& pub, TrapdoorMatrix& trap) {
    for (int tries = 0; tries < 64; tries++) {
      auto [a, R] = ring_gen_trap(rng, pp);
      double s1 = estimate_s1(R, pp.n);
      // sigma_p must dominate the trapdoor spectral norm or preimage
      // sampling is impossible for this key.
      if (pp.sigma_p * pp.sigma_p >
          pp.sigma_g * pp.sigma_g * (1.0 + s1 * s1) + kSigmaRound * kSigmaRound) {
        if (!trapdoor_identity_ok(a, R))
          throw std::logic_error("ver_keygen: trapdoor identity violated");
        pub = std::move(a);
        trap = std::move(R);
        return;
      }
    }
    throw std::runtime_error("ver_keygen: sigma_p too small for sampled trapdoors");
  };
  VerifierKeyPair kp;
  gen_one(kp.b0, kp.r0);
  gen_one(kp.b1, kp.r1);
  return kp;
}

inline uint32_t sign_iteration_cap(const Params& pp) {
  return static_cast<uint32_t>(std::ceil(100.0 * pp.M));
}

// Fiat-Shamir with aborts. Every retry restarts (s, e, y) wholesale so c0 and
// the hash input stay independent across attempts. `sigma_sim` is the width
// of e; sign() fixes it to sigma_p, the width ring_sample emits in Simul.
inline Signature sign_with_noise_width(RandomSource& rng, const Params& pp,
                                       const SignerKeyPair& sk_s, const RingElement& pk_t,
                                       const VerifierKeyPair& pk_v,
                                       std::span<const uint8_t> mu, double sigma_sim,
                                       SignStats* stats = nullptr) {
  const uint32_t cap = sign_iteration_cap(pp);
  for (uint32_t attempt = 1; attempt <= cap; attempt++) {
    RingElement s_r = sample_uniform_ring(rng, pp);
    RingVector e = sample_ring_gaussian(rng, pp, sigma_sim, pp.lk());
    RingVector y = sample_ring_gaussian(rng, pp, pp.sigma_z, pp.lk());

    RingVector c0 = vec_add(scalar_mul(pk_v.b0.vec, s_r), e);
    RingElement w = ring_add(inner_product(pp.a, y), inner_product(pk_v.b1.vec, e));
    ChallengeElement c1 = hash_challenge(w, pk_t, s_r, mu, pp);

    RingVector shift = scalar_mul_sparse(sk_s.s, c1);
    RingVector z = vec_add(shift, y);

    if (!rejection_accept(rng, z, shift, pp.sigma_z, pp.M)) continue;
    if (!norm_in_window(z, pp.B_z())) continue;
    if (stats) stats->attempts = attempt;
    return Signature{std::move(c0), std::move(c1), std::move(z)};
  }
  throw std::runtime_error("sign: iteration cap exceeded; parameters are inconsistent");
}

inline Signature sign(RandomSource& rng, const Params& pp, const SignerKeyPair& sk_s,
                      const RingElement& pk_t, const VerifierKeyPair& pk_v,
                      std::span<const uint8_t> mu, SignStats* stats = nullptr) {
  return sign_with_noise_width(rng, pp, sk_s, pk_t, pk_v, mu, pp.sigma_p, stats);
}

// All failures reject; invalid signatures never raise.
inline bool verify(const Params& pp, const VerifierKeyPair& kv, const RingElement& pk_t,
                   const Signature& sig, std::span<const uint8_t> mu) {
  if (sig.z.size() != pp.lk() || sig.c0.size() != pp.lk()) return false;
  if (sig.z.n() != pp.n || sig.z.q() != pp.q) return false;
  if (sig.c1.n() != pp.n || sig.c1.q() != pp.q || sig.c1.weight() != pp.kappa) return false;
  if (!norm_in_window(sig.z, pp.B_z())) return false;

  auto inv = ring_invert(pp, kv.r0, kv.b0, sig.c0);
  if (!inv) return false;

  RingElement w = ring_add(
      ring_sub(inner_product(pp.a, sig.z), mul_sparse(pk_t, sig.c1)),
      inner_product(kv.b1.vec, inv->e));
  return hash_challenge(w, pk_t, inv->s, mu, pp) == sig.c1;
}

// Verifier-side simulation: z' straight from D_{sigma_z}, e' sampled onto the
// syndrome u' - a z' + t c1', so the verification chain lands back on u'.
inline Signature simulate(RandomSource& rng, const Params& pp, const VerifierKeyPair& kv,
                          const RingElement& pk_t, std::span<const uint8_t> mu) {
  const uint32_t cap = sign_iteration_cap(pp);
  RingVector z;
  uint32_t tries = 0;
  do {
    if (++tries > cap)
      throw std::runtime_error("simulate: norm window cannot be met; parameters inconsistent");
    z = sample_ring_gaussian(rng, pp, pp.sigma_z, pp.lk());
  } while (!norm_in_window(z, pp.B_z()));

  RingElement s_r = sample_uniform_ring(rng, pp);
  RingElement u = sample_uniform_ring(rng, pp);
  ChallengeElement c1 = hash_challenge(u, pk_t, s_r, mu, pp);

  RingElement syndrome =
      ring_add(ring_sub(u, inner_product(pp.a, z)), mul_sparse(pk_t, c1));
  RingVector e = ring_sample(rng, pp, kv.r1, kv.b1, RingElement::one(pp.n, pp.q),
                             syndrome, pp.sigma_g);
  RingVector c0 = vec_add(scalar_mul(kv.b0.vec, s_r), e);
  return Signature{std::move(c0), std::move(c1), std::move(z)};
}

}  // namespace lasdvs
