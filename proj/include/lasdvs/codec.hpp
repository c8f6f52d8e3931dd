#pragma once
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lasdvs/challenge.hpp"
#include "lasdvs/encoding.hpp"
#include "lasdvs/params.hpp"
#include "lasdvs/sdvs.hpp"
#include "lasdvs/shake.hpp"
#include "lasdvs/trapdoor.hpp"

namespace lasdvs::codec {

inline constexpr char kMagic[4] = {'L', 'S', 'D', 'V'};
inline constexpr uint8_t kVersion = 1;

enum class TypeTag : uint8_t {
  params = 1,
  signer_keypair = 2,
  verifier_keypair = 3,
  signature = 4,
  signer_public = 5,
  verifier_public = 6,
};

enum class DecodeErrorKind {
  bad_header,        // magic, version or type tag
  length_mismatch,   // truncated or over-long input
  out_of_range,      // coefficient or scalar outside its domain
  malformed,         // structurally invalid value
  params_mismatch,   // fingerprint does not match the supplied pp
};

class DecodeError : public std::runtime_error {
 public:
  DecodeError(DecodeErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  DecodeErrorKind kind() const { return kind_; }

 private:
  DecodeErrorKind kind_;
};

namespace detail {

// Multi-byte integers are big-endian on the wire.
class ByteWriter {
 public:
  void u8(uint8_t v) { b_.push_back(v); }
  void u16(uint16_t v) {
    for (int i = 1; i >= 0; i--) b_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void u32(uint32_t v) {
    for (int i = 3; i >= 0; i--) b_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void u64(uint64_t v) {
    for (int i = 7; i >= 0; i--) b_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    u64(bits);
  }
  void bytes(std::span<const uint8_t> data) { b_.insert(b_.end(), data.begin(), data.end()); }
  void str(const std::string& s) {
    if (s.size() > UINT16_MAX) throw std::invalid_argument("string too long");
    u16(static_cast<uint16_t>(s.size()));
    b_.insert(b_.end(), s.begin(), s.end());
  }
  std::vector<uint8_t> take() { return std::move(b_); }
  size_t size() const { return b_.size(); }

 private:
  std::vector<uint8_t> b_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : d_(data) {}
  uint8_t u8() { return next(); }
  uint16_t u16() { return static_cast<uint16_t>(acc(2)); }
  uint32_t u32() { return static_cast<uint32_t>(acc(4)); }
  uint64_t u64() { return acc(8); }
  double f64() {
    uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
  std::string str() {
    uint16_t len = u16();
    std::string s;
    for (uint16_t i = 0; i < len; i++) s.push_back(static_cast<char>(next()));
    return s;
  }
  std::span<const uint8_t> bytes(size_t len) {
    if (pos_ + len > d_.size())
      throw DecodeError(DecodeErrorKind::length_mismatch, "input truncated");
    auto out = d_.subspan(pos_, len);
    pos_ += len;
    return out;
  }
  size_t remaining() const { return d_.size() - pos_; }
  void expect_end() const {
    if (pos_ != d_.size())
      throw DecodeError(DecodeErrorKind::length_mismatch, "trailing bytes after value");
  }

 private:
  uint8_t next() {
    if (pos_ >= d_.size())
      throw DecodeError(DecodeErrorKind::length_mismatch, "input truncated");
    return d_[pos_++];
  }
  uint64_t acc(int n) {
    uint64_t v = 0;
    for (int i = 0; i < n; i++) v = (v << 8) | next();
    return v;
  }
  std::span<const uint8_t> d_;
  size_t pos_ = 0;
};

inline size_t element_bytes(uint32_t n, uint64_t q) {
  return (size_t(n) * coeff_bits(q) + 7) / 8;
}

inline RingElement read_element(ByteReader& r, uint32_t n, uint64_t q) {
  auto span = r.bytes(element_bytes(n, q));
  BitReader br(span);
  try {
    return unpack_ring_element(br, n, q);
  } catch (const std::out_of_range&) {
    throw DecodeError(DecodeErrorKind::out_of_range, "ring coefficient out of range");
  }
}

inline RingVector read_vector(ByteReader& r, size_t len, uint32_t n, uint64_t q) {
  RingVector v;
  for (size_t i = 0; i < len; i++) v.push_back(read_element(r, n, q));
  return v;
}

}  // namespace detail

// --- bodies and section packers -------------------------------------------

// Number of bits per bounded secret coefficient: ceil(log2(2d+1)).
inline uint32_t secret_coeff_bits(uint32_t d) {
  return coeff_bits(2 * uint64_t(d) + 1);
}

// sk_S payload: l+k constants, each stored as s_i + d in ceil(log2(2d+1))
// bits. Returns exact payload bits before byte padding.
inline size_t pack_signer_secret(BitWriter& w, const Params& pp, const RingVector& s) {
  if (s.size() != pp.lk()) throw std::invalid_argument("signer secret must have l+k entries");
  size_t before = w.bits_written();
  const uint32_t bits = secret_coeff_bits(pp.d);
  for (uint32_t i = 0; i < pp.lk(); i++) {
    int64_t c0 = s[i].centered_coeff(0);
    if (c0 < -int64_t(pp.d) || c0 > int64_t(pp.d))
      throw std::invalid_argument("signer secret constant out of range");
    for (uint32_t t = 1; t < pp.n; t++)
      if (s[i].coeff(t) != 0)
        throw std::invalid_argument("signer secret entries must be constant polynomials");
    w.put(static_cast<uint64_t>(c0 + int64_t(pp.d)), bits);
  }
  size_t payload = w.bits_written() - before;
  w.align();
  return payload;
}

inline RingVector unpack_signer_secret(BitReader& r, const Params& pp) {
  const uint32_t bits = secret_coeff_bits(pp.d);
  RingVector s(pp.lk(), pp.n, pp.q);
  for (uint32_t i = 0; i < pp.lk(); i++) {
    uint64_t raw = r.get(bits);
    if (raw > 2 * uint64_t(pp.d))
      throw DecodeError(DecodeErrorKind::out_of_range, "secret coefficient out of range");
    int64_t c = static_cast<int64_t>(raw) - int64_t(pp.d);
    s[i].set_coeff(0, c < 0 ? pp.q + static_cast<uint64_t>(c) : static_cast<uint64_t>(c));
  }
  r.align();
  return s;
}

// Trapdoor matrix entries, row-major; tag handled by the caller. Returns
// exact payload bits.
inline size_t pack_trapdoor_entries(BitWriter& w, const TrapdoorMatrix& R) {
  size_t before = w.bits_written();
  for (const auto& e : R.r) {
    const uint32_t kb = coeff_bits(e.q());
    for (uint32_t i = 0; i < e.n(); i++) w.put(e.coeff(i), kb);
  }
  size_t payload = w.bits_written() - before;
  w.align();
  return payload;
}

// Sparse challenge encoding: kappa (position, sign) pairs. Returns exact bits.
inline size_t pack_challenge_sparse(BitWriter& w, const ChallengeElement& c) {
  size_t before = w.bits_written();
  const uint32_t pos_bits = coeff_bits(c.n());
  for (const auto& term : c.terms()) {
    w.put(term.pos, pos_bits);
    w.put(term.sign > 0 ? 1 : 0, 1);
  }
  size_t payload = w.bits_written() - before;
  w.align();
  return payload;
}

inline ChallengeElement unpack_challenge_sparse(BitReader& r, const Params& pp) {
  const uint32_t pos_bits = coeff_bits(pp.n);
  std::vector<ChallengeElement::Term> terms(pp.kappa);
  for (uint32_t i = 0; i < pp.kappa; i++) {
    terms[i].pos = static_cast<uint32_t>(r.get(pos_bits));
    terms[i].sign = r.get(1) ? 1 : -1;
  }
  r.align();
  try {
    return ChallengeElement(pp.n, pp.q, std::move(terms));
  } catch (const std::invalid_argument& e) {
    throw DecodeError(DecodeErrorKind::malformed, e.what());
  }
}

inline std::vector<uint8_t> params_body(const Params& pp) {
  detail::ByteWriter w;
  w.u32(pp.n);
  w.u64(pp.q);
  w.u16(static_cast<uint16_t>(pp.k));
  w.u16(static_cast<uint16_t>(pp.l));
  w.u16(static_cast<uint16_t>(pp.kappa));
  w.u32(pp.d);
  w.f64(pp.gamma);
  w.f64(pp.sigma_e);
  w.f64(pp.sigma_g);
  w.f64(pp.sigma_p);
  w.f64(pp.sigma_z);
  w.f64(pp.alpha);
  w.f64(pp.eta);
  w.f64(pp.M);
  w.f64(pp.min_entropy_bits);
  w.f64(pp.tail_cut);
  w.str(pp.profile_name);
  w.str(pp.hash_id);
  BitWriter bits;
  pack_ring_vector(bits, pp.a);
  w.bytes(bits.bytes());
  return w.take();
}

inline uint64_t fingerprint_bytes(std::span<const uint8_t> body) {
  Xof x = Xof::shake128();
  x.absorb(std::string_view("LaSDVS-v1-FP"));
  x.absorb(body);
  uint8_t fp[8];
  x.squeeze(fp, 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; i++) v = (v << 8) | fp[i];
  return v;
}

inline uint64_t params_fingerprint(const Params& pp) {
  return fingerprint_bytes(params_body(pp));
}

inline constexpr size_t kHeaderBytes = 4 + 1 + 1 + 8;

namespace detail {

inline std::vector<uint8_t> with_header(TypeTag tag, uint64_t fingerprint,
                                        std::span<const uint8_t> body) {
  ByteWriter w;
  w.bytes(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(kMagic), 4));
  w.u8(kVersion);
  w.u8(static_cast<uint8_t>(tag));
  w.u64(fingerprint);
  w.bytes(body);
  return w.take();
}

inline ByteReader open_header(std::span<const uint8_t> data, TypeTag expected,
                              uint64_t expected_fp, bool check_fp) {
  ByteReader r(data);
  auto magic = r.bytes(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0)
    throw DecodeError(DecodeErrorKind::bad_header, "bad magic");
  uint8_t version = r.u8();
  if (version != kVersion)
    throw DecodeError(DecodeErrorKind::bad_header,
                      "unsupported format version " + std::to_string(version));
  uint8_t tag = r.u8();
  if (tag != static_cast<uint8_t>(expected))
    throw DecodeError(DecodeErrorKind::bad_header, "unexpected type tag");
  uint64_t fp = r.u64();
  if (check_fp && fp != expected_fp)
    throw DecodeError(DecodeErrorKind::params_mismatch,
                      "artifact was produced under different public parameters");
  return r;
}

}  // namespace detail

// --- Params ----------------------------------------------------------------

inline std::vector<uint8_t> encode_params(const Params& pp) {
  auto body = params_body(pp);
  return detail::with_header(TypeTag::params, fingerprint_bytes(body), body);
}

inline Params decode_params(std::span<const uint8_t> data) {
  auto r = detail::open_header(data, TypeTag::params, 0, false);
  Params pp;
  pp.n = r.u32();
  pp.q = r.u64();
  pp.k = r.u16();
  pp.l = r.u16();
  pp.kappa = r.u16();
  pp.d = r.u32();
  pp.gamma = r.f64();
  pp.sigma_e = r.f64();
  pp.sigma_g = r.f64();
  pp.sigma_p = r.f64();
  pp.sigma_z = r.f64();
  pp.alpha = r.f64();
  pp.eta = r.f64();
  pp.M = r.f64();
  pp.min_entropy_bits = r.f64();
  pp.tail_cut = r.f64();
  pp.profile_name = r.str();
  pp.hash_id = r.str();
  if (pp.n == 0 || pp.n > (1u << 20) || (pp.n & (pp.n - 1)) != 0 || pp.q < 4 ||
      pp.k != coeff_bits(pp.q) || pp.l < 1 || pp.kappa == 0 || pp.kappa > pp.n ||
      pp.d < 1)
    throw DecodeError(DecodeErrorKind::malformed, "invalid parameter scalars");
  {
    auto span = r.bytes(pp.lk() * detail::element_bytes(pp.n, pp.q));
    BitReader br(span);
    try {
      pp.a = unpack_ring_vector(br, pp.lk(), pp.n, pp.q);
    } catch (const std::out_of_range&) {
      throw DecodeError(DecodeErrorKind::out_of_range, "ring coefficient out of range");
    }
  }
  r.expect_end();
  // Integrity: the header fingerprint must match the decoded body.
  detail::ByteReader hdr(data);
  hdr.bytes(6);
  uint64_t fp = hdr.u64();
  if (fp != params_fingerprint(pp))
    throw DecodeError(DecodeErrorKind::malformed, "params fingerprint mismatch");
  return pp;
}

// --- key pairs and public keys ----------------------------------------------

inline std::vector<uint8_t> encode_signer_keypair(const Params& pp, const SignerKeyPair& kp) {
  detail::ByteWriter w;
  BitWriter t_bits;
  pack_ring_element(t_bits, kp.t);
  w.bytes(t_bits.bytes());
  BitWriter s_bits;
  pack_signer_secret(s_bits, pp, kp.s);
  w.bytes(s_bits.bytes());
  return detail::with_header(TypeTag::signer_keypair, params_fingerprint(pp), w.take());
}

inline SignerKeyPair decode_signer_keypair(const Params& pp, std::span<const uint8_t> data) {
  auto r = detail::open_header(data, TypeTag::signer_keypair, params_fingerprint(pp), true);
  SignerKeyPair kp;
  kp.t = detail::read_element(r, pp.n, pp.q);
  const size_t s_bytes = (size_t(pp.lk()) * secret_coeff_bits(pp.d) + 7) / 8;
  BitReader br(r.bytes(s_bytes));
  kp.s = unpack_signer_secret(br, pp);
  r.expect_end();
  return kp;
}

inline std::vector<uint8_t> encode_signer_public(const Params& pp, const RingElement& t) {
  BitWriter bits;
  pack_ring_element(bits, t);
  return detail::with_header(TypeTag::signer_public, params_fingerprint(pp), bits.bytes());
}

inline RingElement decode_signer_public(const Params& pp, std::span<const uint8_t> data) {
  auto r = detail::open_header(data, TypeTag::signer_public, params_fingerprint(pp), true);
  RingElement t = detail::read_element(r, pp.n, pp.q);
  r.expect_end();
  return t;
}

inline std::vector<uint8_t> encode_verifier_keypair(const Params& pp, const VerifierKeyPair& kp) {
  detail::ByteWriter w;
  BitWriter pub;
  pack_ring_vector(pub, kp.b0.vec);
  pack_ring_vector(pub, kp.b1.vec);
  w.bytes(pub.bytes());
  for (const TrapdoorMatrix* R : {&kp.r0, &kp.r1}) {
    detail::ByteWriter hdr;
    hdr.u16(static_cast<uint16_t>(R->l));
    hdr.u16(static_cast<uint16_t>(R->k));
    hdr.u32(pp.n);
    hdr.u64(pp.q);
    w.bytes(hdr.take());
    BitWriter entries;
    pack_trapdoor_entries(entries, *R);
    w.bytes(entries.bytes());
    BitWriter tag;
    pack_ring_element(tag, R->h);
    w.bytes(tag.bytes());
  }
  return detail::with_header(TypeTag::verifier_keypair, params_fingerprint(pp), w.take());
}

inline VerifierKeyPair decode_verifier_keypair(const Params& pp, std::span<const uint8_t> data) {
  auto r = detail::open_header(data, TypeTag::verifier_keypair, params_fingerprint(pp), true);
  VerifierKeyPair kp;
  for (TaggedPublicVector* pub : {&kp.b0, &kp.b1}) {
    pub->l = pp.l;
    pub->k = pp.k;
    pub->vec = detail::read_vector(r, pp.lk(), pp.n, pp.q);
  }
  for (TrapdoorMatrix* R : {&kp.r0, &kp.r1}) {
    uint16_t l = r.u16(), k = r.u16();
    uint32_t n = r.u32();
    uint64_t q = r.u64();
    if (l != pp.l || k != pp.k || n != pp.n || q != pp.q)
      throw DecodeError(DecodeErrorKind::malformed, "trapdoor header disagrees with params");
    R->l = l;
    R->k = k;
    R->r.clear();
    const size_t total = size_t(l) * k;
    const size_t entry_block = total * size_t(pp.n) * pp.k;  // bits
    BitReader br(r.bytes((entry_block + 7) / 8));
    try {
      for (size_t i = 0; i < total; i++) R->r.push_back(unpack_ring_element(br, pp.n, pp.q));
    } catch (const std::out_of_range&) {
      throw DecodeError(DecodeErrorKind::out_of_range, "ring coefficient out of range");
    }
    R->h = detail::read_element(r, pp.n, pp.q);
  }
  r.expect_end();
  return kp;
}

inline std::vector<uint8_t> encode_verifier_public(const Params& pp,
                                                   const TaggedPublicVector& b0,
                                                   const TaggedPublicVector& b1) {
  BitWriter bits;
  pack_ring_vector(bits, b0.vec);
  pack_ring_vector(bits, b1.vec);
  return detail::with_header(TypeTag::verifier_public, params_fingerprint(pp), bits.bytes());
}

inline std::pair<TaggedPublicVector, TaggedPublicVector> decode_verifier_public(
    const Params& pp, std::span<const uint8_t> data) {
  auto r = detail::open_header(data, TypeTag::verifier_public, params_fingerprint(pp), true);
  std::pair<TaggedPublicVector, TaggedPublicVector> out;
  for (TaggedPublicVector* pub : {&out.first, &out.second}) {
    pub->l = pp.l;
    pub->k = pp.k;
    pub->vec = detail::read_vector(r, pp.lk(), pp.n, pp.q);
  }
  r.expect_end();
  return out;
}

// --- signatures --------------------------------------------------------------

// c1 is stored dense (one ring element) so that the measured signature size
// matches the dense size formula; the sparse encoding exists alongside for
// size accounting.
inline std::vector<uint8_t> encode_signature(const Params& pp, const Signature& sig) {
  detail::ByteWriter w;
  BitWriter bits;
  pack_ring_vector(bits, sig.c0);
  pack_ring_element(bits, sig.c1.to_ring());
  pack_ring_vector(bits, sig.z);
  w.bytes(bits.bytes());
  return detail::with_header(TypeTag::signature, params_fingerprint(pp), w.take());
}

inline Signature decode_signature(const Params& pp, std::span<const uint8_t> data) {
  auto r = detail::open_header(data, TypeTag::signature, params_fingerprint(pp), true);
  Signature sig;
  sig.c0 = detail::read_vector(r, pp.lk(), pp.n, pp.q);
  RingElement c1_dense = detail::read_element(r, pp.n, pp.q);
  try {
    sig.c1 = ChallengeElement::from_ring(c1_dense, pp.kappa);
  } catch (const std::invalid_argument& e) {
    throw DecodeError(DecodeErrorKind::malformed, e.what());
  }
  sig.z = detail::read_vector(r, pp.lk(), pp.n, pp.q);
  r.expect_end();
  return sig;
}

}  // namespace lasdvs::codec
