#pragma once
#include <cstdint>
#include <sstream>
#include <string>

#include "lasdvs/codec.hpp"
#include "lasdvs/params.hpp"
#include "lasdvs/sdvs.hpp"

namespace lasdvs {

// Size accounting: the bit-size formulas evaluated next to the bit-lengths of
// actual encodings. Headers and tags are fixed overhead, reported separately.
struct SizeReport {
  // formulas, in bits
  uint64_t formula_sk_s = 0;          // (l+k) ceil(log2(2d+1))
  uint64_t formula_sk_v = 0;          // 2 l k n ceil(log2 q)
  uint64_t formula_sig_dense = 0;     // 2 (l+k) n ceil(log2 q) + n ceil(log2 q)
  uint64_t formula_c1_sparse = 0;     // kappa (ceil(log2 n) + 1)
  uint64_t formula_sig_sparse = 0;    // dense c0, z plus sparse c1

  // measured payload bits from real encodings
  uint64_t measured_sk_s = 0;
  uint64_t measured_sk_v = 0;
  uint64_t measured_sig = 0;
  uint64_t measured_c1_sparse = 0;

  // fixed overhead, in bytes
  uint64_t header_bytes = 0;            // common file header
  uint64_t trapdoor_overhead_bytes = 0; // per-matrix shape header + tag, both matrices

  bool sk_s_ok() const { return measured_sk_s == formula_sk_s; }
  bool sk_v_ok() const { return measured_sk_v == formula_sk_v; }
  bool sig_ok() const { return measured_sig == formula_sig_dense; }
  bool c1_sparse_ok() const { return measured_c1_sparse == formula_c1_sparse; }
  bool pass() const { return sk_s_ok() && sk_v_ok() && sig_ok() && c1_sparse_ok(); }

  std::string to_text() const {
    std::ostringstream out;
    auto row = [&](const char* name, uint64_t formula, uint64_t measured, bool ok) {
      out << "  " << name << ": formula=" << formula << " bits, measured=" << measured
          << " bits [" << (ok ? "OK" : "FAIL") << "]\n";
    };
    out << "size report\n";
    row("sk_S", formula_sk_s, measured_sk_s, sk_s_ok());
    row("sk_V", formula_sk_v, measured_sk_v, sk_v_ok());
    row("sig (dense c1)", formula_sig_dense, measured_sig, sig_ok());
    row("c1 sparse", formula_c1_sparse, measured_c1_sparse, c1_sparse_ok());
    out << "  sig (sparse c1) total: " << formula_sig_sparse << " bits\n";
    out << "  file header: " << header_bytes << " bytes; trapdoor shape+tag overhead: "
        << trapdoor_overhead_bytes << " bytes\n";
    out << "  overall: " << (pass() ? "OK" : "FAIL") << "\n";
    return out.str();
  }

  std::string to_kv() const {
    std::ostringstream out;
    out << "formula_sk_s_bits=" << formula_sk_s << "\n"
        << "formula_sk_v_bits=" << formula_sk_v << "\n"
        << "formula_sig_dense_bits=" << formula_sig_dense << "\n"
        << "formula_c1_sparse_bits=" << formula_c1_sparse << "\n"
        << "formula_sig_sparse_bits=" << formula_sig_sparse << "\n"
        << "measured_sk_s_bits=" << measured_sk_s << "\n"
        << "measured_sk_v_bits=" << measured_sk_v << "\n"
        << "measured_sig_bits=" << measured_sig << "\n"
        << "measured_c1_sparse_bits=" << measured_c1_sparse << "\n"
        << "header_bytes=" << header_bytes << "\n"
        << "trapdoor_overhead_bytes=" << trapdoor_overhead_bytes << "\n"
        << "size_report_pass=" << (pass() ? 1 : 0) << "\n";
    return out.str();
  }
};

// Evaluates the formulas and measures fresh encodings under `rng`.
inline SizeReport size_report(const Params& pp, RandomSource& rng) {
  SizeReport rep;
  const uint64_t nk = uint64_t(pp.n) * pp.k;
  rep.formula_sk_s = uint64_t(pp.lk()) * codec::secret_coeff_bits(pp.d);
  rep.formula_sk_v = 2 * uint64_t(pp.l) * pp.k * nk;
  rep.formula_sig_dense = 2 * uint64_t(pp.lk()) * nk + nk;
  rep.formula_c1_sparse = uint64_t(pp.kappa) * (coeff_bits(pp.n) + 1);
  rep.formula_sig_sparse = 2 * uint64_t(pp.lk()) * nk + rep.formula_c1_sparse;
  rep.header_bytes = codec::kHeaderBytes;

  SignerKeyPair sk = sign_keygen(rng, pp);
  VerifierKeyPair vk = ver_keygen(rng, pp);
  Signature sig = sign(rng, pp, sk, sk.t, vk, std::span<const uint8_t>());

  {
    BitWriter w;
    rep.measured_sk_s = codec::pack_signer_secret(w, pp, sk.s);
  }
  {
    BitWriter w;
    rep.measured_sk_v = codec::pack_trapdoor_entries(w, vk.r0) +
                        codec::pack_trapdoor_entries(w, vk.r1);
    // (l, k, n, q) shape header plus the packed tag, per matrix
    rep.trapdoor_overhead_bytes =
        2 * (2 + 2 + 4 + 8 + codec::detail::element_bytes(pp.n, pp.q));
  }
  {
    BitWriter w;
    size_t before = w.bits_written();
    pack_ring_vector(w, sig.c0);
    pack_ring_element(w, sig.c1.to_ring());
    pack_ring_vector(w, sig.z);
    rep.measured_sig = w.bits_written() - before;
  }
  {
    BitWriter w;
    rep.measured_c1_sparse = codec::pack_challenge_sparse(w, sig.c1);
  }
  return rep;
}

}  // namespace lasdvs
