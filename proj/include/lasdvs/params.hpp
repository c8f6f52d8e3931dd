#pragma once
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "lasdvs/ring.hpp"
#include "lasdvs/rng.hpp"

namespace lasdvs {

// Raw knobs defining a parameter set. The public vector `a` is derived
// deterministically from these, so a profile names one fixed pp bundle.
struct Profile {
  std::string name;
  uint32_t n = 0;       // ring degree, power of two
  uint64_t q = 0;       // modulus, power of two
  uint32_t l = 0;       // trapdoor width
  uint32_t kappa = 0;   // challenge Hamming weight
  uint32_t d = 0;       // secret-key coefficient bound, floor(q^(1/gamma))
  double gamma = 0;
  double sigma_e = 0;   // trapdoor entry width
  double sigma_g = 0;   // gadget-coset width
  double sigma_p = 0;   // spherical preimage width
  double alpha = 12.0;  // sigma_z = alpha * T
  double eta = 1.3;     // verification slack, 1 < eta < 2
  double min_entropy_bits = 100.0;
  double tail_cut = 13.0;
};

inline Profile toy_profile() {
  Profile p;
  p.name = "toy";
  p.n = 16;
  p.q = uint64_t{1} << 10;
  p.l = 2;
  p.kappa = 8;
  p.d = 2;
  p.gamma = 8.0;
  p.sigma_e = 1.2;
  p.sigma_g = 2.5;
  p.sigma_p = 30.0;
  p.min_entropy_bits = 20.0;
  return p;
}

inline Profile desk_profile() {
  Profile p;
  p.name = "desk";
  p.n = 128;
  p.q = uint64_t{1} << 24;
  p.l = 2;
  p.kappa = 22;
  p.d = 8;
  p.gamma = 8.0;
  p.sigma_e = 3.2;
  p.sigma_g = 6.0;
  p.sigma_p = 700.0;
  p.min_entropy_bits = 100.0;
  return p;
}

// log2 of the challenge-space size 2^kappa * C(n, kappa).
inline double challenge_entropy_bits(uint32_t n, uint32_t kappa) {
  if (kappa == 0 || kappa > n) return 0.0;
  double lnc = std::lgamma(double(n) + 1) - std::lgamma(double(kappa) + 1) -
               std::lgamma(double(n - kappa) + 1);
  return double(kappa) + lnc / std::log(2.0);
}

// Public parameter bundle pp: profile scalars, derived constants and the
// public vector a of length l+k.
struct Params {
  std::string profile_name;
  uint32_t n = 0;
  uint64_t q = 0;
  uint32_t k = 0;  // gadget length, ceil(log2 q)
  uint32_t l = 0;
  uint32_t kappa = 0;
  uint32_t d = 0;
  double gamma = 0;
  double sigma_e = 0;
  double sigma_g = 0;
  double sigma_p = 0;
  double sigma_z = 0;  // alpha * T
  double alpha = 0;
  double eta = 0;
  double M = 0;  // rejection-sampling repetition constant
  double min_entropy_bits = 0;
  double tail_cut = 13.0;
  RingVector a;
  std::string hash_id;

  uint32_t lk() const { return l + k; }
  // Dimension of the coefficient embedding of a length-(l+k) ring vector.
  uint64_t embedding_dim() const { return uint64_t(n) * (l + k); }

  // Worst-case norm of s*c1 in the coefficient embedding.
  double T() const { return double(d) * double(kappa) * std::sqrt(double(embedding_dim())); }
  // Operational verify bound on ||z||.
  double B_z() const { return eta * sigma_z * std::sqrt(double(embedding_dim())); }
  // Smallness bound on the error recovered by ring_invert.
  double B_e() const { return eta * sigma_p * std::sqrt(double(embedding_dim())); }

  double entropy_bits() const { return challenge_entropy_bits(n, kappa); }
};

namespace detail {

inline bool d_matches_gamma(uint32_t d, uint64_t q, double gamma) {
  long double r = std::exp(std::log(static_cast<long double>(q)) / gamma);
  // Guard against one-ulp misrounding around integer boundaries.
  auto fl = static_cast<uint64_t>(std::floor(r + 1e-9L));
  auto fl2 = static_cast<uint64_t>(std::floor(r - 1e-9L));
  return d == fl || d == fl2;
}

inline std::string canonical_profile_string(const Profile& p) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "name=%s n=%u q=%llu l=%u kappa=%u d=%u gamma=%.17g "
                "sigma_e=%.17g sigma_g=%.17g sigma_p=%.17g alpha=%.17g "
                "eta=%.17g min_entropy=%.17g tail=%.17g",
                p.name.c_str(), p.n, static_cast<unsigned long long>(p.q), p.l,
                p.kappa, p.d, p.gamma, p.sigma_e, p.sigma_g, p.sigma_p, p.alpha,
                p.eta, p.min_entropy_bits, p.tail_cut);
  return std::string(buf);
}

}  // namespace detail

// Fills every Params field from a profile: validates the invariants, computes
// the derived constants and samples `a` from a seed bound to the profile
// contents, so every run of setup on one profile yields the same pp.
inline Params setup(const Profile& p) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("setup: " + msg); };
  if (p.n == 0 || (p.n & (p.n - 1)) != 0) fail("ring degree n must be a power of two");
  if (p.q < 4) fail("modulus q must be at least 4");
  if ((p.q & (p.q - 1)) != 0) fail("modulus q must be a power of two");
  const uint32_t k = static_cast<uint32_t>(std::bit_width(p.q - 1));
  if (p.l < 1) fail("trapdoor width l must be at least 1");
  if (p.l + k < 2) fail("l + k must be at least 2");
  if (p.kappa == 0 || p.kappa > p.n) fail("challenge weight kappa out of range");
  if (p.d < 1 || p.d > p.q / 4) fail("secret bound d out of range");
  if (p.gamma <= 1.0) fail("gamma must exceed 1");
  if (!detail::d_matches_gamma(p.d, p.q, p.gamma)) fail("d != floor(q^(1/gamma))");
  if (p.sigma_e <= 0 || p.sigma_g <= 0 || p.sigma_p <= 0) fail("Gaussian widths must be positive");
  if (!(p.eta > 1.0 && p.eta < 2.0)) fail("eta must lie in (1, 2)");
  if (p.alpha <= 0) fail("alpha must be positive");
  if (p.tail_cut < 6.0) fail("tail cut must be at least 6");
  double entropy = challenge_entropy_bits(p.n, p.kappa);
  if (entropy + 1e-9 < p.min_entropy_bits) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "challenge entropy %.2f bits < required %.2f",
                  entropy, p.min_entropy_bits);
    fail(buf);
  }

  Params pp;
  pp.profile_name = p.name;
  pp.n = p.n;
  pp.q = p.q;
  pp.k = k;
  pp.l = p.l;
  pp.kappa = p.kappa;
  pp.d = p.d;
  pp.gamma = p.gamma;
  pp.sigma_e = p.sigma_e;
  pp.sigma_g = p.sigma_g;
  pp.sigma_p = p.sigma_p;
  pp.alpha = p.alpha;
  pp.eta = p.eta;
  pp.min_entropy_bits = p.min_entropy_bits;
  pp.tail_cut = p.tail_cut;
  pp.sigma_z = p.alpha * pp.T();
  pp.M = std::exp(12.0 / p.alpha + 1.0 / (2.0 * p.alpha * p.alpha));
  if (!(pp.M > 1.0)) fail("repetition constant M must exceed 1");
  pp.hash_id = "shake128:LaSDVS-v1-H";

  // Public vector a: fixed per profile, not per run.
  Xof x = Xof::shake128();
  x.absorb(std::string_view("LaSDVS-v1-pp"));
  x.absorb(detail::canonical_profile_string(p));
  RandomSource::Seed seed{};
  x.squeeze(seed.data(), seed.size());
  RandomSource rng(seed, "pp/a");
  const uint64_t mask = pp.q - 1;
  pp.a = RingVector(pp.lk(), pp.n, pp.q);
  for (uint32_t i = 0; i < pp.lk(); i++)
    for (uint32_t j = 0; j < pp.n; j++)
      pp.a[i].set_coeff(j, rng.next_u64() & mask);
  return pp;
}

inline Params setup(std::string_view profile_name) {
  if (profile_name == "toy") return setup(toy_profile());
  if (profile_name == "desk") return setup(desk_profile());
  throw std::invalid_argument("setup: unknown profile '" + std::string(profile_name) + "'");
}

// key=value profile file, one pair per line, '#' starts a comment.
inline Profile parse_profile_kv(const std::string& text) {
  Profile p;
  p.name = "custom";
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!line.empty() && is_space(line.back())) line.pop_back();
    size_t start = 0;
    while (start < line.size() && is_space(line[start])) start++;
    line.erase(0, start);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("profile line " + std::to_string(lineno) + ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    try {
      if (key == "name") p.name = val;
      else if (key == "n") p.n = static_cast<uint32_t>(std::stoul(val));
      else if (key == "q") p.q = std::stoull(val);
      else if (key == "log2_q") p.q = uint64_t{1} << std::stoul(val);
      else if (key == "l") p.l = static_cast<uint32_t>(std::stoul(val));
      else if (key == "kappa") p.kappa = static_cast<uint32_t>(std::stoul(val));
      else if (key == "d") p.d = static_cast<uint32_t>(std::stoul(val));
      else if (key == "gamma") p.gamma = std::stod(val);
      else if (key == "sigma_e") p.sigma_e = std::stod(val);
      else if (key == "sigma_g") p.sigma_g = std::stod(val);
      else if (key == "sigma_p") p.sigma_p = std::stod(val);
      else if (key == "alpha") p.alpha = std::stod(val);
      else if (key == "eta") p.eta = std::stod(val);
      else if (key == "min_entropy_bits") p.min_entropy_bits = std::stod(val);
      else if (key == "tail_cut") p.tail_cut = std::stod(val);
      else throw std::invalid_argument("unknown profile key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("profile line " + std::to_string(lineno) + ": bad value for " + key);
    }
  }
  return p;
}

}  // namespace lasdvs
