#include <catch2/catch_amalgamated.hpp>

#include "lasdvs/ring.hpp"
#include "lasdvs/rng.hpp"

using namespace lasdvs;

namespace {

// Independent oracle: full 2n-1 schoolbook product over signed integers with
// explicit sign handling, folded by x^n = -1 afterwards.
RingElement schoolbook_negacyclic(const RingElement& a, const RingElement& b) {
  const uint32_t n = a.n();
  const int64_t q = int64_t(a.q());
  std::vector<int64_t> full(2 * n - 1, 0);
  for (uint32_t i = 0; i < n; i++)
    for (uint32_t j = 0; j < n; j++)
      full[i + j] += int64_t(a.coeff(i)) * int64_t(b.coeff(j));
  std::vector<int64_t> folded(n, 0);
  for (uint32_t t = 0; t < n; t++) {
    folded[t] = full[t];
    if (t + n < 2 * n - 1) folded[t] -= full[t + n];
  }
  RingElement r(n, a.q());
  for (uint32_t t = 0; t < n; t++) {
    int64_t v = folded[t] % q;
    if (v < 0) v += q;
    r.set_coeff(t, uint64_t(v));
  }
  return r;
}

RingElement random_element(RandomSource& rng, uint32_t n, uint64_t q) {
  RingElement e(n, q);
  for (uint32_t i = 0; i < n; i++) e.set_coeff(i, rng.uniform_below(q));
  return e;
}

}  // namespace

TEST_CASE("ring_add identities") {
  RingElement a = RingElement::from_coeffs(4, 16, std::vector<uint64_t>{1, 2, 3, 4});
  RingElement zero(4, 16);
  CHECK(ring_add(a, zero) == a);

  RingElement all_max = RingElement::from_coeffs(4, 16, std::vector<uint64_t>{15, 15, 15, 15});
  RingElement one_each = RingElement::from_coeffs(4, 16, std::vector<uint64_t>{1, 1, 1, 1});
  CHECK(ring_add(all_max, one_each) == zero);

  RingElement b = RingElement::from_coeffs(4, 16, std::vector<uint64_t>{15, 15, 0, 0});
  CHECK(ring_add(a, b) ==
        RingElement::from_coeffs(4, 16, std::vector<uint64_t>{0, 1, 3, 4}));
}

TEST_CASE("ring ops reject shape mismatches") {
  RingElement a(4, 16), b(4, 17), c(8, 16);
  CHECK_THROWS_AS(ring_add(a, b), std::invalid_argument);
  CHECK_THROWS_AS(ring_mul(a, c), std::invalid_argument);
}

TEST_CASE("ring_mul identities and wraparound") {
  RandomSource rng(RandomSource::Seed{}, "ring-mul");
  RingElement a = random_element(rng, 4, 16);
  CHECK(ring_mul(a, RingElement::one(4, 16)) == a);

  // x * x^(n-1) = x^n = -1
  RingElement x = RingElement::from_coeffs(4, 16, std::vector<uint64_t>{0, 1, 0, 0});
  RingElement xn1 = RingElement::from_coeffs(4, 16, std::vector<uint64_t>{0, 0, 0, 1});
  CHECK(ring_mul(x, xn1) ==
        RingElement::from_coeffs(4, 16, std::vector<uint64_t>{15, 0, 0, 0}));
}

TEST_CASE("ring_mul agrees with the schoolbook oracle on random toys") {
  RandomSource rng(RandomSource::Seed{}, "ring-oracle");
  for (int trial = 0; trial < 200; trial++) {
    RingElement a = random_element(rng, 4, 16);
    RingElement b = random_element(rng, 4, 16);
    CHECK(ring_mul(a, b) == schoolbook_negacyclic(a, b));
  }
}

TEST_CASE("ring_mul exhaustive against oracle at n=2, q=7") {
  for (uint64_t a0 = 0; a0 < 7; a0++)
    for (uint64_t a1 = 0; a1 < 7; a1++)
      for (uint64_t b0 = 0; b0 < 7; b0++)
        for (uint64_t b1 = 0; b1 < 7; b1++) {
          RingElement a = RingElement::from_coeffs(2, 7, std::vector<uint64_t>{a0, a1});
          RingElement b = RingElement::from_coeffs(2, 7, std::vector<uint64_t>{b0, b1});
          REQUIRE(ring_mul(a, b) == schoolbook_negacyclic(a, b));
        }
}

TEST_CASE("ring_mul algebraic laws on random toys") {
  RandomSource rng(RandomSource::Seed{}, "ring-laws");
  for (int trial = 0; trial < 1000; trial++) {
    RingElement a = random_element(rng, 4, 16);
    RingElement b = random_element(rng, 4, 16);
    RingElement c = random_element(rng, 4, 16);
    REQUIRE(ring_mul(a, b) == ring_mul(b, a));
    REQUIRE(ring_mul(ring_mul(a, b), c) == ring_mul(a, ring_mul(b, c)));
    REQUIRE(ring_mul(a, ring_add(b, c)) == ring_add(ring_mul(a, b), ring_mul(a, c)));
  }
}

TEST_CASE("centered representatives") {
  CHECK(RingElement::center(15, 16) == -1);
  CHECK(RingElement::center(8, 16) == 8);  // right-closed boundary
  CHECK(RingElement::center(9, 17) == -8);
  CHECK(RingElement::center(0, 16) == 0);

  // centered then re-canonicalized is the identity on [0, q)
  for (uint64_t q : {16ull, 17ull, 8ull}) {
    for (uint64_t c = 0; c < q; c++) {
      int64_t cc = RingElement::center(c, q);
      uint64_t back = cc < 0 ? uint64_t(cc + int64_t(q)) : uint64_t(cc);
      REQUIRE(back == c);
    }
  }
}

TEST_CASE("inner_product selectors and oracle") {
  RandomSource rng(RandomSource::Seed{}, "ring-ip");
  RingVector u, v, zero;
  for (int i = 0; i < 2; i++) {
    u.push_back(random_element(rng, 4, 16));
    v.push_back(random_element(rng, 4, 16));
    zero.push_back(RingElement(4, 16));
  }
  CHECK(inner_product(u, zero) == RingElement(4, 16));

  RingVector sel;
  sel.push_back(RingElement::one(4, 16));
  sel.push_back(RingElement(4, 16));
  CHECK(inner_product(sel, v) == v[0]);

  RingElement expect =
      ring_add(schoolbook_negacyclic(u[0], v[0]), schoolbook_negacyclic(u[1], v[1]));
  CHECK(inner_product(u, v) == expect);

  RingVector too_short;
  too_short.push_back(random_element(rng, 4, 16));
  CHECK_THROWS_AS(inner_product(u, too_short), std::invalid_argument);
}

TEST_CASE("scalar_mul identities and linearity") {
  RandomSource rng(RandomSource::Seed{}, "ring-sm");
  RingVector v;
  for (int i = 0; i < 3; i++) v.push_back(random_element(rng, 4, 16));
  CHECK(scalar_mul(v, RingElement::one(4, 16)) == v);

  RingVector zeroed = scalar_mul(v, RingElement(4, 16));
  for (size_t i = 0; i < zeroed.size(); i++) CHECK(zeroed[i].is_zero());

  for (int trial = 0; trial < 100; trial++) {
    RingVector u2, v2;
    for (int i = 0; i < 3; i++) {
      u2.push_back(random_element(rng, 4, 16));
      v2.push_back(random_element(rng, 4, 16));
    }
    RingElement c = random_element(rng, 4, 16);
    REQUIRE(scalar_mul(vec_add(u2, v2), c) ==
            vec_add(scalar_mul(u2, c), scalar_mul(v2, c)));
  }
}

TEST_CASE("euclid_norm basics") {
  RingVector zero(3, 4, 16);
  CHECK(euclid_norm(zero) == 0.0);

  RingVector single(1, 4, 16);
  single[0].set_coeff(2, 3);
  CHECK(euclid_norm(single) == 3.0);

  RingVector v;
  v.push_back(RingElement::from_centered(4, 16, std::vector<int64_t>{1, -1, 1, -1}));
  v.push_back(RingElement::from_centered(4, 16, std::vector<int64_t>{2, 0, 0, 0}));
  CHECK(euclid_norm(v) == Catch::Approx(std::sqrt(8.0)).epsilon(1e-12));
  CHECK(uint64_t(norm_sq(v)) == 8);
}

TEST_CASE("norm_sq is the exact integer sum of squares") {
  RandomSource rng(RandomSource::Seed{}, "ring-norm");
  for (int trial = 0; trial < 50; trial++) {
    RingVector v;
    for (int i = 0; i < 4; i++) v.push_back(random_element(rng, 8, 1 << 20));
    u128 expect = 0;
    for (size_t i = 0; i < v.size(); i++)
      for (uint32_t j = 0; j < 8; j++) {
        long long c = v[i].centered_coeff(j);
        expect += u128(c < 0 ? -c : c) * u128(c < 0 ? -c : c);
      }
    REQUIRE(norm_sq(v) == expect);
  }
}
