#include <algorithm>
#include <set>

#include "doctest.h"
#include "dyncount/error.hpp"
#include "dyncount/gfq.hpp"
#include "support.hpp"

using namespace dyncount;
using testing_support::field;

namespace {

// Reference multiplication: schoolbook product of coefficient vectors,
// reduced by the modulus, with integer arithmetic mod p only.
Elem oracle_mul(const Field& F, Elem x, Elem y) {
  const std::uint32_t p = F.p(), k = F.k();
  const auto a = F.coeffs(x), b = F.coeffs(y);
  std::vector<std::uint64_t> prod(2 * k, 0);
  for (std::uint32_t i = 0; i < k; ++i)
    for (std::uint32_t j = 0; j < k; ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
  const auto& m = F.modulus();
  for (std::size_t d = 2 * k - 1; d >= k; --d) {
    const std::uint64_t c = prod[d];
    if (!c) continue;
    for (std::uint32_t i = 0; i <= k; ++i)
      prod[d - k + i] = (prod[d - k + i] + (p - c) * m[i]) % p;
  }
  std::uint64_t enc = 0, w = 1;
  for (std::uint32_t i = 0; i < k; ++i, w *= p) enc += prod[i] * w;
  return static_cast<Elem>(enc);
}

Elem oracle_pow(const Field& F, Elem x, std::uint64_t e) {
  Elem r = 1;
  while (e--) r = oracle_mul(F, r, x);
  return r;
}

// Irreducibility of a monic quadratic over F_p: no root.
bool quadratic_irreducible(std::uint32_t p, std::uint32_t c0, std::uint32_t c1) {
  for (std::uint32_t x = 0; x < p; ++x)
    if ((x * x + c1 * x + c0) % p == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("make_field examples") {
  auto f2 = Field::make(2, 1);
  CHECK(f2->q() == 2);
  CHECK(f2->modulus() == std::vector<std::uint32_t>{0, 1});

  // Minimum over the monic irreducible quadratics X^2 + c1 X + c0, comparing c0 first.
  std::vector<std::uint32_t> best;
  for (std::uint32_t c0 = 0; c0 < 3 && best.empty(); ++c0)
    for (std::uint32_t c1 = 0; c1 < 3 && best.empty(); ++c1)
      if (quadratic_irreducible(3, c0, c1)) best = {c0, c1, 1};
  auto f9 = Field::make(3, 2);
  CHECK(f9->q() == 9);
  CHECK(f9->modulus() == best);
  CHECK(best == std::vector<std::uint32_t>{1, 0, 1});

  auto code_of = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    FAIL("no error");
    return ErrorCode::InvalidParameters;
  };
  CHECK(code_of([] { Field::make(4, 1); }) == ErrorCode::NonPrime);
  CHECK(code_of([] { Field::make(2, 21); }) == ErrorCode::DomainTooLarge);
  CHECK(code_of([] { Field::make(2, 0); }) == ErrorCode::InvalidParameters);
  CHECK(code_of([] { Field::with_modulus(2, {1, 0, 1}); }) == ErrorCode::InvalidPolynomial);
}

TEST_CASE("modulus is the lexicographic minimum, checked independently") {
  for (auto [p, k] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
           {2, 2}, {2, 3}, {2, 4}, {3, 2}, {3, 3}, {5, 2}, {7, 2}}) {
    // Candidates in lexicographic order, low coefficient most significant.
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < k; ++i) count *= p;
    std::vector<std::uint32_t> found;
    for (std::uint64_t idx = 0; idx < count && found.empty(); ++idx) {
      std::vector<std::uint32_t> c(k + 1, 0);
      c[k] = 1;
      std::uint64_t t = idx;
      for (std::uint32_t i = k; i-- > 0;) {
        c[i] = t % p;
        t /= p;
      }
      // Irreducible iff the quotient ring has no zero divisors.
      bool domain = true;
      const std::uint64_t q = count;
      auto mulmod = [&](std::uint64_t x, std::uint64_t y) {
        std::vector<std::uint64_t> a(k), b(k), prod(2 * k, 0);
        for (std::uint32_t i = 0; i < k; ++i, x /= p, y /= p) a[i] = x % p, b[i] = y % p;
        for (std::uint32_t i = 0; i < k; ++i)
          for (std::uint32_t j = 0; j < k; ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
        for (std::size_t d = 2 * k - 1; d >= k; --d) {
          const std::uint64_t cc = prod[d];
          for (std::uint32_t i = 0; i <= k; ++i)
            prod[d - k + i] = (prod[d - k + i] + (p - cc) * c[i]) % p;
        }
        std::uint64_t enc = 0, w = 1;
        for (std::uint32_t i = 0; i < k; ++i, w *= p) enc += prod[i] * w;
        return enc;
      };
      for (std::uint64_t x = 1; x < q && domain; ++x)
        for (std::uint64_t y = 1; y < q && domain; ++y)
          if (mulmod(x, y) == 0) domain = false;
      if (domain) found = c;
    }
    CAPTURE(p);
    CAPTURE(k);
    CHECK(Field::make(p, k)->modulus() == found);
    CHECK(smallest_irreducible(p, k) == found);
  }
}

TEST_CASE("arithmetic examples") {
  auto f5 = field(5);
  CHECK(f5->inv(1) == 1);
  CHECK(f5->inv(2) == 3);
  CHECK(f5->mult_order(4) == 2);
  CHECK(f5->primitive_element() == 2);

  auto f9 = field(9);
  for (Elem x = 0; x < 9; ++x) CHECK(f9->pow(x, 9) == x);

  auto f7 = field(7);
  CHECK(f7->mult_order(3) == 6);
  CHECK(f7->mult_order(1) == 1);
  CHECK(f7->primitive_element() == 3);
  CHECK(field(2)->primitive_element() == 1);

  CHECK_THROWS_AS(f5->inv(0), Error);
  try {
    f5->mult_order(0);
    FAIL("expected ZeroElement");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroElement);
  }
  CHECK(f5->pow(0, 0) == 1);
}

TEST_CASE("F_4 frobenius, norm and trace") {
  auto f4 = field(4);
  REQUIRE(f4->modulus() == std::vector<std::uint32_t>{1, 1, 1});
  const Elem w = 2, w1 = 3;  // X and X + 1
  CHECK(f4->frobenius(w, 1) == w1);
  CHECK(f4->frobenius(w, 0) == w);
  CHECK(f4->trace(w) == 1);
  CHECK(f4->norm(0) == 0);
  CHECK(f4->trace(0) == 0);
  for (Elem x = 0; x < 4; ++x) CHECK(f4->frobenius(x, 2) == x);
}

TEST_CASE("elements") {
  auto list = [](std::uint64_t q) {
    std::vector<Elem> out;
    for (const auto& e : elements(field(q))) out.push_back(e.value());
    return out;
  };
  CHECK(list(2) == std::vector<Elem>{0, 1});
  CHECK(list(5) == std::vector<Elem>{0, 1, 2, 3, 4});
  auto l4 = list(4);
  REQUIRE(l4.size() == 4);
  CHECK(l4[0] == 0);
  CHECK(l4[1] == 1);
}

TEST_CASE("FieldElement operators and mismatch") {
  auto f9 = field(9);
  FieldElement a(f9, 5), b(f9, 7);
  CHECK((a * b).value() == f9->mul(5, 7));
  CHECK((a + b - b) == a);
  CHECK((a / b * b) == a);
  CHECK((-a + a).value() == 0);
  CHECK(a.inv().value() == f9->inv(5));
  FieldElement c(field(3), 1);
  try {
    (void)(a + c);
    FAIL("expected FieldMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FieldMismatch);
  }
  CHECK_THROWS_AS(FieldElement(f9, 9), Error);
}

TEST_CASE("field axioms, exhaustive for q <= 64") {
  for (auto q : testing_support::prime_powers_upto(64)) {
    CAPTURE(q);
    auto F = field(q);
    const Field& f = *F;
    bool ok_mul = true, ok_comm = true, ok_inv = true, ok_dist = true, ok_add = true;
    bool ok_frob = true, ok_pow = true;
    for (Elem x = 0; x < q; ++x) {
      for (Elem y = 0; y < q; ++y) {
        const Elem xy = f.mul(x, y);
        ok_mul &= xy == oracle_mul(f, x, y);
        ok_mul &= xy == f.mul_slow(x, y);
        ok_add &= f.add(x, y) == f.add_slow(x, y);
        ok_comm &= xy == f.mul(y, x);
        ok_frob &= f.frobenius(xy, 1) == f.mul(f.frobenius(x, 1), f.frobenius(y, 1));
        ok_frob &= f.frobenius(f.add(x, y), 1) == f.add(f.frobenius(x, 1), f.frobenius(y, 1));
        for (Elem z = 0; z < q; z += (q > 16 ? 7 : 1))
          ok_dist &= f.mul(x, f.add(y, z)) == f.add(xy, f.mul(x, z));
      }
      if (x) ok_inv &= f.mul(x, f.inv(x)) == 1;
      ok_pow &= f.pow(x, q) == x;
      ok_pow &= f.frobenius(x, f.k()) == x;
      ok_pow &= f.pow(x, f.p()) == oracle_pow(f, x, f.p());
      ok_pow &= f.add(x, f.neg(x)) == 0;
    }
    CHECK(ok_mul);
    CHECK(ok_add);
    CHECK(ok_comm);
    CHECK(ok_inv);
    CHECK(ok_dist);
    CHECK(ok_frob);
    CHECK(ok_pow);
  }
}

TEST_CASE("multiplicative order and primitive element against naive powering") {
  for (auto q : testing_support::prime_powers_upto(64)) {
    CAPTURE(q);
    auto F = field(q);
    Elem first_gen = 0;
    for (Elem x = 1; x < q; ++x) {
      std::uint64_t m = 1;
      for (Elem y = x; y != 1; y = oracle_mul(*F, y, x)) ++m;
      CHECK(F->mult_order(x) == m);
      CHECK((q - 1) % m == 0);
      if (!first_gen && m == q - 1) first_gen = x;
    }
    CHECK(F->primitive_element() == first_gen);
  }
}

TEST_CASE("norm and trace land in F_p with the right fibre sizes") {
  for (auto q : testing_support::prime_powers_upto(64)) {
    CAPTURE(q);
    auto F = field(q);
    const std::uint32_t p = F->p();
    std::uint64_t norm1 = 0, trace0 = 0;
    bool ok = true;
    for (Elem x = 0; x < q; ++x) {
      // Norm as the product of the conjugates, trace as their sum.
      Elem n = 1, t = 0;
      for (std::uint32_t i = 0; i < F->k(); ++i) {
        n = oracle_mul(*F, n, F->frobenius(x, i));
        t = F->add(t, F->frobenius(x, i));
      }
      ok &= F->norm(x) == n && F->trace(x) == t;
      ok &= F->norm(x) < p && F->trace(x) < p;
      for (Elem y = 0; y < q; y += 3) {
        ok &= F->norm(F->mul(x, y)) == F->mul(F->norm(x), F->norm(y));
        ok &= F->trace(F->add(x, y)) == F->add(F->trace(x), F->trace(y));
      }
      norm1 += F->norm(x) == 1;
      trace0 += F->trace(x) == 0;
    }
    CHECK(ok);
    CHECK(norm1 == (q - 1) / (p - 1));
    CHECK(trace0 == q / p);
  }
  auto f9 = field(9);
  int c = 0;
  for (Elem x = 1; x < 9; ++x) c += f9->norm(x) == 1;
  CHECK(c == 4);
}

TEST_CASE("Hilbert 90, multiplicative and additive") {
  for (std::uint64_t q : {4, 8, 9, 16, 25, 27}) {
    CAPTURE(q);
    auto F = field(q);
    std::set<Elem> quotients, differences;
    for (Elem z = 0; z < q; ++z) {
      const Elem zp = F->frobenius(z, 1);
      if (z) quotients.insert(F->div(z, zp));
      differences.insert(F->sub(z, zp));
    }
    for (Elem x = 0; x < q; ++x) {
      CHECK((x != 0 && F->norm(x) == 1) == (quotients.count(x) == 1));
      CHECK((F->trace(x) == 0) == (differences.count(x) == 1));
    }
  }
}

TEST_CASE("descriptor round-trips through with_modulus") {
  for (std::uint64_t q : {2, 8, 25, 49, 81}) {
    auto F = field(q);
    const auto d = F->descriptor();
    CHECK(d.at("p").get<std::uint32_t>() == F->p());
    CHECK(d.at("k").get<std::uint32_t>() == F->k());
    auto G = Field::with_modulus(F->p(), d.at("modulus").get<std::vector<std::uint32_t>>());
    CHECK(G->same_as(*F));
    CHECK(G->primitive_element() == F->primitive_element());
  }
}

TEST_CASE("lazy tables beyond the eager limit agree with reference arithmetic") {
  auto F = Field::make(2, 17);
  for (int i = 0; i < 2000; ++i) {
    const Elem x = testing_support::uniform(0, F->q() - 1);
    const Elem y = testing_support::uniform(0, F->q() - 1);
    REQUIRE(F->mul(x, y) == F->mul_slow(x, y));
    REQUIRE(F->mul(x, y) == oracle_mul(*F, x, y));
    if (x) REQUIRE(F->mul(x, F->inv(x)) == 1);
  }
  CHECK(F->mult_order(F->primitive_element()) == F->q() - 1);
}
