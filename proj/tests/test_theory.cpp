#include <cmath>
#include <numeric>

#include "doctest.h"
#include "dyncount/error.hpp"
#include "dyncount/theory.hpp"
#include "support.hpp"

using namespace dyncount;
using namespace dyncount::theory;

namespace {

BigInt exact(const Prediction& p) {
  REQUIRE(p.value.is_rational());
  const Rational r = p.value.rational_value();
  REQUIRE(denominator(r) == 1);
  return numerator(r);
}

long double approx(const Prediction& p) { return static_cast<long double>(p.value.approx()); }

ErrorCode code_of(auto fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidParameters;
}

// Reference arithmetic, by direct enumeration.
long double ld_pow(long double b, long double e) { return std::pow(b, e); }
std::uint64_t ref_phi(std::uint64_t n) {
  std::uint64_t c = 0;
  for (std::uint64_t i = 1; i <= n; ++i) c += std::gcd(i, n) == 1;
  return c;
}
std::uint64_t ref_tau(std::uint64_t n) {
  std::uint64_t c = 0;
  for (std::uint64_t i = 1; i <= n; ++i) c += n % i == 0;
  return c;
}
int ref_mobius(std::uint64_t n) {
  int sign = 1;
  for (std::uint64_t f = 2; f <= n; ++f) {
    if (n % f) continue;
    n /= f;
    if (n % f == 0) return 0;
    sign = -sign;
  }
  return sign;
}

long double ref_Nd(std::uint64_t q, std::uint64_t p, std::uint64_t d) {
  const std::uint64_t s = std::gcd(q - 1, d - 1);
  long double v = ld_pow(q, d - 1) + (s - 1) * ld_pow(q, (long double)(d - 1) - ref_phi(d - 1));
  if (d % p == 0) v += (q - 1) * ld_pow(q, (long double)d / p - 1);
  return v;
}

// Rational bound with |m-n-1| division; nullopt for the degenerate case.
std::optional<long double> ref_rational(std::uint64_t q, long m, long n) {
  const long g = std::labs(m - n - 1);
  if (g == 0) return std::nullopt;
  const std::uint64_t s = std::gcd<std::uint64_t>(q - 1, g);
  if (m == 0 && n == 1) return q + s - 1.0L;
  if (m == 0) return ld_pow(q, n) + (s - 1) * ld_pow(q, n - 2);
  const long t = m / g, r = m % g;
  long rs = 0;
  for (long i = 1; i <= r; ++i) rs += std::gcd(i, g) != 1;
  return ld_pow(q, m + n) + (s - 1) * ld_pow(q, n + t * (g - (long)ref_phi(g)) + rs);
}

long double ref_rational_improved(std::uint64_t q, std::uint64_t p, long m, long n) {
  const long g = m - n - 1;
  const std::uint64_t s = std::gcd<std::uint64_t>(q - 1, g);
  const long t = m / g, r = m % g;
  long rs = 0;
  for (long i = 1; i <= r; ++i) rs += std::gcd(i, g) != 1;
  long double v = ld_pow(q, m + n - 1) + (s - 1) * ld_pow(q, n + t * (g - (long)ref_phi(g)) + rs);
  if ((m - n) % (long)p == 0) v += (q - 1) * ld_pow(q, (long double)m / p - 1);
  return v;
}

std::vector<std::pair<std::uint64_t, std::uint32_t>> small_prime_powers() {
  std::vector<std::pair<std::uint64_t, std::uint32_t>> out;
  for (auto q : testing_support::prime_powers_upto(128)) {
    auto pk = arith::prime_power_split(q);
    out.emplace_back(pk->first, pk->second);
  }
  return out;
}

std::uint64_t ipow(std::uint64_t b, std::uint32_t e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

bool close(long double a, long double b) { return std::fabs(a - b) <= 1e-9L * std::max(1.0L, std::fabs(b)); }

}  // namespace

TEST_CASE("arithmetic helpers") {
  CHECK(tau(12) == 6);
  CHECK(phi(9) == 6);
  CHECK(mobius(6) == 1);
  CHECK(mobius(4) == 0);
  CHECK(divisors(12) == std::vector<std::uint64_t>{1, 2, 3, 4, 6, 12});
  for (std::int64_t n = 1; n <= 300; ++n) {
    CHECK(tau(n) == ref_tau(n));
    CHECK(phi(n) == ref_phi(n));
    CHECK(mobius(n) == ref_mobius(n));
    CHECK(divisors(n).size() == tau(n));
  }
  CHECK(code_of([] { tau(0); }) == ErrorCode::NonPositive);
  CHECK(code_of([] { phi(-3); }) == ErrorCode::NonPositive);
  CHECK(code_of([] { mobius(0); }) == ErrorCode::NonPositive);
}

TEST_CASE("degree-d bound") {
  CHECK(exact(bound_Nd(5, 3)) == 30);
  CHECK(exact(bound_Nd(5, 2)) == 5);
  for (auto [p, k] : small_prime_powers()) {
    const auto q = ipow(p, k);
    for (std::uint32_t d = 2; d <= 7; ++d) {
      CAPTURE(q);
      CAPTURE(d);
      const auto b = bound_Nd(q, d);
      CHECK(b.kind == Kind::UpperBound);
      CHECK(close(approx(b), ref_Nd(q, p, d)));
      CHECK(b.value.compare(BigInt(3) * BigInt(ipow(q, d - 1))) <= 0);
      CHECK(exact(bound_Nd_simple(q, d)) == 3 * BigInt(ipow(q, d - 1)));
    }
  }
  // p | d with d/p not an integer exponent never arises: d/p is an integer.
  CHECK(bound_Nd(4, 2).value.is_rational());
}

TEST_CASE("rho exponent") {
  auto r = rho_lower_exponent(2, 2);
  CHECK(r.kind == Kind::ReportOnly);
  REQUIRE(r.real.has_value());
  CHECK(static_cast<double>(*r.real) == doctest::Approx(0.25));
  CHECK(static_cast<double>(*rho_lower_exponent(4, 2).real) == doctest::Approx(1.0 / 6));
  CHECK(static_cast<double>(*rho_lower_exponent(3, 3).real) == doctest::Approx(1.0 / 6));
  CHECK(static_cast<double>(*rho_lower_exponent(6, 3).real) ==
        doctest::Approx(1.0 / (2 * (2 + std::log(6.0) / std::log(3.0)))));
  CHECK(code_of([] { rho_lower_exponent(2, 1); }) == ErrorCode::InvalidParameters);
  CHECK(code_of([] { rho_for(4, 2); }) == ErrorCode::InvalidParameters);  // gcd(2, 3) = 1
  CHECK(rho_for(5, 2).kind == Kind::ReportOnly);
  CHECK(holds(rho_for(5, 2), 1000000));
}

TEST_CASE("sparse bounds") {
  CHECK(exact(bound_sparse_gcd(9, {2, 3})) == 8);
  CHECK(exact(bound_sparse_gcd(7, {3, 5})) == 12);
  for (std::uint64_t q : {3, 4, 5, 7, 8, 9}) CHECK(exact(bound_sparse_gcd(q, {q})) == q - 1);
  CHECK(exact(bound_sparse_gcd(7, {0, 3})) == 6);  // e = 0 contributes gcd(-1, ...) = 1

  auto f = bound_sparse_frobenius(2, 2, 1);
  CHECK_FALSE(f.value.is_rational());
  CHECK(static_cast<double>(approx(f)) == doctest::Approx(1.5 + 1.0 + (std::cbrt(4.0) - 1)));
  CHECK(f.value.compare(3) > 0);
  CHECK(f.value.compare(4) < 0);
  CHECK(holds(f, 3));
  CHECK_FALSE(holds(f, 4));

  for (auto [p, k] : small_prime_powers()) {
    const auto q = ipow(p, k);
    long double prev = 0;
    for (std::uint32_t s = 1; s <= 4; ++s) {
      const long double ref = ld_pow(q - 1, s) / k + 2 * ld_pow(std::sqrt((long double)q) - 1, s) / k +
                              ld_pow(std::cbrt((long double)q) - 1, s);
      const auto b = bound_sparse_frobenius(p, k, s);
      CHECK(close(approx(b), ref));
      if (q >= 4) CHECK(approx(b) >= prev);
      prev = approx(b);

      // Double sum over e | k and d | k/e, evaluated in floating point.
      long double ms = 0;
      for (std::uint32_t e = 1; e <= k; ++e) {
        if (k % e) continue;
        long double inner = 0;
        for (std::uint32_t d = 1; d <= k / e; ++d)
          if ((k / e) % d == 0) inner += ld_pow(ld_pow(p, d) - 1, s) / d;
        ms += ref_mobius(e) * inner / e;
      }
      const auto mb = bound_sparse_moebius(p, k, s);
      CHECK(close(approx(mb), ms));
      if (k == 1) CHECK(exact(mb) == BigInt(ipow(p - 1, s)));
      if (arith::is_prime(k)) {
        CHECK(bound_sparse_moebius_prime_k(p, k, s).value.rational_value() == mb.value.rational_value());
        CHECK(approx(mb) <= approx(b));
      }
    }
  }
  CHECK(exact(bound_sparse_moebius(2, 2, 1)) == 2);
  for (std::uint64_t p : {2, 3})
    for (std::uint32_t k : {2, 3, 5})
      for (std::uint32_t s : {1, 2}) {
        const Rational closed = Rational(BigInt(ipow(ipow(p, k) - 1, s)), k) +
                                Rational(BigInt(k - 1) * BigInt(ipow(p - 1, s)), k);
        CHECK(bound_sparse_moebius(p, k, s).value.rational_value() == closed);
      }
  CHECK(code_of([] { bound_sparse_moebius_prime_k(2, 4, 1); }) == ErrorCode::InvalidParameters);
}

TEST_CASE("linearised bounds") {
  auto b = bound_linearised(2, 2, 1);
  CHECK(exact(b) == 4);
  CHECK(b.strict);
  CHECK(exact(bound_linearised(2, 3, 2)) == 32);
  CHECK_FALSE(holds(b, 4));
  CHECK(holds(b, 3));
  for (auto [p, k] : small_prime_powers()) {
    const auto q = ipow(p, k);
    for (std::uint32_t n = 1; n <= 4; ++n) {
      const long double ref = (2.0L * p - 2) * ld_pow(q, n - 1) + 2 * ld_pow(q, (long double)n - ref_phi(n));
      CHECK(close(approx(bound_linearised(p, k, n)), ref));
      const auto weak = bound_linearised_weak(p, k, n);
      CHECK(weak.strict);
      CHECK(exact(weak) == 2 * BigInt(p) * BigInt(ipow(q, n - 1)));
      CHECK(approx(bound_linearised(p, k, n)) <= approx(weak));
    }
  }
}

TEST_CASE("exact counts") {
  CHECK(exact(exact_linear(7)) == 5);
  CHECK(exact(exact_linear(2)) == 2);
  CHECK(exact(exact_linear(9)) == 5);
  CHECK(exact(exact_power(13, 5)) == 3);
  CHECK(exact(exact_power(7, 4)) == 2);
  CHECK(exact_linear(7).kind == Kind::Exact);
  CHECK(exact(exact_frobenius_affine(2, 2, NormFilter::Norm1)) == 2);
  CHECK(exact(exact_frobenius_affine(5, 1, NormFilter::Any)) == 4);
  CHECK(exact(exact_frobenius_affine(3, 2, NormFilter::NormNot1)) == 1);
  for (auto [p, k] : small_prime_powers()) {
    const auto q = ipow(p, k);
    CHECK(exact(exact_power(q, 2)) == 1);
    for (std::uint32_t d = 1; d <= 12; ++d) {
      CHECK(exact(exact_power(q, d)) == ref_tau(std::gcd<std::uint64_t>(d - 1, q - 1)));
      CHECK(exact(exact_power(q, d)) <= ref_tau(q - 1));
      if (std::gcd<std::uint64_t>(d - 1, q - 1) == 1) CHECK(exact(exact_power(q, d)) == 1);
    }
    CHECK(exact(exact_frobenius_affine(p, k, NormFilter::Any)) ==
          2 + exact(exact_frobenius_affine(p, k, NormFilter::NormNot1)));
    CHECK(exact(exact_frobenius_affine(p, k, NormFilter::Any)) == ref_tau(p - 1) + 1);
  }
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13})
    CHECK(exact(exact_frobenius_affine(p, 1, NormFilter::Any)) == exact(exact_linear(p)));
}

TEST_CASE("rational bounds") {
  CHECK(code_of([] { bound_rational(5, 2, 1); }) == ErrorCode::DivisionUndefined);
  CHECK(code_of([] { bound_rational(5, 0, 0); }) == ErrorCode::OutOfRange);
  CHECK(code_of([] { bound_rational_improved(5, 3, 2); }) == ErrorCode::OutOfRange);
  CHECK(exact(bound_rational_improved(5, 3, 0)) == 30);
  CHECK(exact(bound_rational(4, 0, 2)) == 18);
  CHECK(exact(bound_rational(7, 0, 1)) == 8);  // q + s - 1, s = gcd(6, 2)

  for (auto [p, k] : small_prime_powers()) {
    const auto q = ipow(p, k);
    if (q > 32) continue;
    for (long m = 0; m <= 6; ++m)
      for (long n = 0; n <= 4; ++n) {
        if (m + n < 1) continue;
        CAPTURE(q);
        CAPTURE(m);
        CAPTURE(n);
        const auto ref = ref_rational(q, m, n);
        if (!ref) {
          CHECK(code_of([&] { bound_rational(q, m, n); }) == ErrorCode::DivisionUndefined);
          continue;
        }
        const auto b = bound_rational(q, m, n);
        CHECK(close(approx(b), *ref));
        // The stated consequences.
        const BigInt qmn = BigInt(ipow(q, m + n));
        if (std::labs(m - n - 1) == 1 || std::gcd<std::uint64_t>(q - 1, std::labs(m - n - 1)) == 1)
          if (m >= 1) CHECK(b.value.compare(qmn) <= 0);
        if (m >= 1) CHECK(b.value.compare(2 * qmn) <= 0);
        if (m - n >= 2) {
          const auto im = bound_rational_improved(q, m, n);
          CHECK(close(approx(im), ref_rational_improved(q, p, m, n)));
          const BigInt q1 = BigInt(ipow(q, m + n - 1));
          CHECK(im.value.compare((m - n == 2 ? 2 : 3) * q1) <= 0);
        }
      }
    for (std::uint32_t d = 2; d <= 7; ++d) {
      const auto a = bound_rational_improved(q, d, 0), b = bound_Nd(q, d);
      CHECK((a.value - b.value).is_rational());
      CHECK((a.value - b.value).rational_value() == 0);
    }
  }
  // m/p not an integer: (q - 1) q^(m/p - 1) is irrational.
  auto frac = bound_rational_improved(3, 4, 1);
  CHECK_FALSE(frac.value.is_rational());
  CHECK(close(approx(frac), ref_rational_improved(3, 3, 4, 1)));

  for (const auto& c : rational_corollaries(5, 4, 1)) {
    CHECK(c.kind == Kind::UpperBound);
    CHECK(c.source.rfind("rational-", 0) == 0);
  }
}

TEST_CASE("surd arithmetic") {
  auto a = Surd::power(2, Rational(1, 2));
  CHECK_FALSE(a.is_rational());
  CHECK((a * a).is_rational());
  CHECK((a * a).rational_value() == 2);
  CHECK((a - a).rational_value() == 0);
  CHECK(Surd::power(9, Rational(1, 2)).rational_value() == 3);
  CHECK(Surd::power(8, Rational(2, 3), 5).rational_value() == 20);
  CHECK(Surd::integer(7).to_string() == "7");
  CHECK(Surd::rational(Rational(3, 2)).to_string() == "3/2");
  CHECK(Surd::power(4, Rational(1, 3)).to_string().substr(0, 6) == "1.5874");
  CHECK(a.compare(1) > 0);
  CHECK(a.compare(2) < 0);
  CHECK(Surd::integer(5).compare(5) == 0);
  CHECK(Surd::power(2, Rational(1, 3)).pow(3).rational_value() == 2);
  CHECK_THROWS_AS(a.rational_value(), std::logic_error);
  CHECK(code_of([] { Surd::power(6, Rational(1, 2)); }) == ErrorCode::InvalidParameters);
  CHECK(Surd::power(6, 2).rational_value() == 36);
}

TEST_CASE("verify") {
  FamilySpec lin;
  lin.kind = FamilyKind::Linear;
  lin.field = testing_support::field(7);
  auto v = verify(lin, 5);
  CHECK(v.overall);
  CHECK(v.exact() == std::optional<std::string>("5"));
  CHECK_FALSE(verify(lin, 6).overall);

  FamilySpec d2;
  d2.kind = FamilyKind::AllDegree;
  d2.field = testing_support::field(5);
  d2.d = 2;
  auto w = verify(d2, 5);
  CHECK(w.overall);
  CHECK(w.best_bound() == std::optional<std::string>("5"));
  CHECK_FALSE(verify(d2, 6).overall);
  bool saw_rho = false;
  for (const auto& c : w.checks) {
    if (c.prediction.kind == Kind::ReportOnly) {
      saw_rho = true;
      CHECK_FALSE(c.pass.has_value());
    }
  }
  CHECK(saw_rho);

  FamilySpec sp;
  sp.kind = FamilyKind::Sparse;
  sp.field = testing_support::field(9);
  sp.exponents = {2, 3};
  auto x = verify(sp, 8);
  CHECK(x.overall);
  for (const auto& c : x.checks)
    if (c.prediction.source == "sparse-scaling") CHECK(c.slack == "0");

  FamilySpec r;
  r.kind = FamilyKind::Rational;
  r.field = testing_support::field(5);
  r.m = 2;
  r.n = 1;
  auto y = verify(r, 10);
  REQUIRE(y.notes.size() == 1);
  CHECK(y.notes[0].find("m = n + 1") != std::string::npos);
  REQUIRE(y.checks.size() == 1);
  CHECK(y.checks[0].prediction.source == "rational-trivial");
  CHECK(y.checks[0].prediction.strict);

  auto j = w.theory_json();
  REQUIRE(j.is_array());
  for (const auto& e : j) {
    CHECK(e.contains("source"));
    CHECK(e.contains("kind"));
    CHECK(e.contains("value"));
    CHECK(e.contains("pass"));
    CHECK(e.contains("slack"));
  }
}
