#pragma once

// Closed-form counts and upper bounds for the number of non-equivalent
// dynamical systems in each family, and verification of observed counts.
//
// All bound arithmetic is exact. Values of the form sum c_i * p^(e_i) with
// rational c_i, e_i are held as a Surd; comparisons against an integer are
// exact whenever the value is rational, and otherwise use 100-digit
// arithmetic on a value that provably cannot equal the integer.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "dyncount/family.hpp"
#include "json.hpp"

namespace dyncount::theory {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Real = boost::multiprecision::cpp_bin_float_100;

class Surd {
 public:
  Surd() = default;
  static Surd integer(const BigInt& v);
  static Surd rational(const Rational& v);
  /// c * b^e; b must be a prime power when e is not an integer.
  static Surd power(std::uint64_t p, const Rational& e, const Rational& c = 1);

  Surd& operator+=(const Surd& o);
  Surd operator+(const Surd& o) const;
  Surd operator-(const Surd& o) const;
  Surd operator*(const Surd& o) const;
  Surd scaled(const Rational& c) const;
  Surd pow(unsigned n) const;

  bool is_rational() const;
  Rational rational_value() const;  // throws std::logic_error if irrational
  Real approx() const;
  /// Sign of (value - n).
  int compare(const BigInt& n) const;
  /// Integer, "a/b", or a 15-significant-digit decimal.
  std::string to_string() const;

 private:
  void add_term(const Rational& frac, const Rational& c);
  void adopt_base(std::uint64_t p);

  std::uint64_t p_ = 0;                 // 0 while only rational terms exist
  std::map<Rational, Rational> terms_;  // fractional exponent in [0,1) -> coefficient
};

enum class Kind { Exact, UpperBound, ReportOnly };
std::string_view to_string(Kind k);

struct Prediction {
  std::string source;
  Kind kind = Kind::UpperBound;
  bool strict = false;  // observed < value rather than <=
  Surd value;
  std::optional<Real> real;  // report-only quantities outside Surd
  nlohmann::json params = nlohmann::json::object();

  std::string value_string() const;
};

// Number-theoretic helpers (n >= 1, else NonPositive).
std::uint64_t tau(std::int64_t n);
std::uint64_t phi(std::int64_t n);
int mobius(std::int64_t n);
std::vector<std::uint64_t> divisors(std::int64_t n);

// Polynomials of degree d >= 2.
Prediction bound_Nd(std::uint64_t q, std::uint32_t d);
Prediction bound_Nd_simple(std::uint64_t q, std::uint32_t d);  // 3 q^(d-1)
/// Exponent of the asymptotic lower bound; never compared with counts.
/// Requires d >= 2 and e >= 2 (InvalidParameters).
Prediction rho_lower_exponent(std::uint32_t d, std::uint32_t e);
/// As above with e = gcd(d, q-1); also requires gcd(d-1, q) = 1.
Prediction rho_for(std::uint64_t q, std::uint32_t d);

// Sparse polynomials sum a_i X^(e_i), all a_i != 0.
Prediction bound_sparse_gcd(std::uint64_t q, const std::vector<std::uint64_t>& exps);
Prediction bound_sparse_frobenius(std::uint64_t p, std::uint32_t k, std::uint32_t s);
Prediction bound_sparse_moebius(std::uint64_t p, std::uint32_t k, std::uint32_t s);
/// Closed form of the above for prime k (InvalidParameters otherwise).
Prediction bound_sparse_moebius_prime_k(std::uint64_t p, std::uint32_t k, std::uint32_t s);

// Linearised polynomials of degree p^n.
Prediction bound_linearised(std::uint64_t p, std::uint32_t k, std::uint32_t n);
Prediction bound_linearised_weak(std::uint64_t p, std::uint32_t k, std::uint32_t n);

Prediction exact_linear(std::uint64_t q);
Prediction exact_power(std::uint64_t q, std::uint32_t d);
Prediction exact_frobenius_affine(std::uint64_t p, std::uint32_t k, NormFilter filter);

// Rational functions f/g, deg f = m, g monic of degree n.
/// Requires m + n >= 1 (OutOfRange); throws DivisionUndefined when m = n + 1.
Prediction bound_rational(std::uint64_t q, std::uint32_t m, std::uint32_t n);
/// Requires m - n >= 2 (OutOfRange).
Prediction bound_rational_improved(std::uint64_t q, std::uint32_t m, std::uint32_t n);
/// The simpler consequences stated alongside the two bounds above.
std::vector<Prediction> rational_corollaries(std::uint64_t q, std::uint32_t m, std::uint32_t n);

struct Check {
  Prediction prediction;
  std::optional<bool> pass;  // empty for report-only
  std::string slack;         // value - observed
};

struct VerificationResult {
  nlohmann::json family;
  std::uint64_t observed = 0;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  bool overall = true;

  /// Smallest upper bound, as a string.
  std::optional<std::string> best_bound() const;
  std::optional<std::string> exact() const;
  nlohmann::json theory_json() const;
};

/// True iff the observed count satisfies the prediction (report-only: true).
bool holds(const Prediction& p, std::uint64_t observed);

/// Attaches every applicable prediction for the family, including the
/// trivial family-size bounds.
VerificationResult verify(const FamilySpec& spec, std::uint64_t observed);

}  // namespace dyncount::theory
