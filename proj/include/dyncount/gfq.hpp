#pragma once

// Arithmetic in F_q = F_p[X]/(m(X)), q = p^k.
//
// Elements are stored as their canonical integer encoding
//   enc = c_0 + c_1 p + ... + c_{k-1} p^{k-1}
// of the coefficient vector in the power basis of the modulus, so a field
// element doubles as a dense index into arrays of size q. The modulus is the
// lexicographically smallest monic irreducible polynomial of degree k, with
// coefficients compared from the constant term upwards.
//
// For q <= kEagerTableLimit the exp/log/Zech tables are built at
// construction; larger fields build them on first use. Either way a Field is
// immutable from the caller's point of view and may be shared across threads.

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "json.hpp"

namespace dyncount {

using Elem = std::uint32_t;

inline constexpr std::uint64_t kDefaultDomainLimit = 1u << 20;
inline constexpr std::uint64_t kEagerTableLimit = 1u << 16;

class Field;
using FieldPtr = std::shared_ptr<const Field>;

class Field {
  struct Private {};

 public:
  /// F_{p^k} with the canonical modulus. Throws NonPrime, DomainTooLarge,
  /// InvalidParameters (k == 0).
  static FieldPtr make(std::uint32_t p, std::uint32_t k,
                       std::uint64_t domain_limit = kDefaultDomainLimit);

  /// F_p[X]/(modulus) for an explicit monic irreducible modulus given
  /// low-degree first. Used to reload serialized descriptors.
  static FieldPtr with_modulus(std::uint32_t p, std::vector<std::uint32_t> modulus,
                               std::uint64_t domain_limit = kDefaultDomainLimit);

  Field(Private, std::uint32_t p, std::vector<std::uint32_t> modulus);

  std::uint32_t p() const { return p_; }
  std::uint32_t k() const { return k_; }
  std::uint32_t q() const { return q_; }
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  bool contains(std::uint64_t enc) const { return enc < q_; }
  /// The image of an integer in the prime subfield.
  Elem from_int(std::int64_t c) const;

  std::vector<std::uint32_t> coeffs(Elem x) const;
  Elem from_coeffs(std::span<const std::uint32_t> c) const;

  Elem add(Elem x, Elem y) const;
  Elem sub(Elem x, Elem y) const { return add(x, neg(y)); }
  Elem neg(Elem x) const;
  Elem mul(Elem x, Elem y) const;
  /// Throws DivisionByZero for x == 0.
  Elem inv(Elem x) const;
  Elem div(Elem x, Elem y) const { return mul(x, inv(y)); }
  /// Square-and-multiply; pow(0, 0) == 1.
  Elem pow(Elem x, std::uint64_t e) const;

  /// x^{p^i}; i is taken mod k.
  Elem frobenius(Elem x, std::uint64_t i) const;
  /// x^{1+p+...+p^{k-1}}, an element of F_p.
  Elem norm(Elem x) const;
  /// x + x^p + ... + x^{p^{k-1}}, an element of F_p.
  Elem trace(Elem x) const;

  /// Smallest m >= 1 with x^m = 1. Throws ZeroElement.
  std::uint64_t mult_order(Elem x) const;
  /// Generator of F_q^* with the smallest encoding.
  Elem primitive_element() const { return generator_; }

  /// Same p, k and modulus.
  bool same_as(const Field& other) const {
    return p_ == other.p_ && modulus_ == other.modulus_;
  }

  /// {p, k, modulus: [c0..ck]}
  nlohmann::json descriptor() const;

  // Polynomial-basis reference arithmetic, independent of the tables.
  Elem add_slow(Elem x, Elem y) const;
  Elem mul_slow(Elem x, Elem y) const;

 private:
  struct Tables {
    std::vector<std::uint32_t> log;   // log[x] for x != 0
    std::vector<Elem> exp;            // exp[i] = g^i, 0 <= i < 2(q-1)
    std::vector<std::int64_t> zech;   // zech[i] = log(1 + g^i), -1 if 1 + g^i == 0
    std::vector<Elem> neg;
  };

  const Tables& tables() const;
  void build_tables() const;
  Elem pow_slow(Elem x, std::uint64_t e) const;
  std::uint64_t order_slow(Elem x) const;

  std::uint32_t p_;
  std::uint32_t k_;
  std::uint32_t q_;
  std::vector<std::uint32_t> modulus_;
  std::vector<std::uint32_t> pow_p_;  // p^i, i < k
  std::vector<std::uint64_t> order_primes_;  // distinct primes dividing q - 1
  Elem generator_ = 1;

  mutable std::once_flag tables_once_;
  mutable Tables tables_;
};

/// True when the monic polynomial (low-degree first) over F_p has no monic
/// factor of degree 1..deg/2. Trial division against every candidate.
bool is_irreducible(std::uint32_t p, std::span<const std::uint32_t> monic);

/// Lexicographically smallest monic irreducible of degree k over F_p,
/// comparing coefficients from the constant term upwards.
std::vector<std::uint32_t> smallest_irreducible(std::uint32_t p, std::uint32_t k);

/// Field-tagged element for ergonomic arithmetic. Mixing elements of
/// different fields throws FieldMismatch.
class FieldElement {
 public:
  FieldElement(FieldPtr field, std::uint64_t enc);

  const FieldPtr& field() const { return field_; }
  Elem value() const { return value_; }

  FieldElement operator+(const FieldElement& o) const;
  FieldElement operator-(const FieldElement& o) const;
  FieldElement operator*(const FieldElement& o) const;
  FieldElement operator/(const FieldElement& o) const;
  FieldElement operator-() const { return {field_, field_->neg(value_)}; }
  FieldElement inv() const { return {field_, field_->inv(value_)}; }
  FieldElement pow(std::uint64_t e) const { return {field_, field_->pow(value_, e)}; }

  bool operator==(const FieldElement& o) const;

 private:
  const Field& check(const FieldElement& o) const;

  FieldPtr field_;
  Elem value_;
};

/// All q elements in increasing encoding order.
std::vector<FieldElement> elements(const FieldPtr& field);

}  // namespace dyncount
