#pragma once

// Polynomial and rational self-maps of F_q (or of P^1(F_q)), together with
// the coefficient-level group actions used to reduce families: affine
// conjugation X -> lambda X + mu and the Frobenius twist of coefficients.

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "dyncount/gfq.hpp"
#include "dyncount/poly.hpp"

namespace dyncount {

struct Term {
  std::uint64_t exp;
  Elem coeff;
  bool operator==(const Term&) const = default;
};

/// Nonzero polynomial map x -> f(x), stored sparsely with strictly
/// increasing exponents and nonzero coefficients.
class PolyMap {
 public:
  /// From dense coefficients, low degree first. The last entry must be
  /// nonzero; interior zeros are dropped.
  static PolyMap dense(FieldPtr field, std::span<const Elem> coeffs);
  /// From (exponent, coefficient) pairs in any order. Exponents must be
  /// distinct and coefficients nonzero.
  static PolyMap sparse(FieldPtr field, std::vector<Term> terms);

  const Field& field() const { return *field_; }
  const FieldPtr& field_ptr() const { return field_; }
  std::uint64_t degree() const { return terms_.back().exp; }
  Elem leading() const { return terms_.back().coeff; }
  const std::vector<Term>& terms() const { return terms_; }
  /// Dense coefficient vector of length degree() + 1.
  poly::Poly dense_coeffs() const;

  /// Horner over the sparse terms, powering across exponent gaps.
  Elem eval(Elem x) const;
  /// Classic Horner over the dense coefficient vector.
  Elem eval_dense(Elem x) const;
  /// Sum of a_i * x^{e_i}, each power computed independently.
  Elem eval_sparse(Elem x) const;

  bool operator==(const PolyMap& o) const {
    return field_->same_as(*o.field_) && terms_ == o.terms_;
  }

 private:
  PolyMap(FieldPtr field, std::vector<Term> terms)
      : field_(std::move(field)), terms_(std::move(terms)) {}

  FieldPtr field_;
  std::vector<Term> terms_;
};

enum class RationalModel {
  /// x -> f(x)/g(x) on F_q, with every zero of g sent to a fixed alpha.
  /// f and g are used as given.
  Affine,
  /// x -> f(x)/g(x) on F_q + {infinity} after cancelling gcd(f, g).
  Projective,
};

/// f/g with g monic. Domain points are encoded 0..q-1, with q standing for
/// infinity in the projective model.
class RationalMap {
 public:
  RationalMap(PolyMap numer, PolyMap denom, RationalModel model, Elem alpha = 0);

  const Field& field() const { return numer_.field(); }
  const FieldPtr& field_ptr() const { return numer_.field_ptr(); }
  const PolyMap& numer() const { return numer_; }
  const PolyMap& denom() const { return denom_; }
  std::uint64_t m() const { return numer_.degree(); }
  std::uint64_t n() const { return denom_.degree(); }
  RationalModel model() const { return model_; }
  Elem alpha() const { return alpha_; }
  std::uint32_t infinity() const { return field().q(); }
  std::uint32_t domain_size() const {
    return field().q() + (model_ == RationalModel::Projective ? 1 : 0);
  }

  /// Numerator and denominator after cancelling their gcd (projective model
  /// only; for the affine model these are f and g unchanged).
  const poly::Poly& reduced_numer() const { return red_numer_; }
  const poly::Poly& reduced_denom() const { return red_denom_; }

  /// Throws ModelMismatch if infinity is fed to the affine model.
  std::uint32_t eval(std::uint32_t x) const;

  bool operator==(const RationalMap& o) const {
    return numer_ == o.numer_ && denom_ == o.denom_ && model_ == o.model_ && alpha_ == o.alpha_;
  }

 private:
  PolyMap numer_;
  PolyMap denom_;
  RationalModel model_;
  Elem alpha_;
  poly::Poly red_numer_;
  poly::Poly red_denom_;
};

using DynMap = std::variant<PolyMap, RationalMap>;

const Field& field_of(const DynMap& map);
const FieldPtr& field_ptr_of(const DynMap& map);
std::uint32_t domain_size(const DynMap& map);
std::uint32_t eval_point(const DynMap& map, std::uint32_t x);

/// phi^{-1} o f o phi for phi(X) = lambda X + mu, computed on coefficients.
/// Rational results are renormalised to a monic denominator and carry
/// alpha' = phi^{-1}(alpha), so the conjugate agrees pointwise with
/// phi^{-1} o f o phi under either model. Throws ZeroLambda, and
/// OutOfFamily if the rational numerator cancels to zero.
PolyMap conjugate_affine(const PolyMap& f, Elem lambda, Elem mu);
RationalMap conjugate_affine(const RationalMap& f, Elem lambda, Elem mu);
DynMap conjugate_affine(const DynMap& f, Elem lambda, Elem mu);

/// Applies sigma^i (x -> x^{p^i}) to every coefficient; exponents unchanged.
/// The result is conjugate to f through x -> x^{p^i}.
PolyMap frobenius_twist(const PolyMap& f, std::uint64_t i);
RationalMap frobenius_twist(const RationalMap& f, std::uint64_t i);
DynMap frobenius_twist(const DynMap& f, std::uint64_t i);

/// Evaluation table of the map over its whole domain.
std::vector<std::uint32_t> evaluation_table(const DynMap& map);
bool is_permutation(const DynMap& map);

/// {kind, field, exps, coeffs, denom?, alpha?, model?}
nlohmann::json to_json(const DynMap& map);
DynMap map_from_json(const nlohmann::json& j);

std::string_view to_string(RationalModel model);
RationalModel parse_model(std::string_view s);

}  // namespace dyncount
