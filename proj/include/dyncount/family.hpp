#pragma once

// Declarative map families and their deterministic enumeration.
//
// Every member is a tuple of coefficient "slots", each ranging over a fixed
// value set (all of F_q, F_q^*, or a norm-filtered subset of F_q^*). Slot 0 is
// the lowest-exponent coefficient and is the most significant mixed-radix
// digit of the member index, so increasing index order is lexicographic
// coefficient order, low exponent first. For rational families the numerator
// slots come first, then the non-leading denominator slots.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dyncount/dynmaps.hpp"

namespace dyncount {

enum class FamilyKind {
  AllDegree,        // every f with deg f = d
  Sparse,           // sum a_i X^{e_i}, all a_i != 0
  Linearised,       // sum_{i<=n} a_i X^{p^i}, a_n != 0
  Linear,           // aX + b, a != 0
  Power,            // aX^d, a != 0
  FrobeniusAffine,  // aX^p + b, a != 0, optionally filtered by Nm(a)
  Rational,         // f/g, deg f = m, g monic of degree n
};

enum class NormFilter { Any, Norm1, NormNot1 };

struct FamilySpec {
  FamilyKind kind = FamilyKind::Linear;
  FieldPtr field;
  std::uint32_t d = 0;                   // AllDegree, Power
  std::vector<std::uint64_t> exponents;  // Sparse
  std::uint32_t m = 0;                   // Rational numerator degree
  std::uint32_t n = 0;                   // Linearised n; Rational denominator degree
  NormFilter norm = NormFilter::Any;     // FrobeniusAffine
  RationalModel model = RationalModel::Affine;
  Elem alpha = 0;

  /// Family name and parameters only; the field descriptor is separate.
  nlohmann::json to_json() const;
  static FamilySpec from_json(const nlohmann::json& j, FieldPtr field);
  /// Short human-readable parameter string, e.g. "d=3" or "m=2;n=1;model=affine;alpha=0".
  std::string params() const;
};

std::string_view to_string(FamilyKind kind);
FamilyKind parse_family_kind(std::string_view s);
std::string_view to_string(NormFilter f);
NormFilter parse_norm_filter(std::string_view s);

struct IndexRange {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;
  std::uint64_t size() const { return end - begin; }
};

/// Splits [0, total) into `parts` contiguous ranges of near-equal size.
std::vector<IndexRange> partition(IndexRange range, unsigned parts);

class Family {
 public:
  /// Validates the spec; throws InvalidSpec.
  explicit Family(FamilySpec spec);

  const FamilySpec& spec() const { return spec_; }
  const Field& field() const { return *spec_.field; }
  std::uint64_t size() const { return size_; }
  std::uint32_t domain_size() const;
  std::size_t slot_count() const { return slot_sets_.size(); }

  std::vector<Elem> slots(std::uint64_t index) const;
  std::optional<std::uint64_t> index_of(std::span<const Elem> slots) const;

  DynMap member(std::uint64_t index) const;
  /// Slots of `map` if it belongs to this family.
  std::optional<std::vector<Elem>> slots_of(const DynMap& map) const;
  std::optional<std::uint64_t> index_of(const DynMap& map) const;

  /// Writes the successor array of member `index` into out (size
  /// domain_size()). Agrees with evaluation_table(member(index)).
  void successors(std::uint64_t index, std::span<std::uint32_t> out) const;

  class iterator {
   public:
    using value_type = DynMap;
    using difference_type = std::ptrdiff_t;
    iterator() = default;
    iterator(const Family* fam, std::uint64_t i) : fam_(fam), i_(i) {}
    DynMap operator*() const { return fam_->member(i_); }
    iterator& operator++() {
      ++i_;
      return *this;
    }
    iterator operator++(int) {
      auto t = *this;
      ++i_;
      return t;
    }
    bool operator==(const iterator& o) const { return i_ == o.i_; }
    std::uint64_t index() const { return i_; }

   private:
    const Family* fam_ = nullptr;
    std::uint64_t i_ = 0;
  };

  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, size_}; }

 private:
  struct ValueSet {
    std::vector<Elem> values;
    std::vector<std::int64_t> position;  // position[x] or -1
  };

  std::size_t add_set(std::vector<Elem> values);

  FamilySpec spec_;
  std::vector<ValueSet> sets_;
  std::vector<std::size_t> slot_sets_;  // slot -> set
  std::vector<std::uint64_t> radix_weight_;
  std::uint64_t size_ = 0;
  // Exponent attached to each numerator slot; Rational also has denominator
  // slots for X^0..X^{n-1}.
  std::vector<std::uint64_t> numer_exps_;
  std::size_t numer_slots_ = 0;
  std::vector<std::vector<Elem>> power_tables_;  // per slot (and X^n for rational)
};

/// The member stream of a family, in index order.
inline Family enumerate_family(FamilySpec spec) { return Family(std::move(spec)); }

}  // namespace dyncount
