#include "dyncount/family.hpp"

#include <algorithm>
#include <set>

#include "dyncount/arith.hpp"
#include "dyncount/error.hpp"

namespace dyncount {

std::string_view to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::AllDegree: return "all-degree-d";
    case FamilyKind::Sparse: return "sparse";
    case FamilyKind::Linearised: return "linearised";
    case FamilyKind::Linear: return "linear";
    case FamilyKind::Power: return "power";
    case FamilyKind::FrobeniusAffine: return "frobenius-affine";
    case FamilyKind::Rational: return "rational";
  }
  return "?";
}

FamilyKind parse_family_kind(std::string_view s) {
  for (auto k : {FamilyKind::AllDegree, FamilyKind::Sparse, FamilyKind::Linearised,
                 FamilyKind::Linear, FamilyKind::Power, FamilyKind::FrobeniusAffine,
                 FamilyKind::Rational}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::InvalidSpec, "unknown family '" + std::string(s) + "'");
}

std::string_view to_string(NormFilter f) {
  switch (f) {
    case NormFilter::Any: return "any";
    case NormFilter::Norm1: return "norm1";
    case NormFilter::NormNot1: return "norm!=1";
  }
  return "?";
}

NormFilter parse_norm_filter(std::string_view s) {
  if (s == "any") return NormFilter::Any;
  if (s == "norm1") return NormFilter::Norm1;
  if (s == "norm!=1" || s == "norm-not1") return NormFilter::NormNot1;
  throw Error(ErrorCode::InvalidSpec, "unknown norm filter '" + std::string(s) + "'");
}

nlohmann::json FamilySpec::to_json() const {
  nlohmann::json j{{"kind", to_string(kind)}};
  switch (kind) {
    case FamilyKind::AllDegree:
    case FamilyKind::Power: j["d"] = d; break;
    case FamilyKind::Sparse: j["exps"] = exponents; break;
    case FamilyKind::Linearised: j["n"] = n; break;
    case FamilyKind::Linear: break;
    case FamilyKind::FrobeniusAffine: j["norm"] = to_string(norm); break;
    case FamilyKind::Rational:
      j["m"] = m;
      j["n"] = n;
      j["model"] = to_string(model);
      j["alpha"] = alpha;
      break;
  }
  return j;
}

FamilySpec FamilySpec::from_json(const nlohmann::json& j, FieldPtr field) {
  FamilySpec s;
  s.kind = parse_family_kind(j.at("kind").get<std::string>());
  s.field = std::move(field);
  s.d = j.value("d", 0u);
  s.exponents = j.value("exps", std::vector<std::uint64_t>{});
  s.m = j.value("m", 0u);
  s.n = j.value("n", 0u);
  s.norm = parse_norm_filter(j.value("norm", std::string("any")));
  s.model = parse_model(j.value("model", std::string("affine")));
  s.alpha = j.value("alpha", Elem{0});
  return s;
}

std::string FamilySpec::params() const {
  switch (kind) {
    case FamilyKind::AllDegree:
    case FamilyKind::Power: return "d=" + std::to_string(d);
    case FamilyKind::Sparse: {
      std::string s = "exps=";
      for (std::size_t i = 0; i < exponents.size(); ++i) {
        if (i) s += ";";
        s += std::to_string(exponents[i]);
      }
      return s;
    }
    case FamilyKind::Linearised: return "n=" + std::to_string(n);
    case FamilyKind::Linear: return "";
    case FamilyKind::FrobeniusAffine: return "norm=" + std::string(to_string(norm));
    case FamilyKind::Rational:
      return "m=" + std::to_string(m) + ";n=" + std::to_string(n) +
             ";model=" + std::string(to_string(model)) + ";alpha=" + std::to_string(alpha);
  }
  return "";
}

std::vector<IndexRange> partition(IndexRange range, unsigned parts) {
  parts = std::max(1u, parts);
  std::vector<IndexRange> out;
  const std::uint64_t total = range.size();
  std::uint64_t at = range.begin;
  for (unsigned i = 0; i < parts; ++i) {
    const std::uint64_t len = total / parts + (i < total % parts ? 1 : 0);
    out.push_back({at, at + len});
    at += len;
  }
  return out;
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); }

}  // namespace

std::size_t Family::add_set(std::vector<Elem> values) {
  ValueSet s;
  s.position.assign(field().q(), -1);
  for (std::size_t i = 0; i < values.size(); ++i) s.position[values[i]] = static_cast<std::int64_t>(i);
  s.values = std::move(values);
  sets_.push_back(std::move(s));
  return sets_.size() - 1;
}

Family::Family(FamilySpec spec) : spec_(std::move(spec)) {
  if (!spec_.field) invalid("family has no field");
  const Field& F = field();
  const std::uint32_t q = F.q();

  std::vector<Elem> all(q), units(q - 1);
  for (Elem x = 0; x < q; ++x) all[x] = x;
  for (Elem x = 1; x < q; ++x) units[x - 1] = x;
  const std::size_t all_set = add_set(all);
  const std::size_t unit_set = add_set(units);

  auto push = [&](std::size_t set, std::uint64_t exp) {
    slot_sets_.push_back(set);
    numer_exps_.push_back(exp);
  };

  switch (spec_.kind) {
    case FamilyKind::AllDegree:
      if (spec_.d < 1) invalid("degree must be >= 1");
      for (std::uint32_t i = 0; i < spec_.d; ++i) push(all_set, i);
      push(unit_set, spec_.d);
      break;
    case FamilyKind::Sparse: {
      if (spec_.exponents.empty()) invalid("sparse family needs at least one exponent");
      std::vector<std::uint64_t> e = spec_.exponents;
      std::sort(e.begin(), e.end());
      if (std::adjacent_find(e.begin(), e.end()) != e.end()) invalid("sparse exponents must be distinct");
      spec_.exponents = e;
      for (auto x : e) push(unit_set, x);
      break;
    }
    case FamilyKind::Linearised: {
      if (spec_.n < 1) invalid("linearised n must be >= 1");
      std::uint64_t pe = 1;
      for (std::uint32_t i = 0; i <= spec_.n; ++i) {
        push(i == spec_.n ? unit_set : all_set, pe);
        if (pe > UINT64_MAX / F.p()) invalid("linearised degree overflows");
        pe *= F.p();
      }
      break;
    }
    case FamilyKind::Linear:
      push(all_set, 0);
      push(unit_set, 1);
      break;
    case FamilyKind::Power:
      if (spec_.d < 1) invalid("power exponent must be >= 1");
      push(unit_set, spec_.d);
      break;
    case FamilyKind::FrobeniusAffine: {
      std::vector<Elem> as;
      for (Elem a = 1; a < q; ++a) {
        const bool n1 = F.norm(a) == 1;
        if (spec_.norm == NormFilter::Any || (spec_.norm == NormFilter::Norm1) == n1) as.push_back(a);
      }
      push(all_set, 0);
      push(add_set(std::move(as)), F.p());
      break;
    }
    case FamilyKind::Rational:
      if (!F.contains(spec_.alpha)) invalid("alpha is not a field element");
      for (std::uint32_t i = 0; i < spec_.m; ++i) push(all_set, i);
      push(unit_set, spec_.m);
      break;
  }
  numer_slots_ = slot_sets_.size();
  if (spec_.kind == FamilyKind::Rational) {
    for (std::uint32_t j = 0; j < spec_.n; ++j) slot_sets_.push_back(all_set);
  }

  radix_weight_.assign(slot_sets_.size(), 1);
  size_ = 1;
  for (std::size_t i = slot_sets_.size(); i-- > 0;) {
    radix_weight_[i] = size_;
    const std::uint64_t s = sets_[slot_sets_[i]].values.size();
    if (s != 0 && size_ > (UINT64_MAX >> 1) / s) invalid("family too large");
    size_ *= s;
  }

  // Power tables for the fast successor path.
  auto table = [&](std::uint64_t e) {
    std::vector<Elem> t(q);
    for (Elem x = 0; x < q; ++x) t[x] = F.pow(x, e);
    return t;
  };
  for (auto e : numer_exps_) power_tables_.push_back(table(e));
  if (spec_.kind == FamilyKind::Rational) {
    for (std::uint32_t j = 0; j <= spec_.n; ++j) power_tables_.push_back(table(j));
  }
}

std::uint32_t Family::domain_size() const {
  const bool proj = spec_.kind == FamilyKind::Rational && spec_.model == RationalModel::Projective;
  return field().q() + (proj ? 1 : 0);
}

std::vector<Elem> Family::slots(std::uint64_t index) const {
  if (index >= size_) throw Error(ErrorCode::OutOfRange, "member index");
  std::vector<Elem> out(slot_sets_.size());
  for (std::size_t i = slot_sets_.size(); i-- > 0;) {
    const auto& vals = sets_[slot_sets_[i]].values;
    out[i] = vals[index % vals.size()];
    index /= vals.size();
  }
  return out;
}

std::optional<std::uint64_t> Family::index_of(std::span<const Elem> slots) const {
  if (slots.size() != slot_sets_.size()) return std::nullopt;
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!field().contains(slots[i])) return std::nullopt;
    const std::int64_t pos = sets_[slot_sets_[i]].position[slots[i]];
    if (pos < 0) return std::nullopt;
    idx += static_cast<std::uint64_t>(pos) * radix_weight_[i];
  }
  return idx;
}

DynMap Family::member(std::uint64_t index) const {
  const auto s = slots(index);
  std::vector<Term> terms;
  for (std::size_t i = 0; i < numer_slots_; ++i) {
    if (s[i] != 0) terms.push_back({numer_exps_[i], s[i]});
  }
  PolyMap numer = PolyMap::sparse(spec_.field, std::move(terms));
  if (spec_.kind != FamilyKind::Rational) return numer;
  poly::Poly den(spec_.n + 1, 0);
  for (std::uint32_t j = 0; j < spec_.n; ++j) den[j] = s[numer_slots_ + j];
  den[spec_.n] = 1;
  return RationalMap(std::move(numer), PolyMap::dense(spec_.field, den), spec_.model, spec_.alpha);
}

std::optional<std::vector<Elem>> Family::slots_of(const DynMap& map) const {
  if (!field_of(map).same_as(field())) return std::nullopt;
  const PolyMap* numer = nullptr;
  if (spec_.kind == FamilyKind::Rational) {
    const auto* r = std::get_if<RationalMap>(&map);
    if (!r || r->model() != spec_.model) return std::nullopt;
    if (spec_.model == RationalModel::Affine && r->alpha() != spec_.alpha) return std::nullopt;
    if (r->n() != spec_.n) return std::nullopt;
    numer = &r->numer();
  } else {
    numer = std::get_if<PolyMap>(&map);
    if (!numer) return std::nullopt;
  }
  std::vector<Elem> out(slot_sets_.size(), 0);
  for (const auto& t : numer->terms()) {
    const auto it = std::find(numer_exps_.begin(), numer_exps_.end(), t.exp);
    if (it == numer_exps_.end()) return std::nullopt;
    out[static_cast<std::size_t>(it - numer_exps_.begin())] = t.coeff;
  }
  if (spec_.kind == FamilyKind::Rational) {
    const auto den = std::get<RationalMap>(map).denom().dense_coeffs();
    for (std::uint32_t j = 0; j < spec_.n; ++j) out[numer_slots_ + j] = den[j];
  }
  if (!index_of(out)) return std::nullopt;
  return out;
}

std::optional<std::uint64_t> Family::index_of(const DynMap& map) const {
  const auto s = slots_of(map);
  if (!s) return std::nullopt;
  return index_of(*s);
}

void Family::successors(std::uint64_t index, std::span<std::uint32_t> out) const {
  if (out.size() != domain_size()) throw Error(ErrorCode::OutOfRange, "successor buffer size");
  const bool rational = spec_.kind == FamilyKind::Rational;
  if (rational && spec_.model == RationalModel::Projective) {
    const DynMap m = member(index);
    for (std::uint32_t x = 0; x < out.size(); ++x) out[x] = eval_point(m, x);
    return;
  }
  const Field& F = field();
  const auto s = slots(index);
  const std::uint32_t q = F.q();
  for (Elem x = 0; x < q; ++x) {
    Elem num = 0;
    for (std::size_t i = 0; i < numer_slots_; ++i) {
      if (s[i] != 0) num = F.add(num, F.mul(s[i], power_tables_[i][x]));
    }
    if (!rational) {
      out[x] = num;
      continue;
    }
    Elem den = power_tables_[numer_slots_ + spec_.n][x];
    for (std::uint32_t j = 0; j < spec_.n; ++j) {
      const Elem b = s[numer_slots_ + j];
      if (b != 0) den = F.add(den, F.mul(b, power_tables_[numer_slots_ + j][x]));
    }
    out[x] = den == 0 ? spec_.alpha : F.div(num, den);
  }
}

}  // namespace dyncount
