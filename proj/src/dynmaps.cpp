#include "dyncount/dynmaps.hpp"

#include <algorithm>

#include "dyncount/error.hpp"

namespace dyncount {

PolyMap PolyMap::dense(FieldPtr field, std::span<const Elem> coeffs) {
  if (coeffs.empty() || coeffs.back() == 0) {
    throw Error(ErrorCode::InvalidPolynomial, "leading coefficient must be nonzero");
  }
  std::vector<Term> terms;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (!field->contains(coeffs[i])) throw Error(ErrorCode::InvalidElement, "coefficient");
    if (coeffs[i] != 0) terms.push_back({i, coeffs[i]});
  }
  return PolyMap(std::move(field), std::move(terms));
}

PolyMap PolyMap::sparse(FieldPtr field, std::vector<Term> terms) {
  if (terms.empty()) throw Error(ErrorCode::InvalidPolynomial, "empty term list");
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.exp < b.exp; });
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].coeff == 0 || !field->contains(terms[i].coeff)) {
      throw Error(ErrorCode::InvalidPolynomial, "sparse coefficients must be nonzero field elements");
    }
    if (i > 0 && terms[i].exp == terms[i - 1].exp) {
      throw Error(ErrorCode::InvalidPolynomial, "repeated exponent");
    }
  }
  return PolyMap(std::move(field), std::move(terms));
}

poly::Poly PolyMap::dense_coeffs() const {
  if (degree() > (1u << 24)) throw Error(ErrorCode::OutOfRange, "degree too large for dense form");
  poly::Poly c(degree() + 1, 0);
  for (const auto& t : terms_) c[t.exp] = t.coeff;
  return c;
}

Elem PolyMap::eval(Elem x) const {
  const Field& F = *field_;
  Elem acc = terms_.back().coeff;
  for (std::size_t i = terms_.size() - 1; i-- > 0;) {
    acc = F.add(F.mul(acc, F.pow(x, terms_[i + 1].exp - terms_[i].exp)), terms_[i].coeff);
  }
  return F.mul(acc, F.pow(x, terms_.front().exp));
}

Elem PolyMap::eval_dense(Elem x) const { return poly::eval(*field_, dense_coeffs(), x); }

Elem PolyMap::eval_sparse(Elem x) const {
  const Field& F = *field_;
  Elem acc = 0;
  for (const auto& t : terms_) acc = F.add(acc, F.mul(t.coeff, F.pow(x, t.exp)));
  return acc;
}

RationalMap::RationalMap(PolyMap numer, PolyMap denom, RationalModel model, Elem alpha)
    : numer_(std::move(numer)), denom_(std::move(denom)), model_(model), alpha_(alpha) {
  if (!numer_.field().same_as(denom_.field())) {
    throw Error(ErrorCode::FieldMismatch, "numerator and denominator fields differ");
  }
  if (denom_.leading() != 1) throw Error(ErrorCode::InvalidPolynomial, "denominator must be monic");
  if (!field().contains(alpha_)) throw Error(ErrorCode::InvalidElement, "alpha");
  red_numer_ = numer_.dense_coeffs();
  red_denom_ = denom_.dense_coeffs();
  if (model_ == RationalModel::Projective) {
    const poly::Poly h = poly::gcd(field(), red_numer_, red_denom_);
    if (h.size() > 1) {
      red_numer_ = poly::divmod(field(), red_numer_, h).first;
      red_denom_ = poly::divmod(field(), red_denom_, h).first;
    }
  }
}

std::uint32_t RationalMap::eval(std::uint32_t x) const {
  const Field& F = field();
  if (x == infinity()) {
    if (model_ == RationalModel::Affine) {
      throw Error(ErrorCode::ModelMismatch, "infinity is not a point of the affine model");
    }
    const long dm = poly::degree(red_numer_);
    const long dn = poly::degree(red_denom_);
    if (dm > dn) return infinity();
    if (dm == dn) return red_numer_.back();  // denominator stays monic
    return 0;
  }
  if (!F.contains(x)) throw Error(ErrorCode::InvalidElement, "domain point");
  const Elem gx = poly::eval(F, red_denom_, x);
  if (gx == 0) return model_ == RationalModel::Affine ? alpha_ : infinity();
  return F.div(poly::eval(F, red_numer_, x), gx);
}

const Field& field_of(const DynMap& map) {
  return std::visit([](const auto& m) -> const Field& { return m.field(); }, map);
}

const FieldPtr& field_ptr_of(const DynMap& map) {
  return std::visit([](const auto& m) -> const FieldPtr& { return m.field_ptr(); }, map);
}

std::uint32_t domain_size(const DynMap& map) {
  if (const auto* r = std::get_if<RationalMap>(&map)) return r->domain_size();
  return field_of(map).q();
}

std::uint32_t eval_point(const DynMap& map, std::uint32_t x) {
  if (const auto* f = std::get_if<PolyMap>(&map)) {
    if (!f->field().contains(x)) throw Error(ErrorCode::InvalidElement, "domain point");
    return f->eval(x);
  }
  return std::get<RationalMap>(map).eval(x);
}

namespace {

PolyMap from_poly(const FieldPtr& field, const poly::Poly& p) {
  if (p.empty()) throw Error(ErrorCode::OutOfFamily, "conjugate numerator vanished");
  return PolyMap::dense(field, p);
}

}  // namespace

PolyMap conjugate_affine(const PolyMap& f, Elem lambda, Elem mu) {
  if (lambda == 0) throw Error(ErrorCode::ZeroLambda, "lambda must be nonzero");
  const Field& F = f.field();
  // lambda^{-1} (f(lambda X + mu) - mu)
  poly::Poly c = poly::compose_affine(F, f.dense_coeffs(), lambda, mu);
  c = poly::sub(F, c, poly::Poly{mu});
  c = poly::scale(F, c, F.inv(lambda));
  return from_poly(f.field_ptr(), c);
}

RationalMap conjugate_affine(const RationalMap& f, Elem lambda, Elem mu) {
  if (lambda == 0) throw Error(ErrorCode::ZeroLambda, "lambda must be nonzero");
  const Field& F = f.field();
  // (f(phi) - mu g(phi)) / (lambda g(phi)), then divide through by lambda^{n+1}.
  const poly::Poly g_phi = poly::compose_affine(F, f.denom().dense_coeffs(), lambda, mu);
  const poly::Poly f_phi = poly::compose_affine(F, f.numer().dense_coeffs(), lambda, mu);
  const Elem lam_n = F.pow(lambda, f.n());
  const Elem lam_n1 = F.mul(lam_n, lambda);
  poly::Poly num = poly::sub(F, f_phi, poly::scale(F, g_phi, mu));
  num = poly::scale(F, num, F.inv(lam_n1));
  const poly::Poly den = poly::scale(F, g_phi, F.inv(lam_n));
  const Elem alpha = F.div(F.sub(f.alpha(), mu), lambda);
  return RationalMap(from_poly(f.field_ptr(), num), from_poly(f.field_ptr(), den), f.model(), alpha);
}

DynMap conjugate_affine(const DynMap& f, Elem lambda, Elem mu) {
  return std::visit([&](const auto& m) -> DynMap { return conjugate_affine(m, lambda, mu); }, f);
}

PolyMap frobenius_twist(const PolyMap& f, std::uint64_t i) {
  std::vector<Term> terms = f.terms();
  for (auto& t : terms) t.coeff = f.field().frobenius(t.coeff, i);
  return PolyMap::sparse(f.field_ptr(), std::move(terms));
}

RationalMap frobenius_twist(const RationalMap& f, std::uint64_t i) {
  return RationalMap(frobenius_twist(f.numer(), i), frobenius_twist(f.denom(), i), f.model(),
                     f.field().frobenius(f.alpha(), i));
}

DynMap frobenius_twist(const DynMap& f, std::uint64_t i) {
  return std::visit([&](const auto& m) -> DynMap { return frobenius_twist(m, i); }, f);
}

std::vector<std::uint32_t> evaluation_table(const DynMap& map) {
  const std::uint32_t n = domain_size(map);
  std::vector<std::uint32_t> out(n);
  for (std::uint32_t x = 0; x < n; ++x) out[x] = eval_point(map, x);
  return out;
}

bool is_permutation(const DynMap& map) {
  const auto table = evaluation_table(map);
  std::vector<bool> hit(table.size(), false);
  for (auto y : table) {
    if (hit[y]) return false;
    hit[y] = true;
  }
  return true;
}

std::string_view to_string(RationalModel model) {
  return model == RationalModel::Affine ? "affine" : "projective";
}

RationalModel parse_model(std::string_view s) {
  if (s == "affine") return RationalModel::Affine;
  if (s == "projective") return RationalModel::Projective;
  throw Error(ErrorCode::InvalidSpec, "unknown model '" + std::string(s) + "'");
}

namespace {

nlohmann::json terms_json(const PolyMap& f) {
  nlohmann::json exps = nlohmann::json::array();
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& t : f.terms()) {
    exps.push_back(t.exp);
    coeffs.push_back(t.coeff);
  }
  return {{"exps", exps}, {"coeffs", coeffs}};
}

PolyMap terms_from_json(const FieldPtr& field, const nlohmann::json& j) {
  const auto exps = j.at("exps").get<std::vector<std::uint64_t>>();
  const auto coeffs = j.at("coeffs").get<std::vector<Elem>>();
  if (exps.size() != coeffs.size()) throw Error(ErrorCode::InvalidPolynomial, "exps/coeffs length");
  std::vector<Term> terms;
  for (std::size_t i = 0; i < exps.size(); ++i) terms.push_back({exps[i], coeffs[i]});
  return PolyMap::sparse(field, std::move(terms));
}

}  // namespace

nlohmann::json to_json(const DynMap& map) {
  if (const auto* f = std::get_if<PolyMap>(&map)) {
    nlohmann::json j = terms_json(*f);
    j["kind"] = "poly";
    j["field"] = f->field().descriptor();
    return j;
  }
  const auto& r = std::get<RationalMap>(map);
  nlohmann::json j = terms_json(r.numer());
  j["kind"] = "rational";
  j["field"] = r.field().descriptor();
  j["denom"] = r.denom().dense_coeffs();
  j["alpha"] = r.alpha();
  j["model"] = to_string(r.model());
  return j;
}

DynMap map_from_json(const nlohmann::json& j) {
  const auto& fd = j.at("field");
  const FieldPtr field = Field::with_modulus(fd.at("p").get<std::uint32_t>(),
                                             fd.at("modulus").get<std::vector<std::uint32_t>>());
  PolyMap numer = terms_from_json(field, j);
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "poly") return numer;
  if (kind != "rational") throw Error(ErrorCode::InvalidSpec, "unknown map kind '" + kind + "'");
  const auto denom = j.at("denom").get<std::vector<Elem>>();
  return RationalMap(std::move(numer), PolyMap::dense(field, denom),
                     parse_model(j.at("model").get<std::string>()), j.value("alpha", Elem{0}));
}

}  // namespace dyncount
