#include "dyncount/theory.hpp"

#include <numeric>
#include <stdexcept>

#include "dyncount/arith.hpp"
#include "dyncount/error.hpp"

namespace dyncount::theory {

namespace mp = boost::multiprecision;

// ---- Surd ------------------------------------------------------------------

namespace {

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

BigInt ipow(std::uint64_t base, std::uint64_t e) { return mp::pow(BigInt(base), static_cast<unsigned>(e)); }

Real to_real(const Rational& r) { return Real(mp::numerator(r)) / Real(mp::denominator(r)); }

}  // namespace

Surd Surd::integer(const BigInt& v) { return rational(Rational(v)); }

Surd Surd::rational(const Rational& v) {
  Surd s;
  s.add_term(0, v);
  return s;
}

Surd Surd::power(std::uint64_t base, const Rational& e, const Rational& c) {
  // Normalise a prime-power base: (p^j)^e = p^(j e).
  std::uint64_t p = base;
  Rational ex = e;
  if (mp::denominator(e) != 1 && base > 1) {
    const auto pk = arith::prime_power_split(base);
    if (!pk) throw Error(ErrorCode::InvalidParameters, "fractional power of a non-prime-power base");
    p = pk->first;
    ex = e * pk->second;
  }
  const BigInt fl = floor_div(mp::numerator(ex), mp::denominator(ex));
  const Rational frac = ex - Rational(fl);
  Rational coeff = c;
  if (fl >= 0) {
    coeff *= Rational(mp::pow(BigInt(p), static_cast<unsigned>(fl)));
  } else {
    coeff /= Rational(mp::pow(BigInt(p), static_cast<unsigned>(-fl)));
  }
  Surd s;
  if (frac != 0) s.adopt_base(p);
  s.add_term(frac, coeff);
  return s;
}

void Surd::adopt_base(std::uint64_t p) {
  if (p_ == 0) {
    p_ = p;
  } else if (p_ != p) {
    throw std::logic_error("surds over different bases");
  }
}

void Surd::add_term(const Rational& frac, const Rational& c) {
  if (c == 0) return;
  auto& slot = terms_[frac];
  slot += c;
  if (slot == 0) terms_.erase(frac);
}

Surd& Surd::operator+=(const Surd& o) {
  if (o.p_ != 0) adopt_base(o.p_);
  for (const auto& [f, c] : o.terms_) add_term(f, c);
  return *this;
}

Surd Surd::operator+(const Surd& o) const {
  Surd r = *this;
  r += o;
  return r;
}

Surd Surd::operator-(const Surd& o) const { return *this + o.scaled(-1); }

Surd Surd::scaled(const Rational& c) const {
  Surd r;
  r.p_ = p_;
  for (const auto& [f, v] : terms_) r.add_term(f, v * c);
  return r;
}

Surd Surd::operator*(const Surd& o) const {
  Surd r;
  if (p_ != 0) r.adopt_base(p_);
  if (o.p_ != 0) r.adopt_base(o.p_);
  for (const auto& [f1, c1] : terms_) {
    for (const auto& [f2, c2] : o.terms_) {
      Rational f = f1 + f2;
      Rational c = c1 * c2;
      if (f >= 1) {
        f -= 1;
        c *= r.p_;
      }
      r.add_term(f, c);
    }
  }
  return r;
}

Surd Surd::pow(unsigned n) const {
  Surd r = integer(1);
  for (unsigned i = 0; i < n; ++i) r = r * *this;
  return r;
}

bool Surd::is_rational() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 0);
}

Rational Surd::rational_value() const {
  if (!is_rational()) throw std::logic_error("irrational surd");
  return terms_.empty() ? Rational(0) : terms_.begin()->second;
}

Real Surd::approx() const {
  Real acc = 0;
  for (const auto& [f, c] : terms_) {
    acc += to_real(c) * (f == 0 ? Real(1) : mp::pow(Real(p_), to_real(f)));
  }
  return acc;
}

int Surd::compare(const BigInt& n) const {
  if (is_rational()) {
    const Rational v = rational_value();
    const Rational w(n);
    return v < w ? -1 : (v > w ? 1 : 0);
  }
  // p^(1/L) has degree L over Q, so a nonzero irrational part keeps the value
  // off every integer.
  const Real diff = approx() - Real(n);
  return diff < 0 ? -1 : 1;
}

std::string Surd::to_string() const {
  if (is_rational()) {
    const Rational v = rational_value();
    if (mp::denominator(v) == 1) return mp::numerator(v).str();
    return mp::numerator(v).str() + "/" + mp::denominator(v).str();
  }
  return approx().str(15);
}

std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::Exact: return "exact";
    case Kind::UpperBound: return "upper_bound";
    case Kind::ReportOnly: return "report_only";
  }
  return "?";
}

std::string Prediction::value_string() const { return real ? real->str(15) : value.to_string(); }

// ---- arithmetic helpers ----------------------------------------------------

std::uint64_t tau(std::int64_t n) { return arith::tau(n); }
std::uint64_t phi(std::int64_t n) { return arith::phi(n); }
int mobius(std::int64_t n) { return arith::mobius(n); }

std::vector<std::uint64_t> divisors(std::int64_t n) {
  if (n < 1) throw Error(ErrorCode::NonPositive, "divisors of " + std::to_string(n));
  return arith::divisors(static_cast<std::uint64_t>(n));
}

namespace {

std::pair<std::uint64_t, std::uint32_t> split(std::uint64_t q) {
  const auto pk = arith::prime_power_split(q);
  if (!pk) throw Error(ErrorCode::InvalidParameters, std::to_string(q) + " is not a prime power");
  return *pk;
}

std::uint64_t prime_power(std::uint64_t p, std::uint32_t k) {
  const auto q = arith::checked_pow(p, k);
  if (!arith::is_prime(p) || k < 1 || !q) {
    throw Error(ErrorCode::InvalidParameters, "invalid field parameters");
  }
  return *q;
}

Surd qpow(std::uint64_t q, std::uint64_t e) { return Surd::integer(ipow(q, e)); }

Prediction make(std::string source, Kind kind, Surd value, nlohmann::json params, bool strict = false) {
  Prediction p;
  p.source = std::move(source);
  p.kind = kind;
  p.strict = strict;
  p.value = std::move(value);
  p.params = std::move(params);
  return p;
}

struct Division {
  std::uint64_t t, r, r_star;
};

// m = t*D + r with r* = #{1 <= i <= r : gcd(i, D) != 1}.
Division euclid(std::uint64_t m, std::uint64_t D) {
  Division d{m / D, m % D, 0};
  for (std::uint64_t i = 1; i <= d.r; ++i) {
    if (std::gcd(i, D) != 1) ++d.r_star;
  }
  return d;
}

}  // namespace

// ---- polynomials of degree d -------------------------------------------------

Prediction bound_Nd(std::uint64_t q, std::uint32_t d) {
  if (d < 2) throw Error(ErrorCode::InvalidParameters, "degree must be >= 2");
  const auto [p, k] = split(q);
  const std::uint64_t s = std::gcd(q - 1, std::uint64_t{d} - 1);
  Surd v = qpow(q, d - 1) + qpow(q, d - 1 - phi(d - 1)).scaled(Rational(s) - 1);
  if (d % p == 0) v += qpow(q, d / p - 1).scaled(Rational(q - 1));
  return make("degree-d", Kind::UpperBound, v, {{"q", q}, {"p", p}, {"k", k}, {"d", d}, {"s", s}});
}

Prediction bound_Nd_simple(std::uint64_t q, std::uint32_t d) {
  if (d < 2) throw Error(ErrorCode::InvalidParameters, "degree must be >= 2");
  split(q);
  return make("degree-d-simple", Kind::UpperBound, qpow(q, d - 1).scaled(3), {{"q", q}, {"d", d}});
}

Prediction rho_lower_exponent(std::uint32_t d, std::uint32_t e) {
  if (d < 2 || e < 2) throw Error(ErrorCode::InvalidParameters, "rho needs d >= 2 and e >= 2");
  const Real rho = Real(1) / (2 * (Real(e) - 1 + mp::log(Real(d)) / mp::log(Real(e))));
  Prediction p = make("degree-d-lower-exponent", Kind::ReportOnly, Surd{}, {{"d", d}, {"e", e}});
  p.real = rho;
  return p;
}

Prediction rho_for(std::uint64_t q, std::uint32_t d) {
  split(q);
  const std::uint64_t e = std::gcd(std::uint64_t{d}, q - 1);
  if (std::gcd(std::uint64_t{d} - 1, q) != 1) {
    throw Error(ErrorCode::InvalidParameters, "requires gcd(d-1, q) = 1");
  }
  Prediction p = rho_lower_exponent(d, static_cast<std::uint32_t>(e));
  p.params["q"] = q;
  return p;
}

// ---- sparse ----------------------------------------------------------------

Prediction bound_sparse_gcd(std::uint64_t q, const std::vector<std::uint64_t>& exps) {
  if (exps.empty()) throw Error(ErrorCode::InvalidParameters, "no exponents");
  split(q);
  std::uint64_t g = q - 1;
  for (auto e : exps) g = std::gcd(g, e == 0 ? std::uint64_t{1} : e - 1);
  const Surd v = qpow(q - 1, exps.size() - 1).scaled(Rational(g));
  return make("sparse-scaling", Kind::UpperBound, v, {{"q", q}, {"exps", exps}, {"gcd", g}});
}

Prediction bound_sparse_frobenius(std::uint64_t p, std::uint32_t k, std::uint32_t s) {
  const std::uint64_t q = prime_power(p, k);
  const Surd root2 = Surd::power(p, Rational(k, 2)) - Surd::integer(1);
  const Surd root3 = Surd::power(p, Rational(k, 3)) - Surd::integer(1);
  const Surd v = qpow(q - 1, s).scaled(Rational(1, k)) + root2.pow(s).scaled(Rational(2, k)) + root3.pow(s);
  return make("sparse-frobenius", Kind::UpperBound, v, {{"p", p}, {"k", k}, {"q", q}, {"s", s}});
}

Prediction bound_sparse_moebius(std::uint64_t p, std::uint32_t k, std::uint32_t s) {
  const std::uint64_t q = prime_power(p, k);
  Rational total = 0;
  for (auto e : arith::divisors(k)) {
    Rational inner = 0;
    for (auto d : arith::divisors(k / e)) {
      inner += Rational(mp::pow(BigInt(ipow(p, d) - 1), s), BigInt(d));
    }
    total += Rational(mobius(static_cast<std::int64_t>(e)), static_cast<std::int64_t>(e)) * inner;
  }
  return make("sparse-moebius", Kind::UpperBound, Surd::rational(total),
              {{"p", p}, {"k", k}, {"q", q}, {"s", s}});
}

Prediction bound_sparse_moebius_prime_k(std::uint64_t p, std::uint32_t k, std::uint32_t s) {
  if (!arith::is_prime(k)) throw Error(ErrorCode::InvalidParameters, "k must be prime");
  const std::uint64_t q = prime_power(p, k);
  const Rational v = Rational(mp::pow(BigInt(q - 1), s), BigInt(k)) +
                     Rational(k - 1, k) * Rational(mp::pow(BigInt(p - 1), s));
  return make("sparse-moebius-prime-k", Kind::UpperBound, Surd::rational(v),
              {{"p", p}, {"k", k}, {"q", q}, {"s", s}});
}

// ---- linearised ------------------------------------------------------------

Prediction bound_linearised(std::uint64_t p, std::uint32_t k, std::uint32_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidParameters, "n must be >= 1");
  const std::uint64_t q = prime_power(p, k);
  const Surd v = qpow(q, n - 1).scaled(Rational(2 * p - 2)) + qpow(q, n - phi(n)).scaled(2);
  return make("linearised", Kind::UpperBound, v, {{"p", p}, {"k", k}, {"q", q}, {"n", n}}, true);
}

Prediction bound_linearised_weak(std::uint64_t p, std::uint32_t k, std::uint32_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidParameters, "n must be >= 1");
  const std::uint64_t q = prime_power(p, k);
  return make("linearised-simple", Kind::UpperBound, qpow(q, n - 1).scaled(Rational(2 * p)),
              {{"p", p}, {"k", k}, {"q", q}, {"n", n}}, true);
}

// ---- exact counts ----------------------------------------------------------

Prediction exact_linear(std::uint64_t q) {
  split(q);
  return make("linear-exact", Kind::Exact, Surd::integer(tau(q - 1) + 1), {{"q", q}});
}

Prediction exact_power(std::uint64_t q, std::uint32_t d) {
  if (d < 1) throw Error(ErrorCode::InvalidParameters, "d must be >= 1");
  split(q);
  const std::uint64_t g = std::gcd(std::uint64_t{d} - 1, q - 1);
  return make("power-exact", Kind::Exact, Surd::integer(tau(g)), {{"q", q}, {"d", d}, {"gcd", g}});
}

Prediction exact_frobenius_affine(std::uint64_t p, std::uint32_t k, NormFilter filter) {
  const std::uint64_t q = prime_power(p, k);
  std::uint64_t v = 0;
  switch (filter) {
    case NormFilter::Norm1: v = 2; break;
    case NormFilter::Any: v = tau(p - 1) + 1; break;
    case NormFilter::NormNot1: v = tau(p - 1) - 1; break;
  }
  return make("frobenius-affine-exact", Kind::Exact, Surd::integer(v),
              {{"p", p}, {"k", k}, {"q", q}, {"norm", to_string(filter)}});
}

// ---- rational functions ----------------------------------------------------

Prediction bound_rational(std::uint64_t q, std::uint32_t m, std::uint32_t n) {
  if (m + n < 1) throw Error(ErrorCode::OutOfRange, "needs m + n >= 1");
  if (m == n + 1) throw Error(ErrorCode::DivisionUndefined, "m = n + 1 leaves |m-n-1| = 0");
  split(q);
  const std::uint64_t D = m >= n + 1 ? m - n - 1 : n + 1 - m;
  const std::uint64_t s = std::gcd(q - 1, D);
  nlohmann::json params{{"q", q}, {"m", m}, {"n", n}, {"s", s}};
  Surd v;
  if (m == 0 && n == 1) {
    v = Surd::integer(q + s - 1);
  } else if (m == 0) {
    v = qpow(q, n) + qpow(q, n - 2).scaled(Rational(s) - 1);
  } else {
    const Division e = euclid(m, D);
    params["t"] = e.t;
    params["r"] = e.r;
    params["r*"] = e.r_star;
    v = qpow(q, m + n) + qpow(q, n + e.t * (D - phi(static_cast<std::int64_t>(D))) + e.r_star)
                             .scaled(Rational(s) - 1);
  }
  return make("rational", Kind::UpperBound, v, params);
}

Prediction bound_rational_improved(std::uint64_t q, std::uint32_t m, std::uint32_t n) {
  if (m < n + 2) throw Error(ErrorCode::OutOfRange, "needs m - n >= 2");
  const auto [p, k] = split(q);
  const std::uint64_t D = m - n - 1;
  const std::uint64_t s = std::gcd(q - 1, D);
  const Division e = euclid(m, D);
  Surd v = qpow(q, m + n - 1) + qpow(q, n + e.t * (D - phi(static_cast<std::int64_t>(D))) + e.r_star)
                                    .scaled(Rational(s) - 1);
  if ((m - n) % p == 0) {
    // q^(m/p - 1); m/p need not be an integer when p divides m - n only.
    v += Surd::power(p, Rational(std::int64_t{k} * m, p) - k, Rational(q - 1));
  }
  return make("rational-improved", Kind::UpperBound, v,
              {{"q", q}, {"p", p}, {"m", m}, {"n", n}, {"s", s}, {"t", e.t}, {"r", e.r}, {"r*", e.r_star}});
}

std::vector<Prediction> rational_corollaries(std::uint64_t q, std::uint32_t m, std::uint32_t n) {
  const auto [p, k] = split(q);
  std::vector<Prediction> out;
  const nlohmann::json params{{"q", q}, {"m", m}, {"n", n}};
  if (m + n >= 1 && m != n + 1) {
    const std::uint64_t D = m >= n + 1 ? m - n - 1 : n + 1 - m;
    const std::uint64_t s = std::gcd(q - 1, D);
    if (D == 1) out.push_back(make("rational-unit-gap", Kind::UpperBound, qpow(q, m + n), params));
    if (D >= 2) out.push_back(make("rational-twice", Kind::UpperBound, qpow(q, m + n).scaled(2), params));
    if (s == 1) out.push_back(make("rational-coprime", Kind::UpperBound, qpow(q, m + n), params));
  }
  if (m >= n + 2) {
    const std::uint64_t diff = m - n;
    if (diff == 2) {
      out.push_back(make("rational-improved-twice", Kind::UpperBound, qpow(q, m + n - 1).scaled(2), params));
    } else {
      out.push_back(make("rational-improved-thrice", Kind::UpperBound, qpow(q, m + n - 1).scaled(3), params));
    }
    if (diff % p != 0 && std::gcd(q - 1, diff - 1) == 1) {
      out.push_back(make("rational-improved-coprime", Kind::UpperBound, qpow(q, m + n - 1), params));
    }
  }
  return out;
}

// ---- verification ----------------------------------------------------------

bool holds(const Prediction& p, std::uint64_t observed) {
  const int c = p.value.compare(BigInt(observed));
  switch (p.kind) {
    case Kind::Exact: return c == 0;
    case Kind::UpperBound: return p.strict ? c > 0 : c >= 0;
    case Kind::ReportOnly: return true;
  }
  return false;
}

std::optional<std::string> VerificationResult::best_bound() const {
  const Check* best = nullptr;
  for (const auto& c : checks) {
    if (c.prediction.kind != Kind::UpperBound) continue;
    if (!best || c.prediction.value.approx() < best->prediction.value.approx()) best = &c;
  }
  if (!best) return std::nullopt;
  return best->prediction.value_string();
}

std::optional<std::string> VerificationResult::exact() const {
  for (const auto& c : checks) {
    if (c.prediction.kind == Kind::Exact) return c.prediction.value_string();
  }
  return std::nullopt;
}

nlohmann::json VerificationResult::theory_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json j{{"source", c.prediction.source},
                     {"kind", to_string(c.prediction.kind)},
                     {"value", c.prediction.value_string()},
                     {"strict", c.prediction.strict},
                     {"params", c.prediction.params}};
    j["pass"] = c.pass ? nlohmann::json(*c.pass) : nlohmann::json(nullptr);
    j["slack"] = c.slack.empty() ? nlohmann::json(nullptr) : nlohmann::json(c.slack);
    arr.push_back(std::move(j));
  }
  return arr;
}

VerificationResult verify(const FamilySpec& spec, std::uint64_t observed) {
  const Field& F = *spec.field;
  const std::uint64_t q = F.q(), p = F.p();
  const std::uint32_t k = F.k();
  std::vector<Prediction> preds;
  VerificationResult out;
  out.family = spec.to_json();
  out.observed = observed;

  switch (spec.kind) {
    case FamilyKind::AllDegree:
      if (spec.d == 1) {
        preds.push_back(exact_linear(q));
      } else {
        preds.push_back(bound_Nd(q, spec.d));
        preds.push_back(bound_Nd_simple(q, spec.d));
        try {
          preds.push_back(rho_for(q, spec.d));
        } catch (const Error&) {
        }
      }
      preds.push_back(make("family-size", Kind::UpperBound, qpow(q, spec.d).scaled(Rational(q - 1)),
                           {{"q", q}, {"d", spec.d}}));
      break;
    case FamilyKind::Sparse: {
      const auto s = static_cast<std::uint32_t>(spec.exponents.size());
      preds.push_back(bound_sparse_gcd(q, spec.exponents));
      preds.push_back(bound_sparse_frobenius(p, k, s));
      preds.push_back(bound_sparse_moebius(p, k, s));
      if (arith::is_prime(k)) preds.push_back(bound_sparse_moebius_prime_k(p, k, s));
      preds.push_back(make("family-size", Kind::UpperBound, qpow(q - 1, s), {{"q", q}, {"s", s}}));
      break;
    }
    case FamilyKind::Linearised:
      preds.push_back(bound_linearised(p, k, spec.n));
      preds.push_back(bound_linearised_weak(p, k, spec.n));
      preds.push_back(make("linearised-trivial", Kind::UpperBound, qpow(q, spec.n + 1),
                           {{"q", q}, {"n", spec.n}}, true));
      break;
    case FamilyKind::Linear: preds.push_back(exact_linear(q)); break;
    case FamilyKind::Power: preds.push_back(exact_power(q, spec.d)); break;
    case FamilyKind::FrobeniusAffine: preds.push_back(exact_frobenius_affine(p, k, spec.norm)); break;
    case FamilyKind::Rational: {
      const std::uint32_t m = spec.m, n = spec.n;
      if (m + n >= 1 && m == n + 1) {
        out.notes.push_back("degenerate: m = n + 1, only the trivial bound applies");
      } else if (m + n >= 1) {
        preds.push_back(bound_rational(q, m, n));
        if (m >= n + 2) preds.push_back(bound_rational_improved(q, m, n));
        for (auto& c : rational_corollaries(q, m, n)) preds.push_back(std::move(c));
      }
      preds.push_back(make("rational-trivial", Kind::UpperBound, qpow(q, m + n + 1),
                           {{"q", q}, {"m", m}, {"n", n}}, true));
      break;
    }
  }

  for (auto& pr : preds) {
    Check c;
    if (pr.kind == Kind::ReportOnly) {
      c.pass = std::nullopt;
    } else {
      c.pass = holds(pr, observed);
      c.slack = (pr.value - Surd::integer(observed)).to_string();
      out.overall = out.overall && *c.pass;
    }
    c.prediction = std::move(pr);
    out.checks.push_back(std::move(c));
  }
  return out;
}

}  // namespace dyncount::theory
