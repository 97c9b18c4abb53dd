#include "dyncount/gfq.hpp"

#include <string>

#include "dyncount/arith.hpp"
#include "dyncount/error.hpp"

namespace dyncount {

namespace {

using Coeffs = std::vector<std::uint32_t>;

// Remainder of a by the monic polynomial b over F_p (both low-degree first).
Coeffs poly_mod(Coeffs a, std::span<const std::uint32_t> b, std::uint32_t p) {
  const std::size_t db = b.size() - 1;
  for (std::size_t i = a.size(); i-- > db;) {
    const std::uint32_t c = a[i] % p;
    if (c == 0) continue;
    for (std::size_t j = 0; j <= db; ++j) {
      const std::uint64_t sub = static_cast<std::uint64_t>(c) * b[j] % p;
      a[i - db + j] = static_cast<std::uint32_t>((a[i - db + j] + p - sub) % p);
    }
  }
  a.resize(std::min(a.size(), db));
  return a;
}

bool all_zero(const Coeffs& c) {
  for (auto v : c) {
    if (v != 0) return false;
  }
  return true;
}

}  // namespace

bool is_irreducible(std::uint32_t p, std::span<const std::uint32_t> monic) {
  if (monic.empty() || monic.back() != 1) {
    throw Error(ErrorCode::InvalidPolynomial, "modulus must be monic");
  }
  const std::size_t n = monic.size() - 1;
  Coeffs full(monic.begin(), monic.end());
  for (std::size_t d = 1; d <= n / 2; ++d) {
    // Every monic polynomial of degree d: d free low coefficients.
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < d; ++i) count *= p;
    Coeffs cand(d + 1, 0);
    cand[d] = 1;
    for (std::uint64_t t = 0; t < count; ++t) {
      std::uint64_t v = t;
      for (std::size_t i = 0; i < d; ++i) {
        cand[i] = static_cast<std::uint32_t>(v % p);
        v /= p;
      }
      if (all_zero(poly_mod(full, cand, p))) return false;
    }
  }
  return true;
}

std::vector<std::uint32_t> smallest_irreducible(std::uint32_t p, std::uint32_t k) {
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < k; ++i) count *= p;
  Coeffs cand(k + 1, 0);
  cand[k] = 1;
  for (std::uint64_t t = 0; t < count; ++t) {
    // c0 is the most significant digit of t so that t order is lex order.
    std::uint64_t v = t;
    for (std::uint32_t i = k; i-- > 0;) {
      cand[i] = static_cast<std::uint32_t>(v % p);
      v /= p;
    }
    if (is_irreducible(p, cand)) return cand;
  }
  throw Error(ErrorCode::InvalidParameters, "no irreducible polynomial found");
}

FieldPtr Field::make(std::uint32_t p, std::uint32_t k, std::uint64_t domain_limit) {
  if (!arith::is_prime(p)) throw Error(ErrorCode::NonPrime, std::to_string(p));
  if (k == 0) throw Error(ErrorCode::InvalidParameters, "extension degree k must be >= 1");
  const auto q = arith::checked_pow(p, k);
  if (!q || *q > domain_limit) {
    throw Error(ErrorCode::DomainTooLarge,
                std::to_string(p) + "^" + std::to_string(k) + " exceeds limit " +
                    std::to_string(domain_limit));
  }
  return with_modulus(p, smallest_irreducible(p, k), domain_limit);
}

FieldPtr Field::with_modulus(std::uint32_t p, std::vector<std::uint32_t> modulus,
                             std::uint64_t domain_limit) {
  if (!arith::is_prime(p)) throw Error(ErrorCode::NonPrime, std::to_string(p));
  if (modulus.size() < 2) throw Error(ErrorCode::InvalidPolynomial, "modulus degree must be >= 1");
  for (auto c : modulus) {
    if (c >= p) throw Error(ErrorCode::InvalidPolynomial, "modulus coefficient out of range");
  }
  const auto q = arith::checked_pow(p, modulus.size() - 1);
  if (!q || *q > domain_limit) {
    throw Error(ErrorCode::DomainTooLarge, "q exceeds limit " + std::to_string(domain_limit));
  }
  if (!is_irreducible(p, modulus)) {
    throw Error(ErrorCode::InvalidPolynomial, "modulus is reducible");
  }
  return std::make_shared<const Field>(Private{}, p, std::move(modulus));
}

Field::Field(Private, std::uint32_t p, std::vector<std::uint32_t> modulus)
    : p_(p), k_(static_cast<std::uint32_t>(modulus.size() - 1)), modulus_(std::move(modulus)) {
  std::uint32_t pk = 1;
  for (std::uint32_t i = 0; i < k_; ++i) {
    pow_p_.push_back(pk);
    pk *= p_;
  }
  q_ = pk;
  if (q_ > 2) {
    for (const auto& pp : arith::factorize(q_ - 1)) order_primes_.push_back(pp.prime);
  }
  for (Elem g = 1; g < q_; ++g) {
    if (order_slow(g) == q_ - 1) {
      generator_ = g;
      break;
    }
  }
  if (q_ <= kEagerTableLimit) tables();
}

Elem Field::from_int(std::int64_t c) const {
  const std::int64_t r = ((c % static_cast<std::int64_t>(p_)) + p_) % p_;
  return static_cast<Elem>(r);
}

std::vector<std::uint32_t> Field::coeffs(Elem x) const {
  std::vector<std::uint32_t> c(k_);
  for (std::uint32_t i = 0; i < k_; ++i) {
    c[i] = x % p_;
    x /= p_;
  }
  return c;
}

Elem Field::from_coeffs(std::span<const std::uint32_t> c) const {
  if (c.size() > k_) throw Error(ErrorCode::InvalidElement, "too many coefficients");
  Elem x = 0;
  for (std::size_t i = c.size(); i-- > 0;) {
    if (c[i] >= p_) throw Error(ErrorCode::InvalidElement, "coefficient out of range");
    x = x * p_ + c[i];
  }
  return x;
}

Elem Field::add_slow(Elem x, Elem y) const {
  Elem r = 0;
  for (std::uint32_t i = 0; i < k_; ++i) {
    r += ((x % p_ + y % p_) % p_) * pow_p_[i];
    x /= p_;
    y /= p_;
  }
  return r;
}

Elem Field::mul_slow(Elem x, Elem y) const {
  const auto a = coeffs(x);
  const auto b = coeffs(y);
  Coeffs prod(2 * k_ - 1, 0);
  for (std::uint32_t i = 0; i < k_; ++i) {
    for (std::uint32_t j = 0; j < k_; ++j) {
      prod[i + j] = static_cast<std::uint32_t>(
          (prod[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p_);
    }
  }
  return from_coeffs(poly_mod(std::move(prod), modulus_, p_));
}

Elem Field::pow_slow(Elem x, std::uint64_t e) const {
  Elem r = 1;
  while (e > 0) {
    if (e & 1) r = mul_slow(r, x);
    x = mul_slow(x, x);
    e >>= 1;
  }
  return r;
}

std::uint64_t Field::order_slow(Elem x) const {
  std::uint64_t m = q_ - 1;
  for (auto r : order_primes_) {
    while (m % r == 0 && pow_slow(x, m / r) == 1) m /= r;
  }
  return m;
}

const Field::Tables& Field::tables() const {
  std::call_once(tables_once_, [this] { build_tables(); });
  return tables_;
}

void Field::build_tables() const {
  const std::uint32_t n = q_ - 1;
  tables_.exp.assign(2 * static_cast<std::size_t>(n), 0);
  tables_.log.assign(q_, 0);
  Elem v = 1;
  for (std::uint32_t i = 0; i < n; ++i) {
    tables_.exp[i] = v;
    tables_.exp[i + n] = v;
    tables_.log[v] = i;
    v = mul_slow(v, generator_);
  }
  tables_.neg.resize(q_);
  for (Elem x = 0; x < q_; ++x) {
    Elem r = 0;
    Elem t = x;
    for (std::uint32_t i = 0; i < k_; ++i) {
      r += ((p_ - t % p_) % p_) * pow_p_[i];
      t /= p_;
    }
    tables_.neg[x] = r;
  }
  tables_.zech.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const Elem s = add_slow(1, tables_.exp[i]);
    tables_.zech[i] = s == 0 ? -1 : static_cast<std::int64_t>(tables_.log[s]);
  }
}

Elem Field::add(Elem x, Elem y) const {
  if (p_ == 2) return x ^ y;
  if (k_ == 1) {
    const Elem s = x + y;
    return s >= p_ ? s - p_ : s;
  }
  if (x == 0) return y;
  if (y == 0) return x;
  const auto& t = tables();
  const std::uint32_t n = q_ - 1;
  const std::uint32_t lx = t.log[x];
  const std::uint32_t d = (t.log[y] + n - lx) % n;
  const std::int64_t z = t.zech[d];
  if (z < 0) return 0;
  return t.exp[lx + static_cast<std::uint32_t>(z)];
}

Elem Field::neg(Elem x) const {
  if (p_ == 2) return x;
  if (k_ == 1) return x == 0 ? 0 : p_ - x;
  return tables().neg[x];
}

Elem Field::mul(Elem x, Elem y) const {
  if (x == 0 || y == 0) return 0;
  const auto& t = tables();
  return t.exp[t.log[x] + t.log[y]];
}

Elem Field::inv(Elem x) const {
  if (x == 0) throw Error(ErrorCode::DivisionByZero, "inverse of zero");
  const auto& t = tables();
  const std::uint32_t n = q_ - 1;
  return t.exp[(n - t.log[x]) % n];
}

Elem Field::pow(Elem x, std::uint64_t e) const {
  Elem r = 1;
  while (e > 0) {
    if (e & 1) r = mul(r, x);
    x = mul(x, x);
    e >>= 1;
  }
  return r;
}

Elem Field::frobenius(Elem x, std::uint64_t i) const {
  return pow(x, pow_p_[i % k_]);
}

Elem Field::norm(Elem x) const { return pow(x, (q_ - 1) / (p_ - 1)); }

Elem Field::trace(Elem x) const {
  Elem s = 0;
  for (std::uint32_t i = 0; i < k_; ++i) s = add(s, frobenius(x, i));
  return s;
}

std::uint64_t Field::mult_order(Elem x) const {
  if (x == 0) throw Error(ErrorCode::ZeroElement, "multiplicative order of zero");
  std::uint64_t m = q_ - 1;
  for (auto r : order_primes_) {
    while (m % r == 0 && pow(x, m / r) == 1) m /= r;
  }
  return m;
}

nlohmann::json Field::descriptor() const {
  return {{"p", p_}, {"k", k_}, {"modulus", modulus_}};
}

FieldElement::FieldElement(FieldPtr field, std::uint64_t enc) : field_(std::move(field)) {
  if (!field_->contains(enc)) {
    throw Error(ErrorCode::InvalidElement, std::to_string(enc) + " not in F_" +
                                               std::to_string(field_->q()));
  }
  value_ = static_cast<Elem>(enc);
}

const Field& FieldElement::check(const FieldElement& o) const {
  if (field_ != o.field_ && !field_->same_as(*o.field_)) {
    throw Error(ErrorCode::FieldMismatch, "operands belong to different fields");
  }
  return *field_;
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
  return {field_, check(o).add(value_, o.value_)};
}
FieldElement FieldElement::operator-(const FieldElement& o) const {
  return {field_, check(o).sub(value_, o.value_)};
}
FieldElement FieldElement::operator*(const FieldElement& o) const {
  return {field_, check(o).mul(value_, o.value_)};
}
FieldElement FieldElement::operator/(const FieldElement& o) const {
  return {field_, check(o).div(value_, o.value_)};
}
bool FieldElement::operator==(const FieldElement& o) const {
  check(o);
  return value_ == o.value_;
}

std::vector<FieldElement> elements(const FieldPtr& field) {
  std::vector<FieldElement> out;
  out.reserve(field->q());
  for (std::uint32_t x = 0; x < field->q(); ++x) out.emplace_back(field, x);
  return out;
}

}  // namespace dyncount
