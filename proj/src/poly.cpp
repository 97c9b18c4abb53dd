#include "dyncount/poly.hpp"

#include <algorithm>

#include "dyncount/error.hpp"

namespace dyncount::poly {

void trim(Poly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

long degree(const Poly& f) { return static_cast<long>(f.size()) - 1; }

Poly add(const Field& F, const Poly& f, const Poly& g) {
  Poly r(std::max(f.size(), g.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Elem a = i < f.size() ? f[i] : 0;
    const Elem b = i < g.size() ? g[i] : 0;
    r[i] = F.add(a, b);
  }
  trim(r);
  return r;
}

Poly sub(const Field& F, const Poly& f, const Poly& g) {
  Poly r(std::max(f.size(), g.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Elem a = i < f.size() ? f[i] : 0;
    const Elem b = i < g.size() ? g[i] : 0;
    r[i] = F.sub(a, b);
  }
  trim(r);
  return r;
}

Poly scale(const Field& F, const Poly& f, Elem c) {
  Poly r(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) r[i] = F.mul(f[i], c);
  trim(r);
  return r;
}

Poly mul(const Field& F, const Poly& f, const Poly& g) {
  if (f.empty() || g.empty()) return {};
  Poly r(f.size() + g.size() - 1, 0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0) continue;
    for (std::size_t j = 0; j < g.size(); ++j) r[i + j] = F.add(r[i + j], F.mul(f[i], g[j]));
  }
  trim(r);
  return r;
}

std::pair<Poly, Poly> divmod(const Field& F, const Poly& f, const Poly& g) {
  if (g.empty()) throw Error(ErrorCode::DivisionByZero, "polynomial division by zero");
  Poly r = f;
  trim(r);
  if (r.size() < g.size()) return {{}, r};
  Poly q(r.size() - g.size() + 1, 0);
  const Elem lead_inv = F.inv(g.back());
  for (std::size_t i = r.size(); i-- >= g.size();) {
    const Elem c = F.mul(r[i], lead_inv);
    const std::size_t shift = i - (g.size() - 1);
    q[shift] = c;
    if (c == 0) continue;
    for (std::size_t j = 0; j < g.size(); ++j) r[shift + j] = F.sub(r[shift + j], F.mul(c, g[j]));
  }
  trim(q);
  trim(r);
  return {q, r};
}

Poly gcd(const Field& F, Poly f, Poly g) {
  trim(f);
  trim(g);
  while (!g.empty()) {
    Poly r = divmod(F, f, g).second;
    f = std::move(g);
    g = std::move(r);
  }
  if (f.empty()) return f;
  return scale(F, f, F.inv(f.back()));
}

Poly compose_affine(const Field& F, const Poly& f, Elem lambda, Elem mu) {
  const Poly lin = mu == 0 ? Poly{0, lambda} : Poly{mu, lambda};
  Poly acc;
  for (std::size_t i = f.size(); i-- > 0;) {
    acc = add(F, mul(F, acc, lin), Poly{f[i]});
  }
  trim(acc);
  return acc;
}

Elem eval(const Field& F, const Poly& f, Elem x) {
  Elem acc = 0;
  for (std::size_t i = f.size(); i-- > 0;) acc = F.add(F.mul(acc, x), f[i]);
  return acc;
}

}  // namespace dyncount::poly
