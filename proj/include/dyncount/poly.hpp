#pragma once

// Dense univariate polynomials over F_q, low-degree coefficient first. The
// zero polynomial is the empty vector; every other value is kept trimmed so
// that back() != 0.

#include <utility>
#include <vector>

#include "dyncount/gfq.hpp"

namespace dyncount::poly {

using Poly = std::vector<Elem>;

void trim(Poly& f);
long degree(const Poly& f);  // -1 for zero

Poly add(const Field& F, const Poly& f, const Poly& g);
Poly sub(const Field& F, const Poly& f, const Poly& g);
Poly scale(const Field& F, const Poly& f, Elem c);
Poly mul(const Field& F, const Poly& f, const Poly& g);
/// (quotient, remainder); g must be nonzero.
std::pair<Poly, Poly> divmod(const Field& F, const Poly& f, const Poly& g);
/// Monic gcd; gcd(0, 0) is 0.
Poly gcd(const Field& F, Poly f, Poly g);
/// f(lambda X + mu).
Poly compose_affine(const Field& F, const Poly& f, Elem lambda, Elem mu);
Elem eval(const Field& F, const Poly& f, Elem x);

}  // namespace dyncount::poly
