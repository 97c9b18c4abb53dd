#include "dyncount/arith.hpp"

#include <algorithm>

#include "dyncount/error.hpp"

namespace dyncount::arith {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

std::vector<PrimePower> factorize(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::NonPositive, "factorize(0)");
  std::vector<PrimePower> out;
  for (std::uint64_t d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
    if (n % d != 0) continue;
    std::uint32_t e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    out.push_back({d, e});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out{1};
  for (const auto& [prime, exponent] : factorize(n)) {
    const std::size_t base = out.size();
    std::uint64_t pk = 1;
    for (std::uint32_t e = 1; e <= exponent; ++e) {
      pk *= prime;
      for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::uint64_t positive(std::int64_t n, const char* fn) {
  if (n < 1) throw Error(ErrorCode::NonPositive, std::string(fn) + "(" + std::to_string(n) + ")");
  return static_cast<std::uint64_t>(n);
}

}  // namespace

std::uint64_t tau(std::int64_t n) {
  std::uint64_t t = 1;
  for (const auto& pp : factorize(positive(n, "tau"))) t *= pp.exponent + 1;
  return t;
}

std::uint64_t phi(std::int64_t n) {
  std::uint64_t v = positive(n, "phi");
  for (const auto& pp : factorize(v)) v = v / pp.prime * (pp.prime - 1);
  return v;
}

int mobius(std::int64_t n) {
  int sign = 1;
  for (const auto& pp : factorize(positive(n, "mobius"))) {
    if (pp.exponent > 1) return 0;
    sign = -sign;
  }
  return sign;
}

std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = std::max<std::uint64_t>(lo, 2); n <= hi; ++n) {
    if (is_prime(n)) out.push_back(n);
  }
  return out;
}

std::optional<std::uint64_t> checked_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > UINT64_MAX / base) return std::nullopt;
    r *= base;
  }
  return r;
}

std::optional<std::uint32_t> exact_log(std::uint64_t n, std::uint64_t base) {
  if (base < 2 || n < base) return std::nullopt;
  std::uint32_t k = 0;
  while (n % base == 0) {
    n /= base;
    ++k;
  }
  if (n != 1) return std::nullopt;
  return k;
}

std::optional<std::pair<std::uint64_t, std::uint32_t>> prime_power_split(std::uint64_t q) {
  if (q < 2) return std::nullopt;
  const auto f = factorize(q);
  if (f.size() != 1) return std::nullopt;
  return std::make_pair(f[0].prime, f[0].exponent);
}

}  // namespace dyncount::arith
