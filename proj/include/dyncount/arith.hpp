#pragma once

// Elementary number theory on 64-bit integers. Factorization is trial
// division, which is all the desk-scale parameters here ever need.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace dyncount::arith {

struct PrimePower {
  std::uint64_t prime;
  std::uint32_t exponent;
  bool operator==(const PrimePower&) const = default;
};

bool is_prime(std::uint64_t n);

/// Prime factorization in increasing prime order. factorize(1) is empty.
/// Throws Error(NonPositive) for n == 0.
std::vector<PrimePower> factorize(std::uint64_t n);

/// All positive divisors, ascending.
std::vector<std::uint64_t> divisors(std::uint64_t n);

std::uint64_t tau(std::int64_t n);
std::uint64_t phi(std::int64_t n);
int mobius(std::int64_t n);

/// Primes in [lo, hi], ascending.
std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi);

/// base^exp, or nullopt on 64-bit overflow.
std::optional<std::uint64_t> checked_pow(std::uint64_t base, std::uint64_t exp);

/// If n == base^k for some k >= 1, returns k.
std::optional<std::uint32_t> exact_log(std::uint64_t n, std::uint64_t base);

/// Splits q into (p, k) with q = p^k, p prime, or nullopt.
std::optional<std::pair<std::uint64_t, std::uint32_t>> prime_power_split(std::uint64_t q);

}  // namespace dyncount::arith
