#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dyncount/arith.hpp"
#include "dyncount/gfq.hpp"

namespace testing_support {

inline dyncount::FieldPtr field(std::uint64_t q) {
  const auto pk = dyncount::arith::prime_power_split(q);
  return dyncount::Field::make(static_cast<std::uint32_t>(pk->first), pk->second);
}

inline std::vector<std::uint64_t> prime_powers_upto(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t q = 2; q <= n; ++q) {
    if (dyncount::arith::prime_power_split(q)) out.push_back(q);
  }
  return out;
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240601);
  return g;
}

inline std::uint32_t uniform(std::uint32_t lo, std::uint32_t hi) {
  return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng());
}

}  // namespace testing_support
