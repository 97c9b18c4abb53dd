#pragma once

// Functional graphs (out-degree exactly one) on {0, ..., n-1}: cycle and
// tail statistics, a total isomorphism invariant, and an independent
// brute-force isomorphism test used to validate that invariant.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dyncount/dynmaps.hpp"
#include "json.hpp"

namespace dyncount {

struct FunctionalGraph {
  std::vector<std::uint32_t> succ;
  std::optional<nlohmann::json> provenance;

  std::uint32_t size() const { return static_cast<std::uint32_t>(succ.size()); }

  /// Throws InvalidParameters if some successor is out of range.
  static FunctionalGraph from_successors(std::vector<std::uint32_t> succ);
};

/// succ[v] = f(v) over the map's whole domain, with the map as provenance.
FunctionalGraph build_graph(const DynMap& map);

struct GraphStats {
  std::uint64_t n = 0;
  std::uint64_t component_count = 0;
  std::vector<std::uint64_t> cycle_lengths;  // ascending
  std::uint64_t fixed_point_count = 0;
  std::uint64_t periodic_point_count = 0;
  /// m -> #{v : the period of v divides m}, for every divisor m of the lcm of
  /// the cycle lengths with m <= the cap given to analyze().
  std::map<std::uint64_t, std::uint64_t> period_divisor_counts;
  std::uint64_t max_tail_depth = 0;

  /// {n, components, cycle_lengths, fixed_points, max_tail_depth}
  nlohmann::json to_json() const;
  bool operator==(const GraphStats&) const = default;
};

inline constexpr std::uint64_t kDefaultDivisorCap = 1'000'000;

GraphStats analyze(const FunctionalGraph& g, std::uint64_t divisor_cap = kDefaultDivisorCap);

struct Digest128 {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;
  std::string hex() const;
  bool operator==(const Digest128&) const = default;
};

Digest128 digest128(std::string_view bytes);

/// Sorted component encodings, each "<len>:<enc>", where <enc> is the
/// minimal rotation of the bracket strings of the in-trees hanging off the
/// component's cycle. Equal keys <=> isomorphic graphs.
struct CanonicalKey {
  std::string key;
  Digest128 digest;
  bool operator==(const CanonicalKey& o) const { return key == o.key; }
};

/// Reusable scratch space for repeated canonicalization.
class Canonicalizer {
 public:
  CanonicalKey operator()(std::span<const std::uint32_t> succ);

 private:
  std::vector<std::string> tree_;
};

CanonicalKey canonical_key(const FunctionalGraph& g);

/// Index of the lexicographically least rotation of s (linear time).
std::size_t least_rotation(std::span<const std::uint32_t> s);

inline constexpr std::size_t kDefaultOracleLimit = 512;

/// Exact isomorphism test by component and tree matching, written without
/// reference to canonical_key. Throws TooLargeForOracle above the limit.
bool are_isomorphic_oracle(const FunctionalGraph& a, const FunctionalGraph& b,
                           std::size_t limit = kDefaultOracleLimit);

/// succ'[pi(v)] = pi(succ[v]). Throws NotAPermutation.
FunctionalGraph relabel(const FunctionalGraph& g, std::span<const std::uint32_t> perm);

/// DOT digraph with one edge per vertex; labels, when given, name vertices.
std::string export_dot(const FunctionalGraph& g,
                       const std::vector<std::string>* labels = nullptr);

}  // namespace dyncount
