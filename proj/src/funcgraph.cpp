#include "dyncount/funcgraph.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "dyncount/arith.hpp"
#include "dyncount/error.hpp"

namespace dyncount {

namespace {

// Marks cycle vertices and lists each cycle in successor order.
struct Cycles {
  std::vector<std::uint8_t> on_cycle;
  std::vector<std::vector<std::uint32_t>> cycles;
};

Cycles find_cycles(std::span<const std::uint32_t> succ) {
  const std::uint32_t n = static_cast<std::uint32_t>(succ.size());
  Cycles c;
  c.on_cycle.assign(n, 0);
  // 0 = unvisited, otherwise 1 + id of the walk that first reached it.
  std::vector<std::uint32_t> walk(n, 0);
  for (std::uint32_t start = 0; start < n; ++start) {
    if (walk[start] != 0) continue;
    const std::uint32_t id = start + 1;
    std::uint32_t v = start;
    while (walk[v] == 0) {
      walk[v] = id;
      v = succ[v];
    }
    if (walk[v] != id) continue;  // ran into an earlier walk
    std::vector<std::uint32_t> cyc;
    std::uint32_t u = v;
    do {
      c.on_cycle[u] = 1;
      cyc.push_back(u);
      u = succ[u];
    } while (u != v);
    c.cycles.push_back(std::move(cyc));
  }
  return c;
}

// Children lists (non-cycle predecessors) in CSR form plus a top-down order
// starting from the cycle vertices.
struct Forest {
  std::vector<std::uint32_t> start;
  std::vector<std::uint32_t> child;
  std::vector<std::uint32_t> order;  // parents before children
};

Forest build_forest(std::span<const std::uint32_t> succ, const Cycles& cyc) {
  const std::uint32_t n = static_cast<std::uint32_t>(succ.size());
  Forest f;
  f.start.assign(n + 1, 0);
  for (std::uint32_t v = 0; v < n; ++v) {
    if (!cyc.on_cycle[v]) ++f.start[succ[v] + 1];
  }
  std::partial_sum(f.start.begin(), f.start.end(), f.start.begin());
  f.child.resize(f.start[n]);
  std::vector<std::uint32_t> fill(f.start.begin(), f.start.end() - 1);
  for (std::uint32_t v = 0; v < n; ++v) {
    if (!cyc.on_cycle[v]) f.child[fill[succ[v]]++] = v;
  }
  f.order.reserve(n);
  for (const auto& c : cyc.cycles) f.order.insert(f.order.end(), c.begin(), c.end());
  for (std::size_t i = 0; i < f.order.size(); ++i) {
    const std::uint32_t v = f.order[i];
    for (std::uint32_t j = f.start[v]; j < f.start[v + 1]; ++j) f.order.push_back(f.child[j]);
  }
  return f;
}

bool shortlex_less(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace

FunctionalGraph FunctionalGraph::from_successors(std::vector<std::uint32_t> succ) {
  for (auto s : succ) {
    if (s >= succ.size()) throw Error(ErrorCode::InvalidParameters, "successor out of range");
  }
  return FunctionalGraph{std::move(succ), std::nullopt};
}

FunctionalGraph build_graph(const DynMap& map) {
  FunctionalGraph g{evaluation_table(map), to_json(map)};
  return g;
}

nlohmann::json GraphStats::to_json() const {
  return {{"n", n},
          {"components", component_count},
          {"cycle_lengths", cycle_lengths},
          {"fixed_points", fixed_point_count},
          {"max_tail_depth", max_tail_depth}};
}

GraphStats analyze(const FunctionalGraph& g, std::uint64_t divisor_cap) {
  const auto cyc = find_cycles(g.succ);
  const auto forest = build_forest(g.succ, cyc);
  GraphStats s;
  s.n = g.size();
  s.component_count = cyc.cycles.size();
  for (const auto& c : cyc.cycles) {
    s.cycle_lengths.push_back(c.size());
    s.periodic_point_count += c.size();
    if (c.size() == 1) ++s.fixed_point_count;
  }
  std::sort(s.cycle_lengths.begin(), s.cycle_lengths.end());

  std::vector<std::uint64_t> depth(g.size(), 0);
  for (auto v : forest.order) {
    for (std::uint32_t j = forest.start[v]; j < forest.start[v + 1]; ++j) {
      depth[forest.child[j]] = depth[v] + 1;
      s.max_tail_depth = std::max(s.max_tail_depth, depth[v] + 1);
    }
  }

  // Factor the lcm of the cycle lengths prime by prime, then walk its
  // divisors up to the cap.
  std::map<std::uint64_t, std::uint32_t> lcm;
  std::map<std::uint64_t, std::uint64_t> length_mass;  // L -> points on L-cycles
  for (auto len : s.cycle_lengths) {
    length_mass[len] += len;
    for (const auto& pp : arith::factorize(len)) {
      auto& e = lcm[pp.prime];
      e = std::max(e, pp.exponent);
    }
  }
  std::vector<std::uint64_t> divs{1};
  for (const auto& [prime, exponent] : lcm) {
    const std::size_t base = divs.size();
    for (std::size_t i = 0; i < base; ++i) {
      std::uint64_t d = divs[i];
      for (std::uint32_t e = 1; e <= exponent; ++e) {
        if (d > divisor_cap / prime) break;
        d *= prime;
        divs.push_back(d);
      }
    }
  }
  if (!s.cycle_lengths.empty()) {
    for (auto m : divs) {
      if (m > divisor_cap) continue;
      std::uint64_t count = 0;
      for (const auto& [len, mass] : length_mass) {
        if (m % len == 0) count += mass;
      }
      s.period_divisor_counts[m] = count;
    }
  }
  return s;
}

std::string Digest128::hex() const {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Digest128 digest128(std::string_view bytes) {
  // Two FNV-1a lanes with different bases, finalised with a 64-bit mixer.
  std::uint64_t a = 0xcbf29ce484222325ULL;
  std::uint64_t b = 0x84222325cbf29ce4ULL;
  for (unsigned char c : bytes) {
    a = (a ^ c) * 0x100000001b3ULL;
    b = (b ^ (c + 0x5bu)) * 0x100000001b3ULL;
  }
  return {mix64(a ^ bytes.size()), mix64(b + 0x9e3779b97f4a7c15ULL * bytes.size())};
}

std::size_t least_rotation(std::span<const std::uint32_t> s) {
  const std::size_t n = s.size();
  std::size_t i = 0, j = 1, k = 0;
  while (i < n && j < n && k < n) {
    const auto a = s[(i + k) % n];
    const auto b = s[(j + k) % n];
    if (a == b) {
      ++k;
      continue;
    }
    if (a > b) {
      i += k + 1;
    } else {
      j += k + 1;
    }
    if (i == j) ++j;
    k = 0;
  }
  return n == 0 ? 0 : std::min(i, j);
}

CanonicalKey Canonicalizer::operator()(std::span<const std::uint32_t> succ) {
  const auto cyc = find_cycles(succ);
  const auto forest = build_forest(succ, cyc);
  const std::uint32_t n = static_cast<std::uint32_t>(succ.size());
  tree_.resize(n);

  // Bottom-up bracket strings; children are consumed as the parent is built.
  std::vector<std::string> kids;
  for (std::size_t idx = forest.order.size(); idx-- > 0;) {
    const std::uint32_t v = forest.order[idx];
    kids.clear();
    std::size_t total = 2;
    for (std::uint32_t j = forest.start[v]; j < forest.start[v + 1]; ++j) {
      kids.push_back(std::move(tree_[forest.child[j]]));
      total += kids.back().size();
    }
    std::sort(kids.begin(), kids.end(), shortlex_less);
    std::string out;
    out.reserve(total);
    out.push_back('(');
    for (auto& k : kids) out += k;
    out.push_back(')');
    tree_[v] = std::move(out);
  }

  std::vector<std::string> components;
  components.reserve(cyc.cycles.size());
  std::vector<const std::string*> sorted;
  std::vector<std::uint32_t> ranks;
  for (const auto& c : cyc.cycles) {
    sorted.clear();
    for (auto v : c) sorted.push_back(&tree_[v]);
    std::sort(sorted.begin(), sorted.end(),
              [](const std::string* a, const std::string* b) { return shortlex_less(*a, *b); });
    sorted.erase(std::unique(sorted.begin(), sorted.end(),
                             [](const std::string* a, const std::string* b) { return *a == *b; }),
                 sorted.end());
    ranks.clear();
    for (auto v : c) {
      const auto it = std::lower_bound(
          sorted.begin(), sorted.end(), &tree_[v],
          [](const std::string* a, const std::string* b) { return shortlex_less(*a, *b); });
      ranks.push_back(static_cast<std::uint32_t>(it - sorted.begin()));
    }
    const std::size_t r = least_rotation(ranks);
    std::string enc;
    for (std::size_t i = 0; i < c.size(); ++i) enc += tree_[c[(r + i) % c.size()]];
    components.push_back(std::move(enc));
  }
  std::sort(components.begin(), components.end(), shortlex_less);

  CanonicalKey key;
  for (const auto& c : components) {
    key.key += std::to_string(c.size());
    key.key.push_back(':');
    key.key += c;
  }
  key.digest = digest128(key.key);
  for (auto& t : tree_) std::string().swap(t);
  return key;
}

CanonicalKey canonical_key(const FunctionalGraph& g) {
  Canonicalizer c;
  return c(g.succ);
}

namespace {

// Structure used only by the oracle. Cycle membership is decided by the
// definition (v returns to itself within n steps) rather than by marking.
struct OracleView {
  const std::vector<std::uint32_t>* succ;
  std::vector<bool> cyclic;
  std::vector<std::vector<std::uint32_t>> children;
  std::vector<std::uint32_t> subtree;
  std::vector<std::vector<std::uint32_t>> cycles;

  explicit OracleView(const FunctionalGraph& g) : succ(&g.succ) {
    const std::uint32_t n = g.size();
    cyclic.assign(n, false);
    for (std::uint32_t v = 0; v < n; ++v) {
      std::uint32_t u = g.succ[v];
      for (std::uint32_t step = 0; step < n && u != v; ++step) u = g.succ[u];
      cyclic[v] = (u == v);
    }
    children.assign(n, {});
    for (std::uint32_t v = 0; v < n; ++v) {
      if (!cyclic[v]) children[g.succ[v]].push_back(v);
    }
    subtree.assign(n, 0);
    for (std::uint32_t v = 0; v < n; ++v) size_of(v);
    std::vector<bool> seen(n, false);
    for (std::uint32_t v = 0; v < n; ++v) {
      if (!cyclic[v] || seen[v]) continue;
      std::vector<std::uint32_t> c;
      std::uint32_t u = v;
      do {
        seen[u] = true;
        c.push_back(u);
        u = g.succ[u];
      } while (u != v);
      cycles.push_back(std::move(c));
    }
  }

  std::uint32_t size_of(std::uint32_t v) {
    if (subtree[v] == 0) {
      std::uint32_t s = 1;
      for (auto c : children[v]) s += size_of(c);
      subtree[v] = s;
    }
    return subtree[v];
  }

  std::uint32_t component_size(const std::vector<std::uint32_t>& c) const {
    std::uint32_t s = 0;
    for (auto v : c) s += subtree[v];
    return s;
  }
};

class OracleMatcher {
 public:
  OracleMatcher(const OracleView& a, const OracleView& b) : a_(a), b_(b) {}

  // Rooted in-tree isomorphism. Because isomorphism is an equivalence
  // relation, pairing each child of u with any still-free isomorphic child
  // of v never needs to be undone.
  bool trees(std::uint32_t u, std::uint32_t v) {
    if (a_.subtree[u] != b_.subtree[v]) return false;
    if (a_.children[u].size() != b_.children[v].size()) return false;
    const std::uint64_t memo_key = (static_cast<std::uint64_t>(u) << 32) | v;
    if (const auto it = memo_.find(memo_key); it != memo_.end()) return it->second;
    std::vector<bool> used(b_.children[v].size(), false);
    bool ok = true;
    for (auto cu : a_.children[u]) {
      bool found = false;
      for (std::size_t j = 0; j < b_.children[v].size(); ++j) {
        if (!used[j] && trees(cu, b_.children[v][j])) {
          used[j] = true;
          found = true;
          break;
        }
      }
      if (!found) {
        ok = false;
        break;
      }
    }
    memo_[memo_key] = ok;
    return ok;
  }

  // Try every alignment of the two cycles.
  bool components(const std::vector<std::uint32_t>& ca, const std::vector<std::uint32_t>& cb) {
    if (ca.size() != cb.size()) return false;
    const std::size_t len = ca.size();
    for (std::size_t r = 0; r < len; ++r) {
      bool ok = true;
      for (std::size_t i = 0; i < len && ok; ++i) ok = trees(ca[i], cb[(i + r) % len]);
      if (ok) return true;
    }
    return false;
  }

 private:
  const OracleView& a_;
  const OracleView& b_;
  std::map<std::uint64_t, bool> memo_;
};

}  // namespace

bool are_isomorphic_oracle(const FunctionalGraph& a, const FunctionalGraph& b, std::size_t limit) {
  if (a.size() > limit || b.size() > limit) {
    throw Error(ErrorCode::TooLargeForOracle,
                "graph sizes " + std::to_string(a.size()) + ", " + std::to_string(b.size()));
  }
  if (a.size() != b.size()) return false;
  const OracleView va(a);
  const OracleView vb(b);
  if (va.cycles.size() != vb.cycles.size()) return false;
  OracleMatcher match(va, vb);
  std::vector<bool> used(vb.cycles.size(), false);
  for (const auto& ca : va.cycles) {
    bool found = false;
    for (std::size_t j = 0; j < vb.cycles.size(); ++j) {
      if (used[j] || va.component_size(ca) != vb.component_size(vb.cycles[j])) continue;
      if (match.components(ca, vb.cycles[j])) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

FunctionalGraph relabel(const FunctionalGraph& g, std::span<const std::uint32_t> perm) {
  const std::uint32_t n = g.size();
  if (perm.size() != n) throw Error(ErrorCode::NotAPermutation, "length mismatch");
  std::vector<bool> seen(n, false);
  for (auto x : perm) {
    if (x >= n || seen[x]) throw Error(ErrorCode::NotAPermutation, "not a bijection");
    seen[x] = true;
  }
  FunctionalGraph out{std::vector<std::uint32_t>(n), g.provenance};
  for (std::uint32_t v = 0; v < n; ++v) out.succ[perm[v]] = perm[g.succ[v]];
  return out;
}

std::string export_dot(const FunctionalGraph& g, const std::vector<std::string>* labels) {
  std::string out = "digraph {\n";
  if (labels) {
    for (std::uint32_t v = 0; v < g.size() && v < labels->size(); ++v) {
      out += "  " + std::to_string(v) + " [label=\"" + (*labels)[v] + "\"];\n";
    }
  }
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    out += "  " + std::to_string(v) + " -> " + std::to_string(g.succ[v]) + ";\n";
  }
  out += "}\n";
  return out;
}

}  // namespace dyncount
