#include "dyncount/census.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "dyncount/arith.hpp"

namespace dyncount {

std::string_view to_string(Reduction r) {
  switch (r) {
    case Reduction::None: return "none";
    case Reduction::Scaling: return "scaling";
    case Reduction::Affine: return "affine";
    case Reduction::Frobenius: return "frobenius";
    case Reduction::Auto: return "auto";
  }
  return "?";
}

Reduction parse_reduction(std::string_view s) {
  for (auto r : {Reduction::None, Reduction::Scaling, Reduction::Affine, Reduction::Frobenius,
                 Reduction::Auto}) {
    if (to_string(r) == s) return r;
  }
  throw Error(ErrorCode::InvalidSpec, "unknown reduction '" + std::string(s) + "'");
}

namespace {

// ---- group actions on family members -------------------------------------

struct Gen {
  enum Kind { Scale, Affine, Frob } kind;
  Elem lambda = 1;
  Elem mu = 0;
};

// a_e -> a_e * lambda^(e + shift), exponents reduced mod q-1.
PolyMap shift_terms(const PolyMap& f, Elem lambda, std::int64_t shift) {
  const Field& F = f.field();
  const std::int64_t order = F.q() - 1;
  std::vector<Term> terms = f.terms();
  for (auto& t : terms) {
    std::int64_t e = (static_cast<std::int64_t>(t.exp % order) + shift) % order;
    if (e < 0) e += order;
    t.coeff = F.mul(t.coeff, F.pow(lambda, static_cast<std::uint64_t>(e)));
  }
  return PolyMap::sparse(f.field_ptr(), std::move(terms));
}

// lambda^{-1} f(lambda X), on terms so sparse exponents never go dense.
DynMap conjugate_scaling(const DynMap& map, Elem lambda) {
  if (const auto* f = std::get_if<PolyMap>(&map)) return shift_terms(*f, lambda, -1);
  const auto& r = std::get<RationalMap>(map);
  const std::int64_t n = r.n();
  return RationalMap(shift_terms(r.numer(), lambda, -(n + 1)), shift_terms(r.denom(), lambda, -n),
                     r.model(), r.field().div(r.alpha(), lambda));
}

DynMap apply(const Gen& g, const DynMap& m) {
  switch (g.kind) {
    case Gen::Scale: return conjugate_scaling(m, g.lambda);
    case Gen::Affine: return conjugate_affine(m, g.lambda, g.mu);
    case Gen::Frob: return frobenius_twist(m, 1);
  }
  throw std::logic_error("unknown generator");
}

ReductionResult orbit_reps(const Family& fam, const std::vector<Gen>& gens, bool keep) {
  ReductionResult out;
  const std::uint64_t size = fam.size();
  std::vector<bool> seen(size, false);
  std::vector<std::uint64_t> stack, orbit;
  for (std::uint64_t i = 0; i < size; ++i) {
    if (seen[i]) continue;
    seen[i] = true;
    stack.assign(1, i);
    orbit.assign(1, i);
    while (!stack.empty()) {
      const std::uint64_t j = stack.back();
      stack.pop_back();
      if (gens.empty()) break;
      const DynMap m = fam.member(j);
      for (const auto& g : gens) {
        const DynMap image = apply(g, m);
        const auto idx = fam.index_of(image);
        if (!idx) throw std::logic_error("conjugation left the family: " + to_json(image).dump());
        if (!seen[*idx]) {
          seen[*idx] = true;
          stack.push_back(*idx);
          orbit.push_back(*idx);
        }
      }
    }
    OrbitRep r{i, orbit.size(), {}};
    if (keep) {
      std::sort(orbit.begin(), orbit.end());
      r.members = orbit;
    }
    out.reps.push_back(std::move(r));
  }
  return out;
}

struct Closure {
  bool scaling = false;
  bool full_affine = false;
  bool alpha_stabilizer = false;  // only lambda X + alpha(1 - lambda)
  bool frobenius = false;
  std::string frobenius_reason;
};

Closure closure_of(const Family& fam) {
  const FamilySpec& s = fam.spec();
  const Field& F = fam.field();
  Closure c;
  const bool rational = s.kind == FamilyKind::Rational;
  const bool projective = rational && s.model == RationalModel::Projective;
  c.scaling = !rational || projective || s.alpha == 0;
  c.full_affine = s.kind == FamilyKind::AllDegree || s.kind == FamilyKind::Linear ||
                  s.kind == FamilyKind::FrobeniusAffine || (projective && s.m > s.n);
  c.alpha_stabilizer = rational && !projective && s.m > s.n && s.alpha != 0;
  if (F.k() == 1) {
    c.frobenius_reason = "prime field";
  } else if (rational && !projective && F.frobenius(s.alpha, 1) != s.alpha) {
    c.frobenius_reason = "alpha is not fixed by Frobenius";
  } else {
    c.frobenius = true;
  }
  return c;
}

void add_scaling(const Family& fam, std::vector<Gen>& gens) {
  gens.push_back({Gen::Scale, fam.field().primitive_element(), 0});
}

void add_affine(const Family& fam, const Closure& c, std::vector<Gen>& gens, ReductionResult& r) {
  const Field& F = fam.field();
  if (c.full_affine) {
    add_scaling(fam, gens);
    Elem basis = 1;
    for (std::uint32_t j = 0; j < F.k(); ++j, basis *= F.p()) gens.push_back({Gen::Affine, 1, basis});
    r.applied.push_back("affine");
  } else if (c.alpha_stabilizer) {
    const Elem g = F.primitive_element();
    const Elem alpha = fam.spec().alpha;
    gens.push_back({Gen::Affine, g, F.mul(alpha, F.sub(1, g))});
    r.applied.push_back("affine-stabilizer");
    r.skipped.push_back("affine: only maps fixing alpha preserve the family");
  } else if (c.scaling) {
    add_scaling(fam, gens);
    r.applied.push_back("scaling");
    r.skipped.push_back("affine: family not closed under translations");
  } else {
    r.skipped.push_back("affine: family not closed under affine conjugation");
  }
}

void add_frobenius(const Closure& c, std::vector<Gen>& gens, ReductionResult& r) {
  if (c.frobenius) {
    gens.push_back({Gen::Frob, 1, 0});
    r.applied.push_back("frobenius");
  } else {
    r.skipped.push_back("frobenius: " + c.frobenius_reason);
  }
}

ReductionResult finish(const Family& fam, std::vector<Gen> gens, ReductionResult meta, bool keep) {
  ReductionResult r = orbit_reps(fam, gens, keep);
  r.applied = std::move(meta.applied);
  r.skipped = std::move(meta.skipped);
  return r;
}

}  // namespace

ReductionResult reduce_by_scaling(const Family& family, bool keep_members) {
  const Closure c = closure_of(family);
  std::vector<Gen> gens;
  ReductionResult meta;
  if (c.scaling) {
    add_scaling(family, gens);
    meta.applied.push_back("scaling");
  } else {
    meta.skipped.push_back("scaling: alpha is not fixed by scaling");
  }
  return finish(family, std::move(gens), std::move(meta), keep_members);
}

ReductionResult reduce_by_affine(const Family& family, bool keep_members) {
  std::vector<Gen> gens;
  ReductionResult meta;
  add_affine(family, closure_of(family), gens, meta);
  return finish(family, std::move(gens), std::move(meta), keep_members);
}

ReductionResult reduce_by_frobenius(const Family& family, bool keep_members) {
  std::vector<Gen> gens;
  ReductionResult meta;
  add_frobenius(closure_of(family), gens, meta);
  return finish(family, std::move(gens), std::move(meta), keep_members);
}

ReductionResult reduce(const Family& family, Reduction r, bool keep_members) {
  switch (r) {
    case Reduction::None: return finish(family, {}, {}, keep_members);
    case Reduction::Scaling: return reduce_by_scaling(family, keep_members);
    case Reduction::Affine: return reduce_by_affine(family, keep_members);
    case Reduction::Frobenius: return reduce_by_frobenius(family, keep_members);
    case Reduction::Auto: {
      const Closure c = closure_of(family);
      std::vector<Gen> gens;
      ReductionResult meta;
      add_affine(family, c, gens, meta);
      add_frobenius(c, gens, meta);
      return finish(family, std::move(gens), std::move(meta), keep_members);
    }
  }
  throw std::logic_error("unknown reduction");
}

// ---- checkpoint files ------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'D', 'Y', 'N', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void put(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<unsigned char>(data_[at_ + i])) << (8 * i);
    }
    at_ += sizeof(T);
    return v;
  }

  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(at_, n);
    at_ += n;
    return s;
  }

  bool done() const { return at_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - at_ < n) throw Error(ErrorCode::CheckpointCorrupt, "truncated checkpoint");
  }
  std::string data_;
  std::size_t at_ = 0;
};

}  // namespace

void write_checkpoint(const std::string& path, const Checkpoint& c) {
  std::string out(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.identity.size()));
  out += c.identity;
  put<std::uint64_t>(out, c.next_position);
  put<std::uint64_t>(out, c.covered);
  put<std::uint64_t>(out, c.evaluated);
  put<std::uint64_t>(out, c.classes.size());
  for (const auto& e : c.classes) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.key.size()));
    out += e.key;
    put<std::uint64_t>(out, e.representative);
    put<std::uint64_t>(out, e.multiplicity);
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::InvalidParameters, "cannot write checkpoint " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw Error(ErrorCode::InvalidParameters, "cannot write checkpoint " + path);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::CheckpointCorrupt, "cannot open " + path);
  Reader r(std::string(std::istreambuf_iterator<char>(f), {}));
  if (r.bytes(sizeof kMagic) != std::string(kMagic, sizeof kMagic)) {
    throw Error(ErrorCode::CheckpointCorrupt, "bad magic");
  }
  if (r.get<std::uint32_t>() != kCheckpointVersion) {
    throw Error(ErrorCode::CheckpointCorrupt, "unsupported version");
  }
  Checkpoint c;
  c.identity = r.bytes(r.get<std::uint32_t>());
  c.next_position = r.get<std::uint64_t>();
  c.covered = r.get<std::uint64_t>();
  c.evaluated = r.get<std::uint64_t>();
  const auto count = r.get<std::uint64_t>();
  for (std::uint64_t i = 0; i < count; ++i) {
    Checkpoint::Entry e;
    e.key = r.bytes(r.get<std::uint32_t>());
    e.representative = r.get<std::uint64_t>();
    e.multiplicity = r.get<std::uint64_t>();
    c.classes.push_back(std::move(e));
  }
  if (!r.done()) throw Error(ErrorCode::CheckpointCorrupt, "trailing bytes");
  return c;
}

// ---- the census ------------------------------------------------------------

namespace {

struct Acc {
  std::string key;
  std::uint64_t rep = 0;
  std::uint64_t mult = 0;
  std::vector<std::uint64_t> members;
};

struct DigestHash {
  std::size_t operator()(const Digest128& d) const { return static_cast<std::size_t>(d.lo); }
};

// Digests only pick the bucket; classes are told apart by full key.
using Table = std::unordered_map<Digest128, std::vector<Acc>, DigestHash>;

void add(Table& t, const Digest128& d, Acc&& a) {
  auto& bucket = t[d];
  for (auto& x : bucket) {
    if (x.key == a.key) {
      x.rep = std::min(x.rep, a.rep);
      x.mult += a.mult;
      x.members.insert(x.members.end(), a.members.begin(), a.members.end());
      return;
    }
  }
  bucket.push_back(std::move(a));
}

void merge(Table& into, Table&& from) {
  for (auto& [d, bucket] : from) {
    for (auto& a : bucket) add(into, d, std::move(a));
  }
}

std::vector<Acc> flatten(const Table& t) {
  std::vector<Acc> out;
  for (const auto& [d, bucket] : t) out.insert(out.end(), bucket.begin(), bucket.end());
  std::sort(out.begin(), out.end(), [](const Acc& a, const Acc& b) { return a.rep < b.rep; });
  return out;
}

struct WorkList {
  const Family& fam;
  const ReductionResult* red;  // null: every member, weight 1

  std::uint64_t size() const { return red ? red->reps.size() : fam.size(); }
  std::uint64_t index(std::uint64_t pos) const { return red ? red->reps[pos].index : pos; }
  std::uint64_t weight(std::uint64_t pos) const { return red ? red->reps[pos].orbit_size : 1; }
};

Table scan(const WorkList& work, IndexRange range, bool verbose) {
  Table t;
  Canonicalizer canon;
  std::vector<std::uint32_t> succ(work.fam.domain_size());
  for (std::uint64_t pos = range.begin; pos < range.end; ++pos) {
    const std::uint64_t idx = work.index(pos);
    work.fam.successors(idx, succ);
    CanonicalKey key = canon(succ);
    Acc a{std::move(key.key), idx, work.weight(pos), {}};
    if (verbose) {
      if (work.red) {
        a.members = work.red->reps[pos].members;
      } else {
        a.members = {idx};
      }
    }
    add(t, key.digest, std::move(a));
  }
  return t;
}

Table scan_parallel(const WorkList& work, IndexRange range, unsigned workers, bool verbose) {
  const unsigned w = static_cast<unsigned>(std::max<std::uint64_t>(
      1, std::min<std::uint64_t>(std::max(1u, workers), range.size())));
  if (w == 1) return scan(work, range, verbose);
  const auto parts = partition(range, w);
  std::vector<Table> local(parts.size());
  std::vector<std::exception_ptr> errors(parts.size());
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    threads.emplace_back([&, i] {
      try {
        local[i] = scan(work, parts[i], verbose);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Table out = std::move(local[0]);
  for (std::size_t i = 1; i < local.size(); ++i) merge(out, std::move(local[i]));
  return out;
}

Checkpoint snapshot(const std::string& identity, std::uint64_t pos, std::uint64_t covered,
                    std::uint64_t evaluated, const Table& t) {
  Checkpoint c{identity, pos, covered, evaluated, {}};
  for (const auto& a : flatten(t)) c.classes.push_back({a.key, a.rep, a.mult});
  return c;
}

}  // namespace

CensusReport run_census(const FamilySpec& spec_in, const CensusOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const Family fam(spec_in);
  CensusReport report;
  report.spec = fam.spec();
  report.total_maps = fam.size();

  std::optional<ReductionResult> red;
  if (opt.reduce != Reduction::None) {
    red = reduce(fam, opt.reduce, opt.verbose);
    report.reductions_used = red->applied;
    report.reductions_skipped = red->skipped;
  }
  const WorkList work{fam, red ? &*red : nullptr};

  const std::string identity = nlohmann::json{{"field", fam.field().descriptor()},
                                              {"family", fam.spec().to_json()},
                                              {"reduce", to_string(opt.reduce)}}
                                   .dump();
  Table table;
  std::uint64_t pos = 0, covered = 0, evaluated = 0;
  if (opt.resume_from) {
    if (opt.verbose) throw Error(ErrorCode::InvalidParameters, "member lists cannot be resumed");
    const Checkpoint c = read_checkpoint(*opt.resume_from);
    if (c.identity != identity) {
      throw Error(ErrorCode::CheckpointCorrupt, "checkpoint belongs to a different run");
    }
    if (c.next_position > work.size()) throw Error(ErrorCode::CheckpointCorrupt, "position");
    pos = c.next_position;
    covered = c.covered;
    evaluated = c.evaluated;
    for (const auto& e : c.classes) add(table, digest128(e.key), {e.key, e.representative, e.multiplicity, {}});
  }

  const std::uint64_t dom = fam.domain_size();
  const std::uint64_t step = std::max<std::uint64_t>(1, opt.checkpoint_every);
  std::uint64_t spent = 0;
  while (pos < work.size()) {
    const std::uint64_t room = (opt.budget - spent) / dom;
    if (room == 0) {
      const std::string path =
          opt.checkpoint_path.value_or((std::filesystem::temp_directory_path() /
                                        ("dyncount-" + digest128(identity).hex().substr(0, 16) + ".ckpt"))
                                           .string());
      write_checkpoint(path, snapshot(identity, pos, covered, evaluated, table));
      throw BudgetExceededError("budget of " + std::to_string(opt.budget) + " evaluations exhausted after " +
                                    std::to_string(pos) + " of " + std::to_string(work.size()) + " maps",
                                path);
    }
    const std::uint64_t chunk = std::min({step, work.size() - pos, room});
    merge(table, scan_parallel(work, {pos, pos + chunk}, opt.workers, opt.verbose));
    for (std::uint64_t i = pos; i < pos + chunk; ++i) covered += work.weight(i);
    pos += chunk;
    spent += chunk * dom;
    evaluated += chunk;
    if (opt.checkpoint_path && pos < work.size()) {
      write_checkpoint(*opt.checkpoint_path, snapshot(identity, pos, covered, evaluated, table));
    }
  }
  if (covered != fam.size()) throw std::logic_error("census did not cover the family");

  std::vector<std::uint32_t> succ(dom);
  std::uint64_t total = 0;
  for (auto& a : flatten(table)) {
    ClassRecord c;
    c.key.key = std::move(a.key);
    c.key.digest = digest128(c.key.key);
    c.representative = a.rep;
    c.multiplicity = a.mult;
    total += a.mult;
    const DynMap m = fam.member(a.rep);
    c.representative_map = to_json(m);
    fam.successors(a.rep, succ);
    c.stats = analyze(FunctionalGraph{succ, std::nullopt});
    c.members = std::move(a.members);
    std::sort(c.members.begin(), c.members.end());
    report.classes.push_back(std::move(c));
  }
  if (total != fam.size()) throw std::logic_error("multiplicities do not sum to the family size");
  report.distinct_classes = report.classes.size();
  report.maps_evaluated = evaluated;
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::vector<FixedPointRow> fixed_point_census(const FamilySpec& spec, unsigned workers) {
  CensusOptions opt;
  opt.workers = workers;
  const CensusReport r = run_census(spec, opt);
  std::vector<FixedPointRow> rows;
  for (const auto& c : r.classes) {
    rows.push_back({c.key.digest.hex(), c.representative, c.multiplicity, c.stats.fixed_point_count});
  }
  return rows;
}

std::vector<ConnectedRow> search_single_component(std::uint64_t p_min, std::uint64_t p_max,
                                                  std::uint64_t p_limit) {
  if (p_max > p_limit) {
    throw Error(ErrorCode::InvalidParameters, "prime range exceeds " + std::to_string(p_limit));
  }
  std::vector<ConnectedRow> rows;
  for (const auto p : arith::primes_in(p_min, p_max)) {
    const FieldPtr F = Field::make(static_cast<std::uint32_t>(p), 1);
    ConnectedRow row{p, {}};
    for (Elem a = 0; a < p; ++a) {
      const std::vector<Elem> c{a, 0, 1};
      const auto g = build_graph(PolyMap::dense(F, c));
      if (analyze(g).component_count == 1) row.a_values.push_back(a);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dyncount
