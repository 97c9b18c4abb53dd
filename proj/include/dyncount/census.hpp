#pragma once

// Exact classification of a family's members up to dynamical equivalence.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dyncount/error.hpp"
#include "dyncount/family.hpp"
#include "dyncount/funcgraph.hpp"

namespace dyncount {

enum class Reduction { None, Scaling, Affine, Frobenius, Auto };

std::string_view to_string(Reduction r);
Reduction parse_reduction(std::string_view s);

struct OrbitRep {
  std::uint64_t index = 0;  // smallest member index in the orbit
  std::uint64_t orbit_size = 1;
  std::vector<std::uint64_t> members;  // only when requested
};

struct ReductionResult {
  std::vector<OrbitRep> reps;  // ascending by index
  std::vector<std::string> applied;
  std::vector<std::string> skipped;  // "<action>: <reason>"
};

// Each keeps one member per orbit of the named conjugation action, restricted
// to the largest subgroup under which the family is closed. An action the
// family is not closed under at all is listed in `skipped` and ignored.
ReductionResult reduce_by_scaling(const Family& family, bool keep_members = false);
ReductionResult reduce_by_affine(const Family& family, bool keep_members = false);
ReductionResult reduce_by_frobenius(const Family& family, bool keep_members = false);
ReductionResult reduce(const Family& family, Reduction r, bool keep_members = false);

struct CensusOptions {
  unsigned workers = 1;
  Reduction reduce = Reduction::None;
  std::uint64_t budget = 1'000'000'000;  // point evaluations per run
  std::uint64_t checkpoint_every = 1'000'000;
  std::optional<std::string> checkpoint_path;
  std::optional<std::string> resume_from;
  bool verbose = false;  // keep full member lists per class
};

struct ClassRecord {
  CanonicalKey key;
  std::uint64_t representative = 0;  // smallest member index in the class
  nlohmann::json representative_map;
  std::uint64_t multiplicity = 0;
  GraphStats stats;
  std::vector<std::uint64_t> members;  // verbose only, ascending
};

struct CensusReport {
  FamilySpec spec;
  std::uint64_t total_maps = 0;
  std::uint64_t distinct_classes = 0;
  std::vector<ClassRecord> classes;  // ascending by representative
  std::vector<std::string> reductions_used;
  std::vector<std::string> reductions_skipped;
  double wall_time_ms = 0;
  std::uint64_t maps_evaluated = 0;  // cumulative over resumed runs
};

class BudgetExceededError : public Error {
 public:
  BudgetExceededError(const std::string& what, std::string checkpoint)
      : Error(ErrorCode::BudgetExceeded, what), checkpoint_(std::move(checkpoint)) {}
  const std::string& checkpoint_path() const { return checkpoint_; }

 private:
  std::string checkpoint_;
};

/// Throws BudgetExceededError after writing a checkpoint when the next
/// evaluation would exceed options.budget.
CensusReport run_census(const FamilySpec& spec, const CensusOptions& options = {});

struct FixedPointRow {
  std::string digest;
  std::uint64_t representative = 0;
  std::uint64_t multiplicity = 0;
  std::uint64_t fixed_points = 0;
};

std::vector<FixedPointRow> fixed_point_census(const FamilySpec& spec, unsigned workers = 1);

struct ConnectedRow {
  std::uint64_t p = 0;
  std::vector<std::uint32_t> a_values;  // every a with X^2 + a connected on F_p
};

/// One row per prime in [p_min, p_max].
std::vector<ConnectedRow> search_single_component(std::uint64_t p_min, std::uint64_t p_max,
                                                  std::uint64_t p_limit = 1u << 16);

// Checkpoint file, little-endian:
//   "DYNCKPT1" | u32 version | u32 len, run identity JSON |
//   u64 next work position | u64 maps covered | u64 maps evaluated |
//   u64 class count | per class: u32 key len, key bytes, u64 rep, u64 mult
struct Checkpoint {
  std::string identity;
  std::uint64_t next_position = 0;
  std::uint64_t covered = 0;
  std::uint64_t evaluated = 0;
  struct Entry {
    std::string key;
    std::uint64_t representative = 0;
    std::uint64_t multiplicity = 0;
  };
  std::vector<Entry> classes;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(const std::string& path, const Checkpoint& c);
/// Throws CheckpointCorrupt.
Checkpoint read_checkpoint(const std::string& path);

}  // namespace dyncount
