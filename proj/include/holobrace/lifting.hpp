#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "holobrace/abelian.hpp"
#include "holobrace/holomorph.hpp"
#include "holobrace/pcgs.hpp"
#include "holobrace/permgroup.hpp"

namespace holobrace {

struct EngineOptions {
  size_t max_orbit = 65536;   // HOLOBRACE_MAX_ORBIT
  size_t max_group = 1u << 20;
  unsigned max_abelian = 64;
  // Reads HOLOBRACE_MAX_ORBIT from the environment.
  static EngineOptions from_env();
};

struct OrbitOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LayerStats {
  size_t layer = 0;
  size_t classes = 0;
  size_t jobs = 1;
};

/// Immutable shared context for one enumeration: the holomorph, the
/// engine group (Hol(G), or a Sylow subgroup when Hol(G) is insoluble
/// and |G| is a prime power), its elementary-abelian series, pcgs, and
/// the per-layer kernel subgroup classes.
class LiftContext {
 public:
  static LiftContext build(const AbelianGroup& g,
                           const std::optional<std::vector<std::vector<Perm>>>& series_override,
                           const EngineOptions& opts);

  AbelianGroup group;
  Holomorph hol;
  EngineOptions opts;
  bool sylow_mode = false;
  PermGroup engine_pg{1};
  std::vector<Perm> engine_gens;  // small generating set used for fusion orbits
  NormalSeries series;
  Pcgs pcgs;
  // kernel_classes[t] holds the case-2 classes entering layer t (t >= 1):
  // subgroups between N_t and N_{t-1}, pruned and fused under the engine
  // group, sorted by canonical key.
  std::vector<std::vector<SubgroupRecord>> kernel_classes;

  // Ambient data for sylow mode (class fusion under the full holomorph).
  std::vector<Perm> ambient_gens;
  std::vector<Perm> ambient_elems;
  std::vector<uint32_t> ambient_table;
  uint64_t ambient_mask = 0;
  uint32_t ambient_id(const Perm& p) const;

  size_t layer_count() const { return series.layer_count(); }
  std::string series_fingerprint() const;
  SubgroupRecord translation_record() const;
};

/// All three prune conditions for a full-preimage record at layer t.
bool prune_ok(const LiftContext& ctx, const SubgroupRecord& rec, size_t t);

/// All subspaces of GF(p)^d as reduced row echelon bases, in a fixed
/// deterministic order (by rank, pivot set, then free entries).
std::vector<std::vector<std::vector<uint8_t>>> all_subspaces(unsigned d, unsigned p);

/// Proper subspaces of the layer-t factor invariant under conjugation
/// by the parent's rows, as subgroup records over N_t.
std::vector<std::pair<SubgroupRecord, std::vector<std::vector<uint8_t>>>> invariant_submodules(
    const Pcgs& pcgs, const SubgroupRecord& parent, size_t t);

/// Complements: subgroups V (full preimages over N_t) with V*N_{t-1} =
/// parent and V chosen so that V intersect N_{t-1} = B, via the affine
/// linear system of the parent's polycyclic presentation over the
/// module N_{t-1}/B. Empty when the extension does not split.
std::vector<SubgroupRecord> complements(const Pcgs& pcgs, const SubgroupRecord& parent,
                                        const SubgroupRecord& b_record,
                                        const std::vector<std::vector<uint8_t>>& b_rows, size_t t);

/// Orbit of a subgroup record under conjugation, with a transversal and
/// a small generating set of the stabilizer (the normalizer).
struct SubgroupOrbit {
  std::vector<SubgroupRecord> members;
  std::vector<Perm> transversal;
  std::vector<Perm> stab_gens;
  unsigned long long stab_order = 0;
};
SubgroupOrbit conjugation_orbit(const Pcgs& pcgs, const SubgroupRecord& start,
                                const std::vector<Perm>& gens, unsigned long long group_order,
                                size_t max_orbit);

/// Case 1 + case 3 lifts of one parent class from layer t-1 to layer t,
/// pruned, fused under the parent's normalizer, sorted by key.
std::vector<SubgroupRecord> lift_parent(const LiftContext& ctx, const SubgroupRecord& parent, size_t t);

/// Where a lifted class came from: its parent's canonical key and the
/// lifting case (1 = full preimage, 2 = kernel subgroup, 3 = complement).
struct ClassProvenance {
  std::string parent_key;
  int case_tag = 0;
};

/// One full layer step: lifts every parent and splices the kernel
/// classes at the trivial parent. Parents must be sorted by key.
std::vector<SubgroupRecord> step_layer(const LiftContext& ctx,
                                       const std::vector<SubgroupRecord>& parents, size_t t);
std::vector<std::pair<SubgroupRecord, ClassProvenance>> step_layer_traced(
    const LiftContext& ctx, const std::vector<SubgroupRecord>& parents, size_t t);

/// Final ambient fusion pass (identity outside sylow mode).
std::vector<SubgroupRecord> ambient_fuse(const LiftContext& ctx,
                                         const std::vector<SubgroupRecord>& records);

struct RunResult {
  std::vector<SubgroupRecord> classes;  // final layer, ambient-fused
  std::vector<LayerStats> stats;
};
RunResult run_layers(const LiftContext& ctx);

}  // namespace holobrace
