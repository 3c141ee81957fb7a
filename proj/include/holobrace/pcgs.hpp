#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "holobrace/perm.hpp"
#include "holobrace/permgroup.hpp"

namespace holobrace {

/// Polycyclic generating sequence of a soluble permutation group S
/// aligned to an elementary-abelian normal series. Every element of S
/// has a unique normal form g_0^{e_0} ... g_{L-1}^{e_{L-1}} with
/// 0 <= e_j < prime(j); the mixed-radix pack of (e_0..e_{L-1}) with
/// radices prime(0..L-1) doubles as the element id in the table, which
/// is enumerated in exactly that order.
class Pcgs {
 public:
  struct Layer {
    unsigned prime = 0;
    unsigned rank = 0;
    size_t first_pos = 0;
  };

  static Pcgs build(const PermGroup& s, const NormalSeries& series, size_t max_group = 1u << 20);

  size_t length() const { return gens_.size(); }
  size_t degree() const { return degree_; }
  unsigned long long group_order() const { return elems_.size(); }
  const std::vector<Layer>& layers() const { return layers_; }
  const Perm& gen(size_t pos) const { return gens_[pos]; }
  unsigned prime_at(size_t pos) const { return rel_order_[pos]; }
  const std::vector<unsigned>& relative_orders() const { return rel_order_; }
  size_t layer_of(size_t pos) const { return layer_of_pos_[pos]; }
  // Number of pcgs positions in layers 1..t (= first position of layer t+1).
  size_t pos_limit(size_t t) const;
  unsigned long long kernel_order(size_t t) const;  // |N_t|

  // Element table.
  uint32_t id_of(const Perm& p) const;  // UINT32_MAX if not in S
  const Perm& perm_of(uint32_t id) const { return elems_[id]; }
  uint64_t place(size_t pos) const { return place_[pos]; }
  unsigned digit(uint32_t id, size_t pos) const;
  // First position with a nonzero digit, or length() for the identity.
  size_t lead(uint32_t id) const;
  std::vector<unsigned> exponent_vector(uint32_t id) const;
  std::vector<unsigned> exponent_vector(const Perm& p) const;
  uint32_t id_from_exponents(const std::vector<unsigned>& e) const;

 private:
  size_t degree_ = 0;
  std::vector<Layer> layers_;
  std::vector<Perm> gens_;
  std::vector<unsigned> rel_order_;
  std::vector<size_t> layer_of_pos_;
  std::vector<uint64_t> place_;  // place_[j] = prod of rel_order_[0..j)
  std::vector<Perm> elems_;      // id -> perm, id = packed normal form
  // Open-addressing hash: perm bytes -> id.
  std::vector<uint32_t> table_;
  uint64_t mask_ = 0;
  void build_table();
};

/// Canonical subgroup record: echelonized induced generating sequence.
/// Rows have strictly increasing leading positions, leading coefficient
/// 1, and zero entries at the leading positions of later rows; the key
/// serializes (row count, packed rows) and is byte-identical for equal
/// subgroups.
struct SubgroupRecord {
  std::vector<uint32_t> row_ids;    // ascending by lead position
  std::vector<uint16_t> row_leads;
  unsigned long long order = 1;
  std::string key;

  bool operator==(const SubgroupRecord& o) const { return key == o.key; }
};

std::string record_key(const std::vector<uint32_t>& row_ids);

SubgroupRecord igs(const Pcgs& ctx, const std::vector<uint32_t>& generator_ids);
SubgroupRecord igs_from_perms(const Pcgs& ctx, const std::vector<Perm>& gens);
// Rows that are already a canonical echelon system (e.g. subspace rows
// plus kernel tail rows) are packaged without the closure pass.
SubgroupRecord record_from_canonical_rows(const Pcgs& ctx, std::vector<uint32_t> row_ids);

bool record_contains(const Pcgs& ctx, const SubgroupRecord& rec, const Perm& p);
bool record_contains_id(const Pcgs& ctx, const SubgroupRecord& rec, uint32_t id);
SubgroupRecord conjugate_record(const Pcgs& ctx, const SubgroupRecord& rec, const Perm& g,
                                const Perm& g_inv);

/// Full preimage record of series member N_t (rows = pcgs tail).
SubgroupRecord kernel_record(const Pcgs& ctx, size_t t);
/// Record of the whole group S.
SubgroupRecord full_record(const Pcgs& ctx);

// All record elements, as table ids, in deterministic order.
std::vector<uint32_t> record_element_ids(const Pcgs& ctx, const SubgroupRecord& rec, size_t cap = 1u << 16);

/// Polycyclic presentation of U/N_t on the record rows with lead below
/// pos_limit(t): power and conjugation relations with normal-form tails.
struct PcRelation {
  bool is_power = true;
  uint16_t j = 0, k = 0;
  std::vector<std::pair<uint16_t, uint16_t>> tail;  // (head index, exponent)
};
struct PcPresentation {
  size_t ngens = 0;
  std::vector<unsigned> gen_primes;
  std::vector<PcRelation> rels;
};
PcPresentation pc_presentation(const Pcgs& ctx, const SubgroupRecord& rec, size_t modulo_depth_t);

}  // namespace holobrace
