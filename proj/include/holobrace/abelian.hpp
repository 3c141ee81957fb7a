#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "holobrace/perm.hpp"

namespace holobrace {

/// Finite abelian group given by its prime-power cyclic factors,
/// sorted by prime then ascending exponent. Elements are exponent
/// vectors; elem_index maps them to [0, order) by mixed radix.
struct AbelianGroup {
  std::vector<unsigned> factors;
  unsigned order = 1;

  size_t rank() const { return factors.size(); }
};

using GroupElement = std::vector<unsigned>;

/// Endomorphism of an AbelianGroup: column i is the image of the
/// i-th canonical generator.
struct Endomorphism {
  std::vector<GroupElement> images;
};

AbelianGroup make_group(const std::vector<unsigned>& factors);

// Descriptor string "2,2,4,4"; "1" denotes the trivial group.
AbelianGroup group_from_descriptor(const std::string& desc);
std::string group_descriptor(const AbelianGroup& g);

GroupElement elem_zero(const AbelianGroup& g);
GroupElement elem_add(const AbelianGroup& g, const GroupElement& a, const GroupElement& b);
GroupElement elem_neg(const AbelianGroup& g, const GroupElement& a);
GroupElement elem_scale(const AbelianGroup& g, unsigned k, const GroupElement& a);

unsigned elem_index(const AbelianGroup& g, const GroupElement& a);
GroupElement index_elem(const AbelianGroup& g, unsigned index);

GroupElement apply_endo(const AbelianGroup& g, const Endomorphism& f, const GroupElement& a);
bool is_endomorphism(const AbelianGroup& g, const Endomorphism& f);
Endomorphism identity_endo(const AbelianGroup& g);

/// All automorphisms, in a deterministic order. Refuses groups above
/// the desk-scale bound instead of truncating.
std::vector<Endomorphism> aut_elements(const AbelianGroup& g, unsigned max_order = 64);

/// |Aut(G)| from the closed-form formula for abelian p-groups,
/// multiplied over primes. Independent cross-check of aut_elements.
unsigned long long aut_order_formula(const AbelianGroup& g);

/// Index permutation x -> elem_index(f(index_elem(x))).
Perm endo_perm(const AbelianGroup& g, const Endomorphism& f);
/// Index permutation x -> elem_index(shift + index_elem(x)).
Perm translation_perm(const AbelianGroup& g, const GroupElement& shift);

}  // namespace holobrace
