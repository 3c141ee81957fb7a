#pragma once

#include <vector>

#include "holobrace/abelian.hpp"
#include "holobrace/perm.hpp"
#include "holobrace/permgroup.hpp"

namespace holobrace {

/// Element of Hol(G) = G x| Aut(G) in symbolic form. The permutation
/// form is authoritative for group computation; this form exists for
/// brace extraction and printing. Action: x -> shift + auto(x).
struct HolElement {
  GroupElement shift;
  Endomorphism automorphism;
};

struct Holomorph {
  AbelianGroup group;
  std::vector<Perm> generators;       // translations first, then Aut generators
  std::vector<Perm> translation_gens; // translations by the canonical generators
  unsigned long long aut_order = 0;
  unsigned long long order = 0;       // |G| * |Aut(G)|
};

/// Builds Hol(G) acting on the |G| element indices. Generators are the
/// translations by the canonical generators of G plus a deterministic
/// small generating set of Aut(G).
Holomorph make_holomorph(const AbelianGroup& g, unsigned max_group_order = 64);

Perm hol_perm(const AbelianGroup& g, const HolElement& e);
HolElement hol_decompose(const AbelianGroup& g, const Perm& p);
HolElement hol_mul(const AbelianGroup& g, const HolElement& a, const HolElement& b);
HolElement hol_inv(const AbelianGroup& g, const HolElement& a);
unsigned hol_act(const AbelianGroup& g, const HolElement& e, unsigned x);

}  // namespace holobrace
