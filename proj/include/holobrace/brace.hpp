#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "holobrace/abelian.hpp"
#include "holobrace/lifting.hpp"
#include "holobrace/pcgs.hpp"

namespace holobrace {

/// Left brace on the element indices of G: two Cayley tables sharing
/// identity 0, linked by x(y+z) = xy - x + xz.
struct Brace {
  AbelianGroup group;
  std::vector<std::vector<uint8_t>> add;
  std::vector<std::vector<uint8_t>> mul;
  std::string origin_key;  // canonical key of the source regular subgroup
};

bool is_regular(const LiftContext& ctx, const SubgroupRecord& rec);

/// Builds the brace of a regular subgroup: r_x is the unique element
/// with r_x(0) = x and x*y := r_x(y). Verifies the brace axioms before
/// returning; a violation is an internal error.
Brace brace_from_regular(const LiftContext& ctx, const SubgroupRecord& rec);

/// Exhaustive check of both group axioms and all |G|^3 compatibility
/// triples. Returns false on the first failing entry.
bool verify_brace(const Brace& b);

/// Isomorphism-invariant tuple of the multiplicative group:
/// element-order multiset, abelianization invariants, center order,
/// derived subgroup order.
struct BraceFingerprint {
  std::vector<unsigned> order_multiset;
  std::vector<unsigned> abelianization;  // prime-power cyclic factors, sorted
  unsigned center_order = 0;
  unsigned derived_order = 0;

  bool operator==(const BraceFingerprint& o) const {
    return order_multiset == o.order_multiset && abelianization == o.abelianization &&
           center_order == o.center_order && derived_order == o.derived_order;
  }
};
BraceFingerprint fingerprint(const Brace& b);
std::string fingerprint_string(const BraceFingerprint& f);

/// Plain-text export: header "brace <group-descriptor> <origin-key>",
/// then |G| lines of |G| space-separated indices (the multiplicative
/// table); blocks separated by blank lines.
std::string export_braces(const std::vector<Brace>& braces);

}  // namespace holobrace
