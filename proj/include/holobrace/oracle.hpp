#pragma once

#include "holobrace/abelian.hpp"

namespace holobrace {

/// Independent cross-check of the lifting engine: counts conjugacy
/// classes of regular subgroups of Hol(G) by cyclic extension over the
/// whole holomorph (enumerate all subgroups of order dividing |G|
/// bottom-up by adjoining normalizing elements of prime order modulo
/// the subgroup, dedup by element-set keys, filter regular, fuse by
/// conjugation orbits). Shares nothing with the pcgs/igs machinery.
unsigned long long oracle_regular_classes(const AbelianGroup& g, size_t max_hol = 5000);

}  // namespace holobrace
