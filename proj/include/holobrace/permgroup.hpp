#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "holobrace/perm.hpp"

namespace holobrace {

/// Permutation group with a deterministic stabilizer chain. Bases are
/// chosen by ascending scan for the smallest moved point, generators
/// are processed in sorted order, so identical inputs give identical
/// chains.
class PermGroup {
 public:
  explicit PermGroup(size_t degree);
  static PermGroup from_generators(size_t degree, const std::vector<Perm>& gens);
  // When the order is known in advance (orbit-stabilizer), the chain
  // stops verifying Schreier generators as soon as it is reached.
  static PermGroup from_generators_with_order(size_t degree, const std::vector<Perm>& gens,
                                              unsigned long long known_order);

  size_t degree() const { return degree_; }
  unsigned long long order() const;
  bool contains(const Perm& p) const;
  bool trivial() const { return order() == 1; }

  // Adds a generator; returns true if the group grew.
  bool add_generator(const Perm& p);

  const std::vector<Perm>& generators() const { return gens_; }

  // Deterministic small generating subset of generators().
  std::vector<Perm> small_generating_set() const;

  // All elements, in a deterministic order. Requires order() <= cap.
  std::vector<Perm> elements(size_t cap = 1u << 20) const;

  bool is_normalized_by(const Perm& p) const;
  bool is_subgroup_of(const PermGroup& other) const;

  // Canonical representative of the left coset x * this (min-image
  // walk down the chain); equal cosets give equal representatives.
  Perm coset_min_rep(const Perm& x) const;

 private:
  struct Level {
    unsigned base = 0;
    std::vector<int> slot;          // point -> transversal index or -1
    std::vector<Perm> transversal;  // t with t(base) = point
    std::vector<unsigned> orbit;    // points in discovery order
    std::vector<Perm> gens;         // generators fixing all earlier bases
    size_t done_points = 0;
    size_t done_gens = 0;
  };

  std::pair<Perm, size_t> sift(const Perm& p) const;
  void process(std::vector<Perm>& work);
  void close_level(size_t li, std::vector<Perm>& work);
  bool satisfied() const { return order_hint_ != 0 && order() == order_hint_; }

  size_t degree_;
  std::vector<Perm> gens_;
  std::vector<Level> levels_;
  unsigned long long order_hint_ = 0;
};

std::vector<unsigned> orbit_of(unsigned point, const std::vector<Perm>& gens, size_t degree);
bool is_transitive(const std::vector<Perm>& gens, size_t degree);

PermGroup derived_subgroup(const PermGroup& g);
std::vector<PermGroup> derived_series(const PermGroup& g);
bool is_soluble(const PermGroup& g);

/// Normal series S = N_0 > N_1 > ... > N_r = 1 with elementary abelian
/// factors; factor i (1-based layer) is N_{i-1}/N_i of order p_i^{d_i}.
struct NormalSeries {
  std::vector<PermGroup> members;
  std::vector<unsigned> primes;  // per factor
  std::vector<unsigned> ranks;   // per factor
  size_t layer_count() const { return primes.size(); }
};

/// Refines the derived series by p-power layers so every factor is
/// elementary abelian. Throws if g is insoluble.
NormalSeries elementary_abelian_series(const PermGroup& g);

/// Builds a NormalSeries from explicit member generator lists
/// (descending, starting at g, ending at the trivial group) and
/// validates all invariants instead of trusting them.
NormalSeries series_from_members(const PermGroup& g, const std::vector<std::vector<Perm>>& member_gens);

/// Independent checker used by series_from_members and the tests.
void verify_series(const PermGroup& g, const NormalSeries& s);

}  // namespace holobrace
