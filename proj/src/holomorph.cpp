#include "holobrace/holomorph.hpp"

#include <algorithm>
#include <stdexcept>

namespace holobrace {

Perm hol_perm(const AbelianGroup& g, const HolElement& e) {
  Perm p;
  p.img.resize(g.order);
  for (unsigned x = 0; x < g.order; ++x) {
    GroupElement v = apply_endo(g, e.automorphism, index_elem(g, x));
    p.img[x] = static_cast<uint8_t>(elem_index(g, elem_add(g, e.shift, v)));
  }
  return p;
}

HolElement hol_decompose(const AbelianGroup& g, const Perm& p) {
  // p(x) = shift + auto(x), so shift = p(0) and auto = (-shift) o p.
  HolElement e;
  e.shift = index_elem(g, p.img[0]);
  GroupElement neg = elem_neg(g, e.shift);
  e.automorphism.images.resize(g.rank());
  for (size_t i = 0; i < g.rank(); ++i) {
    GroupElement unit = elem_zero(g);
    if (g.factors[i] > 1) unit[i] = 1;
    unsigned img = p.img[elem_index(g, unit)];
    e.automorphism.images[i] = elem_add(g, neg, index_elem(g, img));
  }
  if (!is_endomorphism(g, e.automorphism) || hol_perm(g, e) != p)
    throw std::invalid_argument("permutation is not an element of the holomorph");
  return e;
}

HolElement hol_mul(const AbelianGroup& g, const HolElement& a, const HolElement& b) {
  // (g, alpha)(h, beta) = (g + alpha(h), alpha o beta)
  HolElement r;
  r.shift = elem_add(g, a.shift, apply_endo(g, a.automorphism, b.shift));
  r.automorphism.images.resize(g.rank());
  for (size_t i = 0; i < g.rank(); ++i)
    r.automorphism.images[i] = apply_endo(g, a.automorphism, b.automorphism.images[i]);
  return r;
}

HolElement hol_inv(const AbelianGroup& g, const HolElement& a) {
  return hol_decompose(g, inverse(hol_perm(g, a)));
}

unsigned hol_act(const AbelianGroup& g, const HolElement& e, unsigned x) {
  GroupElement v = apply_endo(g, e.automorphism, index_elem(g, x));
  return elem_index(g, elem_add(g, e.shift, v));
}

Holomorph make_holomorph(const AbelianGroup& g, unsigned max_group_order) {
  Holomorph h;
  h.group = g;
  if (g.order == 1) {
    h.aut_order = 1;
    h.order = 1;
    h.generators = {Perm(1)};
    h.translation_gens = {};
    return h;
  }
  for (size_t i = 0; i < g.rank(); ++i) {
    GroupElement unit = elem_zero(g);
    unit[i] = 1;
    h.translation_gens.push_back(translation_perm(g, unit));
  }
  std::vector<Endomorphism> auts = aut_elements(g, max_group_order);
  h.aut_order = auts.size();
  unsigned long long formula = aut_order_formula(g);
  if (formula != h.aut_order)
    throw std::runtime_error("automorphism enumeration disagrees with the order formula");
  h.order = static_cast<unsigned long long>(g.order) * h.aut_order;

  // Deterministic small generating set of Aut(G): greedy over the
  // enumeration order, keeping the permutations that grow the group.
  std::vector<Perm> aut_perms;
  aut_perms.reserve(auts.size());
  for (const Endomorphism& f : auts) aut_perms.push_back(endo_perm(g, f));
  std::sort(aut_perms.begin(), aut_perms.end());
  PermGroup probe(g.order);
  std::vector<Perm> aut_gens;
  for (const Perm& p : aut_perms) {
    if (probe.order() == h.aut_order) break;
    if (probe.add_generator(p)) aut_gens.push_back(p);
  }
  h.generators = h.translation_gens;
  h.generators.insert(h.generators.end(), aut_gens.begin(), aut_gens.end());
  return h;
}

}  // namespace holobrace
