#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "holobrace/holomorph.hpp"
#include "holobrace/pcgs.hpp"
#include "holobrace/permgroup.hpp"

using namespace holobrace;

namespace {

struct Fixture {
  AbelianGroup g;
  Holomorph hol;
  PermGroup pg{1};
  NormalSeries series;
  Pcgs pcgs;
};

Fixture make_fixture(const std::vector<unsigned>& factors) {
  Fixture f;
  f.g = make_group(factors);
  f.hol = make_holomorph(f.g);
  f.pg = PermGroup::from_generators_with_order(f.g.order, f.hol.generators, f.hol.order);
  f.series = elementary_abelian_series(f.pg);
  f.pcgs = Pcgs::build(f.pg, f.series);
  return f;
}

std::set<Perm> brute_closure(const std::vector<Perm>& gens, size_t degree) {
  std::set<Perm> all;
  all.insert(Perm(degree));
  std::vector<Perm> frontier = {Perm(degree)};
  while (!frontier.empty()) {
    Perm x = frontier.back();
    frontier.pop_back();
    for (const Perm& g : gens) {
      Perm y = mul(x, g);
      if (all.insert(y).second) frontier.push_back(y);
    }
  }
  return all;
}

}  // namespace

TEST_CASE("pcgs of Hol(C4): length 3, relative orders (2,2,2)") {
  Fixture f = make_fixture({4});
  CHECK(f.pcgs.length() == 3);
  CHECK(f.pcgs.relative_orders() == std::vector<unsigned>{2, 2, 2});
  CHECK(f.pcgs.group_order() == 8);
}

TEST_CASE("pcgs of an elementary abelian group has one position per rank") {
  AbelianGroup c22 = make_group({2, 2});
  std::vector<Perm> tr = {translation_perm(c22, {1, 0}), translation_perm(c22, {0, 1})};
  PermGroup pg = PermGroup::from_generators(4, tr);
  NormalSeries s = elementary_abelian_series(pg);
  Pcgs pcgs = Pcgs::build(pg, s);
  CHECK(pcgs.length() == 2);
}

TEST_CASE("relative orders multiply to |S| and the table is a bijection") {
  for (auto factors : std::vector<std::vector<unsigned>>{{4}, {8}, {2, 4}, {9}, {3, 3}, {16}}) {
    Fixture f = make_fixture(factors);
    unsigned long long prod = 1;
    for (unsigned p : f.pcgs.relative_orders()) prod *= p;
    CHECK(prod == f.pg.order());
    CHECK(f.pcgs.group_order() == f.pg.order());
    // Every element appears exactly once.
    std::set<Perm> seen;
    for (uint32_t id = 0; id < f.pcgs.group_order(); ++id) {
      CHECK(f.pcgs.id_of(f.pcgs.perm_of(id)) == id);
      seen.insert(f.pcgs.perm_of(id));
    }
    CHECK(seen.size() == f.pg.order());
    for (const Perm& p : seen) CHECK(f.pg.contains(p));
  }
}

TEST_CASE("exponent vectors: identity, unit vectors, roundtrip") {
  Fixture f = make_fixture({2, 4});
  const size_t L = f.pcgs.length();
  CHECK(f.pcgs.exponent_vector(uint32_t(0)) == std::vector<unsigned>(L, 0));
  for (size_t j = 0; j < L; ++j) {
    std::vector<unsigned> unit(L, 0);
    unit[j] = 1;
    CHECK(f.pcgs.exponent_vector(f.pcgs.gen(j)) == unit);
  }
  std::mt19937 rng(99);
  for (int t = 0; t < 1000; ++t) {
    uint32_t id = rng() % f.pcgs.group_order();
    auto e = f.pcgs.exponent_vector(id);
    CHECK(f.pcgs.id_from_exponents(e) == id);
    // Reconstructing the product of pcgs powers reproduces the element.
    Perm prod(f.pcgs.degree());
    for (size_t j = 0; j < L; ++j)
      for (unsigned c = 0; c < e[j]; ++c) prod = mul(prod, f.pcgs.gen(j));
    CHECK(prod == f.pcgs.perm_of(id));
  }
  Perm outsider(8);
  outsider.img = {1, 0, 2, 3, 4, 5, 6, 7};  // transposition: not in Hol(C2xC4)
  CHECK(f.pcgs.id_of(outsider) == UINT32_MAX);
  CHECK_THROWS(f.pcgs.exponent_vector(outsider));
}

TEST_CASE("igs basics: full pcgs, empty input, canonical keys") {
  Fixture f = make_fixture({2, 4});
  std::vector<uint32_t> all_gens;
  for (size_t j = 0; j < f.pcgs.length(); ++j)
    all_gens.push_back(static_cast<uint32_t>(f.pcgs.place(j)));
  SubgroupRecord full = igs(f.pcgs, all_gens);
  CHECK(full.order == f.pg.order());
  CHECK(full.key == full_record(f.pcgs).key);

  SubgroupRecord trivial = igs(f.pcgs, {});
  CHECK(trivial.order == 1);
  CHECK(trivial.row_ids.empty());

  // Two different generating sets of the translation subgroup.
  SubgroupRecord t1 = igs_from_perms(f.pcgs, {translation_perm(f.g, {1, 0}), translation_perm(f.g, {0, 1})});
  SubgroupRecord t2 = igs_from_perms(f.pcgs, {translation_perm(f.g, {1, 1}), translation_perm(f.g, {0, 1}),
                                              translation_perm(f.g, {1, 2})});
  CHECK(t1.order == 8);
  CHECK(t1.key == t2.key);
}

TEST_CASE("record membership, conjugation, order stability") {
  Fixture f = make_fixture({2, 4});
  SubgroupRecord rec = igs_from_perms(f.pcgs, {translation_perm(f.g, {1, 0}), translation_perm(f.g, {0, 1})});
  for (uint32_t rid : rec.row_ids) CHECK(record_contains(f.pcgs, rec, f.pcgs.perm_of(rid)));

  auto elems = record_element_ids(f.pcgs, rec);
  CHECK(elems.size() == rec.order);
  // Conjugating by a member leaves the key unchanged.
  Perm member = f.pcgs.perm_of(elems[3]);
  SubgroupRecord conj_same = conjugate_record(f.pcgs, rec, member, inverse(member));
  CHECK(conj_same.key == rec.key);
  // Conjugating by anything preserves the order.
  for (uint32_t id = 0; id < f.pcgs.group_order(); id += 7) {
    const Perm& s = f.pcgs.perm_of(id);
    SubgroupRecord c = conjugate_record(f.pcgs, rec, s, inverse(s));
    CHECK(c.order == rec.order);
  }
}

TEST_CASE("canonical keys collide exactly for equal subgroups") {
  std::mt19937 rng(2024);
  for (auto factors : std::vector<std::vector<unsigned>>{{4}, {2, 4}, {9}, {8}}) {
    Fixture f = make_fixture(factors);
    const uint32_t order = static_cast<uint32_t>(f.pcgs.group_order());
    // Random subgroups with two independently generated generating sets;
    // 2500 pairs x 4 groups = 10^4 regeneration trials.
    for (int trial = 0; trial < 2500; ++trial) {
      std::vector<uint32_t> gens1;
      for (int i = 0; i < 3; ++i) gens1.push_back(rng() % order);
      SubgroupRecord r1 = igs(f.pcgs, gens1);
      // Regenerate from random members of the subgroup.
      auto elems = record_element_ids(f.pcgs, r1);
      std::vector<uint32_t> gens2;
      for (int i = 0; i < 4; ++i) gens2.push_back(elems[rng() % elems.size()]);
      SubgroupRecord r2 = igs(f.pcgs, gens2);
      // r2 <= r1 always; equal iff orders match, then keys must match.
      CHECK(r2.order <= r1.order);
      if (r2.order == r1.order)
        CHECK(r2.key == r1.key);
      else
        CHECK(r2.key != r1.key);
      // Mutual membership confirms equality semantics of the keys.
      if (r2.key == r1.key) {
        for (uint32_t rid : r1.row_ids) CHECK(record_contains_id(f.pcgs, r2, rid));
        for (uint32_t rid : r2.row_ids) CHECK(record_contains_id(f.pcgs, r1, rid));
      }
    }
  }
}

TEST_CASE("record order equals brute-force closure size") {
  std::mt19937 rng(5);
  for (auto factors : std::vector<std::vector<unsigned>>{{4}, {2, 4}, {3, 3}, {16}}) {
    Fixture f = make_fixture(factors);
    const uint32_t order = static_cast<uint32_t>(f.pcgs.group_order());
    for (int trial = 0; trial < 60; ++trial) {
      std::vector<uint32_t> gens;
      for (int i = 0; i < 2 + int(rng() % 2); ++i) gens.push_back(rng() % order);
      SubgroupRecord rec = igs(f.pcgs, gens);
      std::vector<Perm> gen_perms;
      for (uint32_t id : gens) gen_perms.push_back(f.pcgs.perm_of(id));
      CHECK(rec.order == brute_closure(gen_perms, f.pcgs.degree()).size());
      // Non-members sift to a non-identity residue.
      for (int probe = 0; probe < 20; ++probe) {
        uint32_t cand = rng() % order;
        bool in_closure = brute_closure(gen_perms, f.pcgs.degree()).count(f.pcgs.perm_of(cand)) > 0;
        CHECK(record_contains_id(f.pcgs, rec, cand) == in_closure);
      }
    }
  }
}

TEST_CASE("kernel records are full preimages with the right orders") {
  Fixture f = make_fixture({2, 4});
  for (size_t t = 0; t <= f.series.layer_count(); ++t) {
    SubgroupRecord k = kernel_record(f.pcgs, t);
    CHECK(k.order == f.series.members[t].order());
    CHECK(k.order == f.pcgs.kernel_order(t));
    for (const Perm& g : f.series.members[t].generators())
      CHECK(record_contains(f.pcgs, k, g));
  }
}

TEST_CASE("pc presentation holds on the actual igs elements") {
  for (auto factors : std::vector<std::vector<unsigned>>{{4}, {2, 4}, {9}}) {
    Fixture f = make_fixture(factors);
    SubgroupRecord full = full_record(f.pcgs);
    for (size_t t = 0; t <= f.series.layer_count(); ++t) {
      PcPresentation pres = pc_presentation(f.pcgs, full, t);
      SubgroupRecord kern = kernel_record(f.pcgs, t);
      for (const PcRelation& rel : pres.rels) {
        Perm lhs(f.pcgs.degree());
        if (rel.is_power)
          lhs = perm_pow(f.pcgs.perm_of(full.row_ids[rel.j]), pres.gen_primes[rel.j]);
        else {
          const Perm& hj = f.pcgs.perm_of(full.row_ids[rel.j]);
          const Perm& hk = f.pcgs.perm_of(full.row_ids[rel.k]);
          lhs = mul(mul(hj, hk), inverse(hj));
        }
        Perm rhs(f.pcgs.degree());
        for (auto [idx, c] : rel.tail)
          for (unsigned i = 0; i < c; ++i) rhs = mul(rhs, f.pcgs.perm_of(full.row_ids[idx]));
        // LHS * RHS^{-1} lies in the kernel N_t.
        CHECK(record_contains(f.pcgs, kern, mul(lhs, inverse(rhs))));
      }
    }
  }
}

TEST_CASE("cyclic quotient of order 2 has a single power relation") {
  // Hol(C4) / N_1 where the first factor has rank 2: take the subgroup
  // generated by one pcgs generator over N_1 instead: its quotient is
  // cyclic of order 2.
  Fixture f = make_fixture({4});
  std::vector<uint32_t> gens = {static_cast<uint32_t>(f.pcgs.place(0))};
  for (size_t j = f.pcgs.pos_limit(1); j < f.pcgs.length(); ++j)
    gens.push_back(static_cast<uint32_t>(f.pcgs.place(j)));
  SubgroupRecord rec = igs(f.pcgs, gens);
  PcPresentation pres = pc_presentation(f.pcgs, rec, 1);
  CHECK(pres.ngens == 1);
  CHECK(pres.rels.size() == 1);
  CHECK(pres.rels[0].is_power);
  CHECK(pres.rels[0].tail.empty());  // abelian factor: trivial tails
}
