#include "holobrace/oracle.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "holobrace/holomorph.hpp"
#include "holobrace/permgroup.hpp"

namespace holobrace {

namespace {

struct ElementIndex {
  std::vector<Perm> elems;
  std::unordered_map<std::string, uint32_t> ids;

  uint32_t id(const Perm& p) const {
    auto it = ids.find(std::string(reinterpret_cast<const char*>(p.img.data()), p.img.size()));
    if (it == ids.end()) throw std::logic_error("element missing from the oracle table");
    return it->second;
  }
};

std::string key_of(const std::vector<uint32_t>& sorted_ids) {
  std::string s;
  s.reserve(sorted_ids.size() * 4);
  for (uint32_t id : sorted_ids)
    for (int b = 0; b < 4; ++b) s.push_back(static_cast<char>((id >> (8 * b)) & 0xff));
  return s;
}

}  // namespace

unsigned long long oracle_regular_classes(const AbelianGroup& g, size_t max_hol) {
  const unsigned n = std::max(1u, g.order);
  Holomorph hol = make_holomorph(g, 64);
  if (hol.order > max_hol)
    throw std::runtime_error("oracle bound exceeded: |Hol(G)| = " + std::to_string(hol.order));
  if (n == 1) return 1;

  // Enumerate all holomorph elements breadth-first and index them.
  ElementIndex ix;
  {
    std::vector<Perm> sorted_gens = hol.generators;
    std::sort(sorted_gens.begin(), sorted_gens.end());
    ix.elems.push_back(Perm(n));
    ix.ids.emplace(std::string(reinterpret_cast<const char*>(ix.elems[0].img.data()), n), 0);
    for (size_t h = 0; h < ix.elems.size(); ++h)
      for (const Perm& ggen : sorted_gens) {
        Perm nx = mul(ix.elems[h], ggen);
        std::string k(reinterpret_cast<const char*>(nx.img.data()), n);
        if (ix.ids.emplace(k, static_cast<uint32_t>(ix.elems.size())).second)
          ix.elems.push_back(std::move(nx));
      }
  }
  if (ix.elems.size() != hol.order) throw std::logic_error("oracle enumeration missed elements");
  std::vector<Perm> small_gens;
  {
    PermGroup probe(n);
    std::vector<Perm> sorted_gens = hol.generators;
    std::sort(sorted_gens.begin(), sorted_gens.end());
    for (const Perm& p : sorted_gens) {
      if (probe.order() == hol.order) break;
      if (probe.add_generator(p)) small_gens.push_back(p);
    }
  }
  std::vector<Perm> small_inv;
  for (const Perm& p : small_gens) small_inv.push_back(inverse(p));
  // Conjugation tables per small generator.
  std::vector<std::vector<uint32_t>> conj_table(small_gens.size(),
                                                std::vector<uint32_t>(ix.elems.size()));
  for (size_t gi = 0; gi < small_gens.size(); ++gi)
    for (uint32_t id = 0; id < ix.elems.size(); ++id)
      conj_table[gi][id] = ix.id(mul(mul(small_gens[gi], ix.elems[id]), small_inv[gi]));

  auto conj_set = [&](const std::vector<uint32_t>& ids, size_t gi) {
    std::vector<uint32_t> out(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) out[i] = conj_table[gi][ids[i]];
    std::sort(out.begin(), out.end());
    return out;
  };

  // Normalizer elements of U, via the conjugation orbit of its element
  // set and a stabilizer chain from the Schreier generators.
  auto normalizer_elements = [&](const std::vector<uint32_t>& u_ids) {
    std::vector<std::vector<uint32_t>> members = {u_ids};
    std::unordered_map<std::string, size_t> where;
    where.emplace(key_of(u_ids), 0);
    std::vector<Perm> trans = {Perm(n)};
    std::vector<Perm> schreier;
    std::unordered_set<std::string> sseen;
    for (size_t i = 0; i < members.size(); ++i)
      for (size_t gi = 0; gi < small_gens.size(); ++gi) {
        std::vector<uint32_t> nx = conj_set(members[i], gi);
        std::string k = key_of(nx);
        auto it = where.find(k);
        if (it == where.end()) {
          where.emplace(k, members.size());
          trans.push_back(mul(small_gens[gi], trans[i]));
          members.push_back(std::move(nx));
        } else {
          Perm sg = mul(inverse(trans[it->second]), mul(small_gens[gi], trans[i]));
          if (!sg.is_identity() &&
              sseen.insert(std::string(reinterpret_cast<const char*>(sg.img.data()), n)).second)
            schreier.push_back(std::move(sg));
        }
      }
    unsigned long long norm_order = hol.order / members.size();
    PermGroup norm(n);
    for (const Perm& sg : schreier) {
      if (norm.order() == norm_order) break;
      norm.add_generator(sg);
    }
    if (norm.order() != norm_order)
      throw std::logic_error("oracle normalizer generation failed");
    return norm.elements(max_hol);
  };

  // Bottom-up cyclic extension over orders dividing n.
  std::vector<unsigned> divisors;
  for (unsigned d = 1; d <= n; ++d)
    if (n % d == 0) divisors.push_back(d);

  std::unordered_map<unsigned, std::vector<std::vector<uint32_t>>> by_order;
  std::unordered_map<unsigned, std::unordered_set<std::string>> seen;
  by_order[1].push_back({0});
  seen[1].insert(key_of({0}));

  for (unsigned m : divisors) {
    auto it = by_order.find(m);
    if (it == by_order.end()) continue;
    for (size_t ui = 0; ui < it->second.size(); ++ui) {
      const std::vector<uint32_t> u = it->second[ui];
      std::vector<unsigned> primes;
      for (unsigned p = 2; p <= n / m; ++p) {
        bool prime = p >= 2;
        for (unsigned d = 2; d * d <= p; ++d)
          if (p % d == 0) prime = false;
        if (prime && (n % (m * p) == 0)) primes.push_back(p);
      }
      if (primes.empty()) continue;
      std::vector<Perm> norm = normalizer_elements(u);
      for (unsigned p : primes) {
        for (const Perm& x : norm) {
          uint32_t xid = ix.id(x);
          if (std::binary_search(u.begin(), u.end(), xid)) continue;
          uint32_t xp = ix.id(perm_pow(x, p));
          if (!std::binary_search(u.begin(), u.end(), xp)) continue;
          // U' = U <x>: union of the p cosets U x^c.
          std::vector<uint32_t> ext;
          ext.reserve(u.size() * p);
          Perm xc(n);
          for (unsigned c = 0; c < p; ++c) {
            for (uint32_t uid : u) ext.push_back(ix.id(mul(ix.elems[uid], xc)));
            if (c + 1 < p) xc = mul(xc, x);
          }
          std::sort(ext.begin(), ext.end());
          if (ext.size() != static_cast<size_t>(u.size()) * p ||
              std::unique(ext.begin(), ext.end()) != ext.end())
            throw std::logic_error("oracle extension is not a disjoint coset union");
          std::string k = key_of(ext);
          if (seen[m * p].insert(k).second) by_order[m * p].push_back(std::move(ext));
        }
      }
    }
    if (m != n) by_order.erase(m);  // levels below are no longer needed
  }

  // Filter regular subgroups of order n.
  std::vector<std::vector<uint32_t>> regulars;
  for (const auto& u : by_order[n]) {
    std::vector<bool> hit(n, false);
    size_t covered = 0, fixing = 0;
    for (uint32_t id : u) {
      unsigned img = ix.elems[id].img[0];
      if (!hit[img]) {
        hit[img] = true;
        ++covered;
      }
      if (img == 0) ++fixing;
    }
    if (covered == n && fixing == 1) regulars.push_back(u);
  }

  // Fuse into conjugacy classes.
  std::unordered_set<std::string> claimed;
  unsigned long long classes = 0;
  for (const auto& u : regulars) {
    std::string k0 = key_of(u);
    if (claimed.count(k0)) continue;
    ++classes;
    std::vector<std::vector<uint32_t>> queue = {u};
    claimed.insert(k0);
    for (size_t h = 0; h < queue.size(); ++h) {
      std::vector<uint32_t> cur = queue[h];
      for (size_t gi = 0; gi < small_gens.size(); ++gi) {
        std::vector<uint32_t> nx = conj_set(cur, gi);
        std::string k = key_of(nx);
        if (claimed.insert(k).second) queue.push_back(std::move(nx));
      }
    }
  }
  return classes;
}

}  // namespace holobrace
