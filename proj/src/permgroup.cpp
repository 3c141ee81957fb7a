#include "holobrace/permgroup.hpp"

#include <algorithm>
#include <stdexcept>

namespace holobrace {

PermGroup::PermGroup(size_t degree) : degree_(degree) {}

PermGroup PermGroup::from_generators(size_t degree, const std::vector<Perm>& gens) {
  return from_generators_with_order(degree, gens, 0);
}

PermGroup PermGroup::from_generators_with_order(size_t degree, const std::vector<Perm>& gens,
                                                unsigned long long known_order) {
  PermGroup g(degree);
  g.order_hint_ = known_order;
  std::vector<Perm> sorted = gens;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (const Perm& p : sorted) {
    if (g.satisfied()) break;
    g.add_generator(p);
  }
  if (known_order != 0 && g.order() != known_order)
    throw std::runtime_error("generators do not produce the promised order");
  return g;
}

unsigned long long PermGroup::order() const {
  unsigned long long o = 1;
  for (const Level& lv : levels_) o *= lv.orbit.size();
  return o;
}

std::pair<Perm, size_t> PermGroup::sift(const Perm& p) const {
  Perm r = p;
  for (size_t i = 0; i < levels_.size(); ++i) {
    const Level& lv = levels_[i];
    unsigned img = r.img[lv.base];
    if (img == lv.base) continue;
    int s = lv.slot[img];
    if (s < 0) return {r, i};
    r = mul(inverse(lv.transversal[s]), r);
  }
  return {r, levels_.size()};
}

bool PermGroup::contains(const Perm& p) const {
  if (p.degree() != degree_) return false;
  auto [r, lev] = sift(p);
  (void)lev;
  return r.is_identity();
}

void PermGroup::close_level(size_t li, std::vector<Perm>& work) {
  Level& lv = levels_[li];
  if (lv.slot.empty()) {
    lv.slot.assign(degree_, -1);
    lv.slot[lv.base] = 0;
    lv.transversal.push_back(Perm(degree_));
    lv.orbit.push_back(lv.base);
  }
  if (lv.done_points == lv.orbit.size() && lv.done_gens == lv.gens.size()) return;
  for (size_t oi = 0; oi < lv.orbit.size(); ++oi) {
    for (size_t gi = 0; gi < lv.gens.size(); ++gi) {
      if (oi < lv.done_points && gi < lv.done_gens) continue;
      unsigned pt = lv.orbit[oi];
      const Perm& g = lv.gens[gi];
      unsigned img = g.img[pt];
      if (lv.slot[img] < 0) {
        lv.slot[img] = static_cast<int>(lv.transversal.size());
        lv.transversal.push_back(mul(g, lv.transversal[lv.slot[pt]]));
        lv.orbit.push_back(img);
      } else {
        Perm sg = mul(inverse(lv.transversal[lv.slot[img]]), mul(g, lv.transversal[lv.slot[pt]]));
        if (!sg.is_identity()) work.push_back(std::move(sg));
      }
    }
  }
  lv.done_points = lv.orbit.size();
  lv.done_gens = lv.gens.size();
}

void PermGroup::process(std::vector<Perm>& work) {
  while (!work.empty()) {
    if (satisfied()) {
      work.clear();
      return;
    }
    Perm x = std::move(work.back());
    work.pop_back();
    auto [r, where] = sift(x);
    (void)where;
    if (r.is_identity()) continue;
    // Insertion level: first level whose base r moves; the residue
    // fixes every earlier base by construction of the sift.
    size_t lev = 0;
    while (lev < levels_.size() && r.img[levels_[lev].base] == levels_[lev].base) ++lev;
    if (lev == levels_.size()) {
      Level nl;
      unsigned b = 0;
      while (r.img[b] == b) ++b;
      nl.base = b;
      levels_.push_back(std::move(nl));
    }
    // r belongs to the generating set of every level it fixes through.
    for (size_t j = 0; j <= lev; ++j) levels_[j].gens.push_back(r);
    for (size_t j = 0; j <= lev; ++j) {
      size_t guard = 0;
      while (true) {
        size_t before = levels_[j].orbit.size();
        close_level(j, work);
        if (levels_[j].orbit.size() == before) break;
        if (++guard > degree_) break;
      }
    }
  }
}

bool PermGroup::add_generator(const Perm& p) {
  if (p.degree() != degree_) throw std::invalid_argument("degree mismatch");
  if (p.is_identity() || contains(p)) return false;
  gens_.push_back(p);
  std::vector<Perm> work = {p};
  process(work);
  return true;
}

std::vector<Perm> PermGroup::small_generating_set() const {
  std::vector<Perm> out;
  PermGroup probe(degree_);
  probe.order_hint_ = order();
  for (const Perm& g : gens_) {
    if (probe.order() == order()) break;
    if (probe.add_generator(g)) out.push_back(g);
  }
  if (out.empty()) out.push_back(Perm(degree_));
  return out;
}

std::vector<Perm> PermGroup::elements(size_t cap) const {
  if (order() > cap) throw std::runtime_error("element enumeration cap exceeded");
  std::vector<Perm> out = {Perm(degree_)};
  for (size_t li = levels_.size(); li-- > 0;) {
    std::vector<Perm> next;
    next.reserve(out.size() * levels_[li].transversal.size());
    for (const Perm& t : levels_[li].transversal)
      for (const Perm& e : out) next.push_back(mul(t, e));
    out = std::move(next);
  }
  return out;
}

bool PermGroup::is_normalized_by(const Perm& p) const {
  for (const Perm& g : gens_)
    if (!contains(conj(g, p))) return false;
  return true;
}

bool PermGroup::is_subgroup_of(const PermGroup& other) const {
  for (const Perm& g : gens_)
    if (!other.contains(g)) return false;
  return true;
}

Perm PermGroup::coset_min_rep(const Perm& x) const {
  Perm r = x;
  for (const Level& lv : levels_) {
    unsigned best_pt = lv.orbit[0];
    unsigned best_img = r.img[best_pt];
    for (unsigned pt : lv.orbit)
      if (r.img[pt] < best_img) {
        best_img = r.img[pt];
        best_pt = pt;
      }
    r = mul(r, lv.transversal[lv.slot[best_pt]]);
  }
  return r;
}

std::vector<unsigned> orbit_of(unsigned point, const std::vector<Perm>& gens, size_t degree) {
  std::vector<bool> seen(degree, false);
  std::vector<unsigned> orbit = {point};
  seen[point] = true;
  for (size_t h = 0; h < orbit.size(); ++h)
    for (const Perm& g : gens) {
      unsigned img = g.img[orbit[h]];
      if (!seen[img]) {
        seen[img] = true;
        orbit.push_back(img);
      }
    }
  std::sort(orbit.begin(), orbit.end());
  return orbit;
}

bool is_transitive(const std::vector<Perm>& gens, size_t degree) {
  return orbit_of(0, gens, degree).size() == degree;
}

PermGroup derived_subgroup(const PermGroup& g) {
  // Normal closure of the commutators of the generators.
  PermGroup d(g.degree());
  const auto& gens = g.generators();
  std::vector<Perm> work;
  for (size_t i = 0; i < gens.size(); ++i)
    for (size_t j = i + 1; j < gens.size(); ++j)
      work.push_back(mul(mul(inverse(gens[i]), inverse(gens[j])), mul(gens[i], gens[j])));
  std::sort(work.begin(), work.end());
  while (!work.empty()) {
    Perm x = std::move(work.back());
    work.pop_back();
    if (!d.add_generator(x)) continue;
    for (const Perm& s : gens) work.push_back(conj(x, s));
  }
  return d;
}

std::vector<PermGroup> derived_series(const PermGroup& g) {
  std::vector<PermGroup> series = {g};
  while (series.back().order() > 1) {
    PermGroup next = derived_subgroup(series.back());
    if (next.order() == series.back().order())
      throw std::runtime_error("derived series does not reach the trivial group (insoluble group)");
    series.push_back(std::move(next));
  }
  return series;
}

bool is_soluble(const PermGroup& g) {
  PermGroup cur = g;
  while (cur.order() > 1) {
    PermGroup next = derived_subgroup(cur);
    if (next.order() == cur.order()) return false;
    cur = std::move(next);
  }
  return true;
}

namespace {

unsigned smallest_prime_factor(unsigned long long n) {
  for (unsigned p = 2; static_cast<unsigned long long>(p) * p <= n; ++p)
    if (n % p == 0) return p;
  return static_cast<unsigned>(n);
}

void fill_factor_data(NormalSeries& s) {
  s.primes.clear();
  s.ranks.clear();
  for (size_t i = 0; i + 1 < s.members.size(); ++i) {
    unsigned long long q = s.members[i].order() / s.members[i + 1].order();
    unsigned p = smallest_prime_factor(q);
    unsigned d = 0;
    while (q > 1) {
      if (q % p != 0) throw std::runtime_error("series factor is not a prime power");
      q /= p;
      ++d;
    }
    s.primes.push_back(p);
    s.ranks.push_back(d);
  }
}

}  // namespace

NormalSeries elementary_abelian_series(const PermGroup& g) {
  std::vector<PermGroup> derived = derived_series(g);  // throws if insoluble
  NormalSeries s;
  s.members.push_back(derived[0]);
  for (size_t step = 0; step + 1 < derived.size(); ++step) {
    const PermGroup& top = derived[step];
    const PermGroup& bottom = derived[step + 1];
    // Refine the abelian factor top/bottom by ascending primes, each
    // prime by its p-power chain.
    PermGroup cur = top;
    std::vector<unsigned> primes;
    {
      unsigned long long r = top.order() / bottom.order();
      while (r > 1) {
        unsigned p = smallest_prime_factor(r);
        primes.push_back(p);
        while (r % p == 0) r /= p;
      }
    }
    std::sort(primes.begin(), primes.end());
    for (unsigned p : primes) {
      while (true) {
        std::vector<Perm> next_gens = bottom.generators();
        for (const Perm& x : cur.generators()) next_gens.push_back(perm_pow(x, p));
        PermGroup next = PermGroup::from_generators(g.degree(), next_gens);
        if (next.order() == cur.order()) break;
        s.members.push_back(next);
        cur = std::move(next);
      }
    }
    if (cur.order() != bottom.order())
      throw std::runtime_error("series refinement failed to reach the derived term");
  }
  fill_factor_data(s);
  verify_series(g, s);
  return s;
}

NormalSeries series_from_members(const PermGroup& g, const std::vector<std::vector<Perm>>& member_gens) {
  NormalSeries s;
  for (const auto& gens : member_gens)
    s.members.push_back(PermGroup::from_generators(g.degree(), gens));
  fill_factor_data(s);
  verify_series(g, s);
  return s;
}

void verify_series(const PermGroup& g, const NormalSeries& s) {
  if (s.members.empty()) throw std::runtime_error("empty series");
  if (s.members.front().order() != g.order() || !s.members.front().is_subgroup_of(g))
    throw std::runtime_error("series must start at the full group");
  if (s.members.back().order() != 1) throw std::runtime_error("series must end at the trivial group");
  if (s.primes.size() + 1 != s.members.size() || s.ranks.size() + 1 != s.members.size())
    throw std::runtime_error("factor data does not match member count");
  unsigned long long product = 1;
  for (size_t i = 0; i + 1 < s.members.size(); ++i) {
    const PermGroup& top = s.members[i];
    const PermGroup& bot = s.members[i + 1];
    if (!bot.is_subgroup_of(top) || bot.order() >= top.order())
      throw std::runtime_error("series members must be strictly descending");
    if (top.order() % bot.order() != 0) throw std::runtime_error("non-dividing series orders");
    for (const Perm& m : top.generators())
      for (const Perm& x : g.generators())
        if (!top.contains(conj(m, x))) throw std::runtime_error("series member not normal in the group");
    unsigned p = s.primes[i];
    unsigned long long expect = 1;
    for (unsigned t = 0; t < s.ranks[i]; ++t) expect *= p;
    if (top.order() / bot.order() != expect)
      throw std::runtime_error("factor order does not match (p, d)");
    for (const Perm& a : top.generators()) {
      if (!bot.contains(perm_pow(a, p)))
        throw std::runtime_error("factor has an element of order > p");
      for (const Perm& b : top.generators()) {
        Perm comm = mul(mul(inverse(a), inverse(b)), mul(a, b));
        if (!bot.contains(comm)) throw std::runtime_error("factor is not abelian");
      }
    }
    product *= top.order() / bot.order();
  }
  if (product != g.order()) throw std::runtime_error("factor orders do not multiply to |S|");
}

}  // namespace holobrace
