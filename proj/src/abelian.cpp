#include "holobrace/abelian.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace holobrace {

namespace {

// Returns the prime p with f = p^k, or 0 if f is not a prime power >= 2.
unsigned prime_power_base(unsigned f) {
  if (f < 2) return 0;
  unsigned p = 0;
  for (unsigned d = 2; d * d <= f; ++d) {
    if (f % d == 0) {
      p = d;
      break;
    }
  }
  if (p == 0) return f;  // prime
  unsigned r = f;
  while (r % p == 0) r /= p;
  return r == 1 ? p : 0;
}

unsigned prime_exponent(unsigned f, unsigned p) {
  unsigned e = 0;
  while (f > 1) {
    f /= p;
    ++e;
  }
  return e;
}

}  // namespace

AbelianGroup make_group(const std::vector<unsigned>& factors) {
  AbelianGroup g;
  g.factors = factors;
  for (unsigned f : g.factors) {
    if (prime_power_base(f) == 0)
      throw std::invalid_argument("group factor " + std::to_string(f) +
                                  " is not a prime power >= 2; pass the primary decomposition");
  }
  std::sort(g.factors.begin(), g.factors.end(), [](unsigned a, unsigned b) {
    unsigned pa = prime_power_base(a), pb = prime_power_base(b);
    if (pa != pb) return pa < pb;
    return a < b;
  });
  unsigned long long order = 1;
  for (unsigned f : g.factors) {
    order *= f;
    if (order > (1ull << 31))
      throw std::invalid_argument("group order too large");
  }
  g.order = static_cast<unsigned>(order);
  return g;
}

AbelianGroup group_from_descriptor(const std::string& desc) {
  if (desc == "1" || desc.empty()) return make_group({});
  std::vector<unsigned> factors;
  std::stringstream ss(desc);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) throw std::invalid_argument("bad group descriptor: " + desc);
    factors.push_back(static_cast<unsigned>(std::stoul(tok)));
  }
  return make_group(factors);
}

std::string group_descriptor(const AbelianGroup& g) {
  if (g.factors.empty()) return "1";
  std::string s;
  for (size_t i = 0; i < g.factors.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(g.factors[i]);
  }
  return s;
}

GroupElement elem_zero(const AbelianGroup& g) { return GroupElement(g.rank(), 0); }

GroupElement elem_add(const AbelianGroup& g, const GroupElement& a, const GroupElement& b) {
  GroupElement r(g.rank());
  for (size_t i = 0; i < g.rank(); ++i) r[i] = (a[i] + b[i]) % g.factors[i];
  return r;
}

GroupElement elem_neg(const AbelianGroup& g, const GroupElement& a) {
  GroupElement r(g.rank());
  for (size_t i = 0; i < g.rank(); ++i) r[i] = (g.factors[i] - a[i]) % g.factors[i];
  return r;
}

GroupElement elem_scale(const AbelianGroup& g, unsigned k, const GroupElement& a) {
  GroupElement r(g.rank());
  for (size_t i = 0; i < g.rank(); ++i)
    r[i] = static_cast<unsigned>((static_cast<unsigned long long>(k) * a[i]) % g.factors[i]);
  return r;
}

unsigned elem_index(const AbelianGroup& g, const GroupElement& a) {
  unsigned idx = 0;
  for (size_t i = g.rank(); i-- > 0;) idx = idx * g.factors[i] + a[i];
  return idx;
}

GroupElement index_elem(const AbelianGroup& g, unsigned index) {
  if (index >= g.order) throw std::out_of_range("element index out of range");
  GroupElement a(g.rank());
  for (size_t i = 0; i < g.rank(); ++i) {
    a[i] = index % g.factors[i];
    index /= g.factors[i];
  }
  return a;
}

GroupElement apply_endo(const AbelianGroup& g, const Endomorphism& f, const GroupElement& a) {
  GroupElement r = elem_zero(g);
  for (size_t i = 0; i < g.rank(); ++i)
    if (a[i]) r = elem_add(g, r, elem_scale(g, a[i], f.images[i]));
  return r;
}

bool is_endomorphism(const AbelianGroup& g, const Endomorphism& f) {
  if (f.images.size() != g.rank()) return false;
  // Column i must be killed by the order of generator i.
  for (size_t i = 0; i < g.rank(); ++i)
    if (elem_index(g, elem_scale(g, g.factors[i], f.images[i])) != 0) return false;
  return true;
}

Endomorphism identity_endo(const AbelianGroup& g) {
  Endomorphism f;
  f.images.resize(g.rank());
  for (size_t i = 0; i < g.rank(); ++i) {
    f.images[i] = elem_zero(g);
    f.images[i][i] = g.factors[i] > 1 ? 1 : 0;
  }
  return f;
}

Perm endo_perm(const AbelianGroup& g, const Endomorphism& f) {
  Perm p;
  p.img.resize(g.order);
  for (unsigned x = 0; x < g.order; ++x)
    p.img[x] = static_cast<uint8_t>(elem_index(g, apply_endo(g, f, index_elem(g, x))));
  return p;
}

Perm translation_perm(const AbelianGroup& g, const GroupElement& shift) {
  Perm p;
  p.img.resize(g.order);
  for (unsigned x = 0; x < g.order; ++x)
    p.img[x] = static_cast<uint8_t>(elem_index(g, elem_add(g, shift, index_elem(g, x))));
  return p;
}

std::vector<Endomorphism> aut_elements(const AbelianGroup& g, unsigned max_order) {
  if (g.order > max_order)
    throw std::runtime_error("aut_elements: group order " + std::to_string(g.order) +
                             " exceeds desk-scale bound " + std::to_string(max_order));
  const size_t k = g.rank();
  std::vector<Endomorphism> out;
  if (k == 0) {
    out.push_back(Endomorphism{});
    return out;
  }

  // Candidate images for generator i: elements x with factors[i] * x = 0.
  std::vector<std::vector<GroupElement>> candidates(k);
  for (size_t i = 0; i < k; ++i) {
    for (unsigned x = 0; x < g.order; ++x) {
      GroupElement e = index_elem(g, x);
      GroupElement s = elem_scale(g, g.factors[i], e);
      if (elem_index(g, s) == 0) candidates[i].push_back(std::move(e));
    }
  }

  Endomorphism f;
  f.images.resize(k);
  // Generator images must generate the whole group for bijectivity.
  auto surjective = [&]() {
    std::vector<bool> seen(g.order, false);
    std::vector<unsigned> frontier = {0};
    seen[0] = true;
    unsigned count = 1;
    while (!frontier.empty()) {
      unsigned cur = frontier.back();
      frontier.pop_back();
      GroupElement ce = index_elem(g, cur);
      for (size_t i = 0; i < k; ++i) {
        unsigned nxt = elem_index(g, elem_add(g, ce, f.images[i]));
        if (!seen[nxt]) {
          seen[nxt] = true;
          ++count;
          frontier.push_back(nxt);
        }
      }
    }
    return count == g.order;
  };
  // Depth-first over candidate tuples, in elem_index order per column.
  auto dfs = [&](auto&& self, size_t depth) -> void {
    if (depth == k) {
      if (surjective()) out.push_back(f);
      return;
    }
    for (const GroupElement& c : candidates[depth]) {
      f.images[depth] = c;
      self(self, depth + 1);
    }
  };
  dfs(dfs, 0);
  return out;
}

unsigned long long aut_order_formula(const AbelianGroup& g) {
  // Hillar-Rhea: per prime p with exponents e_1 <= ... <= e_k,
  //   |Aut| = prod_k (p^{d_k} - p^{k-1})
  //         * prod_j p^{e_j (k - d_j)}
  //         * prod_i p^{(e_i - 1)(k - c_i + 1)}
  // where d_k = max{l : e_l = e_k}, c_k = min{l : e_l = e_k}.
  std::vector<std::pair<unsigned, std::vector<unsigned>>> by_prime;
  for (unsigned f : g.factors) {
    unsigned p = prime_power_base(f);
    unsigned e = prime_exponent(f, p);
    auto it = std::find_if(by_prime.begin(), by_prime.end(),
                           [&](const auto& pr) { return pr.first == p; });
    if (it == by_prime.end())
      by_prime.push_back({p, {e}});
    else
      it->second.push_back(e);
  }
  unsigned long long total = 1;
  for (auto& [p, es] : by_prime) {
    std::sort(es.begin(), es.end());
    const size_t k = es.size();
    auto ppow = [&](unsigned long long e) {
      unsigned long long r = 1;
      while (e--) r *= p;
      return r;
    };
    std::vector<size_t> dk(k), ck(k);
    for (size_t i = 0; i < k; ++i) {
      size_t d = i, c = i;
      while (d + 1 < k && es[d + 1] == es[i]) ++d;
      while (c > 0 && es[c - 1] == es[i]) --c;
      dk[i] = d + 1;  // 1-based
      ck[i] = c + 1;
    }
    unsigned long long a = 1;
    for (size_t i = 0; i < k; ++i) a *= ppow(dk[i]) - ppow(i);
    for (size_t j = 0; j < k; ++j) a *= [&] {
      unsigned long long r = 1;
      for (size_t t = 0; t < k - dk[j]; ++t) r *= ppow(es[j]);
      return r;
    }();
    for (size_t i = 0; i < k; ++i) a *= [&] {
      unsigned long long r = 1;
      for (size_t t = 0; t < k - ck[i] + 1; ++t) r *= ppow(es[i] - 1);
      return r;
    }();
    total *= a;
  }
  return total;
}

}  // namespace holobrace
