#include "holobrace/brace.hpp"

#include <algorithm>
#include <stdexcept>

namespace holobrace {

bool is_regular(const LiftContext& ctx, const SubgroupRecord& rec) {
  const unsigned n = ctx.group.order;
  if (rec.order != n) return false;
  std::vector<uint32_t> ids = record_element_ids(ctx.pcgs, rec);
  std::vector<bool> hit(n, false);
  size_t covered = 0, fixing = 0;
  for (uint32_t id : ids) {
    unsigned img = ctx.pcgs.perm_of(id).img[0];
    if (!hit[img]) {
      hit[img] = true;
      ++covered;
    }
    if (img == 0) ++fixing;
  }
  // Transitive with |U| = |G| forces a trivial point stabilizer; the
  // stabilizer is checked directly anyway.
  return covered == n && fixing == 1;
}

Brace brace_from_regular(const LiftContext& ctx, const SubgroupRecord& rec) {
  if (!is_regular(ctx, rec)) throw std::invalid_argument("record is not a regular subgroup");
  const unsigned n = ctx.group.order;
  Brace b;
  b.group = ctx.group;
  b.origin_key = rec.key;
  b.add.assign(n, std::vector<uint8_t>(n));
  b.mul.assign(n, std::vector<uint8_t>(n));
  for (unsigned x = 0; x < n; ++x) {
    GroupElement ex = index_elem(ctx.group, x);
    for (unsigned y = 0; y < n; ++y)
      b.add[x][y] = static_cast<uint8_t>(elem_index(ctx.group, elem_add(ctx.group, ex, index_elem(ctx.group, y))));
  }
  for (uint32_t id : record_element_ids(ctx.pcgs, rec)) {
    const Perm& r = ctx.pcgs.perm_of(id);
    b.mul[r.img[0]] = r.img;
  }
  if (!verify_brace(b)) throw std::logic_error("regular subgroup produced an invalid brace");
  return b;
}

namespace {

bool is_group_table(const std::vector<std::vector<uint8_t>>& t) {
  const size_t n = t.size();
  // Identity 0.
  for (size_t x = 0; x < n; ++x)
    if (t[0][x] != x || t[x][0] != x) return false;
  // Latin square.
  for (size_t x = 0; x < n; ++x) {
    std::vector<bool> row(n, false), col(n, false);
    for (size_t y = 0; y < n; ++y) {
      if (row[t[x][y]] || col[t[y][x]]) return false;
      row[t[x][y]] = true;
      col[t[y][x]] = true;
    }
  }
  // Associativity.
  for (size_t x = 0; x < n; ++x)
    for (size_t y = 0; y < n; ++y)
      for (size_t z = 0; z < n; ++z)
        if (t[t[x][y]][z] != t[x][t[y][z]]) return false;
  return true;
}

}  // namespace

bool verify_brace(const Brace& b) {
  const size_t n = b.add.size();
  if (b.mul.size() != n || n != b.group.order) return false;
  if (!is_group_table(b.add) || !is_group_table(b.mul)) return false;
  // Additive table must be the declared abelian group.
  for (size_t x = 0; x < n; ++x)
    for (size_t y = 0; y < n; ++y)
      if (b.add[x][y] != b.add[y][x]) return false;
  // Negation table.
  std::vector<unsigned> neg(n);
  for (size_t x = 0; x < n; ++x)
    for (size_t y = 0; y < n; ++y)
      if (b.add[x][y] == 0) neg[x] = static_cast<unsigned>(y);
  // x(y+z) = xy - x + xz
  for (size_t x = 0; x < n; ++x)
    for (size_t y = 0; y < n; ++y)
      for (size_t z = 0; z < n; ++z) {
        unsigned lhs = b.mul[x][b.add[y][z]];
        unsigned rhs = b.add[b.add[b.mul[x][y]][neg[x]]][b.mul[x][z]];
        if (lhs != rhs) return false;
      }
  return true;
}

BraceFingerprint fingerprint(const Brace& b) {
  const unsigned n = static_cast<unsigned>(b.mul.size());
  const auto& t = b.mul;
  BraceFingerprint f;

  std::vector<unsigned> inv(n);
  for (unsigned x = 0; x < n; ++x)
    for (unsigned y = 0; y < n; ++y)
      if (t[x][y] == 0) inv[x] = y;

  // Element orders.
  for (unsigned x = 0; x < n; ++x) {
    unsigned ord = 1, cur = x;
    while (cur != 0) {
      cur = t[cur][x];
      ++ord;
    }
    f.order_multiset.push_back(ord);
  }
  std::sort(f.order_multiset.begin(), f.order_multiset.end());

  // Center.
  for (unsigned x = 0; x < n; ++x) {
    bool central = true;
    for (unsigned y = 0; y < n && central; ++y) central = t[x][y] == t[y][x];
    if (central) ++f.center_order;
  }

  // Derived subgroup: closure of all commutators.
  std::vector<bool> in_d(n, false);
  std::vector<unsigned> frontier;
  in_d[0] = true;
  std::vector<unsigned> members = {0};
  for (unsigned x = 0; x < n; ++x)
    for (unsigned y = 0; y < n; ++y) {
      unsigned c = t[t[t[inv[x]][inv[y]]][x]][y];
      if (!in_d[c]) {
        in_d[c] = true;
        members.push_back(c);
        frontier.push_back(c);
      }
    }
  while (!frontier.empty()) {
    unsigned a = frontier.back();
    frontier.pop_back();
    for (size_t i = 0; i < members.size(); ++i) {
      unsigned c = t[a][members[i]];
      if (!in_d[c]) {
        in_d[c] = true;
        members.push_back(c);
        frontier.push_back(c);
      }
    }
  }
  f.derived_order = static_cast<unsigned>(members.size());

  // Abelianization invariants by prime-power order counting in the
  // quotient group table.
  std::vector<int> coset(n, -1);
  std::vector<unsigned> reps;
  for (unsigned x = 0; x < n; ++x) {
    if (coset[x] >= 0) continue;
    unsigned c = static_cast<unsigned>(reps.size());
    for (unsigned m : members) coset[t[x][m]] = static_cast<int>(c);
    reps.push_back(x);
  }
  const unsigned qn = static_cast<unsigned>(reps.size());
  std::vector<std::vector<uint8_t>> qt(qn, std::vector<uint8_t>(qn));
  for (unsigned i = 0; i < qn; ++i)
    for (unsigned j = 0; j < qn; ++j) qt[i][j] = static_cast<uint8_t>(coset[t[reps[i]][reps[j]]]);
  // reps[0] = 0 is the identity coset.
  for (unsigned p = 2; p <= qn; ++p) {
    if (qn % p != 0) continue;
    bool prime = true;
    for (unsigned d = 2; d * d <= p; ++d)
      if (p % d == 0) prime = false;
    if (!prime) continue;
    // count elements of order dividing p^j to recover the type.
    std::vector<unsigned> counts;  // counts[j] = #{x : x^(p^j) = 1}
    counts.push_back(1);
    for (unsigned j = 1;; ++j) {
      unsigned long long pj = 1;
      for (unsigned i = 0; i < j; ++i) pj *= p;
      unsigned cnt = 0;
      for (unsigned x = 0; x < qn; ++x) {
        // x^(p^j) in the (abelian) quotient by square-and-multiply
        unsigned cur = 0, base = x;
        unsigned long long k = pj;
        while (k) {
          if (k & 1) cur = qt[cur][base];
          base = qt[base][base];
          k >>= 1;
        }
        if (cur == 0) ++cnt;
      }
      counts.push_back(cnt);
      if (cnt == counts[j - 1]) break;
    }
    // counts[j] = p^{sum_i min(j, e_i)}; recover multiset {e_i}.
    std::vector<unsigned> logs;
    for (unsigned c : counts) {
      unsigned l = 0;
      while (c > 1) {
        c /= p;
        ++l;
      }
      logs.push_back(l);
    }
    for (size_t j = 1; j + 1 < logs.size(); ++j) {
      unsigned at_least_j = logs[j] - logs[j - 1];      // #{i : e_i >= j}
      unsigned at_least_j1 = logs[j + 1] - logs[j];     // #{i : e_i >= j+1}
      unsigned exactly_j = at_least_j - at_least_j1;
      for (unsigned c = 0; c < exactly_j; ++c) {
        unsigned pw = 1;
        for (unsigned i = 0; i < j; ++i) pw *= p;
        f.abelianization.push_back(pw);
      }
    }
    if (logs.size() >= 2) {
      unsigned top = logs[logs.size() - 1] - logs[logs.size() - 2];
      (void)top;  // zero by the stopping rule
    }
  }
  std::sort(f.abelianization.begin(), f.abelianization.end());
  return f;
}

std::string fingerprint_string(const BraceFingerprint& f) {
  std::string s = "orders=[";
  for (size_t i = 0; i < f.order_multiset.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(f.order_multiset[i]);
  }
  s += "] ab=[";
  for (size_t i = 0; i < f.abelianization.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(f.abelianization[i]);
  }
  s += "] center=" + std::to_string(f.center_order);
  s += " derived=" + std::to_string(f.derived_order);
  return s;
}

std::string export_braces(const std::vector<Brace>& braces) {
  std::string out;
  for (size_t i = 0; i < braces.size(); ++i) {
    const Brace& b = braces[i];
    if (i) out += '\n';
    out += "brace " + group_descriptor(b.group) + " ";
    // Origin key rendered as the shard record line ("m:v1,...,vm").
    const std::string& k = b.origin_key;
    uint64_t m = 0;
    for (int by = 0; by < 8; ++by) m = (m << 8) | static_cast<uint8_t>(k[by]);
    out += std::to_string(m) + ":";
    for (uint64_t r = 0; r < m; ++r) {
      uint64_t v = 0;
      for (int by = 0; by < 8; ++by) v = (v << 8) | static_cast<uint8_t>(k[8 * (r + 1) + by]);
      if (r) out += ',';
      out += std::to_string(v);
    }
    out += '\n';
    for (unsigned x = 0; x < b.group.order; ++x) {
      for (unsigned y = 0; y < b.group.order; ++y) {
        if (y) out += ' ';
        out += std::to_string(b.mul[x][y]);
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace holobrace
