#include "holobrace/lifting.hpp"

#include <algorithm>
#include <cstdlib>
#include <unordered_map>
#include <unordered_set>

namespace holobrace {

namespace {

uint64_t hash_bytes(const uint8_t* p, size_t n) {
  uint64_t h = 1469598103934665603ull;
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::string perm_bytes(const Perm& p) {
  return std::string(reinterpret_cast<const char*>(p.img.data()), p.img.size());
}

// --- tiny GF(p) helpers -------------------------------------------------

using GFVec = std::vector<uint8_t>;

struct GFMat {
  unsigned p = 2;
  unsigned n = 0;  // square n x n
  std::vector<uint8_t> a;

  static GFMat zero(unsigned p, unsigned n) {
    GFMat m;
    m.p = p;
    m.n = n;
    m.a.assign(static_cast<size_t>(n) * n, 0);
    return m;
  }
  static GFMat identity(unsigned p, unsigned n) {
    GFMat m = zero(p, n);
    for (unsigned i = 0; i < n; ++i) m.a[i * n + i] = 1;
    return m;
  }
  uint8_t& at(unsigned r, unsigned c) { return a[r * n + c]; }
  uint8_t at(unsigned r, unsigned c) const { return a[r * n + c]; }
  bool is_identity() const {
    for (unsigned i = 0; i < n; ++i)
      for (unsigned j = 0; j < n; ++j)
        if (at(i, j) != (i == j ? 1 : 0)) return false;
    return true;
  }
};

GFMat mat_mul(const GFMat& x, const GFMat& y) {
  GFMat r = GFMat::zero(x.p, x.n);
  for (unsigned i = 0; i < x.n; ++i)
    for (unsigned k = 0; k < x.n; ++k) {
      uint8_t v = x.at(i, k);
      if (!v) continue;
      for (unsigned j = 0; j < x.n; ++j)
        r.at(i, j) = static_cast<uint8_t>((r.at(i, j) + v * y.at(k, j)) % x.p);
    }
  return r;
}

GFVec mat_vec(const GFMat& m, const GFVec& v) {
  GFVec r(m.n, 0);
  for (unsigned i = 0; i < m.n; ++i) {
    unsigned acc = 0;
    for (unsigned j = 0; j < m.n; ++j) acc += m.at(i, j) * v[j];
    r[i] = static_cast<uint8_t>(acc % m.p);
  }
  return r;
}

// Reduces v in place against RREF rows (pivot = lead offset); returns
// true when the residue is zero, i.e. v lies in the row span.
bool reduce_by_rows(GFVec& v, const std::vector<GFVec>& rows, unsigned p) {
  for (const GFVec& r : rows) {
    size_t pivot = 0;
    while (pivot < r.size() && r[pivot] == 0) ++pivot;
    if (pivot == r.size()) continue;
    unsigned c = v[pivot];
    if (!c) continue;
    for (size_t j = 0; j < v.size(); ++j)
      v[j] = static_cast<uint8_t>((v[j] + (p - c) * r[j]) % p);
  }
  for (uint8_t x : v)
    if (x) return false;
  return true;
}

// --- lightweight perm index for the ambient (sylow-mode) table ---------

uint32_t lookup_perm(const std::vector<Perm>& elems, const std::vector<uint32_t>& table,
                     uint64_t mask, const Perm& p) {
  uint64_t h = hash_bytes(p.img.data(), p.img.size()) & mask;
  while (true) {
    uint32_t id = table[h];
    if (id == UINT32_MAX) return UINT32_MAX;
    if (elems[id].img == p.img) return id;
    h = (h + 1) & mask;
  }
}

// --- sylow subgroup for the insoluble-holomorph p-group fallback --------

PermGroup sylow_subgroup(const PermGroup& s, unsigned p, size_t cap) {
  unsigned long long target = 1;
  {
    unsigned long long o = s.order();
    while (o % p == 0) {
      o /= p;
      target *= p;
    }
  }
  std::vector<Perm> elems = s.elements(cap);
  std::sort(elems.begin(), elems.end());
  PermGroup cur(s.degree());
  while (cur.order() < target) {
    bool grown = false;
    for (const Perm& x : elems) {
      if (x.is_identity()) continue;
      unsigned o = perm_order(x);
      while (o % p == 0) o /= p;
      if (o != 1) continue;
      if (cur.contains(x) || !cur.is_normalized_by(x)) continue;
      cur.add_generator(x);
      grown = true;
      break;
    }
    if (!grown) throw std::logic_error("sylow subgroup search stalled");
  }
  return cur;
}

std::vector<SubgroupRecord> fuse_records(const Pcgs& pcgs, const std::vector<SubgroupRecord>& cands,
                                         const std::vector<Perm>& gens, size_t max_orbit) {
  std::unordered_map<std::string, size_t> index;
  for (size_t i = 0; i < cands.size(); ++i) index.emplace(cands[i].key, i);
  std::vector<Perm> inv_gens;
  inv_gens.reserve(gens.size());
  for (const Perm& g : gens) inv_gens.push_back(inverse(g));
  std::vector<bool> claimed(cands.size(), false);
  std::vector<SubgroupRecord> reps;
  for (size_t i = 0; i < cands.size(); ++i) {
    if (claimed[i]) continue;
    reps.push_back(cands[i]);
    // BFS orbit; candidates are closed under this conjugation action.
    std::vector<SubgroupRecord> queue = {cands[i]};
    std::unordered_set<std::string> seen = {cands[i].key};
    claimed[i] = true;
    for (size_t h = 0; h < queue.size(); ++h) {
      const SubgroupRecord cur = queue[h];  // copy: queue grows during the loop
      for (size_t gi = 0; gi < gens.size(); ++gi) {
        SubgroupRecord nxt = conjugate_record(pcgs, cur, gens[gi], inv_gens[gi]);
        if (seen.count(nxt.key)) continue;
        if (seen.size() >= max_orbit)
          throw OrbitOverflow("fusion orbit exceeds HOLOBRACE_MAX_ORBIT");
        auto it = index.find(nxt.key);
        if (it == index.end())
          throw std::logic_error("fusion orbit left the candidate set");
        claimed[it->second] = true;
        seen.insert(nxt.key);
        queue.push_back(std::move(nxt));
      }
    }
  }
  return reps;
}

}  // namespace

EngineOptions EngineOptions::from_env() {
  EngineOptions o;
  if (const char* v = std::getenv("HOLOBRACE_MAX_ORBIT")) o.max_orbit = std::strtoull(v, nullptr, 10);
  if (const char* v = std::getenv("HOLOBRACE_MAX_GROUP")) o.max_group = std::strtoull(v, nullptr, 10);
  return o;
}

uint32_t LiftContext::ambient_id(const Perm& p) const {
  return lookup_perm(ambient_elems, ambient_table, ambient_mask, p);
}

std::string LiftContext::series_fingerprint() const {
  std::string all;
  for (size_t t = 0; t <= series.layer_count(); ++t) all += kernel_record(pcgs, t).key;
  uint64_t h = hash_bytes(reinterpret_cast<const uint8_t*>(all.data()), all.size());
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

SubgroupRecord LiftContext::translation_record() const {
  if (group.order == 1) return full_record(pcgs);
  return igs_from_perms(pcgs, hol.translation_gens);
}

bool prune_ok(const LiftContext& ctx, const SubgroupRecord& rec, size_t t) {
  const unsigned long long n = ctx.group.order;
  unsigned long long quotient = rec.order / ctx.pcgs.kernel_order(t);
  if (n % quotient != 0) return false;
  if (rec.order < n) return false;  // reachability: n / quotient <= |N_t|
  // The preimage must act transitively (surjective projection prune).
  std::vector<bool> seen(ctx.group.order, false);
  std::vector<unsigned> frontier = {0};
  seen[0] = true;
  size_t count = 1;
  while (!frontier.empty() && count < ctx.group.order) {
    unsigned x = frontier.back();
    frontier.pop_back();
    for (uint32_t rid : rec.row_ids) {
      unsigned y = ctx.pcgs.perm_of(rid).img[x];
      if (!seen[y]) {
        seen[y] = true;
        ++count;
        frontier.push_back(y);
      }
    }
  }
  return count == ctx.group.order;
}

std::vector<std::vector<std::vector<uint8_t>>> all_subspaces(unsigned d, unsigned p) {
  std::vector<std::vector<GFVec>> out;
  for (unsigned k = 0; k <= d; ++k) {
    // Pivot column subsets in lexicographic order.
    std::vector<unsigned> pivots(k);
    for (unsigned i = 0; i < k; ++i) pivots[i] = i;
    while (true) {
      // Free positions: (row i, column j) with j > pivots[i], j not a pivot.
      std::vector<std::pair<unsigned, unsigned>> free_pos;
      std::vector<bool> is_pivot(d, false);
      for (unsigned c : pivots) is_pivot[c] = true;
      for (unsigned i = 0; i < k; ++i)
        for (unsigned j = pivots[i] + 1; j < d; ++j)
          if (!is_pivot[j]) free_pos.push_back({i, j});
      std::vector<uint8_t> assign(free_pos.size(), 0);
      while (true) {
        std::vector<GFVec> rows(k, GFVec(d, 0));
        for (unsigned i = 0; i < k; ++i) rows[i][pivots[i]] = 1;
        for (size_t f = 0; f < free_pos.size(); ++f)
          rows[free_pos[f].first][free_pos[f].second] = assign[f];
        out.push_back(rows);
        size_t f = 0;
        while (f < assign.size() && assign[f] == p - 1) assign[f++] = 0;
        if (f == assign.size()) break;
        ++assign[f];
      }
      // Next pivot combination.
      if (k == 0) break;
      int i = static_cast<int>(k) - 1;
      while (i >= 0 && pivots[i] == d - k + i) --i;
      if (i < 0) break;
      ++pivots[i];
      for (unsigned j = i + 1; j < k; ++j) pivots[j] = pivots[j - 1] + 1;
    }
  }
  return out;
}

namespace {

// Record over N_t from pure layer-t rows (RREF) and the kernel tail.
SubgroupRecord subspace_record(const Pcgs& pcgs, size_t t, const std::vector<GFVec>& rows) {
  const auto& layer = pcgs.layers()[t - 1];
  std::vector<uint32_t> ids;
  ids.reserve(rows.size() + pcgs.length() - pcgs.pos_limit(t));
  for (const GFVec& r : rows) {
    uint64_t id = 0;
    for (unsigned i = 0; i < layer.rank; ++i)
      id += static_cast<uint64_t>(r[i]) * pcgs.place(layer.first_pos + i);
    ids.push_back(static_cast<uint32_t>(id));
  }
  for (size_t j = pcgs.pos_limit(t); j < pcgs.length(); ++j)
    ids.push_back(static_cast<uint32_t>(pcgs.place(j)));
  return record_from_canonical_rows(pcgs, std::move(ids));
}

}  // namespace

std::vector<std::pair<SubgroupRecord, std::vector<std::vector<uint8_t>>>> invariant_submodules(
    const Pcgs& pcgs, const SubgroupRecord& parent, size_t t) {
  const auto& layer = pcgs.layers()[t - 1];
  const unsigned d = layer.rank, p = layer.prime;

  // Conjugation action of the parent rows on the layer factor.
  std::vector<GFMat> mats;
  for (uint32_t rid : parent.row_ids) {
    const Perm& w = pcgs.perm_of(rid);
    Perm winv = inverse(w);
    GFMat m = GFMat::zero(p, d);
    for (unsigned i = 0; i < d; ++i) {
      uint32_t x = pcgs.id_of(mul(mul(w, pcgs.gen(layer.first_pos + i)), winv));
      for (unsigned r = 0; r < d; ++r) m.at(r, i) = static_cast<uint8_t>(pcgs.digit(x, layer.first_pos + r));
    }
    if (!m.is_identity()) mats.push_back(std::move(m));
  }

  std::vector<std::pair<SubgroupRecord, std::vector<GFVec>>> out;
  for (const auto& rows : all_subspaces(d, p)) {
    if (rows.size() == d) continue;  // proper subspaces only
    bool invariant = true;
    for (const GFVec& r : rows) {
      for (const GFMat& m : mats) {
        GFVec img = mat_vec(m, r);
        if (!reduce_by_rows(img, rows, p)) {
          invariant = false;
          break;
        }
      }
      if (!invariant) break;
    }
    if (invariant) out.push_back({subspace_record(pcgs, t, rows), rows});
  }
  return out;
}

std::vector<SubgroupRecord> complements(const Pcgs& pcgs, const SubgroupRecord& parent,
                                        const SubgroupRecord& b_record,
                                        const std::vector<std::vector<uint8_t>>& b_rows, size_t t) {
  const auto& layer = pcgs.layers()[t - 1];
  const unsigned d = layer.rank, p = layer.prime;

  // Module coordinates for M = N_{t-1}/B: reduce layer coordinates by
  // the B rows, keep the non-pivot offsets.
  std::vector<bool> is_pivot(d, false);
  for (const GFVec& r : b_rows) {
    size_t pivot = 0;
    while (pivot < d && r[pivot] == 0) ++pivot;
    is_pivot[pivot] = true;
  }
  std::vector<unsigned> free_off;
  for (unsigned i = 0; i < d; ++i)
    if (!is_pivot[i]) free_off.push_back(i);
  const unsigned e = static_cast<unsigned>(free_off.size());
  if (e == 0) throw std::logic_error("complement module is trivial; B must be proper");

  auto vec_of = [&](uint32_t id) {
    GFVec full(d);
    for (unsigned i = 0; i < d; ++i)
      full[i] = static_cast<uint8_t>(pcgs.digit(id, layer.first_pos + i));
    reduce_by_rows(full, b_rows, p);
    GFVec v(e);
    for (unsigned i = 0; i < e; ++i) v[i] = full[free_off[i]];
    return v;
  };
  auto lift_id = [&](const GFVec& v) {
    uint64_t id = 0;
    for (unsigned i = 0; i < e; ++i)
      id += static_cast<uint64_t>(v[i]) * pcgs.place(layer.first_pos + free_off[i]);
    return static_cast<uint32_t>(id);
  };

  PcPresentation pres = pc_presentation(pcgs, parent, t - 1);
  const size_t m = pres.ngens;
  if (m == 0) throw std::logic_error("complements need a nontrivial parent quotient");

  std::vector<Perm> heads(m), heads_inv(m);
  for (size_t j = 0; j < m; ++j) {
    heads[j] = pcgs.perm_of(parent.row_ids[j]);
    heads_inv[j] = inverse(heads[j]);
  }
  // Module action matrices of the heads and their inverses.
  std::vector<GFMat> rho_pos(m), rho_neg(m);
  for (size_t j = 0; j < m; ++j) {
    GFMat mp = GFMat::zero(p, e), mn = GFMat::zero(p, e);
    for (unsigned i = 0; i < e; ++i) {
      Perm unit = pcgs.perm_of(lift_id([&] {
        GFVec u(e, 0);
        u[i] = 1;
        return u;
      }()));
      GFVec cp = vec_of(pcgs.id_of(mul(mul(heads[j], unit), heads_inv[j])));
      GFVec cn = vec_of(pcgs.id_of(mul(mul(heads_inv[j], unit), heads[j])));
      for (unsigned r = 0; r < e; ++r) {
        mp.at(r, i) = cp[r];
        mn.at(r, i) = cn[r];
      }
    }
    rho_pos[j] = std::move(mp);
    rho_neg[j] = std::move(mn);
  }

  // Each relation contributes e affine-linear equations over GF(p) in
  // the m*e unknown correction coordinates.
  const size_t ncols = m * e;
  std::vector<GFVec> eq_rows;
  std::vector<uint8_t> eq_rhs;
  for (const PcRelation& rel : pres.rels) {
    std::vector<std::pair<uint16_t, int>> letters;
    if (rel.is_power) {
      for (unsigned c = 0; c < pres.gen_primes[rel.j]; ++c) letters.push_back({rel.j, +1});
    } else {
      letters.push_back({rel.j, +1});
      letters.push_back({rel.k, +1});
      letters.push_back({rel.j, -1});
    }
    for (size_t i = rel.tail.size(); i-- > 0;)
      for (unsigned c = 0; c < rel.tail[i].second; ++c) letters.push_back({rel.tail[i].first, -1});

    Perm a(pcgs.degree());
    std::vector<GFMat> acc(m, GFMat::zero(p, e));
    GFMat ident = GFMat::identity(p, e);
    for (auto [s, sign] : letters) {
      const GFMat& r = sign > 0 ? rho_neg[s] : rho_pos[s];
      if (sign > 0) {
        a = mul(a, heads[s]);
        if (!r.is_identity())
          for (auto& A : acc) A = mat_mul(r, A);
        for (unsigned i = 0; i < e; ++i)
          for (unsigned j2 = 0; j2 < e; ++j2)
            acc[s].at(i, j2) = static_cast<uint8_t>((acc[s].at(i, j2) + ident.at(i, j2)) % p);
      } else {
        a = mul(a, heads_inv[s]);
        if (!r.is_identity())
          for (auto& A : acc) A = mat_mul(r, A);
        for (unsigned i = 0; i < e; ++i)
          for (unsigned j2 = 0; j2 < e; ++j2)
            acc[s].at(i, j2) = static_cast<uint8_t>((acc[s].at(i, j2) + (p - 1) * r.at(i, j2)) % p);
      }
    }
    uint32_t aid = pcgs.id_of(a);
    if (aid == UINT32_MAX || pcgs.lead(aid) < pcgs.pos_limit(t - 1))
      throw std::logic_error("relation residue escaped the kernel");
    GFVec rhs = vec_of(aid);
    for (unsigned r = 0; r < e; ++r) {
      GFVec row(ncols, 0);
      for (size_t j = 0; j < m; ++j)
        for (unsigned c = 0; c < e; ++c) row[j * e + c] = acc[j].at(r, c);
      eq_rows.push_back(std::move(row));
      eq_rhs.push_back(static_cast<uint8_t>((p - rhs[r]) % p));
    }
  }

  // Gaussian elimination over GF(p) with augmented right-hand side.
  size_t rank = 0;
  std::vector<size_t> pivot_col;
  for (size_t col = 0; col < ncols && rank < eq_rows.size(); ++col) {
    size_t sel = rank;
    while (sel < eq_rows.size() && eq_rows[sel][col] == 0) ++sel;
    if (sel == eq_rows.size()) continue;
    std::swap(eq_rows[rank], eq_rows[sel]);
    std::swap(eq_rhs[rank], eq_rhs[sel]);
    // Normalize pivot to 1.
    unsigned inv = 1;
    for (unsigned u = 1; u < p; ++u)
      if (u * eq_rows[rank][col] % p == 1) inv = u;
    for (size_t j = 0; j < ncols; ++j)
      eq_rows[rank][j] = static_cast<uint8_t>(eq_rows[rank][j] * inv % p);
    eq_rhs[rank] = static_cast<uint8_t>(eq_rhs[rank] * inv % p);
    for (size_t r = 0; r < eq_rows.size(); ++r) {
      if (r == rank || eq_rows[r][col] == 0) continue;
      unsigned f = eq_rows[r][col];
      for (size_t j = 0; j < ncols; ++j)
        eq_rows[r][j] = static_cast<uint8_t>((eq_rows[r][j] + (p - f) * eq_rows[rank][j]) % p);
      eq_rhs[r] = static_cast<uint8_t>((eq_rhs[r] + (p - f) * eq_rhs[rank]) % p);
    }
    pivot_col.push_back(col);
    ++rank;
  }
  for (size_t r = rank; r < eq_rows.size(); ++r)
    if (eq_rhs[r] != 0) return {};  // inconsistent: non-split extension

  std::vector<bool> is_pivot_col(ncols, false);
  for (size_t c : pivot_col) is_pivot_col[c] = true;
  std::vector<size_t> free_cols;
  for (size_t c = 0; c < ncols; ++c)
    if (!is_pivot_col[c]) free_cols.push_back(c);

  unsigned long long count = 1;
  for (size_t i = 0; i < free_cols.size(); ++i) {
    count *= p;
    if (count > (1ull << 20)) throw std::runtime_error("cocycle solution space too large");
  }

  std::vector<SubgroupRecord> out;
  std::vector<uint8_t> free_val(free_cols.size(), 0);
  while (true) {
    GFVec sol(ncols, 0);
    for (size_t i = 0; i < free_cols.size(); ++i) sol[free_cols[i]] = free_val[i];
    for (size_t r = rank; r-- > 0;) {
      unsigned v = eq_rhs[r];
      for (size_t j = pivot_col[r] + 1; j < ncols; ++j) v += (p - eq_rows[r][j] % p) * sol[j];
      sol[pivot_col[r]] = static_cast<uint8_t>(v % p);
    }
    std::vector<uint32_t> gen_ids;
    for (size_t j = 0; j < m; ++j) {
      GFVec cj(sol.begin() + j * e, sol.begin() + (j + 1) * e);
      gen_ids.push_back(pcgs.id_of(mul(heads[j], pcgs.perm_of(lift_id(cj)))));
    }
    for (uint32_t rid : b_record.row_ids) gen_ids.push_back(rid);
    SubgroupRecord v_rec = igs(pcgs, gen_ids);
    unsigned long long expect =
        parent.order / pcgs.kernel_order(t - 1) * b_record.order;
    if (v_rec.order != expect) throw std::logic_error("complement has the wrong order");
    out.push_back(std::move(v_rec));

    size_t f = 0;
    while (f < free_val.size() && free_val[f] == p - 1) free_val[f++] = 0;
    if (f == free_val.size()) break;
    ++free_val[f];
  }
  return out;
}

SubgroupOrbit conjugation_orbit(const Pcgs& pcgs, const SubgroupRecord& start,
                                const std::vector<Perm>& gens, unsigned long long group_order,
                                size_t max_orbit) {
  SubgroupOrbit res;
  std::unordered_map<std::string, size_t> index;
  res.members.push_back(start);
  res.transversal.push_back(Perm(pcgs.degree()));
  index.emplace(start.key, 0);
  std::vector<Perm> inv_gens;
  for (const Perm& g : gens) inv_gens.push_back(inverse(g));
  std::vector<Perm> schreier;
  std::unordered_set<std::string> schreier_seen;
  for (size_t i = 0; i < res.members.size(); ++i) {
    for (size_t gi = 0; gi < gens.size(); ++gi) {
      SubgroupRecord nxt = conjugate_record(pcgs, res.members[i], gens[gi], inv_gens[gi]);
      auto it = index.find(nxt.key);
      if (it == index.end()) {
        if (res.members.size() >= max_orbit)
          throw OrbitOverflow("conjugation orbit exceeds HOLOBRACE_MAX_ORBIT");
        index.emplace(nxt.key, res.members.size());
        res.transversal.push_back(mul(gens[gi], res.transversal[i]));
        res.members.push_back(std::move(nxt));
      } else {
        Perm sg = mul(inverse(res.transversal[it->second]), mul(gens[gi], res.transversal[i]));
        if (!sg.is_identity() && schreier_seen.insert(perm_bytes(sg)).second)
          schreier.push_back(std::move(sg));
      }
    }
  }
  if (group_order % res.members.size() != 0)
    throw std::logic_error("orbit size does not divide the group order");
  res.stab_order = group_order / res.members.size();
  PermGroup probe(pcgs.degree());
  std::vector<Perm> small;
  for (const Perm& sg : schreier) {
    if (probe.order() == res.stab_order) break;
    if (probe.add_generator(sg)) small.push_back(sg);
  }
  if (probe.order() != res.stab_order)
    throw std::logic_error("schreier generators fail to generate the stabilizer");
  if (small.empty()) small.push_back(Perm(pcgs.degree()));
  res.stab_gens = std::move(small);
  return res;
}

std::vector<SubgroupRecord> lift_parent(const LiftContext& ctx, const SubgroupRecord& parent, size_t t) {
  const Pcgs& pcgs = ctx.pcgs;
  std::vector<SubgroupRecord> out;
  if (prune_ok(ctx, parent, t)) out.push_back(parent);  // case 1: full preimage

  const unsigned long long n = ctx.group.order;
  const unsigned long long q = parent.order / pcgs.kernel_order(t - 1);
  std::vector<SubgroupRecord> cands;
  for (auto& [b_rec, b_rows] : invariant_submodules(pcgs, parent, t)) {
    unsigned long long v_order = q * b_rec.order;
    unsigned long long v_quot = v_order / pcgs.kernel_order(t);
    if (v_order < n || n % v_quot != 0) continue;
    for (SubgroupRecord& v : complements(pcgs, parent, b_rec, b_rows, t))
      if (prune_ok(ctx, v, t)) cands.push_back(std::move(v));
  }
  if (!cands.empty()) {
    std::sort(cands.begin(), cands.end(),
              [](const SubgroupRecord& a, const SubgroupRecord& b) { return a.key < b.key; });
    SubgroupOrbit orbit =
        conjugation_orbit(pcgs, parent, ctx.engine_gens, ctx.engine_pg.order(), ctx.opts.max_orbit);
    std::vector<SubgroupRecord> reps = fuse_records(pcgs, cands, orbit.stab_gens, ctx.opts.max_orbit);
    for (SubgroupRecord& r : reps) out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(),
            [](const SubgroupRecord& a, const SubgroupRecord& b) { return a.key < b.key; });
  return out;
}

std::vector<std::pair<SubgroupRecord, ClassProvenance>> step_layer_traced(
    const LiftContext& ctx, const std::vector<SubgroupRecord>& parents, size_t t) {
  const std::string kernel_key = kernel_record(ctx.pcgs, t - 1).key;
  std::vector<std::pair<SubgroupRecord, ClassProvenance>> out;
  for (const SubgroupRecord& parent : parents) {
    if (parent.key == kernel_key) {
      for (const SubgroupRecord& k : ctx.kernel_classes[t])
        out.push_back({k, {parent.key, 2}});
    } else {
      for (SubgroupRecord& r : lift_parent(ctx, parent, t)) {
        int tag = r.key == parent.key ? 1 : 3;
        out.push_back({std::move(r), {parent.key, tag}});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first.key < b.first.key; });
  for (size_t i = 0; i + 1 < out.size(); ++i)
    if (out[i].first.key == out[i + 1].first.key)
      throw std::logic_error("duplicate class keys in a layer");
  return out;
}

std::vector<SubgroupRecord> step_layer(const LiftContext& ctx,
                                       const std::vector<SubgroupRecord>& parents, size_t t) {
  std::vector<SubgroupRecord> out;
  for (auto& [rec, prov] : step_layer_traced(ctx, parents, t)) out.push_back(std::move(rec));
  return out;
}

std::vector<SubgroupRecord> ambient_fuse(const LiftContext& ctx,
                                         const std::vector<SubgroupRecord>& records) {
  if (!ctx.sylow_mode || records.empty()) return records;
  std::vector<Perm> inv_gens;
  for (const Perm& g : ctx.ambient_gens) inv_gens.push_back(inverse(g));

  auto set_key = [&](const std::vector<uint32_t>& ids) {
    std::string s;
    s.reserve(ids.size() * 4);
    for (uint32_t id : ids)
      for (int b = 0; b < 4; ++b) s.push_back(static_cast<char>((id >> (8 * b)) & 0xff));
    return s;
  };
  auto record_ids = [&](const SubgroupRecord& rec) {
    std::vector<uint32_t> ids;
    for (uint32_t pid : record_element_ids(ctx.pcgs, rec)) {
      uint32_t aid = ctx.ambient_id(ctx.pcgs.perm_of(pid));
      if (aid == UINT32_MAX) throw std::logic_error("record element missing from the ambient table");
      ids.push_back(aid);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  };

  std::unordered_map<std::string, size_t> start_of;
  std::vector<std::vector<uint32_t>> start_sets(records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    start_sets[i] = record_ids(records[i]);
    start_of.emplace(set_key(start_sets[i]), i);
  }
  std::vector<bool> claimed(records.size(), false);
  std::vector<SubgroupRecord> out;
  for (size_t i = 0; i < records.size(); ++i) {
    if (claimed[i]) continue;
    claimed[i] = true;
    out.push_back(records[i]);
    std::vector<std::vector<uint32_t>> queue = {start_sets[i]};
    std::unordered_set<std::string> seen = {set_key(start_sets[i])};
    for (size_t h = 0; h < queue.size(); ++h) {
      std::vector<uint32_t> cur = queue[h];
      for (size_t gi = 0; gi < ctx.ambient_gens.size(); ++gi) {
        std::vector<uint32_t> nxt;
        nxt.reserve(cur.size());
        for (uint32_t id : cur) {
          Perm cp = mul(mul(ctx.ambient_gens[gi], ctx.ambient_elems[id]), inv_gens[gi]);
          nxt.push_back(ctx.ambient_id(cp));
        }
        std::sort(nxt.begin(), nxt.end());
        std::string k = set_key(nxt);
        if (!seen.insert(k).second) continue;
        if (seen.size() > ctx.opts.max_orbit)
          throw OrbitOverflow("ambient fusion orbit exceeds HOLOBRACE_MAX_ORBIT");
        auto it = start_of.find(k);
        if (it != start_of.end()) claimed[it->second] = true;
        queue.push_back(std::move(nxt));
      }
    }
  }
  return out;
}

RunResult run_layers(const LiftContext& ctx) {
  RunResult res;
  std::vector<SubgroupRecord> cur = {full_record(ctx.pcgs)};
  if (!prune_ok(ctx, cur[0], 0))
    throw std::logic_error("the full engine group fails its own prune");
  res.stats.push_back({0, 1, 1});
  for (size_t t = 1; t <= ctx.layer_count(); ++t) {
    cur = step_layer(ctx, cur, t);
    res.stats.push_back({t, cur.size(), 1});
  }
  res.classes = ambient_fuse(ctx, cur);
  if (!res.stats.empty()) res.stats.back().classes = res.classes.size();
  return res;
}

LiftContext LiftContext::build(const AbelianGroup& g,
                               const std::optional<std::vector<std::vector<Perm>>>& series_override,
                               const EngineOptions& opts) {
  LiftContext ctx;
  ctx.group = g;
  ctx.opts = opts;
  ctx.hol = make_holomorph(g, opts.max_abelian);
  if (ctx.hol.order > opts.max_group)
    throw std::runtime_error("holomorph order " + std::to_string(ctx.hol.order) +
                             " exceeds the element-table bound");
  const size_t degree = std::max<unsigned>(g.order, 1);
  PermGroup hol_pg = PermGroup::from_generators_with_order(degree, ctx.hol.generators, ctx.hol.order);

  if (is_soluble(hol_pg)) {
    ctx.engine_pg = hol_pg;
  } else {
    // Insoluble holomorph: when |G| = p^a every regular subgroup is a
    // p-group, hence conjugate into a Sylow p-subgroup, which is
    // soluble; enumerate there and fuse classes under the holomorph.
    unsigned p = 0;
    {
      unsigned o = g.order;
      for (unsigned q = 2; q <= o; ++q)
        if (o % q == 0) {
          p = q;
          break;
        }
      unsigned r = g.order;
      while (r % p == 0) r /= p;
      if (r != 1)
        throw std::runtime_error(
            "holomorph is insoluble and |G| is not a prime power; the layered method does not apply");
    }
    ctx.sylow_mode = true;
    ctx.engine_pg = sylow_subgroup(hol_pg, p, opts.max_group);
    ctx.ambient_gens = hol_pg.small_generating_set();
    ctx.ambient_elems = hol_pg.elements(opts.max_group);
    std::sort(ctx.ambient_elems.begin(), ctx.ambient_elems.end());
    size_t cap = 1;
    while (cap < 2 * ctx.ambient_elems.size()) cap <<= 1;
    ctx.ambient_table.assign(cap, UINT32_MAX);
    ctx.ambient_mask = cap - 1;
    for (uint32_t id = 0; id < ctx.ambient_elems.size(); ++id) {
      uint64_t h = hash_bytes(ctx.ambient_elems[id].img.data(), degree) & ctx.ambient_mask;
      while (ctx.ambient_table[h] != UINT32_MAX) h = (h + 1) & ctx.ambient_mask;
      ctx.ambient_table[h] = id;
    }
  }
  ctx.engine_gens = ctx.engine_pg.small_generating_set();
  ctx.series = series_override ? series_from_members(ctx.engine_pg, *series_override)
                               : elementary_abelian_series(ctx.engine_pg);
  ctx.pcgs = Pcgs::build(ctx.engine_pg, ctx.series, opts.max_group);

  // Case-2 classes per layer: all subspaces of the factor, lifted over
  // N_t, pruned, fused under the engine group.
  ctx.kernel_classes.resize(ctx.layer_count() + 1);
  for (size_t t = 1; t <= ctx.layer_count(); ++t) {
    std::vector<SubgroupRecord> kept;
    for (const auto& rows : all_subspaces(ctx.series.ranks[t - 1], ctx.series.primes[t - 1])) {
      SubgroupRecord rec = subspace_record(ctx.pcgs, t, rows);
      if (prune_ok(ctx, rec, t)) kept.push_back(std::move(rec));
    }
    std::sort(kept.begin(), kept.end(),
              [](const SubgroupRecord& a, const SubgroupRecord& b) { return a.key < b.key; });
    ctx.kernel_classes[t] =
        fuse_records(ctx.pcgs, kept, ctx.engine_gens, ctx.opts.max_orbit);
  }
  return ctx;
}

}  // namespace holobrace
