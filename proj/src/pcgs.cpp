#include "holobrace/pcgs.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

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

unsigned inv_mod(unsigned c, unsigned p) {
  for (unsigned u = 1; u < p; ++u)
    if (u * c % p == 1) return u;
  throw std::logic_error("non-invertible leading coefficient");
}

void append_be64(std::string& s, uint64_t v) {
  for (int i = 7; i >= 0; --i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

size_t Pcgs::pos_limit(size_t t) const {
  size_t n = 0;
  for (size_t i = 0; i < t && i < layers_.size(); ++i) n += layers_[i].rank;
  return n;
}

unsigned long long Pcgs::kernel_order(size_t t) const {
  size_t lim = pos_limit(t);
  unsigned long long o = 1;
  for (size_t j = lim; j < length(); ++j) o *= rel_order_[j];
  return o;
}

void Pcgs::build_table() {
  size_t want = 2 * std::max<size_t>(elems_.size(), 1);
  size_t cap = 1;
  while (cap < want) cap <<= 1;
  table_.assign(cap, UINT32_MAX);
  mask_ = cap - 1;
  for (uint32_t id = 0; id < elems_.size(); ++id) {
    uint64_t h = hash_bytes(elems_[id].img.data(), degree_) & mask_;
    while (table_[h] != UINT32_MAX) h = (h + 1) & mask_;
    table_[h] = id;
  }
}

uint32_t Pcgs::id_of(const Perm& p) const {
  uint64_t h = hash_bytes(p.img.data(), degree_) & mask_;
  while (true) {
    uint32_t id = table_[h];
    if (id == UINT32_MAX) return UINT32_MAX;
    if (elems_[id].img == p.img) return id;
    h = (h + 1) & mask_;
  }
}

unsigned Pcgs::digit(uint32_t id, size_t pos) const {
  return static_cast<unsigned>((id / place_[pos]) % rel_order_[pos]);
}

size_t Pcgs::lead(uint32_t id) const {
  if (id == 0) return length();
  uint64_t v = id;
  size_t pos = 0;
  while (v % rel_order_[pos] == 0) {
    v /= rel_order_[pos];
    ++pos;
  }
  return pos;
}

std::vector<unsigned> Pcgs::exponent_vector(uint32_t id) const {
  std::vector<unsigned> e(length());
  uint64_t v = id;
  for (size_t j = 0; j < length(); ++j) {
    e[j] = static_cast<unsigned>(v % rel_order_[j]);
    v /= rel_order_[j];
  }
  return e;
}

std::vector<unsigned> Pcgs::exponent_vector(const Perm& p) const {
  uint32_t id = id_of(p);
  if (id == UINT32_MAX) throw std::invalid_argument("element is not in the group");
  return exponent_vector(id);
}

uint32_t Pcgs::id_from_exponents(const std::vector<unsigned>& e) const {
  if (e.size() != length()) throw std::invalid_argument("exponent vector length mismatch");
  uint64_t id = 0;
  for (size_t j = length(); j-- > 0;) {
    if (e[j] >= rel_order_[j]) throw std::invalid_argument("exponent exceeds relative order");
    id = id * rel_order_[j] + e[j];
  }
  return static_cast<uint32_t>(id);
}

Pcgs Pcgs::build(const PermGroup& s, const NormalSeries& series, size_t max_group) {
  if (s.order() > max_group)
    throw std::runtime_error("group order " + std::to_string(s.order()) +
                             " exceeds the element-table bound " + std::to_string(max_group));
  Pcgs ctx;
  ctx.degree_ = s.degree();

  for (size_t t = 1; t < series.members.size(); ++t) {
    const PermGroup& top = series.members[t - 1];
    const PermGroup& bot = series.members[t];
    unsigned p = series.primes[t - 1];
    unsigned d = series.ranks[t - 1];

    Layer layer;
    layer.prime = p;
    layer.rank = d;
    layer.first_pos = ctx.gens_.size();

    // Coset span of the elementary abelian factor top/bot, keyed by
    // canonical coset representatives.
    auto coset_key = [&](const Perm& x) {
      Perm r = bot.coset_min_rep(x);
      return std::string(reinterpret_cast<const char*>(r.img.data()), r.img.size());
    };
    std::unordered_map<std::string, size_t> span_index;
    std::vector<Perm> span_reps;
    span_reps.push_back(Perm(ctx.degree_));
    span_index[coset_key(span_reps[0])] = 0;

    for (const Perm& g : top.generators()) {
      std::string k = coset_key(g);
      if (span_index.count(k)) continue;
      ctx.gens_.push_back(g);
      ctx.rel_order_.push_back(p);
      ctx.layer_of_pos_.push_back(t - 1);
      // Extend the span by all multiples of the new basis element.
      std::vector<Perm> powers(p);
      powers[0] = Perm(ctx.degree_);
      for (unsigned c = 1; c < p; ++c) powers[c] = mul(powers[c - 1], g);
      size_t snapshot = span_reps.size();
      for (size_t i = 0; i < snapshot; ++i)
        for (unsigned c = 1; c < p; ++c) {
          Perm nrep = mul(span_reps[i], powers[c]);
          std::string nk = coset_key(nrep);
          if (span_index.count(nk))
            throw std::logic_error("factor span collision; series factor not elementary abelian?");
          span_index[nk] = span_reps.size();
          span_reps.push_back(std::move(nrep));
        }
    }
    unsigned long long expect = 1;
    for (unsigned i = 0; i < d; ++i) expect *= p;
    if (span_reps.size() != expect)
      throw std::logic_error("layer basis does not span the factor");
    ctx.layers_.push_back(layer);
  }

  const size_t L = ctx.gens_.size();
  ctx.place_.resize(L + 1);
  ctx.place_[0] = 1;
  for (size_t j = 0; j < L; ++j) ctx.place_[j + 1] = ctx.place_[j] * ctx.rel_order_[j];
  if (ctx.place_[L] != s.order())
    throw std::logic_error("relative orders do not multiply to |S|");

  // Enumerate all elements in normal-form order: the element id equals
  // the mixed-radix pack of its exponent vector.
  ctx.elems_.resize(ctx.place_[L]);
  ctx.elems_[0] = Perm(ctx.degree_);
  std::vector<unsigned> digits(L, 0);
  std::vector<Perm> suffix(L + 1, Perm(ctx.degree_));
  for (uint64_t id = 1; id < ctx.place_[L]; ++id) {
    size_t j = 0;
    while (digits[j] == ctx.rel_order_[j] - 1) {
      digits[j] = 0;
      ++j;
    }
    ++digits[j];
    suffix[j] = mul(ctx.gens_[j], suffix[j]);
    for (size_t i = 0; i < j; ++i) suffix[i] = suffix[j];
    ctx.elems_[id] = suffix[0];
  }
  ctx.build_table();
  return ctx;
}

std::string record_key(const std::vector<uint32_t>& row_ids) {
  std::string key;
  key.reserve(8 * (row_ids.size() + 1));
  append_be64(key, row_ids.size());
  for (uint32_t id : row_ids) append_be64(key, id);
  return key;
}

namespace {

struct Slot {
  uint32_t id = 0;
  Perm perm;
  std::vector<Perm> inv_pows;  // inv_pows[c-1] = perm^{-c}, 1 <= c < p
};

Slot make_slot(const Pcgs& ctx, uint32_t id, size_t d) {
  Slot s;
  s.id = id;
  s.perm = ctx.perm_of(id);
  unsigned p = ctx.prime_at(d);
  Perm inv = inverse(s.perm);
  s.inv_pows.resize(p - 1);
  s.inv_pows[0] = inv;
  for (unsigned c = 2; c < p; ++c) s.inv_pows[c - 1] = mul(s.inv_pows[c - 2], inv);
  return s;
}

// Reduces canonical rows so every row has zero entries at the leading
// positions of the later rows, then packages the record.
SubgroupRecord finalize_rows(const Pcgs& ctx, std::vector<uint32_t> row_ids) {
  const size_t m = row_ids.size();
  std::vector<uint16_t> leads(m);
  for (size_t i = 0; i < m; ++i) leads[i] = static_cast<uint16_t>(ctx.lead(row_ids[i]));
  for (size_t ti = m; ti-- > 0;) {
    for (size_t si = ti + 1; si < m; ++si) {
      unsigned c = ctx.digit(row_ids[ti], leads[si]);
      if (c == 0) continue;
      Perm reducer = perm_pow(inverse(ctx.perm_of(row_ids[si])), c);
      uint32_t nid = ctx.id_of(mul(ctx.perm_of(row_ids[ti]), reducer));
      row_ids[ti] = nid;
    }
  }
  SubgroupRecord rec;
  rec.row_ids = std::move(row_ids);
  rec.row_leads = std::move(leads);
  rec.order = 1;
  for (uint16_t d : rec.row_leads) rec.order *= ctx.prime_at(d);
  rec.key = record_key(rec.row_ids);
  return rec;
}

}  // namespace

SubgroupRecord igs(const Pcgs& ctx, const std::vector<uint32_t>& generator_ids) {
  const size_t L = ctx.length();
  std::vector<std::optional<Slot>> slots(L);
  std::vector<uint32_t> work(generator_ids.begin(), generator_ids.end());
  size_t filled = 0;
  while (!work.empty()) {
    uint32_t x = work.back();
    work.pop_back();
    while (x != 0) {
      size_t d = ctx.lead(x);
      unsigned c = ctx.digit(x, d);
      if (!slots[d]) {
        unsigned p = ctx.prime_at(d);
        unsigned u = inv_mod(c, p);
        uint32_t sid = ctx.id_of(perm_pow(ctx.perm_of(x), u));
        slots[d] = make_slot(ctx, sid, d);
        ++filled;
        const Perm& sp = slots[d]->perm;
        work.push_back(ctx.id_of(perm_pow(sp, p)));
        for (size_t e = 0; e < L; ++e) {
          if (e == d || !slots[e]) continue;
          const Perm& tp = slots[e]->perm;
          const Perm& ti = slots[e]->inv_pows[0];
          const Perm& si = slots[d]->inv_pows[0];
          work.push_back(ctx.id_of(conj(sp, tp)));
          work.push_back(ctx.id_of(conj(tp, sp)));
          work.push_back(ctx.id_of(conj(sp, ti)));
          work.push_back(ctx.id_of(conj(tp, si)));
        }
        // The unnormalized residue keeps sifting against the new slot.
        continue;
      }
      x = ctx.id_of(mul(slots[d]->inv_pows[c - 1], ctx.perm_of(x)));
    }
  }
  std::vector<uint32_t> rows;
  rows.reserve(filled);
  for (size_t d = 0; d < L; ++d)
    if (slots[d]) rows.push_back(slots[d]->id);
  return finalize_rows(ctx, std::move(rows));
}

SubgroupRecord igs_from_perms(const Pcgs& ctx, const std::vector<Perm>& gens) {
  std::vector<uint32_t> ids;
  ids.reserve(gens.size());
  for (const Perm& g : gens) {
    uint32_t id = ctx.id_of(g);
    if (id == UINT32_MAX) throw std::invalid_argument("generator is not an element of the group");
    ids.push_back(id);
  }
  return igs(ctx, ids);
}

SubgroupRecord record_from_canonical_rows(const Pcgs& ctx, std::vector<uint32_t> row_ids) {
  return finalize_rows(ctx, std::move(row_ids));
}

bool record_contains_id(const Pcgs& ctx, const SubgroupRecord& rec, uint32_t id) {
  uint32_t x = id;
  while (x != 0) {
    size_t d = ctx.lead(x);
    auto it = std::lower_bound(rec.row_leads.begin(), rec.row_leads.end(), d);
    if (it == rec.row_leads.end() || *it != d) return false;
    size_t idx = static_cast<size_t>(it - rec.row_leads.begin());
    unsigned c = ctx.digit(x, d);
    Perm reducer = perm_pow(inverse(ctx.perm_of(rec.row_ids[idx])), c);
    x = ctx.id_of(mul(reducer, ctx.perm_of(x)));
  }
  return true;
}

bool record_contains(const Pcgs& ctx, const SubgroupRecord& rec, const Perm& p) {
  uint32_t id = ctx.id_of(p);
  if (id == UINT32_MAX) return false;
  return record_contains_id(ctx, rec, id);
}

SubgroupRecord conjugate_record(const Pcgs& ctx, const SubgroupRecord& rec, const Perm& g,
                                const Perm& g_inv) {
  const size_t L = ctx.length();
  std::vector<std::optional<Slot>> slots(L);
  size_t filled = 0;
  std::vector<uint32_t> conj_ids(rec.row_ids.size());
  for (size_t i = 0; i < rec.row_ids.size(); ++i) {
    conj_ids[i] = ctx.id_of(mul(mul(g, ctx.perm_of(rec.row_ids[i])), g_inv));
    if (conj_ids[i] == UINT32_MAX) throw std::logic_error("conjugate left the group");
  }
  for (uint32_t x : conj_ids) {
    while (x != 0) {
      size_t d = ctx.lead(x);
      unsigned c = ctx.digit(x, d);
      if (!slots[d]) {
        unsigned u = inv_mod(c, ctx.prime_at(d));
        uint32_t sid = ctx.id_of(perm_pow(ctx.perm_of(x), u));
        slots[d] = make_slot(ctx, sid, d);
        ++filled;
        break;
      }
      x = ctx.id_of(mul(slots[d]->inv_pows[c - 1], ctx.perm_of(x)));
    }
  }
  if (filled == rec.row_ids.size()) {
    std::vector<uint32_t> rows;
    rows.reserve(filled);
    unsigned long long order = 1;
    for (size_t d = 0; d < L; ++d)
      if (slots[d]) {
        rows.push_back(slots[d]->id);
        order *= ctx.prime_at(d);
      }
    if (order == rec.order) return finalize_rows(ctx, std::move(rows));
  }
  // Conjugation preserves the per-layer row structure, so the pure
  // sifting path above always succeeds; the closure pass is a safety
  // net only.
  return igs(ctx, conj_ids);
}

SubgroupRecord kernel_record(const Pcgs& ctx, size_t t) {
  std::vector<uint32_t> rows;
  for (size_t j = ctx.pos_limit(t); j < ctx.length(); ++j)
    rows.push_back(static_cast<uint32_t>(ctx.place(j)));
  return record_from_canonical_rows(ctx, std::move(rows));
}

SubgroupRecord full_record(const Pcgs& ctx) { return kernel_record(ctx, 0); }

std::vector<uint32_t> record_element_ids(const Pcgs& ctx, const SubgroupRecord& rec, size_t cap) {
  if (rec.order > cap) throw std::runtime_error("record element enumeration cap exceeded");
  std::vector<uint32_t> out = {0};
  out.reserve(rec.order);
  for (size_t i = rec.row_ids.size(); i-- > 0;) {
    unsigned p = ctx.prime_at(rec.row_leads[i]);
    const Perm& g = ctx.perm_of(rec.row_ids[i]);
    size_t base = out.size();
    Perm power = g;
    for (unsigned c = 1; c < p; ++c) {
      for (size_t k = 0; k < base; ++k) out.push_back(ctx.id_of(mul(power, ctx.perm_of(out[k]))));
      if (c + 1 < p) power = mul(power, g);
    }
  }
  return out;
}

PcPresentation pc_presentation(const Pcgs& ctx, const SubgroupRecord& rec, size_t modulo_depth_t) {
  const size_t lim = ctx.pos_limit(modulo_depth_t);
  PcPresentation pres;
  size_t nheads = 0;
  while (nheads < rec.row_leads.size() && rec.row_leads[nheads] < lim) ++nheads;
  pres.ngens = nheads;
  for (size_t j = 0; j < nheads; ++j) pres.gen_primes.push_back(ctx.prime_at(rec.row_leads[j]));

  auto tail_of = [&](const Perm& w) {
    std::vector<std::pair<uint16_t, uint16_t>> tail;
    uint32_t x = ctx.id_of(w);
    if (x == UINT32_MAX) throw std::logic_error("relation element left the group");
    while (x != 0) {
      size_t d = ctx.lead(x);
      auto it = std::lower_bound(rec.row_leads.begin(), rec.row_leads.end(), d);
      if (it == rec.row_leads.end() || *it != d)
        throw std::logic_error("relation element is not in the subgroup");
      size_t idx = static_cast<size_t>(it - rec.row_leads.begin());
      unsigned c = ctx.digit(x, d);
      if (idx < nheads) tail.push_back({static_cast<uint16_t>(idx), static_cast<uint16_t>(c)});
      Perm reducer = perm_pow(inverse(ctx.perm_of(rec.row_ids[idx])), c);
      x = ctx.id_of(mul(reducer, ctx.perm_of(x)));
    }
    return tail;
  };

  for (size_t j = 0; j < nheads; ++j) {
    PcRelation rel;
    rel.is_power = true;
    rel.j = static_cast<uint16_t>(j);
    rel.tail = tail_of(perm_pow(ctx.perm_of(rec.row_ids[j]), pres.gen_primes[j]));
    pres.rels.push_back(std::move(rel));
  }
  for (size_t j = 0; j < nheads; ++j)
    for (size_t k = j + 1; k < nheads; ++k) {
      PcRelation rel;
      rel.is_power = false;
      rel.j = static_cast<uint16_t>(j);
      rel.k = static_cast<uint16_t>(k);
      const Perm& hj = ctx.perm_of(rec.row_ids[j]);
      const Perm& hk = ctx.perm_of(rec.row_ids[k]);
      rel.tail = tail_of(mul(mul(hj, hk), inverse(hj)));
      pres.rels.push_back(std::move(rel));
    }
  return pres;
}

}  // namespace holobrace
