#include "holobrace/perm.hpp"

#include <numeric>
#include <stdexcept>

namespace holobrace {

Perm mul(const Perm& a, const Perm& b) {
  Perm r;
  r.img.resize(a.img.size());
  const size_t n = a.img.size();
  for (size_t i = 0; i < n; ++i) r.img[i] = a.img[b.img[i]];
  return r;
}

Perm inverse(const Perm& a) {
  Perm r;
  r.img.resize(a.img.size());
  for (size_t i = 0; i < a.img.size(); ++i) r.img[a.img[i]] = static_cast<uint8_t>(i);
  return r;
}

Perm perm_pow(const Perm& a, long long e) {
  const size_t n = a.img.size();
  if (e < 0) return perm_pow(inverse(a), -e);
  Perm acc(n);
  Perm base = a;
  unsigned long long k = static_cast<unsigned long long>(e);
  while (k) {
    if (k & 1) acc = mul(acc, base);
    k >>= 1;
    if (k) base = mul(base, base);
  }
  return acc;
}

Perm conj(const Perm& x, const Perm& g) { return mul(mul(g, x), inverse(g)); }

unsigned perm_order(const Perm& a) {
  const size_t n = a.degree();
  std::vector<bool> seen(n, false);
  unsigned long long ord = 1;
  for (size_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    unsigned len = 0;
    size_t j = i;
    while (!seen[j]) {
      seen[j] = true;
      j = a.img[j];
      ++len;
    }
    ord = std::lcm(ord, static_cast<unsigned long long>(len));
  }
  return static_cast<unsigned>(ord);
}

bool is_valid_perm(const Perm& a) {
  const size_t n = a.degree();
  std::vector<bool> seen(n, false);
  for (size_t i = 0; i < n; ++i) {
    if (a.img[i] >= n || seen[a.img[i]]) return false;
    seen[a.img[i]] = true;
  }
  return true;
}

std::string perm_to_string(const Perm& a) {
  std::string s = "[";
  for (size_t i = 0; i < a.degree(); ++i) {
    if (i) s += ' ';
    s += std::to_string(a.img[i]);
  }
  s += ']';
  return s;
}

}  // namespace holobrace
