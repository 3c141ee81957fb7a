#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace holobrace {

/// Permutation of [0, degree) stored as its image vector.
struct Perm {
  std::vector<uint8_t> img;

  Perm() = default;
  explicit Perm(size_t degree) : img(degree) {
    for (size_t i = 0; i < degree; ++i) img[i] = static_cast<uint8_t>(i);
  }
  explicit Perm(std::vector<uint8_t> images) : img(std::move(images)) {}

  size_t degree() const { return img.size(); }
  unsigned operator[](unsigned x) const { return img[x]; }

  bool is_identity() const {
    for (size_t i = 0; i < img.size(); ++i)
      if (img[i] != i) return false;
    return true;
  }

  bool operator==(const Perm& o) const { return img == o.img; }
  bool operator!=(const Perm& o) const { return img != o.img; }
  bool operator<(const Perm& o) const { return img < o.img; }
};

// (a*b)(x) = a(b(x)); b is applied first.
Perm mul(const Perm& a, const Perm& b);
Perm inverse(const Perm& a);
Perm perm_pow(const Perm& a, long long e);
// g x g^-1
Perm conj(const Perm& x, const Perm& g);

unsigned perm_order(const Perm& a);
bool is_valid_perm(const Perm& a);

std::string perm_to_string(const Perm& a);

}  // namespace holobrace
