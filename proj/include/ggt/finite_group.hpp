#pragma once

#include <string>
#include <vector>

#include "ggt/error.hpp"

namespace ggt {

// A finite group given by its full multiplication table. Elements are
// indices 0..order-1. The table is validated on construction: identity,
// inverses, and associativity over all triples.
struct FiniteGroupTable {
  int order = 1;
  int identity = 0;
  std::vector<int> product;          // row-major order x order
  std::vector<int> inverse;          // derived if not supplied
  std::vector<std::string> element_names;

  int mul(int a, int b) const { return product[static_cast<size_t>(a * order + b)]; }
  int inv(int a) const { return inverse[static_cast<size_t>(a)]; }

  // throws Error citing the violated law
  void validate() const;
  void derive_inverses();  // fills `inverse`; throws if some element has none

  // diameter of the Cayley graph over the full non-identity element set:
  // 0 for the trivial group, otherwise 1
  int diameter() const { return order > 1 ? 1 : 0; }

  static FiniteGroupTable cyclic(int n);
};

// Subgroup of a finite group as a sorted element list.
struct FiniteSubgroup {
  std::vector<int> elements;  // sorted, always contains the identity

  bool contains(int g) const;
  int size() const { return static_cast<int>(elements.size()); }

  static FiniteSubgroup closure(const FiniteGroupTable& table, const std::vector<int>& gens);
  static FiniteSubgroup whole(const FiniteGroupTable& table);
  static FiniteSubgroup trivial(const FiniteGroupTable& table);

  FiniteSubgroup intersect(const FiniteSubgroup& other) const;
  FiniteSubgroup conjugate(const FiniteGroupTable& table, int x) const;  // x S x^-1

  // minimal-index representative of the left coset g * S
  int left_coset_rep(const FiniteGroupTable& table, int g) const;
  // all left cosets, each by its minimal representative, in increasing order
  std::vector<int> left_coset_reps(const FiniteGroupTable& table) const;
};

}  // namespace ggt
