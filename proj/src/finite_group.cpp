#include "ggt/finite_group.hpp"

#include <algorithm>
#include <set>

namespace ggt {

void FiniteGroupTable::validate() const {
  if (order < 1) throw Error("finite group: order must be positive");
  if (static_cast<int>(product.size()) != order * order)
    throw Error("finite group: product table must have order^2 entries");
  for (int v : product)
    if (v < 0 || v >= order) throw Error("finite group: product entry out of range");
  if (identity < 0 || identity >= order) throw Error("finite group: identity index out of range");
  for (int a = 0; a < order; ++a) {
    if (mul(identity, a) != a || mul(a, identity) != a)
      throw Error("finite group: identity law fails at element " + std::to_string(a));
  }
  if (static_cast<int>(inverse.size()) != order)
    throw Error("finite group: inverse table must have `order` entries");
  for (int a = 0; a < order; ++a) {
    int b = inverse[static_cast<size_t>(a)];
    if (b < 0 || b >= order || mul(a, b) != identity || mul(b, a) != identity)
      throw Error("finite group: inverse law fails at element " + std::to_string(a));
  }
  for (int a = 0; a < order; ++a)
    for (int b = 0; b < order; ++b)
      for (int c = 0; c < order; ++c)
        if (mul(mul(a, b), c) != mul(a, mul(b, c)))
          throw Error("finite group: associativity fails at (" + std::to_string(a) + "," +
                      std::to_string(b) + "," + std::to_string(c) + ")");
}

void FiniteGroupTable::derive_inverses() {
  inverse.assign(static_cast<size_t>(order), -1);
  for (int a = 0; a < order; ++a) {
    for (int b = 0; b < order; ++b) {
      if (mul(a, b) == identity && mul(b, a) == identity) {
        inverse[static_cast<size_t>(a)] = b;
        break;
      }
    }
    if (inverse[static_cast<size_t>(a)] < 0)
      throw Error("finite group: element " + std::to_string(a) + " has no inverse");
  }
}

FiniteGroupTable FiniteGroupTable::cyclic(int n) {
  FiniteGroupTable t;
  t.order = n;
  t.identity = 0;
  t.product.resize(static_cast<size_t>(n * n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t.product[static_cast<size_t>(a * n + b)] = (a + b) % n;
  t.derive_inverses();
  for (int a = 0; a < n; ++a) t.element_names.push_back("g" + std::to_string(a));
  return t;
}

bool FiniteSubgroup::contains(int g) const {
  return std::binary_search(elements.begin(), elements.end(), g);
}

FiniteSubgroup FiniteSubgroup::closure(const FiniteGroupTable& table, const std::vector<int>& gens) {
  std::set<int> seen{table.identity};
  std::vector<int> frontier{table.identity};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int g : frontier) {
      for (int s : gens) {
        for (int h : {table.mul(g, s), table.mul(g, table.inv(s))}) {
          if (seen.insert(h).second) next.push_back(h);
        }
      }
    }
    frontier = std::move(next);
  }
  FiniteSubgroup sub;
  sub.elements.assign(seen.begin(), seen.end());
  return sub;
}

FiniteSubgroup FiniteSubgroup::whole(const FiniteGroupTable& table) {
  FiniteSubgroup sub;
  for (int i = 0; i < table.order; ++i) sub.elements.push_back(i);
  return sub;
}

FiniteSubgroup FiniteSubgroup::trivial(const FiniteGroupTable& table) {
  return FiniteSubgroup{{table.identity}};
}

FiniteSubgroup FiniteSubgroup::intersect(const FiniteSubgroup& other) const {
  FiniteSubgroup out;
  std::set_intersection(elements.begin(), elements.end(), other.elements.begin(),
                        other.elements.end(), std::back_inserter(out.elements));
  return out;
}

FiniteSubgroup FiniteSubgroup::conjugate(const FiniteGroupTable& table, int x) const {
  FiniteSubgroup out;
  for (int g : elements) out.elements.push_back(table.mul(table.mul(x, g), table.inv(x)));
  std::sort(out.elements.begin(), out.elements.end());
  return out;
}

int FiniteSubgroup::left_coset_rep(const FiniteGroupTable& table, int g) const {
  int best = -1;
  for (int s : elements) {
    int c = table.mul(g, s);
    if (best < 0 || c < best) best = c;
  }
  return best;
}

std::vector<int> FiniteSubgroup::left_coset_reps(const FiniteGroupTable& table) const {
  std::set<int> reps;
  for (int g = 0; g < table.order; ++g) reps.insert(left_coset_rep(table, g));
  return {reps.begin(), reps.end()};
}

}  // namespace ggt
