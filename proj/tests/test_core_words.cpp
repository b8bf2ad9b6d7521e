#include <doctest.h>

#include <algorithm>
#include <limits>

#include "ggt/finite_group.hpp"
#include "ggt/rng.hpp"
#include "ggt/words.hpp"

using namespace ggt;

namespace {

const Alphabet kF2{{"a", "b"}};

Word W(const std::string& s) { return kF2.parse(s); }

// independent repeated-scan reducer used as the oracle for free_reduce
std::vector<Letter> naive_reduce(std::vector<Letter> v) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i + 1 < v.size(); ++i) {
      if (v[i] == -v[i + 1]) {
        v.erase(v.begin() + static_cast<long>(i), v.begin() + static_cast<long>(i) + 2);
        changed = true;
        break;
      }
    }
  }
  return v;
}

}  // namespace

TEST_CASE("free reduction basics") {
  CHECK(W("a a^-1").empty());
  CHECK(W("a b b^-1 a") == W("a a"));
  CHECK(free_reduce(std::vector<Letter>{}).empty());
}

TEST_CASE("free reduction against nested-insertion oracle") {
  Rng rng(7);
  Word target = W("a b^-1 a");
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Letter> raw(target.letters().begin(), target.letters().end());
    int inserts = rng.range(1, 6);
    for (int k = 0; k < inserts; ++k) {
      size_t pos = rng.below(raw.size() + 1);
      Letter l = make_letter(static_cast<int>(rng.below(2)), rng.coin());
      raw.insert(raw.begin() + static_cast<long>(pos), {l, -l});
    }
    Word reduced(raw);
    CHECK(reduced == target);
    CHECK(reduced.letters() == naive_reduce(raw));
  }
}

TEST_CASE("free reduction is idempotent and length-nonincreasing") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Letter> raw;
    int len = rng.range(0, 24);
    for (int i = 0; i < len; ++i) raw.push_back(make_letter(static_cast<int>(rng.below(2)), rng.coin()));
    Word once(raw);
    Word twice(std::span<const Letter>(once.letters()));
    CHECK(once == twice);
    CHECK(once.size() <= len);
  }
}

TEST_CASE("group operation and inverse") {
  CHECK(W("a b") * W("b^-1 b^-1") == W("a b^-1"));
  CHECK((W("a b") * W("b^-1 a")) == W("a a"));
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Word u = random_reduced_word(rng, 2, rng.range(0, 20));
    CHECK((u * u.inverse()).empty());
    CHECK((u.inverse() * u).empty());
  }
  // associativity on random triples
  for (int trial = 0; trial < 100; ++trial) {
    Word x = random_reduced_word(rng, 2, rng.range(0, 12));
    Word y = random_reduced_word(rng, 2, rng.range(0, 12));
    Word z = random_reduced_word(rng, 2, rng.range(0, 12));
    CHECK((x * y) * z == x * (y * z));
  }
}

TEST_CASE("gromov product examples") {
  CHECK(gromov_product(W("a a"), W("a a a b")) == HalfInt::of(2));
  CHECK(gromov_product(W("a"), W("b")) == HalfInt::of(0));
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Word x = random_reduced_word(rng, 2, rng.range(0, 10));
    CHECK(gromov_product(x, x) == HalfInt::of(x.size()));
  }
}

TEST_CASE("gromov product equals common prefix length, exhaustive rank 2 length <= 4") {
  // enumerate all reduced words of length <= 4 over two generators
  std::vector<Word> words{Word()};
  size_t layer_start = 0;
  for (int len = 1; len <= 4; ++len) {
    size_t layer_end = words.size();
    for (size_t i = layer_start; i < layer_end; ++i) {
      for (int g = 0; g < 2; ++g)
        for (bool pos : {true, false}) {
          Letter l = make_letter(g, pos);
          if (!words[i].empty() && words[i].back() == -l) continue;
          words.push_back(words[i] * Word::letter(l));
        }
    }
    layer_start = layer_end;
  }
  for (const Word& x : words)
    for (const Word& y : words) {
      HalfInt p = gromov_product(x, y);
      CHECK(p.twice >= 0);
      CHECK(p == HalfInt::of(common_prefix_len(x, y)));
    }
}

TEST_CASE("geodesic path examples") {
  auto path = geodesic_path(Word(), W("a b"));
  REQUIRE(path.size() == 3);
  CHECK(path[0] == Word());
  CHECK(path[1] == W("a"));
  CHECK(path[2] == W("a b"));

  auto via_base = geodesic_path(W("a"), W("b"));
  REQUIRE(via_base.size() == 3);
  CHECK(via_base[1] == Word());
}

namespace {

// BFS oracle in the ball of the Cayley tree
int bfs_distance(const Word& x, const Word& y, int radius) {
  if (x == y) return 0;
  std::vector<Word> frontier{x};
  std::vector<Word> seen{x};
  int d = 0;
  while (!frontier.empty()) {
    ++d;
    std::vector<Word> next;
    for (const Word& w : frontier) {
      for (int g = 0; g < 2; ++g)
        for (bool pos : {true, false}) {
          Word n = w * Word::letter(make_letter(g, pos));
          if (n.size() > radius) continue;
          if (std::find(seen.begin(), seen.end(), n) != seen.end()) continue;
          if (n == y) return d;
          seen.push_back(n);
          next.push_back(n);
        }
    }
    frontier = std::move(next);
  }
  return -1;
}

}  // namespace

TEST_CASE("geodesic path agrees with BFS oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    Word x = random_reduced_word(rng, 2, rng.range(0, 5));
    Word y = random_reduced_word(rng, 2, rng.range(0, 5));
    auto path = geodesic_path(x, y);
    REQUIRE(!path.empty());
    CHECK(path.front() == x);
    CHECK(path.back() == y);
    int expected = bfs_distance(x, y, 6);
    CHECK(static_cast<int>(path.size()) - 1 == expected);
    CHECK(static_cast<int>(path.size()) - 1 == (x.inverse() * y).size());
    for (size_t i = 0; i + 1 < path.size(); ++i)
      CHECK((path[i].inverse() * path[i + 1]).size() == 1);
    // reversal symmetry
    auto back = geodesic_path(y, x);
    REQUIRE(back.size() == path.size());
    for (size_t i = 0; i < path.size(); ++i) CHECK(back[i] == path[path.size() - 1 - i]);
  }
}

TEST_CASE("segment projection is the metric nearest point") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    Word x = random_reduced_word(rng, 2, rng.range(0, 5));
    Word y = random_reduced_word(rng, 2, rng.range(0, 5));
    Word g = random_reduced_word(rng, 2, rng.range(0, 5));
    Word p = project_to_segment(g, x, y);
    auto seg = geodesic_path(x, y);
    int best = std::numeric_limits<int>::max();
    Word best_point;
    for (const Word& q : seg) {
      int d = (g.inverse() * q).size();
      if (d < best) {
        best = d;
        best_point = q;
      }
    }
    CHECK((g.inverse() * p).size() == best);
    CHECK(p == best_point);  // unique in a tree
  }
}

TEST_CASE("alphabet parse and format round-trip") {
  CHECK(kF2.format(W("a b^-1 a")) == "a b^-1 a");
  CHECK(kF2.parse("") == Word());
  CHECK_THROWS_AS(kF2.parse("q"), Error);
  Rng rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    Word w = random_reduced_word(rng, 2, rng.range(0, 12));
    CHECK(kF2.parse(kF2.format(w)) == w);
  }
}

TEST_CASE("finite group table validation") {
  FiniteGroupTable z4 = FiniteGroupTable::cyclic(4);
  CHECK_NOTHROW(z4.validate());
  CHECK(z4.diameter() == 1);

  SUBCASE("corrupted tables are rejected") {
    Rng rng(31);
    int rejected = 0;
    for (int trial = 0; trial < 40; ++trial) {
      FiniteGroupTable bad = z4;
      size_t pos = rng.below(bad.product.size());
      int old = bad.product[pos];
      int replacement = static_cast<int>(rng.below(4));
      if (replacement == old) replacement = (replacement + 1) % 4;
      bad.product[pos] = replacement;
      try {
        bad.validate();
      } catch (const Error&) {
        ++rejected;
      }
    }
    CHECK(rejected == 40);
  }
}

TEST_CASE("finite subgroup machinery") {
  FiniteGroupTable z4 = FiniteGroupTable::cyclic(4);
  FiniteSubgroup z2 = FiniteSubgroup::closure(z4, {2});
  CHECK(z2.elements == std::vector<int>{0, 2});
  CHECK(z2.left_coset_reps(z4) == std::vector<int>{0, 1});
  CHECK(z2.left_coset_rep(z4, 3) == 1);
  CHECK(z2.intersect(FiniteSubgroup::closure(z4, {1})).elements == z2.elements);
  CHECK(z2.conjugate(z4, 1).elements == z2.elements);
}
