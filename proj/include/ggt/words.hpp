#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ggt/error.hpp"
#include "ggt/half_int.hpp"

namespace ggt {

struct Rng;

// A letter of a free group: generator index g with a sign, encoded as
// +(g+1) for g and -(g+1) for g^-1. 0 is not a letter.
using Letter = std::int32_t;

constexpr Letter make_letter(int gen, bool positive) {
  return positive ? Letter(gen + 1) : -Letter(gen + 1);
}
constexpr int gen_of(Letter l) { return (l > 0 ? l : -l) - 1; }
constexpr bool is_positive(Letter l) { return l > 0; }
constexpr Letter inv_letter(Letter l) { return -l; }
// shortlex letter order: a < a^-1 < b < b^-1 < ...
constexpr int letter_order_key(Letter l) { return 2 * gen_of(l) + (l < 0 ? 1 : 0); }

// A freely reduced word. Every constructor and operation reduces, so
// equality is structural equality on the letter vector.
class Word {
public:
  Word() = default;
  explicit Word(std::span<const Letter> raw) { assign_reduced(raw); }
  static Word letter(Letter l) { Letter raw[1] = {l}; return Word(std::span<const Letter>(raw, 1)); }

  const std::vector<Letter>& letters() const { return letters_; }
  int size() const { return static_cast<int>(letters_.size()); }
  bool empty() const { return letters_.empty(); }
  Letter at(int i) const { return letters_[static_cast<size_t>(i)]; }
  Letter front() const { return letters_.front(); }
  Letter back() const { return letters_.back(); }

  Word inverse() const;
  Word prefix(int n) const;
  // cyclic reduction: returns (root, conjugator) with *this == conjugator * root * conjugator^-1
  std::pair<Word, Word> cyclic_reduce() const;

  friend Word operator*(const Word& a, const Word& b);
  friend bool operator==(const Word&, const Word&) = default;

private:
  void assign_reduced(std::span<const Letter> raw);
  std::vector<Letter> letters_;
};

struct WordHash {
  size_t operator()(const Word& w) const {
    size_t h = 0xcbf29ce484222325ULL;
    for (Letter l : w.letters()) {
      h ^= static_cast<size_t>(static_cast<std::uint32_t>(l));
      h *= 0x100000001b3ULL;
    }
    return h;
  }
};

Word free_reduce(std::span<const Letter> raw);
Word word_pow(const Word& w, int k);

// true if a precedes b in shortlex order (length, then letter_order_key)
bool shortlex_less(const Word& a, const Word& b);

int common_prefix_len(const Word& a, const Word& b);

// (|x| + |y| - |x^-1 y|) / 2 with base point the identity. In a free
// group this is the length of the longest common prefix.
HalfInt gromov_product(const Word& x, const Word& y);

// The unique geodesic from x to y in the Cayley tree: consecutive words
// differ by one right-multiplied letter.
std::vector<Word> geodesic_path(const Word& x, const Word& y);

// Nearest-point projection of g onto the geodesic segment [x, y] in the
// Cayley tree (exact, unique).
Word project_to_segment(const Word& g, const Word& x, const Word& y);

// Generator names for one group; parses and formats words.
// Token format: "a" or "a^-1", whitespace separated.
struct Alphabet {
  std::vector<std::string> names;

  int rank() const { return static_cast<int>(names.size()); }
  std::optional<int> index_of(const std::string& name) const;
  Word parse(const std::string& text) const;        // throws Error on bad tokens
  std::string format(const Word& w) const;
  std::string format_letter(Letter l) const;
};

Word random_reduced_word(Rng& rng, int rank, int length);

}  // namespace ggt
