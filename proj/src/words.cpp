#include "ggt/words.hpp"

#include <algorithm>
#include <sstream>

#include "ggt/rng.hpp"

namespace ggt {

void Word::assign_reduced(std::span<const Letter> raw) {
  letters_.clear();
  letters_.reserve(raw.size());
  for (Letter l : raw) {
    if (l == 0) throw Error("Word: 0 is not a letter");
    if (!letters_.empty() && letters_.back() == -l) {
      letters_.pop_back();
    } else {
      letters_.push_back(l);
    }
  }
}

Word free_reduce(std::span<const Letter> raw) { return Word(raw); }

Word Word::inverse() const {
  std::vector<Letter> out;
  out.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) out.push_back(-*it);
  Word w;
  w.letters_ = std::move(out);  // inverse of a reduced word is reduced
  return w;
}

Word Word::prefix(int n) const {
  Word w;
  w.letters_.assign(letters_.begin(), letters_.begin() + n);
  return w;
}

std::pair<Word, Word> Word::cyclic_reduce() const {
  int i = 0, j = size();
  while (j - i >= 2 && letters_[static_cast<size_t>(i)] == -letters_[static_cast<size_t>(j - 1)]) {
    ++i;
    --j;
  }
  Word root, conj;
  root.letters_.assign(letters_.begin() + i, letters_.begin() + j);
  conj.letters_.assign(letters_.begin(), letters_.begin() + i);
  return {root, conj};
}

Word operator*(const Word& a, const Word& b) {
  // cancellation happens only at the seam
  size_t i = a.letters_.size();
  size_t j = 0;
  while (i > 0 && j < b.letters_.size() && a.letters_[i - 1] == -b.letters_[j]) {
    --i;
    ++j;
  }
  Word w;
  w.letters_.reserve(i + b.letters_.size() - j);
  w.letters_.assign(a.letters_.begin(), a.letters_.begin() + static_cast<long>(i));
  w.letters_.insert(w.letters_.end(), b.letters_.begin() + static_cast<long>(j), b.letters_.end());
  return w;
}

Word word_pow(const Word& w, int k) {
  Word base = k < 0 ? w.inverse() : w;
  int n = k < 0 ? -k : k;
  Word acc;
  for (int i = 0; i < n; ++i) acc = acc * base;
  return acc;
}

bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (int i = 0; i < a.size(); ++i) {
    int ka = letter_order_key(a.at(i));
    int kb = letter_order_key(b.at(i));
    if (ka != kb) return ka < kb;
  }
  return false;
}

int common_prefix_len(const Word& a, const Word& b) {
  int n = std::min(a.size(), b.size());
  int i = 0;
  while (i < n && a.at(i) == b.at(i)) ++i;
  return i;
}

HalfInt gromov_product(const Word& x, const Word& y) {
  Word d = x.inverse() * y;
  return HalfInt::halves(x.size() + y.size() - d.size());
}

std::vector<Word> geodesic_path(const Word& x, const Word& y) {
  int k = common_prefix_len(x, y);
  std::vector<Word> path;
  for (int n = x.size(); n > k; --n) path.push_back(x.prefix(n));
  for (int n = k; n <= y.size(); ++n) path.push_back(y.prefix(n));
  return path;
}

Word project_to_segment(const Word& g, const Word& x, const Word& y) {
  // In a tree the projection is the point of [x,y] at distance
  // t = clamp((d(x,g) + d(x,y) - d(y,g))/2, 0, d(x,y)) from x.
  Word xg = x.inverse() * g;
  Word xy = x.inverse() * y;
  Word yg = y.inverse() * g;
  int t2 = xg.size() + xy.size() - yg.size();  // 2t
  int t = t2 / 2;
  t = std::clamp(t, 0, xy.size());
  return x * xy.prefix(t);
}

std::optional<int> Alphabet::index_of(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

Word Alphabet::parse(const std::string& text) const {
  std::istringstream in(text);
  std::string tok;
  std::vector<Letter> raw;
  while (in >> tok) {
    bool positive = true;
    if (tok.size() > 3 && tok.substr(tok.size() - 3) == "^-1") {
      positive = false;
      tok = tok.substr(0, tok.size() - 3);
    }
    auto idx = index_of(tok);
    if (!idx) throw Error("unknown generator '" + tok + "' in word \"" + text + "\"");
    raw.push_back(make_letter(*idx, positive));
  }
  return Word(raw);
}

std::string Alphabet::format_letter(Letter l) const {
  std::string s = names.at(static_cast<size_t>(gen_of(l)));
  if (!is_positive(l)) s += "^-1";
  return s;
}

std::string Alphabet::format(const Word& w) const {
  std::string out;
  for (Letter l : w.letters()) {
    if (!out.empty()) out += ' ';
    out += format_letter(l);
  }
  return out;
}

Word random_reduced_word(Rng& rng, int rank, int length) {
  std::vector<Letter> raw;
  Letter prev = 0;
  for (int i = 0; i < length; ++i) {
    Letter l;
    do {
      int g = static_cast<int>(rng.below(static_cast<std::uint64_t>(rank)));
      l = make_letter(g, rng.coin());
    } while (l == -prev);
    raw.push_back(l);
    prev = l;
  }
  return Word(raw);
}

}  // namespace ggt
