#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ggt/words.hpp"

namespace ggt {

// Folded, base-pointed, labeled core graph of a finitely generated
// subgroup of a free group. Vertices are renumbered canonically (BFS from
// the base in fixed label order), so two cores describe the same subgroup
// iff they compare equal.
struct CoreGraph {
  int rank = 0;                        // rank of the ambient free group
  int base = 0;
  std::vector<std::vector<int>> next;  // next[v][g] = head of positive g-edge out of v, -1 if none
  std::vector<std::vector<int>> prev;  // prev[v][g] = tail of positive g-edge into v, -1 if none

  int num_vertices() const { return static_cast<int>(next.size()); }
  int num_pos_edges() const;
  int subgroup_rank() const { return num_pos_edges() - num_vertices() + 1; }
  bool is_trivial() const { return num_pos_edges() == 0; }

  // -1 if the letter cannot be read from v
  int step(int v, Letter l) const;
  std::optional<int> read(const Word& w, int from) const;
  bool accepts(const Word& w) const;  // base-to-base loop

  int graph_distance(int u, int v) const;   // in the underlying graph
  int diameter() const;
  Word lexmin_word_from_base(int v) const;  // lexmin geodesic label base -> v
  Word lexmin_word_to_base(int v) const;

  friend bool operator==(const CoreGraph&, const CoreGraph&) = default;

  std::string dot(const Alphabet& alphabet, const std::string& name) const;
};

// Expression of a word through a list of generator words, as signed indices.
using GenExpression = std::vector<std::pair<int, bool>>;  // (index, inverted?)

Word expand_expression(const GenExpression& expr, const std::vector<Word>& gens);

// Fold history: enough bookkeeping to rewrite any element of <gens>
// as a product of the gens themselves (not just of a spanning-tree basis).
// Folding is replayed level by level and accepted loops are lifted back
// to the original bouquet, where they decompose into whole generator loops.
struct FoldHistory {
  struct BouquetEdge { int o, t, gen; };
  struct Step { int kept_edge, removed_edge; bool same_origin; };
  struct Level { std::vector<int> vclass; std::vector<int> eclass; };

  int rank_ = 0;
  std::vector<BouquetEdge> edges_;
  std::vector<std::vector<std::pair<int, bool>>> loops_;  // per generator: (edge, forward)
  std::vector<Step> steps_;
  std::vector<Level> levels_;  // levels_[j] = class maps after j folds
  // final deterministic transitions over fold classes
  std::vector<std::vector<int>> fnext_, fprev_;        // vertex classes
  std::vector<std::vector<int>> fnext_e_, fprev_e_;    // member bouquet edge ids
  int fbase_ = 0;

  // nullopt iff w is not in the subgroup generated by the folded words
  std::optional<GenExpression> express(const Word& w) const;

  int folded_rank() const;  // rank of the folded subgroup
};

FoldHistory fold_words_with_history(const std::vector<Word>& gens, int rank);

// A finitely generated subgroup with its canonical core and a free basis
// read off a spanning tree of the core.
struct SubgroupHandle {
  CoreGraph core;
  std::vector<Word> basis;

  bool is_whole_group() const;
  std::string describe(const Alphabet& alphabet) const;
};

// Stallings fold of the given generators. Empty input yields the trivial subgroup.
SubgroupHandle fold(const std::vector<Word>& generators, int rank);

// Membership with an expression of w through H's basis; nullopt if w is not in H.
std::optional<GenExpression> membership(const Word& w, const SubgroupHandle& H);
bool contains(const SubgroupHandle& H, const Word& w);

// Base component of the fiber product, trimmed: w in result iff w in H and w in K.
SubgroupHandle intersect(const SubgroupHandle& H, const SubgroupHandle& K);

// Subgroup x H x^-1.
SubgroupHandle conjugate(const SubgroupHandle& H, const Word& x);

// A homomorphism between free groups given by images of the source generators.
struct FreeHom {
  int source_rank = 0;
  int target_rank = 0;
  std::vector<Word> images;  // one target word per source generator

  Word apply(const Word& w) const;
};

// phi^-1(A) for injective phi; throws Error if phi is not injective
// (detected by rank drop of the folded image).
SubgroupHandle preimage(const FreeHom& phi, const SubgroupHandle& A);

// Shortlex-minimal representative of the left coset g H, via the Schreier
// machine of H's core (tails hang off the core as in the full Schreier graph).
Word left_coset_rep(const Word& g, const CoreGraph& core);
// g = rep * remainder with remainder in H
std::pair<Word, Word> left_coset_split(const Word& g, const CoreGraph& core);

// Shortlex-minimal representative of the right coset H g.
Word right_coset_rep(const Word& g, const CoreGraph& core);

struct CosetEnumeration {
  std::vector<Word> reps;  // shortlex order
  bool complete = false;   // true iff every coset is represented (index realized under the budget)
};

// All cosets with a representative of word length <= budget.
CosetEnumeration schreier_left_cosets(const CoreGraph& core, int budget);
CosetEnumeration schreier_right_cosets(const CoreGraph& core, int budget);

// Deterministic automaton for the left coset c H: language read from
// `start` to `core_base` is exactly cH, and a reduced word is a prefix of
// a reduced element of cH iff it is readable from `start`.
struct CosetMachine {
  CoreGraph graph;  // untrimmed; canonical numbering from start
  int start = 0;
  int core_base = 0;

  bool readable(const Word& w) const { return graph.read(w, start).has_value(); }
};

CosetMachine make_left_coset_machine(const CoreGraph& core, const Word& c);

std::string schreier_dot(const CoreGraph& core, const CosetEnumeration& cosets,
                         const Alphabet& alphabet, const std::string& name);

}  // namespace ggt
