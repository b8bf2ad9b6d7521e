#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ggt/graph_of_groups.hpp"
#include "ggt/stallings.hpp"

namespace ggt {

// Alternating sequence g0 e1 g1 ... en gn along a path in Y. Elements of
// the fundamental group are represented by base-vertex loops; arbitrary
// paths represent fundamental-groupoid elements (used for coset data).
struct Syllable {
  int edge = -1;
  VertexElt g;
  friend bool operator==(const Syllable&, const Syllable&) = default;
};

struct Sequence {
  int start = 0;
  VertexElt head;
  std::vector<Syllable> tail;

  int edge_count() const { return static_cast<int>(tail.size()); }
  friend bool operator==(const Sequence&, const Sequence&) = default;
};

// Cached data for one oriented edge: the image of phi_{e,t(e)} in the
// group at t(e), with whatever is needed to invert it on its image.
struct EdgeImage {
  bool target_free = false;
  // free target
  SubgroupHandle image;
  FoldHistory hist;
  // finite target
  FiniteSubgroup fin_image;
  std::vector<int> fin_elt_map;   // edge element -> target element
  std::vector<int> fin_preimage;  // target element -> edge element or -1
};

// Validated graph of groups with the caches that drive normal forms:
// edge images, their fold histories, and spanning-tree paths.
class GogContext {
public:
  explicit GogContext(GraphOfGroups gog);  // throws Error when validation fails

  const GraphOfGroups& gog() const { return gog_; }
  const ValidationReport& report() const { return report_; }
  int base() const { return gog_.base_vertex; }

  // vertex group arithmetic
  const GroupSpec& vgroup(int v) const { return gog_.vgroups[static_cast<size_t>(v)]; }
  VertexElt identity_elt(int v) const;
  VertexElt mul(int v, const VertexElt& a, const VertexElt& b) const;
  VertexElt inv(int v, const VertexElt& a) const;
  bool is_identity(int v, const VertexElt& a) const;
  int elt_length(int v, const VertexElt& a) const;
  std::string format_elt(int v, const VertexElt& a) const;
  VertexElt parse_elt(int v, const std::string& text) const;

  // edge images
  const EdgeImage& image_at_t(int e) const { return images_[static_cast<size_t>(e)]; }
  bool in_image_t(int e, const VertexElt& g) const;
  // phi_{e,o(e)}( phi_{e,t(e)}^{-1}(g) ) for g in Im phi_{e,t(e)}
  VertexElt transport_t_to_o(int e, const VertexElt& g) const;
  // apply phi_{e,t(e)} to an edge-group element (free edge groups: a word
  // over the edge generators; finite: an element index)
  VertexElt apply_mono_t(int e, const VertexElt& a) const;
  // phi_{e,t(e)}^{-1}(g) as an edge-group element; g must lie in the image
  VertexElt mono_t_preimage(int e, const VertexElt& g) const;
  // split g in G_{o(e)} as (transversal rep) * (element of Im phi_{e,o(e)})
  std::pair<VertexElt, VertexElt> split_by_origin_image(int e, const VertexElt& g) const;
  // split g in G_{t(e)} as (transversal rep) * (element of Im phi_{e,t(e)})
  std::pair<VertexElt, VertexElt> split_by_image_t(int e, const VertexElt& g) const;
  VertexElt identity_edge_elt(int e) const;  // identity of the edge group

  // sequence arithmetic
  int end_vertex(const Sequence& s) const;
  void check_path_consistent(const Sequence& s) const;  // throws Error
  Sequence seq_identity(int v) const;
  Sequence seq_vertex(int v, VertexElt g) const;
  Sequence seq_edge(int e) const;
  Sequence multiply(const Sequence& a, const Sequence& b) const;
  Sequence inverse(const Sequence& a) const;

  // pinch removal: e phi_t(a) ebar -> phi_o(a); result has no pinches
  Sequence britton_reduce(Sequence s) const;
  // britton reduction plus left-to-right transversal splitting; the
  // trailing vertex element absorbs all remainders, so the result is the
  // unique canonical form of the groupoid element
  Sequence canonicalize(Sequence s) const;

  // spanning-tree path from `from` to `to` with identity vertex elements
  Sequence tree_path(int from, int to) const;
  // tree-edge symbols are trivial in the fundamental group, so every
  // path-consistent sequence closes to a base loop without changing the
  // element it represents
  Sequence canonical_loop(const Sequence& s) const;
  bool element_eq(const Sequence& a, const Sequence& b) const;
  bool is_identity_element(const Sequence& s) const;

  // canonical representative of the coset g G_v: canonical form of the
  // base->v path with the trailing vertex syllable dropped
  Sequence coset_rep(const Sequence& g, int v) const;

  int seq_word_length(const Sequence& s) const;  // letters plus edge syllables
  std::string format(const Sequence& s) const;
  std::string key(const Sequence& s) const;  // deterministic serialization

private:
  GraphOfGroups gog_;
  ValidationReport report_;
  std::vector<EdgeImage> images_;
  std::vector<Sequence> tree_paths_;  // base -> v
  void build_images();
  void build_tree_paths();
};

}  // namespace ggt
