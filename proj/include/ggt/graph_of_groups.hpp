#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ggt/finite_group.hpp"
#include "ggt/words.hpp"

namespace ggt {

// Oriented graph in Serre's sense: every unoriented edge k appears as the
// oriented pair 2k (the configured orientation) and 2k+1 (its reversal),
// so o(bar e) = t(e), t(bar e) = o(e) and bar(bar e) = e hold by
// construction and bar(e) != e always.
struct OrientedGraph {
  int num_vertices = 0;
  std::vector<int> origin;    // per oriented edge
  std::vector<int> terminus;  // per oriented edge

  int num_oriented_edges() const { return static_cast<int>(origin.size()); }
  int num_unoriented_edges() const { return num_oriented_edges() / 2; }
  static int bar(int e) { return e ^ 1; }
  int o(int e) const { return origin[static_cast<size_t>(e)]; }
  int t(int e) const { return terminus[static_cast<size_t>(e)]; }
  void add_edge(int from, int to);  // appends the pair (2k, 2k+1)
  bool connected() const;
};

struct GroupSpec {
  enum class Kind { Free, Finite };
  Kind kind = Kind::Free;
  Alphabet alphabet;                // free case: generator names
  FiniteGroupTable table;           // finite case
  std::vector<int> finite_gens;     // finite case: chosen generating elements

  int generator_count() const {
    return kind == Kind::Free ? alphabet.rank() : static_cast<int>(finite_gens.size());
  }
  bool is_free() const { return kind == Kind::Free; }
};

// One element of a vertex or edge group: a word when the group is free,
// an element index when it is finite.
struct VertexElt {
  Word w;
  int fin = -1;

  static VertexElt free_elt(Word word) { return VertexElt{std::move(word), -1}; }
  static VertexElt finite_elt(int index) { return VertexElt{Word(), index}; }
  bool is_finite() const { return fin >= 0; }
  friend bool operator==(const VertexElt&, const VertexElt&) = default;
};

// phi_{e,t(e)}: images of the edge-group generators in the group at t(e).
struct MonoSide {
  std::vector<Word> word_images;  // when the target group is free
  std::vector<int> elt_images;    // when the target group is finite
};

struct RaySpec {
  std::string name;
  std::string anchor_vertex;
  std::string anchor_coset;  // word in the fundamental-group config syntax (may be empty)
  std::string head;
  std::string period;
};

struct GraphOfGroups {
  OrientedGraph graph;
  std::vector<std::string> vertex_names;
  std::vector<std::string> edge_names;  // per unoriented edge
  std::vector<GroupSpec> vgroups;       // per vertex
  std::vector<GroupSpec> egroups;       // per unoriented edge (G_e = G_ebar)
  std::vector<MonoSide> mono_t;         // per oriented edge
  std::vector<char> in_tree;            // per unoriented edge
  int base_vertex = 0;
  std::string name;

  int vertex_by_name(const std::string& n) const;       // -1 if absent
  int unoriented_edge_by_name(const std::string& n) const;
  std::string oriented_edge_name(int e) const;          // bar orientation gets a ~ suffix
  const GroupSpec& edge_group(int e) const {            // oriented edge
    return egroups[static_cast<size_t>(e / 2)];
  }
  const MonoSide& mono_to_t(int e) const { return mono_t[static_cast<size_t>(e)]; }
  const MonoSide& mono_to_o(int e) const { return mono_t[static_cast<size_t>(OrientedGraph::bar(e))]; }
  bool edge_in_tree(int e) const { return in_tree[static_cast<size_t>(e / 2)] != 0; }
};

struct ValidationCheck {
  std::string clause;  // which structural condition was checked
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool ok = true;

  void add(const std::string& clause, bool passed, const std::string& detail);
  std::string summary() const;
  nlohmann::ordered_json to_json() const;
};

// Structural validation: graph conditions, edge monomorphism injectivity,
// spanning tree, generator-name uniqueness, and the quasi-isometric
// embedding witnesses (core diameters) for free vertex groups.
ValidationReport validate(const GraphOfGroups& gog);

struct Presentation {
  struct Relator {
    int family = 0;  // 1..4
    std::vector<std::string> tokens;  // generator name or name^-1 each
  };
  std::vector<std::string> generators;
  std::vector<Relator> relators;

  int family_count(int family) const;
  std::string text() const;
  nlohmann::ordered_json to_json() const;
};

// Presentation of the fundamental group over the chosen spanning tree:
// generators are the vertex-group generators plus the oriented edges; the
// relator families are (1) vertex-group relators, (2) ebar = e^-1,
// (3) e = 1 for tree edges, (4) e phi_t(a) e^-1 phi_o(a)^-1.
Presentation fundamental_presentation(const GraphOfGroups& gog);

// A config document: the graph of groups plus optional bundled rays.
struct GogDocument {
  GraphOfGroups gog;
  std::vector<RaySpec> rays;
  std::string description;
};

GogDocument document_from_json(const nlohmann::json& doc);
nlohmann::ordered_json document_to_json(const GogDocument& doc);
GogDocument load_document(const std::string& path);
void save_document(const GogDocument& doc, const std::string& path);

}  // namespace ggt
