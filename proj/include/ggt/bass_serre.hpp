#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ggt/half_int.hpp"
#include "ggt/sequences.hpp"

namespace ggt {

// Named numeric constants with provenance, cited by reports.
struct LedgerEntry {
  double value = 0.0;
  std::int64_t exact_x2 = 0;  // doubled exact value when half-integral
  bool has_exact = false;
  std::string provenance;  // computed | configured | measured
  std::string note;
};

struct ConstantsLedger {
  std::vector<std::pair<std::string, LedgerEntry>> entries;  // insertion order

  void set(const std::string& name, HalfInt value, const std::string& provenance,
           const std::string& note = "");
  void set_value(const std::string& name, double value, const std::string& provenance,
                 const std::string& note = "");
  const LedgerEntry* find(const std::string& name) const;
  HalfInt get_exact(const std::string& name) const;  // throws if absent or inexact
  nlohmann::ordered_json to_json() const;
};

// Vertex of the Bass-Serre tree: the coset rep G_type, keyed by the
// canonical coset path so that exploration routes merge.
struct TreeVertex {
  int type = 0;      // vertex of Y
  Sequence rep;      // canonical path base -> type, trailing syllable dropped
  friend bool operator==(const TreeVertex&, const TreeVertex&) = default;
};

// Oriented edge of the tree: the coset rep Im phi_{etype,t} with
// t(edge) = [rep] G_{t} and o(edge) = [rep ebar] G_{o}.
struct TreeEdge {
  int etype = 0;     // oriented edge of Y
  Sequence rep;      // canonical path base -> t(etype), reduced mod Im phi_{etype,t}
  friend bool operator==(const TreeEdge&, const TreeEdge&) = default;
};

struct IncidentEdge {
  TreeEdge edge;
  TreeVertex opposite;  // the t-endpoint, opposite to the enumerated vertex
  VertexElt coset;      // Schreier transversal rep in G_{o(etype)}
};

struct IncidenceResult {
  std::vector<IncidentEdge> edges;
  bool truncated = false;  // the Schreier enumeration hit the word budget
};

struct GeodesicStep {
  int etype = 0;       // oriented Y-edge crossed
  VertexElt coset;     // transversal syllable in G_{o(etype)}
};

struct TreeGeodesic {
  std::vector<TreeVertex> vertices;  // consecutive, first = from, last = to
  std::vector<GeodesicStep> steps;   // steps[i] joins vertices[i] to vertices[i+1]
  int length() const { return static_cast<int>(steps.size()); }
};

// Pointwise stabilizer of a tree path, in local coordinates at a vertex:
// the global subgroup is rep(at) * local * rep(at)^-1.
struct Stabilizer {
  bool free = true;
  SubgroupHandle sub;   // local subgroup of the (free) vertex group at `at`
  FiniteSubgroup fin;   // finite case
  TreeVertex at;

  bool contains_local(const GogContext& ctx, const VertexElt& g) const;
  bool is_trivial() const;
  std::string describe(const GogContext& ctx) const;
};

struct TreeBallVertex {
  TreeVertex vertex;
  int depth = 0;
  int parent = -1;       // index into the ball's vertex list
  bool truncated = false;  // incident enumeration at this vertex hit the budget
};

struct TreeBall {
  TreeVertex center;
  int radius = 0;
  int budget = 0;  // cumulative word-length budget on coset representatives
  std::vector<TreeBallVertex> vertices;
  std::vector<TreeEdge> edges;  // unique, in canonical (even) orientation
  std::unordered_map<std::string, int> vertex_index;

  int find_vertex(const std::string& key) const;
};

class BassSerre {
public:
  explicit BassSerre(const GogContext& ctx) : ctx_(ctx) {}
  const GogContext& ctx() const { return ctx_; }

  TreeVertex vertex_of(const Sequence& g, int vtype) const;  // [g] G_v
  TreeVertex base_vertex(int vtype) const;                   // tree-path coset
  std::string vertex_key(const TreeVertex& w) const;
  std::string edge_key_unoriented(const TreeEdge& e) const;

  TreeVertex t_endpoint(const TreeEdge& e) const;
  TreeVertex o_endpoint(const TreeEdge& e) const;
  TreeEdge reverse(const TreeEdge& e) const;  // same unoriented edge, bar orientation

  // the tree edge at w along the oriented Y-edge e with the given Schreier
  // transversal syllable (a canonical coset representative in G_{o(e)})
  TreeEdge edge_at(const TreeVertex& w, int e, const VertexElt& coset) const;

  // all tree edges at w whose transversal syllable fits the word budget;
  // one per oriented Y-edge starting at w.type and Schreier coset of the
  // origin-side image
  IncidenceResult incident_edges(const TreeVertex& w, int budget) const;

  TreeGeodesic tree_geodesic(const TreeVertex& w1, const TreeVertex& w2) const;

  TreeVertex act(const Sequence& g, const TreeVertex& w) const;
  TreeEdge act(const Sequence& g, const TreeEdge& e) const;

  // pointwise stabilizer of the geodesic [w1, w2] = Stab(w1) cap Stab(w2),
  // local at w1 (free and finite vertex groups)
  Stabilizer path_stabilizer(const TreeVertex& w1, const TreeVertex& w2) const;
  Stabilizer full_stabilizer(const TreeVertex& w) const;

  TreeBall build_ball(const TreeVertex& center, int radius, int budget) const;

  std::string ball_dot(const TreeBall& ball) const;
  nlohmann::ordered_json ball_stats(const TreeBall& ball) const;

private:
  const GogContext& ctx_;
  Sequence edge_rep_normalize(Sequence path, int etype) const;
};

}  // namespace ggt
