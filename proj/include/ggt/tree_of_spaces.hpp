#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ggt/bass_serre.hpp"

namespace ggt {

// A point of the tree of spaces: an element of the coset named by a tree
// vertex (local element of the vertex group relative to the canonical
// representative) or a point of an edge space (an edge-group parameter).
// Edge loci are always stored in the even (configured) orientation.
struct SpacePoint {
  bool on_edge = false;
  TreeVertex vlocus;
  TreeEdge elocus;
  VertexElt local;

  static SpacePoint vertex_point(TreeVertex w, VertexElt g) {
    SpacePoint p;
    p.on_edge = false;
    p.vlocus = std::move(w);
    p.local = std::move(g);
    return p;
  }
  static SpacePoint edge_point(TreeEdge e, VertexElt a) {
    SpacePoint p;
    p.on_edge = true;
    p.elocus = std::move(e);
    p.local = std::move(a);
    return p;
  }
  friend bool operator==(const SpacePoint&, const SpacePoint&) = default;
};

struct MetricEstimate {
  HalfInt value;
  bool reachable = false;  // a path exists inside the materialized ball
  bool trusted = false;    // both endpoints clear the frontier by more than value
};

// Geometry shared by the materialized ball and the unbounded search:
// fiber steps, attaching edges, and the edge-space charts, with the
// canonicalizations memoized per edge locus.
class SpaceChart {
public:
  explicit SpaceChart(const BassSerre& bs) : bs_(bs), ctx_(bs.ctx()) {}
  const BassSerre& bs() const { return bs_; }
  const GogContext& ctx() const { return ctx_; }

  struct EdgeInfo {
    TreeEdge edge;        // even orientation
    TreeVertex tvert;     // [rep] G_t
    TreeVertex overt;     // [rep ebar] G_o
    VertexElt t_offset;   // t-side local of parameter a is t_offset * phi_t(a)
    VertexElt o_offset;   // o-side local of parameter a is o_offset * phi_o(a)
  };

  const EdgeInfo& edge_info(const TreeEdge& even_edge);

  // the edge space through the fiber point (w, g) along the oriented Y-edge
  // e at w.type: the even-oriented tree edge plus the parameter of the point
  std::pair<const EdgeInfo*, VertexElt> edge_through(const TreeVertex& w, const VertexElt& g,
                                                     int e);

  SpacePoint t_attach(const EdgeInfo& info, const VertexElt& a) const;
  SpacePoint o_attach(const EdgeInfo& info, const VertexElt& a) const;

  // enumerate the neighbors of p in the full (infinite) tree of spaces;
  // visit(neighbor, doubled edge weight)
  void neighbors(const SpacePoint& p, const std::function<void(SpacePoint, int)>& visit);

  std::string point_key(const SpacePoint& p) const;
  std::string vertex_locus_key(const TreeVertex& w) const;
  std::string edge_locus_key(const TreeEdge& e) const;

  // exact intrinsic fiber distance between two points of the same locus
  HalfInt fiber_distance(const SpacePoint& p, const SpacePoint& q) const;

private:
  const BassSerre& bs_;
  const GogContext& ctx_;
  std::map<std::string, EdgeInfo> edge_cache_;
};

// Unbounded short-range metric: uniform-cost search over the infinite tree
// of spaces, exact for any pair within the cap.
class ExactMetric {
public:
  explicit ExactMetric(SpaceChart& chart) : chart_(chart) {}

  std::optional<HalfInt> distance(const SpacePoint& p, const SpacePoint& q, HalfInt cap);
  // all points within cap of p, with exact distances, in deterministic order
  std::vector<std::pair<SpacePoint, HalfInt>> ball_around(const SpacePoint& p, HalfInt cap);
  // least distance from p to any key in `targets`, capped
  std::optional<HalfInt> distance_to_set(const SpacePoint& p,
                                         const std::unordered_map<std::string, int>& targets,
                                         HalfInt cap);

private:
  SpaceChart& chart_;
};

struct SpaceBall {
  TreeBall tree;
  int word_budget = 0;
  std::vector<SpacePoint> points;
  std::unordered_map<std::string, int> index;
  std::vector<std::vector<int>> fiber_points;  // per tree-ball vertex
  std::vector<std::vector<int>> edge_space_points;  // per tree-ball edge
  std::vector<char> frontier;
  std::vector<int> clearance_x2;  // doubled ball distance to the frontier set

  int find(const SpacePoint& p, const SpaceChart& chart) const;
};

struct QILift {
  std::vector<TreeVertex> path;
  std::vector<SpacePoint> points;
  std::vector<MetricEstimate> jumps;
  double measured_k = 0.0;
  bool complete = true;  // false when a fiber had no candidate point in the ball
};

struct FlareReport {
  bool applicable = false;  // central separation reached the threshold M
  HalfInt central;
  HalfInt end_forward;
  HalfInt end_backward;
  double lambda = 0.0;
  int half_length = 0;
};

class TreeOfSpaces {
public:
  explicit TreeOfSpaces(const BassSerre& bs) : bs_(bs), chart_(bs), exact_(chart_) {}
  const BassSerre& bs() const { return bs_; }
  SpaceChart& chart() { return chart_; }
  ExactMetric& exact() { return exact_; }

  SpacePoint basepoint() const;  // identity of the base vertex space
  SpacePoint theta(const Sequence& g) const;  // orbit map g -> g . x0

  // tree_budget bounds the cumulative rep length of materialized tree
  // vertices; it defaults to the word budget
  SpaceBall build_space_ball(const SpacePoint& center, int tree_radius, int word_budget,
                             int tree_budget = -1);

  MetricEstimate dist_ball(const SpacePoint& p, const SpacePoint& q, const SpaceBall& ball);

  // max over v in V(Y) of d_X(x0, identity of G_v); records D0 and the
  // per-vertex fiber thinness constants delta_v into the ledger
  HalfInt compute_D0(ConstantsLedger& ledger);

  enum class LiftStrategy { Nearest, ConstantSyllable };
  QILift qi_lift(const TreeGeodesic& path, LiftStrategy strategy, const SpaceBall& ball);

  FlareReport flare_probe(const QILift& lift1, const QILift& lift2, double threshold_m,
                          int center_index, ConstantsLedger& ledger);

  std::string ball_dot(const SpaceBall& ball);
  nlohmann::ordered_json ball_stats(const SpaceBall& ball, const ConstantsLedger& ledger);

  // properness profile of one fiber: for each cap M, the largest intrinsic
  // fiber distance seen among pairs at ball distance <= M
  nlohmann::ordered_json properness_profile(const SpaceBall& ball, int fiber_index,
                                            const std::vector<HalfInt>& caps, int sample_limit);

private:
  const BassSerre& bs_;
  SpaceChart chart_;
  ExactMetric exact_;
};

}  // namespace ggt
