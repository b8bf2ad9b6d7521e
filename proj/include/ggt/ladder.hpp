#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "ggt/tree_of_spaces.hpp"

namespace ggt {

struct LadderSegment {
  TreeVertex w;
  SpacePoint x, y;                  // chosen endpoints in the fiber of w
  std::vector<SpacePoint> points;   // the fiber geodesic [x, y]
  int parent = -1;                  // segment index, -1 at the root
  HalfInt admission_diameter;       // diameter that admitted this segment
};

struct Ladder {
  std::vector<LadderSegment> segments;  // [0] is the root segment
  HalfInt d0, d1;
  int depth = 0;
  bool truncated = false;  // an admission decision hit the materialization budget
  std::unordered_map<std::string, int> segment_by_vertex;  // tree-vertex key -> segment
  std::unordered_map<std::string, int> point_segment;      // point key -> segment

  bool contains_point_key(const std::string& key) const {
    return point_segment.count(key) > 0;
  }
  int size() const { return static_cast<int>(segments.size()); }
};

struct RetractionReport {
  std::uint64_t seed = 0;
  int samples_requested = 0;
  int samples_used = 0;
  int skipped = 0;
  double a_fit = 1.0;
  double b_fit = 0.0;
  struct Pair {
    HalfInt input_distance;
    HalfInt image_distance;
  };
  std::vector<Pair> pairs;
  nlohmann::ordered_json to_json() const;
};

struct QuasiconvexityReport {
  std::uint64_t seed = 0;
  int pairs_used = 0;
  int skipped_untrusted = 0;
  HalfInt c_measured;
  nlohmann::ordered_json to_json() const;
};

class LadderLab {
public:
  LadderLab(TreeOfSpaces& tos) : tos_(tos) {}

  // Sphere-by-sphere construction of B(lambda) for the fiber geodesic with
  // endpoints x, y over the tree vertex v. D0 and D1 are read from the
  // ledger ("D0", "D1"); an edge is admitted when the D0-neighborhood of
  // the current segment meets its edge-space image in a set of fiber
  // diameter at least D1.
  Ladder build_ladder(const TreeVertex& v, const SpacePoint& x, const SpacePoint& y,
                      const ConstantsLedger& ledger, int depth, const SpaceBall& ball);

  // Nearest-point projection onto the ladder: exact fiber projection over
  // the subtree, the off-subtree rule elsewhere (shortlex-least point of
  // the projection of the exit edge-space image).
  SpacePoint retract(const SpacePoint& p, const Ladder& ladder, const SpaceBall& ball);

  RetractionReport measure_retraction(const Ladder& ladder, const SpaceBall& ball, int samples,
                                      std::uint64_t seed);

  QuasiconvexityReport measure_quasiconvexity(const Ladder& ladder, const SpaceBall& ball,
                                              int samples, std::uint64_t seed);

  // deterministic shortest path inside the materialized ball
  std::vector<SpacePoint> ball_geodesic(const SpacePoint& p, const SpacePoint& q,
                                        const SpaceBall& ball);
  // ball distance from a point to the ladder
  MetricEstimate distance_to_ladder(const SpacePoint& p, const Ladder& ladder,
                                    const SpaceBall& ball);

  nlohmann::ordered_json dump(const Ladder& ladder) const;
  std::string dot_overlay(const Ladder& ladder, const SpaceBall& ball);

private:
  TreeOfSpaces& tos_;
  std::vector<SpacePoint> fiber_geodesic(const TreeVertex& w, const SpacePoint& x,
                                         const SpacePoint& y) const;
  SpacePoint project_to_fiber_segment(const SpacePoint& p, const LadderSegment& seg) const;
};

}  // namespace ggt
