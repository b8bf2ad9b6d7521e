#include <doctest.h>

#include "ggt/ladder.hpp"
#include "ggt/rng.hpp"

using namespace ggt;

namespace {

std::string config_path(const std::string& name) {
  return std::string(GGT_CONFIG_DIR) + "/" + name + ".json";
}

struct DoubleSetup {
  GogDocument doc;
  std::unique_ptr<GogContext> ctx;
  std::unique_ptr<BassSerre> bs;
  std::unique_ptr<TreeOfSpaces> tos;
  std::unique_ptr<LadderLab> lab;
  SpaceBall ball;

  explicit DoubleSetup(int tree_radius = 2, int word_budget = 8, int tree_budget = 2)
      : doc(load_document(config_path("double_f2"))) {
    ctx = std::make_unique<GogContext>(doc.gog);
    bs = std::make_unique<BassSerre>(*ctx);
    tos = std::make_unique<TreeOfSpaces>(*bs);
    lab = std::make_unique<LadderLab>(*tos);
    ball = tos->build_space_ball(tos->basepoint(), tree_radius, word_budget, tree_budget);
  }

  SpacePoint base_point(const std::string& word) const {
    return SpacePoint::vertex_point(bs->base_vertex(0),
                                    VertexElt::free_elt(doc.gog.vgroups[0].alphabet.parse(word)));
  }
};

ConstantsLedger make_ledger(int d0, int d1) {
  ConstantsLedger ledger;
  ledger.set("D0", HalfInt::of(d0), "configured");
  ledger.set("D1", HalfInt::of(d1), "configured");
  return ledger;
}

}  // namespace

TEST_CASE("no admissible edge: the ladder is the single segment") {
  DoubleSetup s;
  ConstantsLedger ledger = make_ledger(1, 2);
  // a segment in the b-direction stays far from every edge-space coset
  Ladder ladder = s.lab->build_ladder(s.bs->base_vertex(0), s.base_point(""),
                                      s.base_point("b a^-1 b"), ledger, 2, s.ball);
  CHECK(ladder.size() == 1);
  CHECK(ladder.segments[0].points.size() == 4);
}

TEST_CASE("double example: the edge-group segment admits the mirror segment") {
  DoubleSetup s;
  ConstantsLedger ledger = make_ledger(1, 2);
  Ladder ladder = s.lab->build_ladder(s.bs->base_vertex(0), s.base_point(""),
                                      s.base_point("a a b b a a b b"), ledger, 1, s.ball);
  REQUIRE(ladder.size() >= 2);
  // the admitted child lives in the opposite vertex space and mirrors lambda
  const LadderSegment& child = ladder.segments[1];
  CHECK(child.w.type == 1);
  CHECK(child.parent == 0);
  CHECK(child.admission_diameter >= HalfInt::of(2));
  // the mirror of [1, (a^2 b^2)^2] is [1, (x^2 y^2)^2] up to the crossing
  CHECK(s.lab->dump(ladder)["segments"].size() == ladder.segments.size());
  const Alphabet& xy = s.doc.gog.vgroups[1].alphabet;
  Word expect = xy.parse("x x y y x x y y");
  bool mirrored = (child.x.local.w == Word() && child.y.local.w == expect) ||
                  (child.y.local.w == Word() && child.x.local.w == expect);
  CHECK(mirrored);
}

TEST_CASE("raising D1 never enlarges the subtree") {
  DoubleSetup s;
  size_t prev = std::numeric_limits<size_t>::max();
  for (int d1 : {2, 4, 8}) {
    ConstantsLedger ledger = make_ledger(1, d1);
    Ladder ladder = s.lab->build_ladder(s.bs->base_vertex(0), s.base_point(""),
                                        s.base_point("a a b b a a b b"), ledger, 2, s.ball);
    CHECK(ladder.segments.size() <= prev);
    prev = ladder.segments.size();
  }
}

TEST_CASE("retraction fixes the ladder pointwise and lands in it") {
  DoubleSetup s;
  ConstantsLedger ledger = make_ledger(1, 2);
  Ladder ladder = s.lab->build_ladder(s.bs->base_vertex(0), s.base_point(""),
                                      s.base_point("a a b b a a b b"), ledger, 2, s.ball);
  for (const LadderSegment& seg : ladder.segments)
    for (const SpacePoint& p : seg.points) CHECK(s.lab->retract(p, ladder, s.ball) == p);

  Rng rng(401);
  for (int trial = 0; trial < 60; ++trial) {
    const SpacePoint& p = s.ball.points[rng.below(s.ball.points.size())];
    SpacePoint r = s.lab->retract(p, ladder, s.ball);
    CHECK(ladder.contains_point_key(s.tos->chart().point_key(r)));
  }
}

TEST_CASE("over the subtree the retraction is the exact nearest-point projection") {
  DoubleSetup s;
  ConstantsLedger ledger = make_ledger(1, 2);
  Ladder ladder = s.lab->build_ladder(s.bs->base_vertex(0), s.base_point(""),
                                      s.base_point("a a b b"), ledger, 1, s.ball);
  Rng rng(409);
  const auto& ids = s.ball.fiber_points[0];
  const LadderSegment& seg = ladder.segments[0];
  for (int trial = 0; trial < 100; ++trial) {
    const SpacePoint& p = s.ball.points[static_cast<size_t>(ids[rng.below(ids.size())])];
    SpacePoint r = s.lab->retract(p, ladder, s.ball);
    // brute force over the segment in the fiber metric
    HalfInt best = s.tos->chart().fiber_distance(p, seg.points.front());
    SpacePoint best_point = seg.points.front();
    for (const SpacePoint& q : seg.points) {
      HalfInt d = s.tos->chart().fiber_distance(p, q);
      if (d < best) {
        best = d;
        best_point = q;
      }
    }
    CHECK(r == best_point);
  }
}

TEST_CASE("off-subtree retraction is constant on fibers beyond the exit edge") {
  DoubleSetup s(2, 6, 2);
  ConstantsLedger ledger = make_ledger(1, 8);  // D1 too big: only the root segment
  Ladder ladder = s.lab->build_ladder(s.bs->base_vertex(0), s.base_point(""),
                                      s.base_point("a a b b"), ledger, 1, s.ball);
  REQUIRE(ladder.size() == 1);
  // pick an off-subtree fiber and check two of its points retract equally
  int far = -1;
  for (size_t vi = 0; vi < s.ball.tree.vertices.size(); ++vi) {
    if (s.ball.tree.vertices[vi].vertex.type == 1) {
      far = static_cast<int>(vi);
      break;
    }
  }
  REQUIRE(far >= 0);
  const auto& ids = s.ball.fiber_points[static_cast<size_t>(far)];
  SpacePoint first = s.lab->retract(s.ball.points[static_cast<size_t>(ids[0])], ladder, s.ball);
  for (size_t i = 1; i < std::min<size_t>(ids.size(), 40); ++i) {
    SpacePoint other =
        s.lab->retract(s.ball.points[static_cast<size_t>(ids[i])], ladder, s.ball);
    CHECK(other == first);
  }
}

TEST_CASE("ladders, retraction reports, and C are deterministic") {
  DoubleSetup s;
  ConstantsLedger ledger = make_ledger(1, 2);
  Ladder l1 = s.lab->build_ladder(s.bs->base_vertex(0), s.base_point(""),
                                  s.base_point("a a b b a a b b"), ledger, 2, s.ball);
  Ladder l2 = s.lab->build_ladder(s.bs->base_vertex(0), s.base_point(""),
                                  s.base_point("a a b b a a b b"), ledger, 2, s.ball);
  CHECK(s.lab->dump(l1).dump() == s.lab->dump(l2).dump());
  RetractionReport r1 = s.lab->measure_retraction(l1, s.ball, 40, 99);
  RetractionReport r2 = s.lab->measure_retraction(l2, s.ball, 40, 99);
  CHECK(r1.to_json().dump() == r2.to_json().dump());
  QuasiconvexityReport q1 = s.lab->measure_quasiconvexity(l1, s.ball, 30, 7);
  QuasiconvexityReport q2 = s.lab->measure_quasiconvexity(l2, s.ball, 30, 7);
  CHECK(q1.to_json().dump() == q2.to_json().dump());
}

TEST_CASE("degenerate ladder: the retraction is 1-Lipschitz with no additive term") {
  // single-vertex graph: X is one tree fiber, P is the exact tree projection
  GraphOfGroups gog;
  gog.graph.num_vertices = 1;
  gog.vertex_names = {"v"};
  GroupSpec spec;
  spec.kind = GroupSpec::Kind::Free;
  spec.alphabet.names = {"a", "b"};
  gog.vgroups = {spec};
  gog.base_vertex = 0;
  GogContext ctx(gog);
  BassSerre bs(ctx);
  TreeOfSpaces tos(bs);
  LadderLab lab(tos);
  SpaceBall ball = tos.build_space_ball(tos.basepoint(), 0, 5);
  ConstantsLedger ledger = make_ledger(1, 2);
  SpacePoint x = SpacePoint::vertex_point(bs.base_vertex(0), VertexElt::free_elt(Word()));
  SpacePoint y = SpacePoint::vertex_point(
      bs.base_vertex(0), VertexElt::free_elt(spec.alphabet.parse("a a b")));
  Ladder ladder = lab.build_ladder(bs.base_vertex(0), x, y, ledger, 2, ball);
  CHECK(ladder.size() == 1);
  RetractionReport report = lab.measure_retraction(ladder, ball, 120, 17);
  CHECK(report.samples_used > 0);
  CHECK(report.a_fit == 1.0);
  CHECK(report.b_fit == 0.0);
  // replay: every sampled pair satisfies the fitted bound
  for (const auto& pr : report.pairs)
    CHECK(pr.image_distance.value() <= report.a_fit * pr.input_distance.value() + report.b_fit);
}

TEST_CASE("quasiconvexity: fiber-only pairs contribute zero") {
  DoubleSetup s;
  ConstantsLedger ledger = make_ledger(1, 8);  // root only
  Ladder ladder = s.lab->build_ladder(s.bs->base_vertex(0), s.base_point(""),
                                      s.base_point("a a b b"), ledger, 1, s.ball);
  REQUIRE(ladder.size() == 1);
  QuasiconvexityReport report = s.lab->measure_quasiconvexity(ladder, s.ball, 40, 23);
  // all geodesics between points of a single fiber segment stay on it
  CHECK(report.c_measured == HalfInt::of(0));
}

TEST_CASE("ladder stability under deepening the ball") {
  DoubleSetup shallow(2, 6, 2);
  DoubleSetup deep(2, 8, 2);
  ConstantsLedger ledger = make_ledger(1, 2);
  Ladder a = shallow.lab->build_ladder(shallow.bs->base_vertex(0), shallow.base_point(""),
                                       shallow.base_point("a a b b"), ledger, 1, shallow.ball);
  Ladder b = deep.lab->build_ladder(deep.bs->base_vertex(0), deep.base_point(""),
                                    deep.base_point("a a b b"), ledger, 1, deep.ball);
  // segments admitted without truncation must persist
  CHECK(b.segments.size() >= a.segments.size());
  for (const LadderSegment& seg : a.segments) {
    bool found = false;
    for (const LadderSegment& other : b.segments)
      if (other.w == seg.w) found = true;
    CHECK(found);
  }
}

TEST_CASE("dot overlay emits the segments") {
  DoubleSetup s;
  ConstantsLedger ledger = make_ledger(1, 2);
  Ladder ladder = s.lab->build_ladder(s.bs->base_vertex(0), s.base_point(""),
                                      s.base_point("a a b b a a b b"), ledger, 1, s.ball);
  std::string dot = s.lab->dot_overlay(ladder, s.ball);
  CHECK(dot.find("cluster_s0") != std::string::npos);
  CHECK(dot.find("color=red") != std::string::npos);
}
