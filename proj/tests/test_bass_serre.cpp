#include <doctest.h>

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "ggt/bass_serre.hpp"
#include "ggt/rng.hpp"

using namespace ggt;

namespace {

std::string config_path(const std::string& name) {
  return std::string(GGT_CONFIG_DIR) + "/" + name + ".json";
}

Sequence random_loop(const GogContext& ctx, Rng& rng, int edge_syllables, int max_elt_len) {
  const auto& Y = ctx.gog().graph;
  Sequence s = ctx.seq_identity(ctx.base());
  auto random_elt = [&](int v) {
    const GroupSpec& spec = ctx.vgroup(v);
    if (spec.is_free())
      return VertexElt::free_elt(
          random_reduced_word(rng, spec.alphabet.rank(), rng.range(0, max_elt_len)));
    return VertexElt::finite_elt(
        static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.table.order))));
  };
  s.head = random_elt(ctx.base());
  int v = ctx.base();
  for (int i = 0; i < edge_syllables; ++i) {
    std::vector<int> out_edges;
    for (int e = 0; e < Y.num_oriented_edges(); ++e)
      if (Y.o(e) == v) out_edges.push_back(e);
    if (out_edges.empty()) break;
    int e = out_edges[rng.below(out_edges.size())];
    v = Y.t(e);
    s.tail.push_back({e, random_elt(v)});
  }
  return ctx.multiply(s, ctx.tree_path(v, ctx.base()));
}

}  // namespace

TEST_CASE("amalgam with index-1 images: every vertex has exactly one edge per direction") {
  GogDocument doc = load_document(config_path("free_amalgam_trivial"));
  GogContext ctx(doc.gog);
  BassSerre bs(ctx);
  for (int budget : {0, 2, 5}) {
    IncidenceResult inc = bs.incident_edges(bs.base_vertex(0), budget);
    CHECK(inc.edges.size() == 1);  // one oriented Y-edge out of v1, index-1 image
    CHECK(!inc.truncated);
  }
  // the Bass-Serre tree of Z amalgamated over Z (indices 1/1) is a segment:
  // radius-3 ball is just the two vertices
  TreeBall ball = bs.build_ball(bs.base_vertex(0), 3, 6);
  CHECK(ball.vertices.size() == 2);
  CHECK(ball.edges.size() == 1);
}

TEST_CASE("double example: edge count at the base grows with the budget") {
  GogDocument doc = load_document(config_path("double_f2"));
  GogContext ctx(doc.gog);
  BassSerre bs(ctx);
  TreeVertex base = bs.base_vertex(0);
  // oracle: the number of left cosets of <a^2 b^2> in F(a,b) with a
  // representative of length <= L
  SubgroupHandle H = fold({doc.gog.vgroups[0].alphabet.parse("a a b b")}, 2);
  size_t prev = 0;
  for (int budget : {0, 1, 2, 3}) {
    IncidenceResult inc = bs.incident_edges(base, budget);
    auto cosets = schreier_left_cosets(H.core, budget);
    CHECK(inc.edges.size() == cosets.reps.size());
    CHECK(inc.truncated);  // infinite index
    CHECK(inc.edges.size() >= prev);
    prev = inc.edges.size();
    // relation (*): o(g G^e_e) = g G_{o(e)} for every emitted edge
    for (const IncidentEdge& ie : inc.edges) {
      CHECK(bs.o_endpoint(ie.edge) == base);
      CHECK(bs.t_endpoint(ie.edge) == ie.opposite);
      CHECK(ie.opposite.type == doc.gog.graph.t(ie.edge.etype));
    }
  }
}

TEST_CASE("finite_edge example: the tree is a line") {
  GogDocument doc = load_document(config_path("finite_edge"));
  GogContext ctx(doc.gog);
  BassSerre bs(ctx);
  // each vertex group Z4 over the edge image Z2 gives index 2: two incident
  // edges per vertex, so the tree is 2-regular
  TreeBall ball = bs.build_ball(bs.base_vertex(0), 3, 10);
  CHECK(ball.vertices.size() == 7);  // a path of 7 vertices
  CHECK(ball.edges.size() == 6);
}

TEST_CASE("tree balls are trees and reverse() is an involution on edges") {
  for (const std::string name : {"double_f2", "hnn_malnormal", "finite_edge"}) {
    GogDocument doc = load_document(config_path(name));
    GogContext ctx(doc.gog);
    BassSerre bs(ctx);
    TreeBall ball = bs.build_ball(bs.base_vertex(ctx.base()), 2, 4);
    // no truncation at these sizes for finite_edge; for the free examples the
    // leaves may be truncated but the collected region must still be a tree
    std::set<std::string> vkeys;
    for (const auto& v : ball.vertices) vkeys.insert(bs.vertex_key(v.vertex));
    CHECK(vkeys.size() == ball.vertices.size());
    // |edges| = |vertices| - 1 for edges with both endpoints inside
    CHECK(ball.edges.size() == ball.vertices.size() - 1);
    for (const TreeEdge& e : ball.edges) {
      TreeEdge back = bs.reverse(bs.reverse(e));
      CHECK(back == e);
      CHECK(bs.t_endpoint(bs.reverse(e)) == bs.o_endpoint(e));
      CHECK(bs.o_endpoint(bs.reverse(e)) == bs.t_endpoint(e));
    }
  }
}

TEST_CASE("tree geodesics agree with ball BFS") {
  Rng rng(211);
  for (const std::string name : {"double_f2", "hnn_malnormal", "finite_edge"}) {
    GogDocument doc = load_document(config_path(name));
    GogContext ctx(doc.gog);
    BassSerre bs(ctx);
    TreeBall ball = bs.build_ball(bs.base_vertex(ctx.base()), 3, 5);
    // BFS distances inside the ball
    std::map<int, std::vector<int>> adj;
    for (const TreeEdge& e : ball.edges) {
      int a = ball.find_vertex(bs.vertex_key(bs.o_endpoint(e)));
      int b = ball.find_vertex(bs.vertex_key(bs.t_endpoint(e)));
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    auto bfs_dist = [&](int from, int to) {
      std::map<int, int> dist{{from, 0}};
      std::deque<int> q{from};
      while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        if (x == to) return dist[x];
        for (int y : adj[x])
          if (!dist.count(y)) {
            dist[y] = dist[x] + 1;
            q.push_back(y);
          }
      }
      return -1;
    };
    for (int trial = 0; trial < 50; ++trial) {
      int i = static_cast<int>(rng.below(ball.vertices.size()));
      int j = static_cast<int>(rng.below(ball.vertices.size()));
      TreeGeodesic geo = bs.tree_geodesic(ball.vertices[static_cast<size_t>(i)].vertex,
                                          ball.vertices[static_cast<size_t>(j)].vertex);
      CHECK(geo.length() == bfs_dist(i, j));
      CHECK(geo.vertices.front() == ball.vertices[static_cast<size_t>(i)].vertex);
      CHECK(geo.vertices.back() == ball.vertices[static_cast<size_t>(j)].vertex);
      // consecutive vertices of the geodesic are adjacent with the named edge
      for (size_t k = 0; k + 1 < geo.vertices.size(); ++k) {
        CHECK(geo.vertices[k].type == doc.gog.graph.o(geo.steps[k].etype));
        CHECK(geo.vertices[k + 1].type == doc.gog.graph.t(geo.steps[k].etype));
      }
    }
  }
}

TEST_CASE("geodesic concatenation cancels backtracks") {
  Rng rng(223);
  GogDocument doc = load_document(config_path("double_f2"));
  GogContext ctx(doc.gog);
  BassSerre bs(ctx);
  TreeBall ball = bs.build_ball(bs.base_vertex(0), 3, 5);
  for (int trial = 0; trial < 25; ++trial) {
    const TreeVertex& a = ball.vertices[rng.below(ball.vertices.size())].vertex;
    const TreeVertex& b = ball.vertices[rng.below(ball.vertices.size())].vertex;
    const TreeVertex& c = ball.vertices[rng.below(ball.vertices.size())].vertex;
    int ab = bs.tree_geodesic(a, b).length();
    int bc = bs.tree_geodesic(b, c).length();
    int ac = bs.tree_geodesic(a, c).length();
    CHECK(ac <= ab + bc);
    CHECK((ab + bc - ac) % 2 == 0);  // overlap cancels in pairs
  }
}

TEST_CASE("action laws and equivariance") {
  Rng rng(227);
  for (const std::string name :
       {"free_amalgam_trivial", "double_f2", "hnn_malnormal", "finite_edge"}) {
    GogDocument doc = load_document(config_path(name));
    GogContext ctx(doc.gog);
    BassSerre bs(ctx);
    TreeBall ball = bs.build_ball(bs.base_vertex(ctx.base()), 2, 4);
    for (int trial = 0; trial < 15; ++trial) {
      Sequence g = random_loop(ctx, rng, rng.range(0, 2), 2);
      const TreeVertex& w = ball.vertices[rng.below(ball.vertices.size())].vertex;
      CHECK(bs.act(ctx.seq_identity(ctx.base()), w) == w);
      TreeVertex moved = bs.act(g, w);
      CHECK(bs.act(ctx.inverse(g), moved) == w);
      // action preserves type and adjacency (relation (*))
      CHECK(moved.type == w.type);
      IncidenceResult inc = bs.incident_edges(w, 2);
      for (const IncidentEdge& ie : inc.edges) {
        TreeEdge me = bs.act(g, ie.edge);
        CHECK(bs.o_endpoint(me) == bs.act(g, bs.o_endpoint(ie.edge)));
        CHECK(bs.t_endpoint(me) == bs.act(g, bs.t_endpoint(ie.edge)));
      }
      // stabilizer elements fix the vertex: w.rep h w.rep^-1 for h in G_{type}
      VertexElt h;
      const GroupSpec& spec = ctx.vgroup(w.type);
      if (spec.is_free()) {
        h = VertexElt::free_elt(random_reduced_word(rng, spec.alphabet.rank(), rng.range(0, 3)));
      } else {
        h = VertexElt::finite_elt(
            static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.table.order))));
      }
      Sequence stab_elt = ctx.multiply(
          w.rep, ctx.multiply(ctx.seq_vertex(w.type, h), ctx.inverse(w.rep)));
      CHECK(bs.act(stab_elt, w) == w);
    }
  }
}

TEST_CASE("path stabilizer: same vertex gives the full vertex group") {
  GogDocument doc = load_document(config_path("double_f2"));
  GogContext ctx(doc.gog);
  BassSerre bs(ctx);
  TreeVertex base = bs.base_vertex(0);
  Stabilizer s = bs.path_stabilizer(base, base);
  CHECK(s.free);
  CHECK(s.sub.is_whole_group());
}

TEST_CASE("path stabilizer of adjacent vertices in the double is the edge image") {
  GogDocument doc = load_document(config_path("double_f2"));
  GogContext ctx(doc.gog);
  BassSerre bs(ctx);
  const Alphabet& ab = doc.gog.vgroups[0].alphabet;
  TreeVertex base = bs.base_vertex(0);
  IncidenceResult inc = bs.incident_edges(base, 0);  // just the identity coset
  REQUIRE(inc.edges.size() == 1);
  Stabilizer s = bs.path_stabilizer(base, inc.edges[0].opposite);
  REQUIRE(s.free);
  SubgroupHandle expected = fold({ab.parse("a a b b")}, 2);
  CHECK(s.sub.core == expected.core);
  // cross-check: random products of the edge generator stabilize both ends
  Rng rng(229);
  for (int trial = 0; trial < 20; ++trial) {
    int k = rng.range(-3, 3);
    Word w = word_pow(ab.parse("a a b b"), k);
    CHECK(s.contains_local(ctx, VertexElt::free_elt(w)));
  }
  CHECK(!s.contains_local(ctx, VertexElt::free_elt(ab.parse("a"))));
}

TEST_CASE("distance-2 path stabilizer matches the intersect oracle") {
  GogDocument doc = load_document(config_path("double_f2"));
  GogContext ctx(doc.gog);
  BassSerre bs(ctx);
  const Alphabet& ab = doc.gog.vgroups[0].alphabet;
  TreeVertex base = bs.base_vertex(0);
  IncidenceResult inc = bs.incident_edges(base, 1);
  // find the neighbors through cosets 1 and a of <a^2 b^2>
  TreeVertex via_id, via_a;
  bool found_id = false, found_a = false;
  for (const IncidentEdge& ie : inc.edges) {
    if (ie.coset == VertexElt::free_elt(Word())) {
      via_id = ie.opposite;
      found_id = true;
    }
    if (ie.coset == VertexElt::free_elt(ab.parse("a"))) {
      via_a = ie.opposite;
      found_a = true;
    }
  }
  REQUIRE(found_id);
  REQUIRE(found_a);
  // the path via_id -- base -- via_a has pointwise stabilizer
  // <a^2 b^2> cap a <a^2 b^2> a^-1 in base-local coordinates
  Stabilizer s = bs.path_stabilizer(via_id, via_a);
  SubgroupHandle H = fold({ab.parse("a a b b")}, 2);
  SubgroupHandle oracle = intersect(H, conjugate(H, ab.parse("a")));
  // transport s (local at via_id) to base-local coordinates: the conjugator
  // between frames is the connecting syllable, here the edge itself
  TreeGeodesic geo = bs.tree_geodesic(via_id, via_a);
  REQUIRE(geo.length() == 2);
  CHECK(geo.vertices[1] == base);
  // oracle is computed at the base vertex; s at via_id: check extensionally
  // on all short words of the base group transported into via_id coordinates
  // via the tree edge: phi_t(c)^k generate the overlap, so compare membership
  // through the global action instead
  Rng rng(233);
  int agreements = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Word w = random_reduced_word(rng, 2, rng.range(0, 10));
    // h = base-local element w; h stabilizes both leaves iff w in oracle
    Sequence h = ctx.seq_vertex(0, VertexElt::free_elt(w));
    bool fixes = bs.act(h, via_id) == via_id && bs.act(h, via_a) == via_a;
    CHECK(fixes == contains(oracle, w));
    agreements += fixes;
  }
  // the oracle subgroup here is trivial: <a^2b^2> and a<a^2b^2>a^-1 intersect
  // trivially (checked by enumeration up to length 10 in the stallings tests)
  CHECK(oracle.core.is_trivial());
  CHECK(s.is_trivial());
  CHECK(agreements > 0);  // identity at least
}

TEST_CASE("path stabilizer is symmetric up to core isomorphism") {
  Rng rng(239);
  for (const std::string name : {"double_f2", "hnn_malnormal", "finite_edge"}) {
    GogDocument doc = load_document(config_path(name));
    GogContext ctx(doc.gog);
    BassSerre bs(ctx);
    TreeBall ball = bs.build_ball(bs.base_vertex(ctx.base()), 2, 4);
    for (int trial = 0; trial < 10; ++trial) {
      const TreeVertex& a = ball.vertices[rng.below(ball.vertices.size())].vertex;
      const TreeVertex& b = ball.vertices[rng.below(ball.vertices.size())].vertex;
      Stabilizer sab = bs.path_stabilizer(a, b);
      Stabilizer sba = bs.path_stabilizer(b, a);
      if (sab.free && sba.free) {
        CHECK(sab.sub.basis.size() == sba.sub.basis.size());
      } else if (!sab.free && !sba.free) {
        CHECK(sab.fin.size() == sba.fin.size());
      }
      // extensional check at a: elements of sab fix both endpoints
      if (sab.free) {
        for (const Word& bw : sab.sub.basis) {
          Sequence g = ctx.multiply(
              a.rep,
              ctx.multiply(ctx.seq_vertex(a.type, VertexElt::free_elt(bw)), ctx.inverse(a.rep)));
          CHECK(bs.act(g, a) == a);
          CHECK(bs.act(g, b) == b);
        }
      } else {
        for (int el : sab.fin.elements) {
          Sequence g = ctx.multiply(
              a.rep,
              ctx.multiply(ctx.seq_vertex(a.type, VertexElt::finite_elt(el)), ctx.inverse(a.rep)));
          CHECK(bs.act(g, a) == a);
          CHECK(bs.act(g, b) == b);
        }
      }
    }
  }
}

TEST_CASE("finite example: edge stabilizer is the order-2 image") {
  GogDocument doc = load_document(config_path("finite_edge"));
  GogContext ctx(doc.gog);
  BassSerre bs(ctx);
  TreeVertex base = bs.base_vertex(0);
  IncidenceResult inc = bs.incident_edges(base, 1);
  REQUIRE(inc.edges.size() == 2);  // index 2
  Stabilizer s = bs.path_stabilizer(base, inc.edges[0].opposite);
  CHECK(!s.free);
  CHECK(s.fin.elements == std::vector<int>{0, 2});
}

TEST_CASE("ledger stores exact half-integers with provenance") {
  ConstantsLedger ledger;
  ledger.set("D0", HalfInt::of(1), "computed", "orbit-map defect");
  ledger.set("delta_v1", HalfInt::of(0), "computed", "free vertex group");
  ledger.set_value("A", 1.5, "measured");
  CHECK(ledger.get_exact("D0") == HalfInt::of(1));
  CHECK(ledger.find("A")->provenance == "measured");
  CHECK_THROWS_AS(ledger.get_exact("A"), Error);
  auto j = ledger.to_json();
  CHECK(j.contains("D0"));
  CHECK(j["D0"]["exact_x2"] == 2);
}

TEST_CASE("ball dot and stats are well formed") {
  GogDocument doc = load_document(config_path("double_f2"));
  GogContext ctx(doc.gog);
  BassSerre bs(ctx);
  TreeBall ball = bs.build_ball(bs.base_vertex(0), 2, 3);
  std::string dot = bs.ball_dot(ball);
  CHECK(dot.find("graph") != std::string::npos);
  auto stats = bs.ball_stats(ball);
  CHECK(stats["vertices"].get<size_t>() == ball.vertices.size());
  CHECK(stats["edges"].get<size_t>() == ball.edges.size());
}
