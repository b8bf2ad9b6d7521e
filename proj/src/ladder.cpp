#include "ggt/ladder.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "ggt/rng.hpp"

namespace ggt {

namespace {

bool local_less(const VertexElt& a, const VertexElt& b) {
  if (a.is_finite()) return a.fin < b.fin;
  return shortlex_less(a.w, b.w);
}

}  // namespace

std::vector<SpacePoint> LadderLab::fiber_geodesic(const TreeVertex& w, const SpacePoint& x,
                                                  const SpacePoint& y) const {
  const GogContext& ctx = tos_.bs().ctx();
  std::vector<SpacePoint> out;
  if (ctx.vgroup(w.type).is_free()) {
    for (const Word& g : geodesic_path(x.local.w, y.local.w))
      out.push_back(SpacePoint::vertex_point(w, VertexElt::free_elt(g)));
  } else {
    out.push_back(x);
    if (!(x.local == y.local)) out.push_back(y);  // diameter-1 fibers
  }
  return out;
}

Ladder LadderLab::build_ladder(const TreeVertex& v, const SpacePoint& x, const SpacePoint& y,
                               const ConstantsLedger& ledger, int depth, const SpaceBall& ball) {
  SpaceChart& chart = tos_.chart();
  const GogContext& ctx = tos_.bs().ctx();
  const BassSerre& bs = tos_.bs();
  Ladder ladder;
  ladder.d0 = ledger.get_exact("D0");
  ladder.d1 = ledger.get_exact("D1");
  ladder.depth = depth;

  auto add_segment = [&](LadderSegment seg) {
    int idx = static_cast<int>(ladder.segments.size());
    ladder.segment_by_vertex[bs.vertex_key(seg.w)] = idx;
    for (const SpacePoint& p : seg.points) ladder.point_segment[chart.point_key(p)] = idx;
    ladder.segments.push_back(std::move(seg));
    return idx;
  };

  LadderSegment root;
  root.w = v;
  root.x = x;
  root.y = y;
  root.points = fiber_geodesic(v, x, y);
  root.admission_diameter = chart.fiber_distance(x, y);
  add_segment(std::move(root));

  std::vector<int> frontier{0};
  for (int level = 1; level <= depth && !frontier.empty(); ++level) {
    std::vector<int> next_frontier;
    for (int si : frontier) {
      LadderSegment seg = ladder.segments[static_cast<size_t>(si)];
      int vi = ball.tree.find_vertex(bs.vertex_key(seg.w));
      if (vi < 0) {
        ladder.truncated = true;
        continue;
      }
      // N_{D0}(lambda_w) within the materialized fiber, in the fiber metric
      std::vector<int> hood;
      int max_seg_len = 0;
      for (const SpacePoint& p : seg.points)
        max_seg_len = std::max(max_seg_len, ctx.elt_length(seg.w.type, p.local));
      if (HalfInt::of(max_seg_len) + ladder.d0 > HalfInt::of(ball.word_budget))
        ladder.truncated = true;  // the neighborhood may exceed the fiber budget
      for (int pid : ball.fiber_points[static_cast<size_t>(vi)]) {
        const SpacePoint& z = ball.points[static_cast<size_t>(pid)];
        HalfInt best = chart.fiber_distance(z, seg.points.front());
        for (const SpacePoint& q : seg.points) {
          HalfInt d = chart.fiber_distance(z, q);
          if (d < best) best = d;
        }
        if (best <= ladder.d0) hood.push_back(pid);
      }
      // bucket the neighborhood by the edge space through each point
      std::map<std::string, std::vector<int>> buckets;
      std::map<std::string, std::pair<const SpaceChart::EdgeInfo*, int>> bucket_edge;
      for (int pid : hood) {
        const SpacePoint& z = ball.points[static_cast<size_t>(pid)];
        for (int e = 0; e < ctx.gog().graph.num_oriented_edges(); ++e) {
          if (ctx.gog().graph.o(e) != seg.w.type) continue;
          auto [info, a] = chart.edge_through(seg.w, z.local, e);
          std::string key = chart.edge_locus_key(info->edge);
          buckets[key].push_back(pid);
          bucket_edge.emplace(key, std::make_pair(info, e));
        }
      }
      for (auto& [key, pids] : buckets) {
        auto [info, e] = bucket_edge.at(key);
        // skip the edge back toward the parent segment
        TreeVertex opposite =
            info->tvert == seg.w ? info->overt : info->tvert;
        std::string okey = bs.vertex_key(opposite);
        if (seg.parent >= 0 &&
            okey == bs.vertex_key(ladder.segments[static_cast<size_t>(seg.parent)].w))
          continue;
        if (ladder.segment_by_vertex.count(okey)) continue;
        // admission: fiber diameter of the neighborhood cap the image
        HalfInt diameter = HalfInt::of(0);
        std::pair<int, int> best_pair{pids[0], pids[0]};
        for (size_t i = 0; i < pids.size(); ++i)
          for (size_t j = i; j < pids.size(); ++j) {
            const SpacePoint& zi = ball.points[static_cast<size_t>(pids[i])];
            const SpacePoint& zj = ball.points[static_cast<size_t>(pids[j])];
            HalfInt d = chart.fiber_distance(zi, zj);
            bool better = d > diameter;
            if (d == diameter) {
              // shortlex tie-break on the (x, y) pair
              const SpacePoint& bi = ball.points[static_cast<size_t>(best_pair.first)];
              const SpacePoint& bj = ball.points[static_cast<size_t>(best_pair.second)];
              if (local_less(zi.local, bi.local) ||
                  (zi.local == bi.local && local_less(zj.local, bj.local)))
                better = true;
            }
            if (better) {
              diameter = d;
              best_pair = {pids[i], pids[j]};
            }
          }
        if (diameter < ladder.d1) continue;
        // push the chosen endpoints across the edge space (distance 1 each)
        const SpacePoint& zx = ball.points[static_cast<size_t>(best_pair.first)];
        const SpacePoint& zy = ball.points[static_cast<size_t>(best_pair.second)];
        auto push_across = [&](const SpacePoint& z) {
          auto [zinfo, a] = chart.edge_through(seg.w, z.local, e);
          SpacePoint t_end = chart.t_attach(*zinfo, a);
          SpacePoint o_end = chart.o_attach(*zinfo, a);
          return t_end.vlocus == seg.w ? o_end : t_end;
        };
        LadderSegment child;
        child.w = opposite;
        child.x = push_across(zx);
        child.y = push_across(zy);
        child.points = fiber_geodesic(opposite, child.x, child.y);
        child.parent = si;
        child.admission_diameter = diameter;
        next_frontier.push_back(add_segment(std::move(child)));
      }
    }
    frontier = std::move(next_frontier);
  }
  return ladder;
}

SpacePoint LadderLab::project_to_fiber_segment(const SpacePoint& p,
                                               const LadderSegment& seg) const {
  const GogContext& ctx = tos_.bs().ctx();
  if (ctx.vgroup(seg.w.type).is_free()) {
    Word projected = project_to_segment(p.local.w, seg.x.local.w, seg.y.local.w);
    return SpacePoint::vertex_point(seg.w, VertexElt::free_elt(projected));
  }
  // finite fibers: nearest of the (at most two) segment points, ties to x
  const SpaceChart& chart = const_cast<LadderLab*>(this)->tos_.chart();
  SpacePoint best = seg.points.front();
  HalfInt best_d = chart.fiber_distance(p, best);
  for (const SpacePoint& q : seg.points) {
    HalfInt d = chart.fiber_distance(p, q);
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

SpacePoint LadderLab::retract(const SpacePoint& p, const Ladder& ladder, const SpaceBall& ball) {
  SpaceChart& chart = tos_.chart();
  const BassSerre& bs = tos_.bs();
  // edge-space points project through their t-side attachment first
  SpacePoint base = p;
  if (p.on_edge) base = chart.t_attach(chart.edge_info(p.elocus), p.local);

  auto seg_it = ladder.segment_by_vertex.find(bs.vertex_key(base.vlocus));
  if (seg_it != ladder.segment_by_vertex.end()) {
    return project_to_fiber_segment(base, ladder.segments[static_cast<size_t>(seg_it->second)]);
  }
  // off the subtree: walk toward the root until entering T1
  TreeGeodesic geo = bs.tree_geodesic(base.vlocus, ladder.segments[0].w);
  size_t entry = 0;
  while (entry < geo.vertices.size() &&
         !ladder.segment_by_vertex.count(bs.vertex_key(geo.vertices[entry])))
    ++entry;
  if (entry == 0 || entry >= geo.vertices.size())
    throw Error("retract: ladder subtree not reachable");
  const TreeVertex& w1 = geo.vertices[entry];
  const LadderSegment& seg =
      ladder.segments[static_cast<size_t>(ladder.segment_by_vertex.at(bs.vertex_key(w1)))];
  // the exit edge at w1 along the geodesic: between vertices entry-1 and entry
  int etype = geo.steps[entry - 1].etype;
  // the edge-space image inside the fiber of w1 is the coset of the image on
  // the w1 side of that tree edge; collect materialized image points
  int vi = ball.tree.find_vertex(bs.vertex_key(w1));
  if (vi < 0) throw Error("retract: entry fiber not materialized");
  TreeEdge crossing = bs.edge_at(geo.vertices[entry - 1], etype, geo.steps[entry - 1].coset);
  std::string crossing_key =
      bs.edge_key_unoriented(crossing);
  SpacePoint best;
  bool found = false;
  for (int pid : ball.fiber_points[static_cast<size_t>(vi)]) {
    const SpacePoint& z = ball.points[static_cast<size_t>(pid)];
    // z lies in the exit edge-space image iff its edge space along bar(etype)
    // is the crossing edge
    auto [info, a] = chart.edge_through(w1, z.local, OrientedGraph::bar(etype));
    if (bs.edge_key_unoriented(info->edge) != crossing_key) continue;
    SpacePoint projected = project_to_fiber_segment(z, seg);
    if (!found || local_less(projected.local, best.local)) {
      best = projected;
      found = true;
    }
  }
  if (!found) throw Error("retract: exit edge-space image has no materialized points");
  return best;
}

std::vector<SpacePoint> LadderLab::ball_geodesic(const SpacePoint& p, const SpacePoint& q,
                                                 const SpaceBall& ball) {
  SpaceChart& chart = tos_.chart();
  int pi = ball.find(p, chart);
  int qi = ball.find(q, chart);
  if (pi < 0 || qi < 0) throw Error("ball_geodesic: endpoint outside the ball");
  std::vector<int> dist(ball.points.size(), -1);
  std::vector<int> parent(ball.points.size(), -1);
  std::vector<std::vector<int>> buckets(1);
  dist[static_cast<size_t>(pi)] = 0;
  buckets[0].push_back(pi);
  for (size_t d2 = 0; d2 < buckets.size(); ++d2) {
    for (size_t k = 0; k < buckets[d2].size(); ++k) {
      int id = buckets[d2][k];
      if (dist[static_cast<size_t>(id)] != static_cast<int>(d2)) continue;
      if (id == qi) {
        std::vector<SpacePoint> path;
        for (int cur = qi; cur != -1; cur = parent[static_cast<size_t>(cur)])
          path.push_back(ball.points[static_cast<size_t>(cur)]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      chart.neighbors(ball.points[static_cast<size_t>(id)], [&](SpacePoint n, int w2) {
        auto it = ball.index.find(chart.point_key(n));
        if (it == ball.index.end()) return;
        size_t nd2 = d2 + static_cast<size_t>(w2);
        int nid = it->second;
        if (dist[static_cast<size_t>(nid)] < 0 ||
            dist[static_cast<size_t>(nid)] > static_cast<int>(nd2)) {
          dist[static_cast<size_t>(nid)] = static_cast<int>(nd2);
          parent[static_cast<size_t>(nid)] = id;
          if (buckets.size() <= nd2) buckets.resize(nd2 + 1);
          buckets[nd2].push_back(nid);
        }
      });
    }
  }
  throw Error("ball_geodesic: endpoints are disconnected in the ball");
}

MetricEstimate LadderLab::distance_to_ladder(const SpacePoint& p, const Ladder& ladder,
                                             const SpaceBall& ball) {
  SpaceChart& chart = tos_.chart();
  int pi = ball.find(p, chart);
  if (pi < 0) throw Error("distance_to_ladder: point outside the ball");
  MetricEstimate est;
  std::vector<int> dist(ball.points.size(), -1);
  std::vector<std::vector<int>> buckets(1);
  dist[static_cast<size_t>(pi)] = 0;
  buckets[0].push_back(pi);
  for (size_t d2 = 0; d2 < buckets.size(); ++d2) {
    for (size_t k = 0; k < buckets[d2].size(); ++k) {
      int id = buckets[d2][k];
      if (dist[static_cast<size_t>(id)] != static_cast<int>(d2)) continue;
      if (ladder.contains_point_key(chart.point_key(ball.points[static_cast<size_t>(id)]))) {
        est.value = HalfInt::halves(static_cast<int>(d2));
        est.reachable = true;
        int clearance = std::min(ball.clearance_x2[static_cast<size_t>(pi)],
                                 ball.clearance_x2[static_cast<size_t>(id)]);
        est.trusted = clearance > static_cast<int>(d2);
        return est;
      }
      chart.neighbors(ball.points[static_cast<size_t>(id)], [&](SpacePoint n, int w2) {
        auto it = ball.index.find(chart.point_key(n));
        if (it == ball.index.end()) return;
        size_t nd2 = d2 + static_cast<size_t>(w2);
        int nid = it->second;
        if (dist[static_cast<size_t>(nid)] < 0 ||
            dist[static_cast<size_t>(nid)] > static_cast<int>(nd2)) {
          dist[static_cast<size_t>(nid)] = static_cast<int>(nd2);
          if (buckets.size() <= nd2) buckets.resize(nd2 + 1);
          buckets[nd2].push_back(nid);
        }
      });
    }
  }
  return est;  // unreachable
}

nlohmann::ordered_json RetractionReport::to_json() const {
  nlohmann::ordered_json pair_rows = nlohmann::ordered_json::array();
  for (const auto& p : pairs)
    pair_rows.push_back({{"d", p.input_distance.value()}, {"pd", p.image_distance.value()}});
  return nlohmann::ordered_json{{"seed", seed},
                                {"samples_requested", samples_requested},
                                {"samples_used", samples_used},
                                {"skipped", skipped},
                                {"A", a_fit},
                                {"B", b_fit},
                                {"pairs", pair_rows}};
}

nlohmann::ordered_json QuasiconvexityReport::to_json() const {
  return nlohmann::ordered_json{{"seed", seed},
                                {"pairs_used", pairs_used},
                                {"skipped_untrusted", skipped_untrusted},
                                {"C_measured", c_measured.value()}};
}

RetractionReport LadderLab::measure_retraction(const Ladder& ladder, const SpaceBall& ball,
                                               int samples, std::uint64_t seed) {
  SpaceChart& chart = tos_.chart();
  const BassSerre& bs = tos_.bs();
  RetractionReport report;
  report.seed = seed;
  report.samples_requested = samples;
  Rng rng(seed);
  // sample points over the ladder's subtree fibers
  std::vector<int> pool;
  for (size_t vi = 0; vi < ball.tree.vertices.size(); ++vi) {
    if (!ladder.segment_by_vertex.count(bs.vertex_key(ball.tree.vertices[vi].vertex))) continue;
    for (int pid : ball.fiber_points[vi]) pool.push_back(pid);
  }
  if (pool.empty()) {
    report.skipped = samples;
    return report;
  }
  for (int trial = 0; trial < samples; ++trial) {
    const SpacePoint& p = ball.points[static_cast<size_t>(pool[rng.below(pool.size())])];
    const SpacePoint& q = ball.points[static_cast<size_t>(pool[rng.below(pool.size())])];
    MetricEstimate d_in = tos_.dist_ball(p, q, ball);
    if (!d_in.reachable) {
      ++report.skipped;
      continue;
    }
    SpacePoint rp = retract(p, ladder, ball);
    SpacePoint rq = retract(q, ladder, ball);
    MetricEstimate d_out = tos_.dist_ball(rp, rq, ball);
    if (!d_out.reachable) {
      ++report.skipped;
      continue;
    }
    report.pairs.push_back({d_in.value, d_out.value});
    ++report.samples_used;
  }
  // envelope fit: smallest slope at least 1 covering every sample, then the
  // additive constant absorbing whatever remains
  double a = 1.0;
  for (const auto& pr : report.pairs)
    if (pr.input_distance.twice > 0)
      a = std::max(a, pr.image_distance.value() / pr.input_distance.value());
  double b = 0.0;
  for (const auto& pr : report.pairs)
    b = std::max(b, pr.image_distance.value() - a * pr.input_distance.value());
  report.a_fit = a;
  report.b_fit = b;
  (void)chart;
  return report;
}

QuasiconvexityReport LadderLab::measure_quasiconvexity(const Ladder& ladder,
                                                       const SpaceBall& ball, int samples,
                                                       std::uint64_t seed) {
  SpaceChart& chart = tos_.chart();
  QuasiconvexityReport report;
  report.seed = seed;
  report.c_measured = HalfInt::of(0);
  Rng rng(seed);
  std::vector<const SpacePoint*> ladder_points;
  for (const LadderSegment& seg : ladder.segments)
    for (const SpacePoint& p : seg.points) ladder_points.push_back(&p);
  if (ladder_points.empty()) return report;
  for (int trial = 0; trial < samples; ++trial) {
    const SpacePoint& p = *ladder_points[rng.below(ladder_points.size())];
    const SpacePoint& q = *ladder_points[rng.below(ladder_points.size())];
    if (ball.find(p, chart) < 0 || ball.find(q, chart) < 0) {
      ++report.skipped_untrusted;
      continue;
    }
    MetricEstimate d = tos_.dist_ball(p, q, ball);
    if (!d.reachable || !d.trusted) {
      ++report.skipped_untrusted;
      continue;
    }
    ++report.pairs_used;
    for (const SpacePoint& z : ball_geodesic(p, q, ball)) {
      MetricEstimate dz = distance_to_ladder(z, ladder, ball);
      if (dz.reachable && dz.value > report.c_measured) report.c_measured = dz.value;
    }
  }
  return report;
}

nlohmann::ordered_json LadderLab::dump(const Ladder& ladder) const {
  const GogContext& ctx = tos_.bs().ctx();
  nlohmann::ordered_json segs = nlohmann::ordered_json::array();
  for (const LadderSegment& seg : ladder.segments) {
    segs.push_back({{"vertex", ctx.format(seg.w.rep)},
                    {"type", ctx.gog().vertex_names[static_cast<size_t>(seg.w.type)]},
                    {"x", ctx.format_elt(seg.w.type, seg.x.local)},
                    {"y", ctx.format_elt(seg.w.type, seg.y.local)},
                    {"points", seg.points.size()},
                    {"parent", seg.parent},
                    {"admission_diameter", seg.admission_diameter.value()}});
  }
  return nlohmann::ordered_json{{"D0", ladder.d0.value()},
                                {"D1", ladder.d1.value()},
                                {"depth", ladder.depth},
                                {"truncated", ladder.truncated},
                                {"segments", segs}};
}

std::string LadderLab::dot_overlay(const Ladder& ladder, const SpaceBall& ball) {
  SpaceChart& chart = tos_.chart();
  std::ostringstream out;
  out << "graph \"ladder\" {\n  node [shape=point];\n";
  std::map<std::string, int> ids;
  auto id_of = [&](const SpacePoint& p) {
    std::string key = chart.point_key(p);
    auto [it, fresh] = ids.emplace(key, static_cast<int>(ids.size()));
    return it->second;
  };
  for (size_t si = 0; si < ladder.segments.size(); ++si) {
    const LadderSegment& seg = ladder.segments[si];
    out << "  subgraph cluster_s" << si << " {\n    label=\"segment " << si << "\";\n";
    for (size_t i = 0; i < seg.points.size(); ++i) {
      int a = id_of(seg.points[i]);
      out << "    l" << a << " [color=red];\n";
      if (i > 0) out << "    l" << id_of(seg.points[i - 1]) << " -- l" << a << " [color=red];\n";
    }
    out << "  }\n";
    if (seg.parent >= 0) {
      out << "  l" << id_of(ladder.segments[static_cast<size_t>(seg.parent)].points.front())
          << " -- l" << id_of(seg.points.front()) << " [style=dashed];\n";
    }
  }
  out << "}\n";
  (void)ball;
  return out.str();
}

}  // namespace ggt
