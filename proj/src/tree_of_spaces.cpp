#include "ggt/tree_of_spaces.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace ggt {

const SpaceChart::EdgeInfo& SpaceChart::edge_info(const TreeEdge& even_edge) {
  std::string key = edge_locus_key(even_edge);
  auto it = edge_cache_.find(key);
  if (it != edge_cache_.end()) return it->second;
  if (even_edge.etype % 2 != 0) throw Error("internal: edge_info expects the even orientation");
  EdgeInfo info;
  info.edge = even_edge;
  info.tvert = bs_.t_endpoint(even_edge);
  info.overt = bs_.o_endpoint(even_edge);
  // t-side local of the parameter a is t_offset * phi_t(a): the edge rep
  // ends with the coset representative syllable
  info.t_offset = even_edge.rep.tail.empty() ? even_edge.rep.head : even_edge.rep.tail.back().g;
  // o-side: canonicalize rep ebar once; its trailing syllable is the offset
  Sequence crossed = ctx_.canonicalize(
      ctx_.multiply(even_edge.rep, ctx_.seq_edge(OrientedGraph::bar(even_edge.etype))));
  info.o_offset = crossed.tail.empty() ? crossed.head : crossed.tail.back().g;
  return edge_cache_.emplace(std::move(key), std::move(info)).first->second;
}

std::pair<const SpaceChart::EdgeInfo*, VertexElt> SpaceChart::edge_through(const TreeVertex& w,
                                                                           const VertexElt& g,
                                                                           int e) {
  if (e % 2 == 0) {
    // w is the o-side of the even orientation
    auto [c, rem] = ctx_.split_by_origin_image(e, g);
    TreeEdge edge = bs_.edge_at(w, e, c);
    VertexElt a = ctx_.mono_t_preimage(OrientedGraph::bar(e), rem);
    return {&edge_info(edge), a};
  }
  // w is the t-side of the even orientation f = bar(e)
  int f = OrientedGraph::bar(e);
  auto [c, rem] = ctx_.split_by_image_t(f, g);
  Sequence rep = ctx_.multiply(w.rep, ctx_.seq_vertex(w.type, c));
  TreeEdge edge{f, std::move(rep)};
  VertexElt a = ctx_.mono_t_preimage(f, rem);
  return {&edge_info(edge), a};
}

SpacePoint SpaceChart::t_attach(const EdgeInfo& info, const VertexElt& a) const {
  int tv = ctx_.gog().graph.t(info.edge.etype);
  VertexElt local = ctx_.mul(tv, info.t_offset, ctx_.apply_mono_t(info.edge.etype, a));
  return SpacePoint::vertex_point(info.tvert, std::move(local));
}

SpacePoint SpaceChart::o_attach(const EdgeInfo& info, const VertexElt& a) const {
  int ov = ctx_.gog().graph.o(info.edge.etype);
  VertexElt local =
      ctx_.mul(ov, info.o_offset, ctx_.apply_mono_t(OrientedGraph::bar(info.edge.etype), a));
  return SpacePoint::vertex_point(info.overt, std::move(local));
}

void SpaceChart::neighbors(const SpacePoint& p, const std::function<void(SpacePoint, int)>& visit) {
  const auto& Y = ctx_.gog().graph;
  if (!p.on_edge) {
    const TreeVertex& w = p.vlocus;
    const GroupSpec& spec = ctx_.vgroup(w.type);
    if (spec.is_free()) {
      for (int g = 0; g < spec.alphabet.rank(); ++g)
        for (bool pos : {true, false}) {
          Word moved = p.local.w * Word::letter(make_letter(g, pos));
          visit(SpacePoint::vertex_point(w, VertexElt::free_elt(moved)), 2);
        }
    } else {
      for (int h = 0; h < spec.table.order; ++h) {
        if (h == p.local.fin) continue;
        visit(SpacePoint::vertex_point(w, VertexElt::finite_elt(h)), 2);
      }
    }
    for (int e = 0; e < Y.num_oriented_edges(); ++e) {
      if (Y.o(e) != w.type) continue;
      auto [info, a] = edge_through(w, p.local, e);
      visit(SpacePoint::edge_point(info->edge, a), 1);
    }
    return;
  }
  // edge-space point
  const GroupSpec& eg = ctx_.gog().edge_group(p.elocus.etype);
  if (eg.is_free()) {
    for (int g = 0; g < eg.alphabet.rank(); ++g)
      for (bool pos : {true, false}) {
        Word moved = p.local.w * Word::letter(make_letter(g, pos));
        visit(SpacePoint::edge_point(p.elocus, VertexElt::free_elt(moved)), 2);
      }
  } else {
    for (int s : eg.finite_gens) {
      visit(SpacePoint::edge_point(p.elocus,
                                   VertexElt::finite_elt(eg.table.mul(p.local.fin, s))),
            2);
      visit(SpacePoint::edge_point(
                p.elocus, VertexElt::finite_elt(eg.table.mul(p.local.fin, eg.table.inv(s)))),
            2);
    }
  }
  const EdgeInfo& info = edge_info(p.elocus);
  visit(t_attach(info, p.local), 1);
  visit(o_attach(info, p.local), 1);
}

std::string SpaceChart::vertex_locus_key(const TreeVertex& w) const { return bs_.vertex_key(w); }

std::string SpaceChart::edge_locus_key(const TreeEdge& e) const {
  return "e" + std::to_string(e.etype) + ":" + ctx_.key(e.rep);
}

std::string SpaceChart::point_key(const SpacePoint& p) const {
  std::string locus = p.on_edge ? edge_locus_key(p.elocus) : vertex_locus_key(p.vlocus);
  std::string local;
  if (p.local.is_finite()) {
    local = "f" + std::to_string(p.local.fin);
  } else {
    for (Letter l : p.local.w.letters()) local += std::to_string(l) + ",";
  }
  return locus + "#" + local;
}

HalfInt SpaceChart::fiber_distance(const SpacePoint& p, const SpacePoint& q) const {
  if (p.on_edge != q.on_edge) throw Error("fiber_distance: points lie in different fibers");
  if (!p.on_edge) {
    if (!(p.vlocus == q.vlocus)) throw Error("fiber_distance: points lie in different fibers");
    const GroupSpec& spec = ctx_.vgroup(p.vlocus.type);
    if (spec.is_free()) return HalfInt::of((p.local.w.inverse() * q.local.w).size());
    return HalfInt::of(p.local.fin == q.local.fin ? 0 : 1);
  }
  if (!(p.elocus == q.elocus)) throw Error("fiber_distance: points lie in different fibers");
  const GroupSpec& eg = ctx_.gog().edge_group(p.elocus.etype);
  if (eg.is_free()) return HalfInt::of((p.local.w.inverse() * q.local.w).size());
  // BFS in the finite Cayley graph over the chosen generators
  if (p.local.fin == q.local.fin) return HalfInt::of(0);
  std::vector<int> dist(static_cast<size_t>(eg.table.order), -1);
  std::deque<int> queue{p.local.fin};
  dist[static_cast<size_t>(p.local.fin)] = 0;
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    if (x == q.local.fin) return HalfInt::of(dist[static_cast<size_t>(x)]);
    for (int s : eg.finite_gens)
      for (int y : {eg.table.mul(x, s), eg.table.mul(x, eg.table.inv(s))})
        if (dist[static_cast<size_t>(y)] < 0) {
          dist[static_cast<size_t>(y)] = dist[static_cast<size_t>(x)] + 1;
          queue.push_back(y);
        }
  }
  throw Error("fiber_distance: edge group is not generated by its generator set");
}

// ---------------------------------------------------------------------------
// exact short-range search

namespace {

struct DialSearch {
  std::vector<SpacePoint> points;
  std::vector<int> dist_x2;
  std::unordered_map<std::string, int> index;
  std::vector<std::vector<int>> buckets;  // by doubled distance

  int intern(const SpacePoint& p, const std::string& key, int d2) {
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(points.size());
    points.push_back(p);
    dist_x2.push_back(d2);
    index.emplace(key, id);
    return id;
  }
};

}  // namespace

std::vector<std::pair<SpacePoint, HalfInt>> ExactMetric::ball_around(const SpacePoint& p,
                                                                     HalfInt cap) {
  int cap2 = static_cast<int>(cap.twice);
  if (cap2 < 0) return {};
  DialSearch search;
  std::vector<char> settled;
  search.buckets.assign(static_cast<size_t>(cap2 + 1), {});
  search.intern(p, chart_.point_key(p), 0);
  settled.push_back(0);
  search.buckets[0].push_back(0);
  std::vector<std::pair<SpacePoint, HalfInt>> out;
  for (int d2 = 0; d2 <= cap2; ++d2) {
    for (size_t qi = 0; qi < search.buckets[static_cast<size_t>(d2)].size(); ++qi) {
      int id = search.buckets[static_cast<size_t>(d2)][qi];
      if (settled[static_cast<size_t>(id)] || search.dist_x2[static_cast<size_t>(id)] != d2)
        continue;
      settled[static_cast<size_t>(id)] = 1;
      SpacePoint current = search.points[static_cast<size_t>(id)];
      out.push_back({current, HalfInt::halves(d2)});
      chart_.neighbors(current, [&](SpacePoint n, int w2) {
        int nd2 = d2 + w2;
        if (nd2 > cap2) return;
        std::string key = chart_.point_key(n);
        auto it = search.index.find(key);
        if (it == search.index.end()) {
          int nid = search.intern(n, key, nd2);
          settled.push_back(0);
          search.buckets[static_cast<size_t>(nd2)].push_back(nid);
        } else if (nd2 < search.dist_x2[static_cast<size_t>(it->second)]) {
          search.dist_x2[static_cast<size_t>(it->second)] = nd2;
          search.buckets[static_cast<size_t>(nd2)].push_back(it->second);
        }
      });
    }
  }
  return out;
}

namespace {

// dial search with early exit on a target predicate
std::optional<HalfInt> dial_search_until(
    SpaceChart& chart, const SpacePoint& p, HalfInt cap,
    const std::function<bool(const std::string&)>& is_target) {
  int cap2 = static_cast<int>(cap.twice);
  if (cap2 < 0) return std::nullopt;
  DialSearch search;
  std::vector<char> settled;
  search.buckets.assign(static_cast<size_t>(cap2 + 1), {});
  std::string pkey = chart.point_key(p);
  if (is_target(pkey)) return HalfInt::of(0);
  search.intern(p, pkey, 0);
  settled.push_back(0);
  search.buckets[0].push_back(0);
  std::vector<char> is_goal{0};
  for (int d2 = 0; d2 <= cap2; ++d2) {
    for (size_t qi = 0; qi < search.buckets[static_cast<size_t>(d2)].size(); ++qi) {
      int id = search.buckets[static_cast<size_t>(d2)][qi];
      if (settled[static_cast<size_t>(id)] || search.dist_x2[static_cast<size_t>(id)] != d2)
        continue;
      settled[static_cast<size_t>(id)] = 1;
      if (is_goal[static_cast<size_t>(id)]) return HalfInt::halves(d2);
      chart.neighbors(search.points[static_cast<size_t>(id)], [&](SpacePoint n, int w2) {
        int nd2 = d2 + w2;
        if (nd2 > cap2) return;
        std::string key = chart.point_key(n);
        auto it = search.index.find(key);
        if (it == search.index.end()) {
          int nid = search.intern(n, key, nd2);
          settled.push_back(0);
          is_goal.push_back(is_target(key) ? 1 : 0);
          search.buckets[static_cast<size_t>(nd2)].push_back(nid);
        } else if (nd2 < search.dist_x2[static_cast<size_t>(it->second)]) {
          search.dist_x2[static_cast<size_t>(it->second)] = nd2;
          search.buckets[static_cast<size_t>(nd2)].push_back(it->second);
        }
      });
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<HalfInt> ExactMetric::distance(const SpacePoint& p, const SpacePoint& q,
                                             HalfInt cap) {
  std::string qkey = chart_.point_key(q);
  return dial_search_until(chart_, p, cap,
                           [&](const std::string& key) { return key == qkey; });
}

std::optional<HalfInt> ExactMetric::distance_to_set(
    const SpacePoint& p, const std::unordered_map<std::string, int>& targets, HalfInt cap) {
  return dial_search_until(chart_, p, cap,
                           [&](const std::string& key) { return targets.count(key) > 0; });
}

// ---------------------------------------------------------------------------
// materialized space balls

int SpaceBall::find(const SpacePoint& p, const SpaceChart& chart) const {
  auto it = index.find(chart.point_key(p));
  return it == index.end() ? -1 : it->second;
}

SpacePoint TreeOfSpaces::basepoint() const {
  const GogContext& ctx = bs_.ctx();
  TreeVertex base = bs_.base_vertex(ctx.base());
  return SpacePoint::vertex_point(base, ctx.identity_elt(ctx.base()));
}

SpacePoint TreeOfSpaces::theta(const Sequence& g) const {
  const GogContext& ctx = bs_.ctx();
  Sequence canon = ctx.canonical_loop(g);
  TreeVertex locus = bs_.vertex_of(canon, ctx.base());
  VertexElt local = canon.tail.empty() ? canon.head : canon.tail.back().g;
  return SpacePoint::vertex_point(std::move(locus), std::move(local));
}

SpaceBall TreeOfSpaces::build_space_ball(const SpacePoint& center, int tree_radius,
                                         int word_budget, int tree_budget) {
  const GogContext& ctx = bs_.ctx();
  SpaceBall ball;
  ball.word_budget = word_budget;
  TreeVertex center_vertex = center.on_edge ? chart_.edge_info(center.elocus).tvert : center.vlocus;
  ball.tree = bs_.build_ball(center_vertex, tree_radius,
                             tree_budget >= 0 ? tree_budget : word_budget);

  auto add_point = [&](const SpacePoint& p, std::vector<int>& bucket) {
    std::string key = chart_.point_key(p);
    auto [it, fresh] = ball.index.try_emplace(key, static_cast<int>(ball.points.size()));
    if (fresh) ball.points.push_back(p);
    bucket.push_back(it->second);
  };

  // vertex fibers: all local elements within the word budget
  ball.fiber_points.resize(ball.tree.vertices.size());
  for (size_t vi = 0; vi < ball.tree.vertices.size(); ++vi) {
    const TreeVertex& w = ball.tree.vertices[vi].vertex;
    const GroupSpec& spec = ctx.vgroup(w.type);
    if (spec.is_free()) {
      std::vector<Word> layer{Word()};
      add_point(SpacePoint::vertex_point(w, VertexElt::free_elt(Word())), ball.fiber_points[vi]);
      for (int len = 1; len <= word_budget; ++len) {
        std::vector<Word> next_layer;
        for (const Word& g : layer) {
          for (int gen = 0; gen < spec.alphabet.rank(); ++gen)
            for (bool pos : {true, false}) {
              Letter l = make_letter(gen, pos);
              if (!g.empty() && g.back() == -l) continue;
              Word moved = g * Word::letter(l);
              add_point(SpacePoint::vertex_point(w, VertexElt::free_elt(moved)),
                        ball.fiber_points[vi]);
              next_layer.push_back(std::move(moved));
            }
        }
        layer = std::move(next_layer);
      }
    } else {
      for (int h = 0; h < spec.table.order; ++h)
        add_point(SpacePoint::vertex_point(w, VertexElt::finite_elt(h)), ball.fiber_points[vi]);
    }
  }

  // edge spaces: parameters whose two attaching endpoints are materialized
  ball.edge_space_points.resize(ball.tree.edges.size());
  for (size_t ei = 0; ei < ball.tree.edges.size(); ++ei) {
    const TreeEdge& edge = ball.tree.edges[ei];
    const SpaceChart::EdgeInfo& info = chart_.edge_info(edge);
    const GroupSpec& eg = ctx.gog().edge_group(edge.etype);
    std::vector<VertexElt> params;
    if (eg.is_free()) {
      std::vector<Word> layer{Word()};
      params.push_back(VertexElt::free_elt(Word()));
      for (int len = 1; len <= word_budget; ++len) {
        std::vector<Word> next_layer;
        for (const Word& a : layer)
          for (int gen = 0; gen < eg.alphabet.rank(); ++gen)
            for (bool pos : {true, false}) {
              Letter l = make_letter(gen, pos);
              if (!a.empty() && a.back() == -l) continue;
              Word moved = a * Word::letter(l);
              params.push_back(VertexElt::free_elt(moved));
              next_layer.push_back(std::move(moved));
            }
        layer = std::move(next_layer);
      }
    } else {
      for (int a = 0; a < eg.table.order; ++a) params.push_back(VertexElt::finite_elt(a));
    }
    for (const VertexElt& a : params) {
      SpacePoint t_end = chart_.t_attach(info, a);
      SpacePoint o_end = chart_.o_attach(info, a);
      if (ball.index.count(chart_.point_key(t_end)) &&
          ball.index.count(chart_.point_key(o_end))) {
        add_point(SpacePoint::edge_point(edge, a), ball.edge_space_points[ei]);
      }
    }
  }

  // frontier: a materialized point with an unmaterialized neighbor
  ball.frontier.assign(ball.points.size(), 0);
  for (size_t i = 0; i < ball.points.size(); ++i) {
    bool frontier = false;
    chart_.neighbors(ball.points[i], [&](SpacePoint n, int) {
      if (!frontier && !ball.index.count(chart_.point_key(n))) frontier = true;
    });
    ball.frontier[i] = frontier ? 1 : 0;
  }

  // clearance: multi-source distance from the frontier inside the ball
  ball.clearance_x2.assign(ball.points.size(), std::numeric_limits<int>::max());
  std::vector<std::vector<int>> buckets(1);
  for (size_t i = 0; i < ball.points.size(); ++i) {
    if (ball.frontier[i]) {
      ball.clearance_x2[i] = 0;
      buckets[0].push_back(static_cast<int>(i));
    }
  }
  for (size_t d2 = 0; d2 < buckets.size(); ++d2) {
    for (size_t qi = 0; qi < buckets[d2].size(); ++qi) {
      int id = buckets[d2][qi];
      if (ball.clearance_x2[static_cast<size_t>(id)] != static_cast<int>(d2)) continue;
      chart_.neighbors(ball.points[static_cast<size_t>(id)], [&](SpacePoint n, int w2) {
        auto it = ball.index.find(chart_.point_key(n));
        if (it == ball.index.end()) return;
        size_t nd2 = d2 + static_cast<size_t>(w2);
        if (static_cast<int>(nd2) < ball.clearance_x2[static_cast<size_t>(it->second)]) {
          ball.clearance_x2[static_cast<size_t>(it->second)] = static_cast<int>(nd2);
          if (buckets.size() <= nd2) buckets.resize(nd2 + 1);
          buckets[nd2].push_back(it->second);
        }
      });
    }
  }
  return ball;
}

MetricEstimate TreeOfSpaces::dist_ball(const SpacePoint& p, const SpacePoint& q,
                                       const SpaceBall& ball) {
  MetricEstimate est;
  int pi = ball.find(p, chart_);
  int qi = ball.find(q, chart_);
  if (pi < 0 || qi < 0) throw Error("dist_ball: point outside the materialized ball");
  std::vector<int> dist(ball.points.size(), -1);
  std::vector<std::vector<int>> buckets(1);
  dist[static_cast<size_t>(pi)] = 0;
  buckets[0].push_back(pi);
  for (size_t d2 = 0; d2 < buckets.size(); ++d2) {
    for (size_t k = 0; k < buckets[d2].size(); ++k) {
      int id = buckets[d2][k];
      if (dist[static_cast<size_t>(id)] != static_cast<int>(d2)) continue;
      if (id == qi) {
        est.value = HalfInt::halves(static_cast<int>(d2));
        est.reachable = true;
        int clearance = std::min(ball.clearance_x2[static_cast<size_t>(pi)],
                                 ball.clearance_x2[static_cast<size_t>(qi)]);
        est.trusted = clearance > static_cast<int>(d2);
        return est;
      }
      chart_.neighbors(ball.points[static_cast<size_t>(id)], [&](SpacePoint n, int w2) {
        auto it = ball.index.find(chart_.point_key(n));
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
  est.reachable = false;
  est.trusted = false;
  return est;
}

HalfInt TreeOfSpaces::compute_D0(ConstantsLedger& ledger) {
  const GogContext& ctx = bs_.ctx();
  SpacePoint x0 = basepoint();
  HalfInt d0 = HalfInt::of(0);
  for (int v = 0; v < ctx.gog().graph.num_vertices; ++v) {
    SpacePoint target = SpacePoint::vertex_point(bs_.base_vertex(v), ctx.identity_elt(v));
    HalfInt cap = HalfInt::of(2);
    std::optional<HalfInt> d;
    while (!(d = exact_.distance(x0, target, cap))) {
      cap = cap + cap;
      if (cap > HalfInt::of(512)) throw Error("compute_D0: vertex space unreachable");
    }
    if (*d > d0) d0 = *d;
    const GroupSpec& spec = ctx.vgroup(v);
    HalfInt delta = spec.is_free() ? HalfInt::of(0) : HalfInt::of(spec.table.diameter());
    ledger.set("delta_" + ctx.gog().vertex_names[static_cast<size_t>(v)], delta, "computed",
               spec.is_free() ? "free vertex group: tree fiber" : "finite vertex group diameter");
  }
  ledger.set("D0", d0, "computed", "orbit-map defect: max over vertex spaces of d_X(x0, 1_Gv)");
  return d0;
}

QILift TreeOfSpaces::qi_lift(const TreeGeodesic& path, LiftStrategy strategy,
                             const SpaceBall& ball) {
  const GogContext& ctx = bs_.ctx();
  QILift lift;
  lift.path = path.vertices;
  for (size_t i = 0; i < path.vertices.size(); ++i) {
    const TreeVertex& w = path.vertices[i];
    SpacePoint candidate = SpacePoint::vertex_point(w, ctx.identity_elt(w.type));
    if (strategy == LiftStrategy::Nearest && i > 0) {
      // choose a materialized fiber point minimizing the ball distance to
      // the previous lift point (shortlex tie-break on the local element)
      int vi = ball.tree.find_vertex(bs_.vertex_key(w));
      if (vi < 0) {
        lift.complete = false;
      } else {
        const SpacePoint& prev = lift.points.back();
        int best_d2 = -1;
        SpacePoint best = candidate;
        for (int pid : ball.fiber_points[static_cast<size_t>(vi)]) {
          MetricEstimate est = dist_ball(prev, ball.points[static_cast<size_t>(pid)], ball);
          if (!est.reachable) continue;
          int d2 = static_cast<int>(est.value.twice);
          const SpacePoint& cand = ball.points[static_cast<size_t>(pid)];
          bool better = best_d2 < 0 || d2 < best_d2;
          if (!better && d2 == best_d2 && !cand.local.is_finite() &&
              shortlex_less(cand.local.w, best.local.w))
            better = true;
          if (!better && d2 == best_d2 && cand.local.is_finite() &&
              cand.local.fin < best.local.fin)
            better = true;
          if (better) {
            best_d2 = d2;
            best = cand;
          }
        }
        if (best_d2 < 0) {
          lift.complete = false;
        } else {
          candidate = best;
        }
      }
    }
    if (ball.find(candidate, chart_) < 0) lift.complete = false;
    lift.points.push_back(candidate);
    if (i > 0) {
      MetricEstimate est{};
      if (ball.find(lift.points[i - 1], chart_) >= 0 && ball.find(lift.points[i], chart_) >= 0)
        est = dist_ball(lift.points[i - 1], lift.points[i], ball);
      lift.jumps.push_back(est);
      if (est.reachable) lift.measured_k = std::max(lift.measured_k, est.value.value());
    }
  }
  return lift;
}

FlareReport TreeOfSpaces::flare_probe(const QILift& lift1, const QILift& lift2,
                                      double threshold_m, int center_index,
                                      ConstantsLedger& ledger) {
  if (lift1.path.size() != lift2.path.size() || lift1.path.empty())
    throw Error("flare_probe: lifts must cover the same geodesic");
  FlareReport report;
  report.half_length = center_index;
  report.central = chart_.fiber_distance(lift1.points[static_cast<size_t>(center_index)],
                                         lift2.points[static_cast<size_t>(center_index)]);
  report.end_backward = chart_.fiber_distance(lift1.points.front(), lift2.points.front());
  report.end_forward = chart_.fiber_distance(lift1.points.back(), lift2.points.back());
  if (report.central.value() >= threshold_m && report.central.twice > 0) {
    report.applicable = true;
    report.lambda =
        std::max(report.end_forward.value(), report.end_backward.value()) /
        report.central.value();
    ledger.set_value("lambda_measured", report.lambda, "measured",
                     "flare ratio max(end separations)/central separation");
  }
  ledger.set_value("M_flare", threshold_m, "configured", "central separation threshold");
  ledger.set_value("n_flare", static_cast<double>(center_index), "configured",
                   "half-length of the probed geodesic");
  return report;
}

std::string TreeOfSpaces::ball_dot(const SpaceBall& ball) {
  const GogContext& ctx = bs_.ctx();
  std::ostringstream out;
  out << "graph \"space_ball\" {\n  node [shape=point];\n";
  auto pid = [&](int i) { return "p" + std::to_string(i); };
  for (size_t vi = 0; vi < ball.fiber_points.size(); ++vi) {
    out << "  subgraph cluster_v" << vi << " {\n    label=\""
        << ctx.format(ball.tree.vertices[vi].vertex.rep) << "\";\n";
    for (int id : ball.fiber_points[vi]) out << "    " << pid(id) << ";\n";
    // intra-fiber tree edges: connect each point to its parent prefix
    const GroupSpec& spec = ctx.vgroup(ball.tree.vertices[vi].vertex.type);
    if (spec.is_free()) {
      for (int id : ball.fiber_points[vi]) {
        const SpacePoint& p = ball.points[static_cast<size_t>(id)];
        if (p.local.w.empty()) continue;
        SpacePoint parent = SpacePoint::vertex_point(
            p.vlocus, VertexElt::free_elt(p.local.w.prefix(p.local.w.size() - 1)));
        int qid = ball.find(parent, chart_);
        if (qid >= 0) out << "    " << pid(id) << " -- " << pid(qid) << ";\n";
      }
    } else {
      const auto& pts = ball.fiber_points[vi];
      for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
          out << "    " << pid(pts[i]) << " -- " << pid(pts[j]) << ";\n";
    }
    out << "  }\n";
  }
  for (size_t ei = 0; ei < ball.edge_space_points.size(); ++ei) {
    out << "  subgraph cluster_e" << ei << " {\n    style=dashed;\n";
    for (int id : ball.edge_space_points[ei]) out << "    " << pid(id) << ";\n";
    out << "  }\n";
    for (int id : ball.edge_space_points[ei]) {
      const SpacePoint& p = ball.points[static_cast<size_t>(id)];
      const SpaceChart::EdgeInfo& info = chart_.edge_info(p.elocus);
      for (const SpacePoint& attach : {chart_.t_attach(info, p.local),
                                       chart_.o_attach(info, p.local)}) {
        int qid = ball.find(attach, chart_);
        if (qid >= 0) out << "  " << pid(id) << " -- " << pid(qid) << " [style=dashed];\n";
      }
    }
  }
  out << "}\n";
  return out.str();
}

nlohmann::ordered_json TreeOfSpaces::ball_stats(const SpaceBall& ball,
                                                const ConstantsLedger& ledger) {
  const GogContext& ctx = bs_.ctx();
  nlohmann::ordered_json fibers = nlohmann::ordered_json::array();
  for (size_t vi = 0; vi < ball.fiber_points.size(); ++vi) {
    int max_clear = 0;
    for (int id : ball.fiber_points[vi])
      max_clear = std::max(max_clear, ball.clearance_x2[static_cast<size_t>(id)] ==
                                              std::numeric_limits<int>::max()
                                          ? 0
                                          : ball.clearance_x2[static_cast<size_t>(id)]);
    fibers.push_back({{"vertex", ctx.format(ball.tree.vertices[vi].vertex.rep)},
                      {"type", ctx.gog().vertex_names[static_cast<size_t>(
                                   ball.tree.vertices[vi].vertex.type)]},
                      {"points", ball.fiber_points[vi].size()},
                      {"trust_radius", max_clear / 2.0}});
  }
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (size_t ei = 0; ei < ball.edge_space_points.size(); ++ei)
    edges.push_back({{"edge", ctx.gog().oriented_edge_name(ball.tree.edges[ei].etype)},
                     {"points", ball.edge_space_points[ei].size()}});
  int frontier_count = 0;
  for (char f : ball.frontier) frontier_count += (f != 0);
  return nlohmann::ordered_json{{"word_budget", ball.word_budget},
                                {"tree", bs_.ball_stats(ball.tree)},
                                {"points", ball.points.size()},
                                {"frontier_points", frontier_count},
                                {"fibers", fibers},
                                {"edge_spaces", edges},
                                {"ledger", ledger.to_json()}};
}

nlohmann::ordered_json TreeOfSpaces::properness_profile(const SpaceBall& ball, int fiber_index,
                                                        const std::vector<HalfInt>& caps,
                                                        int sample_limit) {
  const auto& ids = ball.fiber_points[static_cast<size_t>(fiber_index)];
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (HalfInt cap : caps) {
    HalfInt worst = HalfInt::of(0);
    int used = 0;
    for (size_t i = 0; i < ids.size() && used < sample_limit; ++i) {
      for (size_t j = i + 1; j < ids.size() && used < sample_limit; ++j) {
        const SpacePoint& p = ball.points[static_cast<size_t>(ids[i])];
        const SpacePoint& q = ball.points[static_cast<size_t>(ids[j])];
        MetricEstimate est = dist_ball(p, q, ball);
        if (!est.reachable || !est.trusted || est.value > cap) continue;
        ++used;
        HalfInt fd = chart_.fiber_distance(p, q);
        if (fd > worst) worst = fd;
      }
    }
    rows.push_back({{"cap", cap.value()}, {"max_fiber_distance", worst.value()},
                    {"pairs_used", used}});
  }
  return rows;
}

}  // namespace ggt
