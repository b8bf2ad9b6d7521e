#include "ggt/bass_serre.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace ggt {

void ConstantsLedger::set(const std::string& name, HalfInt value, const std::string& provenance,
                          const std::string& note) {
  for (auto& [n, e] : entries) {
    if (n == name) {
      e = LedgerEntry{value.value(), value.twice, true, provenance, note};
      return;
    }
  }
  entries.push_back({name, LedgerEntry{value.value(), value.twice, true, provenance, note}});
}

void ConstantsLedger::set_value(const std::string& name, double value,
                                const std::string& provenance, const std::string& note) {
  for (auto& [n, e] : entries) {
    if (n == name) {
      e = LedgerEntry{value, 0, false, provenance, note};
      return;
    }
  }
  entries.push_back({name, LedgerEntry{value, 0, false, provenance, note}});
}

const LedgerEntry* ConstantsLedger::find(const std::string& name) const {
  for (const auto& [n, e] : entries)
    if (n == name) return &e;
  return nullptr;
}

HalfInt ConstantsLedger::get_exact(const std::string& name) const {
  const LedgerEntry* e = find(name);
  if (!e || !e->has_exact) throw Error("ledger: no exact entry named '" + name + "'");
  return HalfInt::halves(e->exact_x2);
}

nlohmann::ordered_json ConstantsLedger::to_json() const {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& [n, e] : entries) {
    nlohmann::ordered_json item{{"value", e.value}, {"provenance", e.provenance}};
    if (e.has_exact) item["exact_x2"] = e.exact_x2;
    if (!e.note.empty()) item["note"] = e.note;
    out[n] = item;
  }
  return out;
}

// ---------------------------------------------------------------------------

bool Stabilizer::contains_local(const GogContext& ctx, const VertexElt& g) const {
  if (free) return sub.core.accepts(g.w);
  (void)ctx;
  return fin.contains(g.fin);
}

bool Stabilizer::is_trivial() const {
  return free ? sub.core.is_trivial() : fin.size() == 1;
}

std::string Stabilizer::describe(const GogContext& ctx) const {
  if (free) return sub.describe(ctx.vgroup(at.type).alphabet);
  std::string out = "{";
  for (size_t i = 0; i < fin.elements.size(); ++i) {
    if (i) out += ", ";
    out += ctx.vgroup(at.type).table.element_names[static_cast<size_t>(fin.elements[i])];
  }
  return out + "}";
}

// ---------------------------------------------------------------------------

TreeVertex BassSerre::vertex_of(const Sequence& g, int vtype) const {
  return TreeVertex{vtype, ctx_.coset_rep(g, vtype)};
}

TreeVertex BassSerre::base_vertex(int vtype) const {
  return vertex_of(ctx_.seq_identity(ctx_.base()), vtype);
}

std::string BassSerre::vertex_key(const TreeVertex& w) const {
  return "v" + std::to_string(w.type) + ":" + ctx_.key(w.rep);
}

Sequence BassSerre::edge_rep_normalize(Sequence path, int etype) const {
  path = ctx_.canonicalize(std::move(path));
  const EdgeImage& img = ctx_.image_at_t(etype);
  VertexElt& last = path.tail.empty() ? path.head : path.tail.back().g;
  int tv = ctx_.gog().graph.t(etype);
  if (img.target_free) {
    last = VertexElt::free_elt(left_coset_rep(last.w, img.image.core));
  } else {
    last = VertexElt::finite_elt(img.fin_image.left_coset_rep(ctx_.vgroup(tv).table, last.fin));
  }
  return path;
}

TreeVertex BassSerre::t_endpoint(const TreeEdge& e) const {
  return vertex_of(e.rep, ctx_.gog().graph.t(e.etype));
}

TreeVertex BassSerre::o_endpoint(const TreeEdge& e) const {
  Sequence crossed = ctx_.multiply(e.rep, ctx_.seq_edge(OrientedGraph::bar(e.etype)));
  return vertex_of(crossed, ctx_.gog().graph.o(e.etype));
}

TreeEdge BassSerre::reverse(const TreeEdge& e) const {
  int ebar = OrientedGraph::bar(e.etype);
  Sequence crossed = ctx_.multiply(e.rep, ctx_.seq_edge(ebar));
  return TreeEdge{ebar, edge_rep_normalize(std::move(crossed), ebar)};
}

std::string BassSerre::edge_key_unoriented(const TreeEdge& e) const {
  const TreeEdge* canon = &e;
  TreeEdge flipped;
  if (e.etype % 2 != 0) {
    flipped = reverse(e);
    canon = &flipped;
  }
  return "e" + std::to_string(canon->etype) + ":" + ctx_.key(canon->rep);
}

TreeEdge BassSerre::edge_at(const TreeVertex& w, int e, const VertexElt& coset) const {
  Sequence path = ctx_.multiply(w.rep, ctx_.seq_vertex(w.type, coset));
  path = ctx_.multiply(path, ctx_.seq_edge(e));
  return TreeEdge{e, edge_rep_normalize(std::move(path), e)};
}

IncidenceResult BassSerre::incident_edges(const TreeVertex& w, int budget) const {
  IncidenceResult out;
  if (budget < 0) {
    out.truncated = true;
    return out;
  }
  const auto& Y = ctx_.gog().graph;
  for (int e = 0; e < Y.num_oriented_edges(); ++e) {
    if (Y.o(e) != w.type) continue;
    // Schreier cosets of Im phi_{e,o(e)} in G_{o(e)} within the budget
    const EdgeImage& oimg = ctx_.image_at_t(OrientedGraph::bar(e));
    std::vector<VertexElt> reps;
    bool complete = true;
    if (ctx_.vgroup(w.type).is_free()) {
      CosetEnumeration cosets = schreier_left_cosets(oimg.image.core, budget);
      for (const Word& c : cosets.reps) reps.push_back(VertexElt::free_elt(c));
      complete = cosets.complete;
    } else {
      for (int c : oimg.fin_image.left_coset_reps(ctx_.vgroup(w.type).table)) {
        if ((c == ctx_.vgroup(w.type).table.identity ? 0 : 1) > budget) {
          complete = false;
          continue;
        }
        reps.push_back(VertexElt::finite_elt(c));
      }
    }
    if (!complete) out.truncated = true;
    for (const VertexElt& c : reps) {
      TreeEdge edge = edge_at(w, e, c);
      out.edges.push_back({edge, t_endpoint(edge), c});
    }
  }
  return out;
}

TreeGeodesic BassSerre::tree_geodesic(const TreeVertex& w1, const TreeVertex& w2) const {
  TreeGeodesic geo;
  geo.vertices.push_back(w1);
  Sequence s = ctx_.canonicalize(ctx_.multiply(ctx_.inverse(w1.rep), w2.rep));
  Sequence prefix = w1.rep;
  VertexElt carry = s.head;  // transversal syllable before the next edge
  for (size_t i = 0; i < s.tail.size(); ++i) {
    int e = s.tail[i].edge;
    geo.steps.push_back({e, carry});
    prefix = ctx_.multiply(prefix, ctx_.seq_vertex(ctx_.gog().graph.o(e), carry));
    prefix = ctx_.multiply(prefix, ctx_.seq_edge(e));
    geo.vertices.push_back(vertex_of(prefix, ctx_.gog().graph.t(e)));
    carry = s.tail[i].g;
  }
  return geo;
}

TreeVertex BassSerre::act(const Sequence& g, const TreeVertex& w) const {
  return vertex_of(ctx_.multiply(ctx_.canonical_loop(g), w.rep), w.type);
}

TreeEdge BassSerre::act(const Sequence& g, const TreeEdge& e) const {
  Sequence moved = ctx_.multiply(ctx_.canonical_loop(g), e.rep);
  return TreeEdge{e.etype, edge_rep_normalize(std::move(moved), e.etype)};
}

Stabilizer BassSerre::full_stabilizer(const TreeVertex& w) const {
  Stabilizer st;
  st.at = w;
  const GroupSpec& spec = ctx_.vgroup(w.type);
  if (spec.is_free()) {
    st.free = true;
    std::vector<Word> gens;
    for (int g = 0; g < spec.alphabet.rank(); ++g)
      gens.push_back(Word::letter(make_letter(g, true)));
    st.sub = fold(gens, spec.alphabet.rank());
  } else {
    st.free = false;
    st.fin = FiniteSubgroup::whole(spec.table);
  }
  return st;
}

namespace {

// subgroup image under phi_{e,o} o phi_{e,t}^-1, with the target kind of the
// o(e)-side vertex group
Stabilizer transport_subgroup(const GogContext& ctx, int e, const Stabilizer& s,
                              const TreeVertex& new_at) {
  const GroupSpec& target = ctx.vgroup(ctx.gog().graph.o(e));
  Stabilizer out;
  out.at = new_at;
  out.free = target.is_free();
  if (s.free) {
    std::vector<Word> mapped_words;
    std::vector<int> mapped_elts;
    for (const Word& b : s.sub.basis) {
      VertexElt crossed = ctx.transport_t_to_o(e, VertexElt::free_elt(b));
      if (target.is_free()) {
        mapped_words.push_back(crossed.w);
      } else {
        mapped_elts.push_back(crossed.fin);
      }
    }
    if (target.is_free()) {
      out.sub = fold(mapped_words, target.alphabet.rank());
    } else {
      out.fin = FiniteSubgroup::closure(target.table, mapped_elts);
    }
  } else {
    std::vector<Word> mapped_words;
    std::vector<int> mapped_elts;
    for (int g : s.fin.elements) {
      VertexElt crossed = ctx.transport_t_to_o(e, VertexElt::finite_elt(g));
      if (target.is_free()) {
        mapped_words.push_back(crossed.w);
      } else {
        mapped_elts.push_back(crossed.fin);
      }
    }
    if (target.is_free()) {
      out.sub = fold(mapped_words, target.alphabet.rank());
    } else {
      out.fin = FiniteSubgroup::closure(target.table, mapped_elts);
    }
  }
  return out;
}

Stabilizer intersect_with_t_image(const GogContext& ctx, int e, Stabilizer s) {
  const EdgeImage& img = ctx.image_at_t(e);
  if (s.free) {
    s.sub = intersect(s.sub, img.image);
  } else {
    s.fin = s.fin.intersect(img.fin_image);
  }
  return s;
}

Stabilizer conjugate_stabilizer(const GogContext& ctx, Stabilizer s, const VertexElt& r) {
  if (s.free) {
    s.sub = conjugate(s.sub, r.w);
  } else {
    s.fin = s.fin.conjugate(ctx.vgroup(s.at.type).table, r.fin);
  }
  return s;
}

}  // namespace

Stabilizer BassSerre::path_stabilizer(const TreeVertex& w1, const TreeVertex& w2) const {
  // walk the geodesic from w2 back to w1, intersecting with edge stabilizers
  // and transporting; the result is local at w1
  TreeGeodesic geo = tree_geodesic(w1, w2);
  Stabilizer s = full_stabilizer(w2);
  for (size_t i = geo.steps.size(); i > 0; --i) {
    const GeodesicStep& step = geo.steps[i - 1];
    // s lives at the t-endpoint of step.etype; the edge stabilizer there is
    // Im phi_{e,t}
    s = intersect_with_t_image(ctx_, step.etype, std::move(s));
    s = transport_subgroup(ctx_, step.etype, s, geo.vertices[i - 1]);
    s = conjugate_stabilizer(ctx_, std::move(s), step.coset);
    s.at = geo.vertices[i - 1];
  }
  s.at = w1;
  return s;
}

// ---------------------------------------------------------------------------
// tree balls

int TreeBall::find_vertex(const std::string& key) const {
  auto it = vertex_index.find(key);
  return it == vertex_index.end() ? -1 : it->second;
}

TreeBall BassSerre::build_ball(const TreeVertex& center, int radius, int budget) const {
  TreeBall ball;
  ball.center = center;
  ball.radius = radius;
  ball.budget = budget;
  ball.vertices.push_back({center, 0, -1, false});
  ball.vertex_index[vertex_key(center)] = 0;
  std::map<std::string, TreeEdge> edge_set;
  std::deque<int> queue{0};
  while (!queue.empty()) {
    int vi = queue.front();
    queue.pop_front();
    TreeBallVertex& info = ball.vertices[static_cast<size_t>(vi)];
    if (info.depth == radius) continue;
    int used = ctx_.seq_word_length(info.vertex.rep);
    int local_budget = budget - used - 1;
    if (local_budget < 0) {
      info.truncated = true;
      continue;
    }
    IncidenceResult inc = incident_edges(info.vertex, local_budget);
    if (inc.truncated) info.truncated = true;
    TreeVertex snapshot = info.vertex;  // vertices vector may reallocate below
    int depth = info.depth;
    for (const IncidentEdge& ie : inc.edges) {
      std::string ekey = edge_key_unoriented(ie.edge);
      edge_set.try_emplace(ekey, ie.edge.etype % 2 == 0 ? ie.edge : reverse(ie.edge));
      std::string okey = vertex_key(ie.opposite);
      if (ball.vertex_index.find(okey) == ball.vertex_index.end()) {
        int idx = static_cast<int>(ball.vertices.size());
        ball.vertex_index[okey] = idx;
        ball.vertices.push_back({ie.opposite, depth + 1, vi, false});
        queue.push_back(idx);
      }
    }
    (void)snapshot;
  }
  for (auto& [k, e] : edge_set) {
    // keep only edges with both endpoints in the ball
    if (ball.vertex_index.count(vertex_key(t_endpoint(e))) &&
        ball.vertex_index.count(vertex_key(o_endpoint(e))))
      ball.edges.push_back(e);
  }
  return ball;
}

std::string BassSerre::ball_dot(const TreeBall& ball) const {
  std::ostringstream out;
  static const char* palette[] = {"lightblue", "lightsalmon", "palegreen", "plum",
                                  "khaki",     "lightgray",   "orange",    "cyan"};
  out << "graph \"tree_ball\" {\n  node [style=filled];\n";
  for (size_t i = 0; i < ball.vertices.size(); ++i) {
    const TreeBallVertex& v = ball.vertices[i];
    std::string label = ctx_.format(v.vertex.rep);
    out << "  n" << i << " [label=\"" << label << "\", fillcolor=\""
        << palette[static_cast<size_t>(v.vertex.type) % 8] << "\""
        << (v.truncated ? ", shape=box" : "") << "];\n";
  }
  for (const TreeEdge& e : ball.edges) {
    int a = ball.find_vertex(vertex_key(o_endpoint(e)));
    int b = ball.find_vertex(vertex_key(t_endpoint(e)));
    if (a >= 0 && b >= 0)
      out << "  n" << a << " -- n" << b << " [label=\""
          << ctx_.gog().oriented_edge_name(e.etype) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

nlohmann::ordered_json BassSerre::ball_stats(const TreeBall& ball) const {
  std::map<int, int> degree;
  for (const TreeEdge& e : ball.edges) {
    int a = ball.find_vertex(vertex_key(o_endpoint(e)));
    int b = ball.find_vertex(vertex_key(t_endpoint(e)));
    if (a >= 0) degree[a]++;
    if (b >= 0) degree[b]++;
  }
  std::map<int, int> histogram;  // degree -> count
  int truncated = 0;
  for (size_t i = 0; i < ball.vertices.size(); ++i) {
    histogram[degree.count(static_cast<int>(i)) ? degree[static_cast<int>(i)] : 0]++;
    truncated += ball.vertices[i].truncated ? 1 : 0;
  }
  nlohmann::ordered_json hist = nlohmann::ordered_json::object();
  for (auto [d, c] : histogram) hist[std::to_string(d)] = c;
  std::map<int, int> per_type;
  for (const auto& v : ball.vertices) per_type[v.vertex.type]++;
  nlohmann::ordered_json types = nlohmann::ordered_json::object();
  for (auto [ty, c] : per_type) types[ctx_.gog().vertex_names[static_cast<size_t>(ty)]] = c;
  return nlohmann::ordered_json{{"radius", ball.radius},
                                {"budget", ball.budget},
                                {"vertices", ball.vertices.size()},
                                {"edges", ball.edges.size()},
                                {"truncated_vertices", truncated},
                                {"degree_histogram", hist},
                                {"vertices_by_type", types}};
}

}  // namespace ggt
