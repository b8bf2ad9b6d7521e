#include "ggt/stallings.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace ggt {

namespace {

// union-find with path compression
int uf_find(std::vector<int>& parent, int x) {
  while (parent[static_cast<size_t>(x)] != x) {
    parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
    x = parent[static_cast<size_t>(x)];
  }
  return x;
}

struct FoldState {
  int rank = 0;
  std::vector<FoldHistory::BouquetEdge> edges;
  std::vector<int> vpar, epar;

  int vfind(int v) { return uf_find(vpar, v); }
  int efind(int e) { return uf_find(epar, e); }
};

struct FoldOutcome {
  // transitions indexed by vertex class root ids (sparse over original ids)
  std::vector<std::vector<int>> next, prev, next_e, prev_e;
  int base_root = 0;
  std::vector<int> vroot_of;  // original vertex -> class root
};

// Runs Stallings folding to completion. Deterministic: scans edges in
// ascending id order and always keeps the first-seen edge of a colliding pair.
FoldOutcome run_fold(FoldState& st, FoldHistory* record) {
  const int V = static_cast<int>(st.vpar.size());
  const int E = static_cast<int>(st.edges.size());

  auto snapshot = [&]() {
    FoldHistory::Level lvl;
    lvl.vclass.resize(static_cast<size_t>(V));
    lvl.eclass.resize(static_cast<size_t>(E));
    for (int v = 0; v < V; ++v) lvl.vclass[static_cast<size_t>(v)] = st.vfind(v);
    for (int e = 0; e < E; ++e) lvl.eclass[static_cast<size_t>(e)] = st.efind(e);
    return lvl;
  };
  if (record) record->levels_.push_back(snapshot());

  bool changed = true;
  while (changed) {
    changed = false;
    // (gen, endpoint class) -> first edge class seen
    std::map<std::pair<int, int>, int> by_origin, by_target;
    for (int e = 0; e < E; ++e) {
      if (st.efind(e) != e) continue;
      int o = st.vfind(st.edges[static_cast<size_t>(e)].o);
      int t = st.vfind(st.edges[static_cast<size_t>(e)].t);
      int g = st.edges[static_cast<size_t>(e)].gen;
      auto [ito, newo] = by_origin.try_emplace({g, o}, e);
      if (!newo) {
        int kept = ito->second;
        int a = st.vfind(st.edges[static_cast<size_t>(kept)].t);
        int b = t;
        if (a != b) st.vpar[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
        st.epar[static_cast<size_t>(e)] = kept;
        if (record) {
          record->steps_.push_back({kept, e, true});
          record->levels_.push_back(snapshot());
        }
        changed = true;
        break;
      }
      auto [itt, newt] = by_target.try_emplace({g, t}, e);
      if (!newt) {
        int kept = itt->second;
        int a = st.vfind(st.edges[static_cast<size_t>(kept)].o);
        int b = o;
        if (a != b) st.vpar[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
        st.epar[static_cast<size_t>(e)] = kept;
        if (record) {
          record->steps_.push_back({kept, e, false});
          record->levels_.push_back(snapshot());
        }
        changed = true;
        break;
      }
    }
  }

  FoldOutcome out;
  out.next.assign(static_cast<size_t>(V), std::vector<int>(static_cast<size_t>(st.rank), -1));
  out.prev.assign(static_cast<size_t>(V), std::vector<int>(static_cast<size_t>(st.rank), -1));
  out.next_e = out.next;
  out.prev_e = out.prev;
  out.vroot_of.resize(static_cast<size_t>(V));
  for (int v = 0; v < V; ++v) out.vroot_of[static_cast<size_t>(v)] = st.vfind(v);
  for (int e = 0; e < E; ++e) {
    if (st.efind(e) != e) continue;
    int o = st.vfind(st.edges[static_cast<size_t>(e)].o);
    int t = st.vfind(st.edges[static_cast<size_t>(e)].t);
    int g = st.edges[static_cast<size_t>(e)].gen;
    out.next[static_cast<size_t>(o)][static_cast<size_t>(g)] = t;
    out.next_e[static_cast<size_t>(o)][static_cast<size_t>(g)] = e;
    out.prev[static_cast<size_t>(t)][static_cast<size_t>(g)] = o;
    out.prev_e[static_cast<size_t>(t)][static_cast<size_t>(g)] = e;
  }
  out.base_root = st.vfind(0);
  return out;
}

FoldState bouquet_of(const std::vector<Word>& gens, int rank, FoldHistory* record) {
  FoldState st;
  st.rank = rank;
  st.vpar.push_back(0);  // base = 0
  if (record) {
    record->rank_ = rank;
    record->loops_.resize(gens.size());
  }
  for (size_t i = 0; i < gens.size(); ++i) {
    const Word& u = gens[i];
    int cur = 0;
    for (int k = 0; k < u.size(); ++k) {
      int nxt;
      if (k + 1 == u.size()) {
        nxt = 0;
      } else {
        nxt = static_cast<int>(st.vpar.size());
        st.vpar.push_back(nxt);
      }
      Letter l = u.at(k);
      int eid = static_cast<int>(st.edges.size());
      if (is_positive(l)) {
        st.edges.push_back({cur, nxt, gen_of(l)});
      } else {
        st.edges.push_back({nxt, cur, gen_of(l)});
      }
      if (record) record->loops_[i].push_back({eid, is_positive(l)});
      cur = nxt;
    }
  }
  st.epar.resize(st.edges.size());
  for (size_t e = 0; e < st.edges.size(); ++e) st.epar[e] = static_cast<int>(e);
  if (record) record->edges_ = st.edges;
  return st;
}

// Builds a canonical CoreGraph from fold output: restrict to the component
// of the base, optionally trim non-base degree-1 vertices, and renumber by
// BFS from the base in fixed label order. Returns the root->new-id map.
CoreGraph build_canonical(const FoldOutcome& out, int rank, bool trim,
                          std::vector<int>* root_to_new = nullptr) {
  const int V = static_cast<int>(out.next.size());
  std::vector<char> alive(static_cast<size_t>(V), 0);
  // component of the base
  {
    std::deque<int> q{out.base_root};
    alive[static_cast<size_t>(out.base_root)] = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (int g = 0; g < rank; ++g) {
        for (int w : {out.next[static_cast<size_t>(v)][static_cast<size_t>(g)],
                      out.prev[static_cast<size_t>(v)][static_cast<size_t>(g)]}) {
          if (w >= 0 && !alive[static_cast<size_t>(w)]) {
            alive[static_cast<size_t>(w)] = 1;
            q.push_back(w);
          }
        }
      }
    }
  }
  auto next = out.next;
  auto prev = out.prev;
  for (int v = 0; v < V; ++v) {
    if (alive[static_cast<size_t>(v)]) continue;
    for (int g = 0; g < rank; ++g) {
      next[static_cast<size_t>(v)][static_cast<size_t>(g)] = -1;
      prev[static_cast<size_t>(v)][static_cast<size_t>(g)] = -1;
    }
  }
  // drop edges pointing at dead vertices
  for (int v = 0; v < V; ++v) {
    for (int g = 0; g < rank; ++g) {
      int& n = next[static_cast<size_t>(v)][static_cast<size_t>(g)];
      if (n >= 0 && !alive[static_cast<size_t>(n)]) n = -1;
      int& p = prev[static_cast<size_t>(v)][static_cast<size_t>(g)];
      if (p >= 0 && !alive[static_cast<size_t>(p)]) p = -1;
    }
  }
  if (trim) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int v = 0; v < V; ++v) {
        if (!alive[static_cast<size_t>(v)] || v == out.base_root) continue;
        int deg = 0;
        for (int g = 0; g < rank; ++g) {
          if (next[static_cast<size_t>(v)][static_cast<size_t>(g)] >= 0) ++deg;
          if (prev[static_cast<size_t>(v)][static_cast<size_t>(g)] >= 0) ++deg;
        }
        if (deg <= 1) {
          alive[static_cast<size_t>(v)] = 0;
          for (int u = 0; u < V; ++u) {
            if (!alive[static_cast<size_t>(u)]) continue;
            for (int g = 0; g < rank; ++g) {
              int& n = next[static_cast<size_t>(u)][static_cast<size_t>(g)];
              if (n == v) n = -1;
              int& p = prev[static_cast<size_t>(u)][static_cast<size_t>(g)];
              if (p == v) p = -1;
            }
          }
          for (int g = 0; g < rank; ++g) {
            next[static_cast<size_t>(v)][static_cast<size_t>(g)] = -1;
            prev[static_cast<size_t>(v)][static_cast<size_t>(g)] = -1;
          }
          changed = true;
        }
      }
    }
  }
  // canonical BFS renumbering
  std::vector<int> newid(static_cast<size_t>(V), -1);
  std::vector<int> order;
  std::deque<int> q{out.base_root};
  newid[static_cast<size_t>(out.base_root)] = 0;
  order.push_back(out.base_root);
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int g = 0; g < rank; ++g) {
      for (int w : {next[static_cast<size_t>(v)][static_cast<size_t>(g)],
                    prev[static_cast<size_t>(v)][static_cast<size_t>(g)]}) {
        if (w >= 0 && newid[static_cast<size_t>(w)] < 0) {
          newid[static_cast<size_t>(w)] = static_cast<int>(order.size());
          order.push_back(w);
          q.push_back(w);
        }
      }
    }
  }
  CoreGraph core;
  core.rank = rank;
  core.base = 0;
  core.next.assign(order.size(), std::vector<int>(static_cast<size_t>(rank), -1));
  core.prev.assign(order.size(), std::vector<int>(static_cast<size_t>(rank), -1));
  for (size_t i = 0; i < order.size(); ++i) {
    int v = order[i];
    for (int g = 0; g < rank; ++g) {
      int n = next[static_cast<size_t>(v)][static_cast<size_t>(g)];
      if (n >= 0) core.next[i][static_cast<size_t>(g)] = newid[static_cast<size_t>(n)];
      int p = prev[static_cast<size_t>(v)][static_cast<size_t>(g)];
      if (p >= 0) core.prev[i][static_cast<size_t>(g)] = newid[static_cast<size_t>(p)];
    }
  }
  if (root_to_new) *root_to_new = newid;
  return core;
}

std::vector<Word> basis_of(const CoreGraph& core, std::vector<std::vector<int>>* nontree_index) {
  const int n = core.num_vertices();
  std::vector<int> parent(static_cast<size_t>(n), -1);
  std::vector<Letter> parent_letter(static_cast<size_t>(n), 0);
  std::vector<std::vector<char>> tree_pos(static_cast<size_t>(n),
                                          std::vector<char>(static_cast<size_t>(core.rank), 0));
  std::deque<int> q{core.base};
  std::vector<char> seen(static_cast<size_t>(n), 0);
  seen[static_cast<size_t>(core.base)] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int g = 0; g < core.rank; ++g) {
      int w = core.next[static_cast<size_t>(v)][static_cast<size_t>(g)];
      if (w >= 0 && !seen[static_cast<size_t>(w)]) {
        seen[static_cast<size_t>(w)] = 1;
        parent[static_cast<size_t>(w)] = v;
        parent_letter[static_cast<size_t>(w)] = make_letter(g, true);
        tree_pos[static_cast<size_t>(v)][static_cast<size_t>(g)] = 1;
        q.push_back(w);
      }
      int u = core.prev[static_cast<size_t>(v)][static_cast<size_t>(g)];
      if (u >= 0 && !seen[static_cast<size_t>(u)]) {
        seen[static_cast<size_t>(u)] = 1;
        parent[static_cast<size_t>(u)] = v;
        parent_letter[static_cast<size_t>(u)] = make_letter(g, false);
        tree_pos[static_cast<size_t>(u)][static_cast<size_t>(g)] = 1;  // edge (u --g--> v)
        q.push_back(u);
      }
    }
  }
  auto path_from_base = [&](int v) {
    std::vector<Letter> rev;
    while (v != core.base) {
      rev.push_back(parent_letter[static_cast<size_t>(v)]);
      v = parent[static_cast<size_t>(v)];
    }
    std::reverse(rev.begin(), rev.end());
    return Word(rev);
  };
  std::vector<Word> basis;
  if (nontree_index)
    nontree_index->assign(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(core.rank), -1));
  for (int v = 0; v < n; ++v) {
    for (int g = 0; g < core.rank; ++g) {
      int w = core.next[static_cast<size_t>(v)][static_cast<size_t>(g)];
      if (w < 0 || tree_pos[static_cast<size_t>(v)][static_cast<size_t>(g)]) continue;
      if (nontree_index)
        (*nontree_index)[static_cast<size_t>(v)][static_cast<size_t>(g)] =
            static_cast<int>(basis.size());
      basis.push_back(path_from_base(v) * Word::letter(make_letter(g, true)) *
                      path_from_base(w).inverse());
    }
  }
  return basis;
}

}  // namespace

int CoreGraph::num_pos_edges() const {
  int count = 0;
  for (const auto& row : next)
    for (int t : row)
      if (t >= 0) ++count;
  return count;
}

int CoreGraph::step(int v, Letter l) const {
  int g = gen_of(l);
  if (g >= rank) return -1;
  return is_positive(l) ? next[static_cast<size_t>(v)][static_cast<size_t>(g)]
                        : prev[static_cast<size_t>(v)][static_cast<size_t>(g)];
}

std::optional<int> CoreGraph::read(const Word& w, int from) const {
  int v = from;
  for (Letter l : w.letters()) {
    v = step(v, l);
    if (v < 0) return std::nullopt;
  }
  return v;
}

bool CoreGraph::accepts(const Word& w) const {
  auto v = read(w, base);
  return v && *v == base;
}

int CoreGraph::graph_distance(int u, int v) const {
  std::vector<int> dist(static_cast<size_t>(num_vertices()), -1);
  std::deque<int> q{u};
  dist[static_cast<size_t>(u)] = 0;
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    if (x == v) return dist[static_cast<size_t>(x)];
    for (int g = 0; g < rank; ++g) {
      for (int y : {next[static_cast<size_t>(x)][static_cast<size_t>(g)],
                    prev[static_cast<size_t>(x)][static_cast<size_t>(g)]}) {
        if (y >= 0 && dist[static_cast<size_t>(y)] < 0) {
          dist[static_cast<size_t>(y)] = dist[static_cast<size_t>(x)] + 1;
          q.push_back(y);
        }
      }
    }
  }
  return -1;
}

int CoreGraph::diameter() const {
  int d = 0;
  for (int u = 0; u < num_vertices(); ++u)
    for (int v = u + 1; v < num_vertices(); ++v) d = std::max(d, graph_distance(u, v));
  return d;
}

namespace {

std::vector<int> bfs_dist(const CoreGraph& core, int src) {
  std::vector<int> dist(static_cast<size_t>(core.num_vertices()), -1);
  std::deque<int> q{src};
  dist[static_cast<size_t>(src)] = 0;
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    for (int g = 0; g < core.rank; ++g) {
      for (int y : {core.next[static_cast<size_t>(x)][static_cast<size_t>(g)],
                    core.prev[static_cast<size_t>(x)][static_cast<size_t>(g)]}) {
        if (y >= 0 && dist[static_cast<size_t>(y)] < 0) {
          dist[static_cast<size_t>(y)] = dist[static_cast<size_t>(x)] + 1;
          q.push_back(y);
        }
      }
    }
  }
  return dist;
}

// greedy lexmin geodesic from `from` to `to` using dist-to-`to`
Word lexmin_geodesic(const CoreGraph& core, int from, int to) {
  std::vector<int> dist = bfs_dist(core, to);
  std::vector<Letter> letters;
  int v = from;
  while (v != to) {
    bool moved = false;
    for (int g = 0; g < core.rank && !moved; ++g) {
      for (bool pos : {true, false}) {
        Letter l = make_letter(g, pos);
        int w = core.step(v, l);
        if (w >= 0 && dist[static_cast<size_t>(w)] == dist[static_cast<size_t>(v)] - 1) {
          letters.push_back(l);
          v = w;
          moved = true;
          break;
        }
      }
    }
    if (!moved) throw Error("internal: lexmin_geodesic stuck");
  }
  return Word(letters);
}

}  // namespace

Word CoreGraph::lexmin_word_from_base(int v) const { return lexmin_geodesic(*this, base, v); }
Word CoreGraph::lexmin_word_to_base(int v) const { return lexmin_geodesic(*this, v, base); }

std::string CoreGraph::dot(const Alphabet& alphabet, const std::string& name) const {
  std::ostringstream out;
  out << "digraph \"" << name << "\" {\n  rankdir=LR;\n";
  for (int v = 0; v < num_vertices(); ++v) {
    out << "  v" << v << " [label=\"" << v << "\""
        << (v == base ? ", shape=doublecircle" : ", shape=circle") << "];\n";
  }
  for (int v = 0; v < num_vertices(); ++v)
    for (int g = 0; g < rank; ++g) {
      int w = next[static_cast<size_t>(v)][static_cast<size_t>(g)];
      if (w >= 0)
        out << "  v" << v << " -> v" << w << " [label=\"" << alphabet.names[static_cast<size_t>(g)]
            << "\"];\n";
    }
  out << "}\n";
  return out.str();
}

Word expand_expression(const GenExpression& expr, const std::vector<Word>& gens) {
  Word w;
  for (auto [i, fwd] : expr)
    w = w * (fwd ? gens[static_cast<size_t>(i)] : gens[static_cast<size_t>(i)].inverse());
  return w;
}

// ---------------------------------------------------------------------------
// FoldHistory

FoldHistory fold_words_with_history(const std::vector<Word>& gens, int rank) {
  FoldHistory hist;
  FoldState st = bouquet_of(gens, rank, &hist);
  FoldOutcome out = run_fold(st, &hist);
  hist.fnext_ = out.next;
  hist.fprev_ = out.prev;
  hist.fnext_e_ = out.next_e;
  hist.fprev_e_ = out.prev_e;
  hist.fbase_ = out.base_root;
  return hist;
}

int FoldHistory::folded_rank() const {
  int edges = 0;
  std::set<int> verts;
  const Level& last = levels_.back();
  for (size_t e = 0; e < edges_.size(); ++e) {
    if (last.eclass[e] == static_cast<int>(e)) {
      ++edges;
      verts.insert(last.vclass[static_cast<size_t>(edges_[e].o)]);
      verts.insert(last.vclass[static_cast<size_t>(edges_[e].t)]);
    }
  }
  if (edges == 0) return 0;
  return edges - static_cast<int>(verts.size()) + 1;
}

std::optional<GenExpression> FoldHistory::express(const Word& w) const {
  // walk w in the folded graph, recording member edges
  std::vector<std::pair<int, bool>> path;
  int v = fbase_;
  for (Letter l : w.letters()) {
    int g = gen_of(l);
    if (g >= rank_) return std::nullopt;
    int nv, e;
    if (is_positive(l)) {
      nv = fnext_[static_cast<size_t>(v)][static_cast<size_t>(g)];
      e = fnext_e_[static_cast<size_t>(v)][static_cast<size_t>(g)];
    } else {
      nv = fprev_[static_cast<size_t>(v)][static_cast<size_t>(g)];
      e = fprev_e_[static_cast<size_t>(v)][static_cast<size_t>(g)];
    }
    if (nv < 0) return std::nullopt;
    path.push_back({e, is_positive(l)});
    v = nv;
  }
  if (v != fbase_) return std::nullopt;

  auto reduce_path = [](std::vector<std::pair<int, bool>>& p) {
    std::vector<std::pair<int, bool>> out;
    for (auto& item : p) {
      if (!out.empty() && out.back().first == item.first && out.back().second != item.second) {
        out.pop_back();
      } else {
        out.push_back(item);
      }
    }
    p = std::move(out);
  };
  reduce_path(path);

  // lift through the folds, last first
  for (size_t j = steps_.size(); j > 0; --j) {
    const Step& stp = steps_[j - 1];
    const Level& lo = levels_[j - 1];  // before this fold
    const Level& hi = levels_[j];      // after this fold
    int merged_class = hi.eclass[static_cast<size_t>(stp.kept_edge)];
    int base_lo = lo.vclass[0];
    // vertex pair merged by this step (may be equal)
    int va, vb;
    if (stp.same_origin) {
      va = lo.vclass[static_cast<size_t>(edges_[static_cast<size_t>(stp.kept_edge)].t)];
      vb = lo.vclass[static_cast<size_t>(edges_[static_cast<size_t>(stp.removed_edge)].t)];
    } else {
      va = lo.vclass[static_cast<size_t>(edges_[static_cast<size_t>(stp.kept_edge)].o)];
      vb = lo.vclass[static_cast<size_t>(edges_[static_cast<size_t>(stp.removed_edge)].o)];
    }
    auto origin_lo = [&](int e, bool fwd) {
      const BouquetEdge& be = edges_[static_cast<size_t>(e)];
      return lo.vclass[static_cast<size_t>(fwd ? be.o : be.t)];
    };
    auto target_lo = [&](int e, bool fwd) {
      const BouquetEdge& be = edges_[static_cast<size_t>(e)];
      return lo.vclass[static_cast<size_t>(fwd ? be.t : be.o)];
    };
    auto connector = [&](int cur, std::vector<std::pair<int, bool>>& into) {
      // crosses from one merged vertex to its sibling through the two folded edges
      if (va == vb || (cur != va && cur != vb)) throw Error("internal: fold lift connector");
      int k = stp.kept_edge, r = stp.removed_edge;
      if (stp.same_origin) {
        // connector t(kept) -> origin -> t(removed), or reversed
        if (cur == lo.vclass[static_cast<size_t>(edges_[static_cast<size_t>(k)].t)]) {
          into.push_back({k, false});
          into.push_back({r, true});
        } else {
          into.push_back({r, false});
          into.push_back({k, true});
        }
      } else {
        if (cur == lo.vclass[static_cast<size_t>(edges_[static_cast<size_t>(k)].o)]) {
          into.push_back({k, true});
          into.push_back({r, false});
        } else {
          into.push_back({r, true});
          into.push_back({k, false});
        }
      }
      return cur == va ? vb : va;
    };

    std::vector<std::pair<int, bool>> lifted;
    int cur = base_lo;
    for (auto [b, d] : path) {
      int candidates[2];
      int ncand;
      if (hi.eclass[static_cast<size_t>(b)] == merged_class) {
        candidates[0] = stp.kept_edge;
        candidates[1] = stp.removed_edge;
        ncand = 2;
      } else {
        candidates[0] = b;
        ncand = 1;
      }
      int chosen = -1;
      for (int c = 0; c < ncand; ++c)
        if (origin_lo(candidates[c], d) == cur) {
          chosen = candidates[c];
          break;
        }
      if (chosen < 0) {
        cur = connector(cur, lifted);
        for (int c = 0; c < ncand; ++c)
          if (origin_lo(candidates[c], d) == cur) {
            chosen = candidates[c];
            break;
          }
        if (chosen < 0) throw Error("internal: fold lift lost the path");
      }
      lifted.push_back({chosen, d});
      cur = target_lo(chosen, d);
    }
    if (cur != base_lo) cur = connector(cur, lifted);
    if (cur != base_lo) throw Error("internal: fold lift endpoint");
    reduce_path(lifted);
    path = std::move(lifted);
  }

  // decode whole-loop traversals in the bouquet
  std::vector<std::pair<int, int>> edge_loc(edges_.size(), {-1, -1});  // (loop, position)
  for (size_t i = 0; i < loops_.size(); ++i)
    for (size_t k = 0; k < loops_[i].size(); ++k)
      edge_loc[static_cast<size_t>(loops_[i][k].first)] = {static_cast<int>(i),
                                                           static_cast<int>(k)};
  GenExpression expr;
  size_t i = 0;
  while (i < path.size()) {
    auto [b, d] = path[i];
    auto [li, pos] = edge_loc[static_cast<size_t>(b)];
    if (li < 0) throw Error("internal: fold lift decode");
    const auto& loop = loops_[static_cast<size_t>(li)];
    bool forward = (d == loop[static_cast<size_t>(pos)].second);
    if (forward) {
      if (pos != 0 || i + loop.size() > path.size()) throw Error("internal: fold lift decode");
      for (size_t k = 0; k < loop.size(); ++k)
        if (path[i + k] != loop[k]) throw Error("internal: fold lift decode");
      expr.push_back({li, true});
    } else {
      if (pos != static_cast<int>(loop.size()) - 1 || i + loop.size() > path.size())
        throw Error("internal: fold lift decode");
      for (size_t k = 0; k < loop.size(); ++k) {
        auto want = loop[loop.size() - 1 - k];
        want.second = !want.second;
        if (path[i + k] != want) throw Error("internal: fold lift decode");
      }
      expr.push_back({li, false});
    }
    i += loop.size();
  }
  return expr;
}

// ---------------------------------------------------------------------------
// public subgroup operations

SubgroupHandle fold(const std::vector<Word>& generators, int rank) {
  std::vector<Word> reduced;
  for (const Word& w : generators)
    if (!w.empty()) reduced.push_back(w);
  FoldState st = bouquet_of(reduced, rank, nullptr);
  FoldOutcome out = run_fold(st, nullptr);
  SubgroupHandle H;
  H.core = build_canonical(out, rank, /*trim=*/true);
  H.basis = basis_of(H.core, nullptr);
  return H;
}

bool SubgroupHandle::is_whole_group() const {
  return core.num_vertices() == 1 && core.num_pos_edges() == core.rank;
}

std::string SubgroupHandle::describe(const Alphabet& alphabet) const {
  std::string out = "<";
  for (size_t i = 0; i < basis.size(); ++i) {
    if (i) out += ", ";
    out += alphabet.format(basis[i]);
  }
  return out + ">";
}

std::optional<GenExpression> membership(const Word& w, const SubgroupHandle& H) {
  // recompute the spanning tree indexing (cheap, sizes are small)
  std::vector<std::vector<int>> nontree;
  basis_of(H.core, &nontree);
  GenExpression expr;
  int v = H.core.base;
  for (Letter l : w.letters()) {
    int g = gen_of(l);
    if (g >= H.core.rank) return std::nullopt;
    if (is_positive(l)) {
      int idx = nontree[static_cast<size_t>(v)][static_cast<size_t>(g)];
      int nv = H.core.next[static_cast<size_t>(v)][static_cast<size_t>(g)];
      if (nv < 0) return std::nullopt;
      if (idx >= 0) expr.push_back({idx, true});
      v = nv;
    } else {
      int nv = H.core.prev[static_cast<size_t>(v)][static_cast<size_t>(g)];
      if (nv < 0) return std::nullopt;
      int idx = nontree[static_cast<size_t>(nv)][static_cast<size_t>(g)];
      if (idx >= 0) expr.push_back({idx, false});
      v = nv;
    }
  }
  if (v != H.core.base) return std::nullopt;
  return expr;
}

bool contains(const SubgroupHandle& H, const Word& w) { return H.core.accepts(w); }

SubgroupHandle intersect(const SubgroupHandle& H, const SubgroupHandle& K) {
  if (H.core.rank != K.core.rank) throw Error("intersect: ambient ranks differ");
  const int rank = H.core.rank;
  std::map<std::pair<int, int>, int> idx;
  std::vector<std::pair<int, int>> states{{H.core.base, K.core.base}};
  idx[{H.core.base, K.core.base}] = 0;
  std::vector<std::vector<int>> next, prev;
  next.push_back(std::vector<int>(static_cast<size_t>(rank), -1));
  prev.push_back(std::vector<int>(static_cast<size_t>(rank), -1));
  for (size_t i = 0; i < states.size(); ++i) {
    auto [u, v] = states[i];
    for (int g = 0; g < rank; ++g) {
      int nu = H.core.next[static_cast<size_t>(u)][static_cast<size_t>(g)];
      int nv = K.core.next[static_cast<size_t>(v)][static_cast<size_t>(g)];
      if (nu >= 0 && nv >= 0) {
        auto [it, fresh] = idx.try_emplace({nu, nv}, static_cast<int>(states.size()));
        if (fresh) {
          states.push_back({nu, nv});
          next.push_back(std::vector<int>(static_cast<size_t>(rank), -1));
          prev.push_back(std::vector<int>(static_cast<size_t>(rank), -1));
        }
        next[i][static_cast<size_t>(g)] = it->second;
        prev[static_cast<size_t>(it->second)][static_cast<size_t>(g)] = static_cast<int>(i);
      }
      int pu = H.core.prev[static_cast<size_t>(u)][static_cast<size_t>(g)];
      int pv = K.core.prev[static_cast<size_t>(v)][static_cast<size_t>(g)];
      if (pu >= 0 && pv >= 0) {
        auto [it, fresh] = idx.try_emplace({pu, pv}, static_cast<int>(states.size()));
        if (fresh) {
          states.push_back({pu, pv});
          next.push_back(std::vector<int>(static_cast<size_t>(rank), -1));
          prev.push_back(std::vector<int>(static_cast<size_t>(rank), -1));
        }
        prev[i][static_cast<size_t>(g)] = it->second;
        next[static_cast<size_t>(it->second)][static_cast<size_t>(g)] = static_cast<int>(i);
      }
    }
  }
  FoldOutcome out;
  out.next = std::move(next);
  out.prev = std::move(prev);
  out.base_root = 0;
  SubgroupHandle R;
  R.core = build_canonical(out, rank, /*trim=*/true);
  R.basis = basis_of(R.core, nullptr);
  return R;
}

SubgroupHandle conjugate(const SubgroupHandle& H, const Word& x) {
  std::vector<Word> gens;
  for (const Word& b : H.basis) gens.push_back(x * b * x.inverse());
  return fold(gens, H.core.rank);
}

Word FreeHom::apply(const Word& w) const {
  Word out;
  for (Letter l : w.letters()) {
    const Word& img = images[static_cast<size_t>(gen_of(l))];
    out = out * (is_positive(l) ? img : img.inverse());
  }
  return out;
}

SubgroupHandle preimage(const FreeHom& phi, const SubgroupHandle& A) {
  if (A.core.rank != phi.target_rank) throw Error("preimage: subgroup not in the target group");
  FoldHistory hist = fold_words_with_history(phi.images, phi.target_rank);
  if (hist.folded_rank() != phi.source_rank)
    throw Error("preimage: homomorphism is not injective (folded image has rank " +
                std::to_string(hist.folded_rank()) + " < " + std::to_string(phi.source_rank) + ")");
  SubgroupHandle image = fold(phi.images, phi.target_rank);
  SubgroupHandle B = intersect(A, image);
  std::vector<Word> source_words;
  for (const Word& b : B.basis) {
    auto expr = hist.express(b);
    if (!expr) throw Error("internal: intersection element not expressible through the image");
    std::vector<Letter> letters;
    for (auto [i, fwd] : *expr) letters.push_back(make_letter(i, fwd));
    source_words.push_back(Word(letters));
  }
  return fold(source_words, phi.source_rank);
}

// ---------------------------------------------------------------------------
// cosets

namespace {

// runs the Schreier machine (core plus hanging trees): state after reading w
std::pair<int, Word> read_with_tail(const CoreGraph& core, const Word& w) {
  int v = core.base;
  std::vector<Letter> tail;
  for (Letter l : w.letters()) {
    if (!tail.empty()) {
      if (l == -tail.back()) {
        tail.pop_back();
      } else {
        tail.push_back(l);
      }
      continue;
    }
    int nv = core.step(v, l);
    if (nv >= 0) {
      v = nv;
    } else {
      tail.push_back(l);
    }
  }
  return {v, Word(tail)};
}

}  // namespace

Word left_coset_rep(const Word& g, const CoreGraph& core) {
  auto [v, tail] = read_with_tail(core, g.inverse());
  return tail.inverse() * core.lexmin_word_to_base(v);
}

std::pair<Word, Word> left_coset_split(const Word& g, const CoreGraph& core) {
  Word rep = left_coset_rep(g, core);
  Word rem = rep.inverse() * g;
  if (!core.accepts(rem)) throw Error("internal: left coset split remainder not in subgroup");
  return {rep, rem};
}

Word right_coset_rep(const Word& g, const CoreGraph& core) {
  auto [v, tail] = read_with_tail(core, g);
  return core.lexmin_word_from_base(v) * tail;
}

namespace {

CosetEnumeration enumerate_cosets(const CoreGraph& core, int budget,
                                  Word (*canon)(const Word&, const CoreGraph&)) {
  CosetEnumeration out;
  std::vector<Word> frontier{Word()};
  out.reps.push_back(Word());
  for (int len = 1; len <= budget; ++len) {
    std::vector<Word> next_frontier;
    for (const Word& r : frontier) {
      for (int g = 0; g < core.rank; ++g) {
        for (bool pos : {true, false}) {
          Letter l = make_letter(g, pos);
          if (!r.empty() && r.back() == -l) continue;
          Word w = r * Word::letter(l);
          if (canon(w, core) == w) {
            out.reps.push_back(w);
            next_frontier.push_back(w);
          }
        }
      }
    }
    frontier = std::move(next_frontier);
  }
  // complete iff no coset needs a longer representative: canonical reps are
  // prefix-closed, so it is enough that no length-(budget+1) rep extends one
  // of the length-budget reps
  out.complete = true;
  for (const Word& r : frontier) {
    for (int g = 0; g < core.rank && out.complete; ++g) {
      for (bool pos : {true, false}) {
        Letter l = make_letter(g, pos);
        if (!r.empty() && r.back() == -l) continue;
        Word w = r * Word::letter(l);
        if (canon(w, core) == w) {
          out.complete = false;
          break;
        }
      }
    }
    if (!out.complete) break;
  }
  return out;
}

}  // namespace

CosetEnumeration schreier_left_cosets(const CoreGraph& core, int budget) {
  return enumerate_cosets(core, budget, &left_coset_rep);
}

CosetEnumeration schreier_right_cosets(const CoreGraph& core, int budget) {
  return enumerate_cosets(core, budget, &right_coset_rep);
}

CosetMachine make_left_coset_machine(const CoreGraph& core, const Word& c) {
  // stem spelling c from a fresh start vertex into the core base, folded with
  // the core; the stem end is vertex 0 of the multigraph so that the builder
  // keeps everything reachable from it
  FoldState st;
  st.rank = core.rank;
  const int n = core.num_vertices();
  // vertices: 0..n-1 core (base = core.base), n.. stem interior, start last
  int total = n + std::max(0, c.size() - 1) + (c.size() > 0 ? 1 : 0);
  st.vpar.resize(static_cast<size_t>(std::max(total, n)));
  for (size_t i = 0; i < st.vpar.size(); ++i) st.vpar[i] = static_cast<int>(i);
  for (int v = 0; v < n; ++v)
    for (int g = 0; g < core.rank; ++g) {
      int w = core.next[static_cast<size_t>(v)][static_cast<size_t>(g)];
      if (w >= 0) st.edges.push_back({v, w, g});
    }
  int start;
  if (c.empty()) {
    start = core.base;
  } else {
    start = n + c.size() - 1;  // chain start
    int cur = start;
    for (int k = 0; k < c.size(); ++k) {
      int nxt = (k + 1 == c.size()) ? core.base : n + (c.size() - 2 - k);
      Letter l = c.at(k);
      if (is_positive(l)) {
        st.edges.push_back({cur, nxt, gen_of(l)});
      } else {
        st.edges.push_back({nxt, cur, gen_of(l)});
      }
      cur = nxt;
    }
  }
  st.epar.resize(st.edges.size());
  for (size_t e = 0; e < st.edges.size(); ++e) st.epar[e] = static_cast<int>(e);

  FoldOutcome out = run_fold(st, nullptr);
  out.base_root = out.vroot_of[static_cast<size_t>(start)];
  std::vector<int> root_to_new;
  CosetMachine machine;
  machine.graph = build_canonical(out, core.rank, /*trim=*/false, &root_to_new);
  machine.start = 0;
  machine.core_base = root_to_new[static_cast<size_t>(out.vroot_of[static_cast<size_t>(core.base)])];
  return machine;
}

std::string schreier_dot(const CoreGraph& core, const CosetEnumeration& cosets,
                         const Alphabet& alphabet, const std::string& name) {
  std::ostringstream out;
  out << "digraph \"" << name << "\" {\n  rankdir=LR;\n";
  std::unordered_map<Word, int, WordHash> index;
  for (size_t i = 0; i < cosets.reps.size(); ++i) index[cosets.reps[i]] = static_cast<int>(i);
  for (size_t i = 0; i < cosets.reps.size(); ++i) {
    out << "  c" << i << " [label=\"" << (cosets.reps[i].empty() ? "1" : alphabet.format(cosets.reps[i]))
        << "\"" << (i == 0 ? ", shape=doublecircle" : ", shape=circle") << "];\n";
  }
  for (size_t i = 0; i < cosets.reps.size(); ++i) {
    for (int g = 0; g < core.rank; ++g) {
      Word target = right_coset_rep(cosets.reps[i] * Word::letter(make_letter(g, true)), core);
      auto it = index.find(target);
      if (it != index.end())
        out << "  c" << i << " -> c" << it->second << " [label=\""
            << alphabet.names[static_cast<size_t>(g)] << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace ggt
