#include "ggt/graph_of_groups.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "ggt/stallings.hpp"

namespace ggt {

void OrientedGraph::add_edge(int from, int to) {
  origin.push_back(from);
  terminus.push_back(to);
  origin.push_back(to);
  terminus.push_back(from);
}

bool OrientedGraph::connected() const {
  if (num_vertices == 0) return false;
  std::vector<char> seen(static_cast<size_t>(num_vertices), 0);
  std::deque<int> q{0};
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int e = 0; e < num_oriented_edges(); ++e) {
      if (o(e) != v) continue;
      if (!seen[static_cast<size_t>(t(e))]) {
        seen[static_cast<size_t>(t(e))] = 1;
        ++count;
        q.push_back(t(e));
      }
    }
  }
  return count == num_vertices;
}

int GraphOfGroups::vertex_by_name(const std::string& n) const {
  for (size_t i = 0; i < vertex_names.size(); ++i)
    if (vertex_names[i] == n) return static_cast<int>(i);
  return -1;
}

int GraphOfGroups::unoriented_edge_by_name(const std::string& n) const {
  for (size_t i = 0; i < edge_names.size(); ++i)
    if (edge_names[i] == n) return static_cast<int>(i);
  return -1;
}

std::string GraphOfGroups::oriented_edge_name(int e) const {
  std::string base_name = edge_names[static_cast<size_t>(e / 2)];
  return (e % 2 == 0) ? base_name : base_name + "~";
}

void ValidationReport::add(const std::string& clause, bool passed, const std::string& detail) {
  checks.push_back({clause, passed, detail});
  if (!passed) ok = false;
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (const auto& c : checks)
    out << (c.passed ? "[ok]   " : "[FAIL] ") << c.clause << ": " << c.detail << "\n";
  return out.str();
}

nlohmann::ordered_json ValidationReport::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : checks)
    arr.push_back({{"clause", c.clause}, {"passed", c.passed}, {"detail", c.detail}});
  return nlohmann::ordered_json{{"ok", ok}, {"checks", arr}};
}

namespace {

// full homomorphism table of a finite edge group into a finite target:
// expresses every element through the chosen generators (BFS) and maps.
// Returns empty on failure (not a homomorphism).
std::vector<int> finite_elt_map(const GroupSpec& edge, const std::vector<int>& gen_images,
                                const FiniteGroupTable& target) {
  const FiniteGroupTable& src = edge.table;
  std::vector<int> map(static_cast<size_t>(src.order), -1);
  map[static_cast<size_t>(src.identity)] = target.identity;
  std::deque<int> q{src.identity};
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    for (size_t i = 0; i < edge.finite_gens.size(); ++i) {
      int s = edge.finite_gens[i];
      int img = gen_images[i];
      for (auto [nx, nimg] :
           {std::pair{src.mul(x, s), target.mul(map[static_cast<size_t>(x)], img)},
            std::pair{src.mul(x, src.inv(s)),
                      target.mul(map[static_cast<size_t>(x)], target.inv(img))}}) {
        if (map[static_cast<size_t>(nx)] < 0) {
          map[static_cast<size_t>(nx)] = nimg;
          q.push_back(nx);
        } else if (map[static_cast<size_t>(nx)] != nimg) {
          return {};  // inconsistent: not a homomorphism
        }
      }
    }
  }
  for (int v : map)
    if (v < 0) return {};  // generators do not generate
  // check the homomorphism law on all pairs
  for (int a = 0; a < src.order; ++a)
    for (int b = 0; b < src.order; ++b)
      if (map[static_cast<size_t>(src.mul(a, b))] !=
          target.mul(map[static_cast<size_t>(a)], map[static_cast<size_t>(b)]))
        return {};
  return map;
}

}  // namespace

ValidationReport validate(const GraphOfGroups& gog) {
  ValidationReport rep;
  const auto& Y = gog.graph;

  rep.add("graph: vertex set nonempty", Y.num_vertices > 0,
          std::to_string(Y.num_vertices) + " vertices");
  rep.add("graph: connected", Y.connected(), "");
  {
    bool ok = true;
    for (int e = 0; e < Y.num_oriented_edges(); ++e) {
      int b = OrientedGraph::bar(e);
      if (b == e || OrientedGraph::bar(b) != e || Y.o(b) != Y.t(e) || Y.t(b) != Y.o(e)) ok = false;
    }
    rep.add("graph: bar involution (o(ebar)=t(e), t(ebar)=o(e), ebar!=e)", ok,
            std::to_string(Y.num_unoriented_edges()) + " unoriented edges");
  }
  {
    bool ok = static_cast<int>(gog.vgroups.size()) == Y.num_vertices &&
              static_cast<int>(gog.egroups.size()) == Y.num_unoriented_edges() &&
              static_cast<int>(gog.mono_t.size()) == Y.num_oriented_edges();
    rep.add("graph of groups: one group per vertex and per unoriented edge (G_e = G_ebar)", ok, "");
    if (!ok) return rep;
  }

  // group specs
  for (int v = 0; v < Y.num_vertices; ++v) {
    const GroupSpec& spec = gog.vgroups[static_cast<size_t>(v)];
    if (spec.is_free()) {
      rep.add("vertex group " + gog.vertex_names[static_cast<size_t>(v)],
              spec.alphabet.rank() >= 0, "free of rank " + std::to_string(spec.alphabet.rank()));
    } else {
      bool ok = true;
      std::string detail = "finite of order " + std::to_string(spec.table.order);
      try {
        spec.table.validate();
      } catch (const Error& err) {
        ok = false;
        detail = err.what();
      }
      rep.add("vertex group " + gog.vertex_names[static_cast<size_t>(v)], ok, detail);
    }
  }

  // edge monomorphisms: arity and injectivity
  for (int e = 0; e < Y.num_oriented_edges(); ++e) {
    const GroupSpec& eg = gog.edge_group(e);
    const GroupSpec& tg = gog.vgroups[static_cast<size_t>(Y.t(e))];
    const MonoSide& mono = gog.mono_to_t(e);
    std::string label = "edge map phi_{" + gog.oriented_edge_name(e) + ",t}";
    if (tg.is_free()) {
      if (!eg.is_free()) {
        bool trivial = eg.table.order == 1;
        rep.add(label, trivial,
                trivial ? "trivial finite edge group into a free group"
                        : "a nontrivial finite group has no injective map into a free group");
        continue;
      }
      if (static_cast<int>(mono.word_images.size()) != eg.generator_count()) {
        rep.add(label, false, "expected one image word per edge-group generator");
        continue;
      }
      FoldHistory hist = fold_words_with_history(mono.word_images, tg.alphabet.rank());
      bool injective = hist.folded_rank() == eg.generator_count();
      rep.add(label, injective,
              injective ? "injective (folded image has full rank)"
                        : "not injective: folded image has rank " +
                              std::to_string(hist.folded_rank()));
    } else {
      if (eg.is_free()) {
        bool trivial = eg.alphabet.rank() == 0;
        rep.add(label, trivial,
                trivial ? "trivial free edge group into a finite group"
                        : "a free group of positive rank has no injective map into a finite group");
        continue;
      }
      if (static_cast<int>(mono.elt_images.size()) != eg.generator_count()) {
        rep.add(label, false, "expected one image element per edge-group generator");
        continue;
      }
      auto map = finite_elt_map(eg, mono.elt_images, tg.table);
      if (map.empty()) {
        rep.add(label, false, "images do not extend to a homomorphism");
        continue;
      }
      std::set<int> image_set(map.begin(), map.end());
      bool injective = static_cast<int>(image_set.size()) == eg.table.order;
      rep.add(label, injective, injective ? "injective" : "kernel is nontrivial");
    }
  }

  // spanning tree
  {
    int tree_count = 0;
    for (char c : gog.in_tree) tree_count += (c != 0);
    bool size_ok = tree_count == Y.num_vertices - 1;
    std::vector<int> parent(static_cast<size_t>(Y.num_vertices));
    for (int v = 0; v < Y.num_vertices; ++v) parent[static_cast<size_t>(v)] = v;
    auto find = [&](int x) {
      while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)];
      return x;
    };
    bool acyclic = true;
    for (int k = 0; k < Y.num_unoriented_edges(); ++k) {
      if (!gog.in_tree[static_cast<size_t>(k)]) continue;
      int a = find(Y.o(2 * k)), b = find(Y.t(2 * k));
      if (a == b) {
        acyclic = false;
      } else {
        parent[static_cast<size_t>(a)] = b;
      }
    }
    std::set<int> roots;
    for (int v = 0; v < Y.num_vertices; ++v) roots.insert(find(v));
    rep.add("spanning tree: |T| = |V|-1, acyclic, spanning",
            size_ok && acyclic && roots.size() == 1,
            std::to_string(tree_count) + " tree edges");
  }

  rep.add("base vertex", gog.base_vertex >= 0 && gog.base_vertex < Y.num_vertices,
          gog.base_vertex >= 0 && gog.base_vertex < Y.num_vertices
              ? gog.vertex_names[static_cast<size_t>(gog.base_vertex)]
              : "out of range");

  // generator names must be globally distinct (needed for the presentation)
  {
    std::set<std::string> names;
    bool distinct = true;
    for (int v = 0; v < Y.num_vertices; ++v) {
      const GroupSpec& spec = gog.vgroups[static_cast<size_t>(v)];
      if (spec.is_free()) {
        for (const auto& n : spec.alphabet.names)
          if (!names.insert(n).second) distinct = false;
      } else {
        for (int i = 0; i < spec.table.order; ++i) {
          if (i == spec.table.identity) continue;
          if (!names.insert(spec.table.element_names[static_cast<size_t>(i)]).second)
            distinct = false;
        }
      }
    }
    for (const auto& n : gog.edge_names)
      if (!names.insert(n).second) distinct = false;
    rep.add("generator names globally distinct", distinct, "");
  }

  // QI embedded condition: finitely generated subgroups of free groups are
  // quasiconvex; report the core diameter as the witness. Finite groups
  // have bounded Cayley graphs.
  for (int e = 0; e < Y.num_oriented_edges(); ++e) {
    const GroupSpec& tg = gog.vgroups[static_cast<size_t>(Y.t(e))];
    const MonoSide& mono = gog.mono_to_t(e);
    std::string label = "QI embedded: image of " + gog.oriented_edge_name(e) + " in G_t";
    if (tg.is_free()) {
      if (!gog.edge_group(e).is_free()) {
        rep.add(label, true, "finite image, diameter 0");
        continue;
      }
      if (static_cast<int>(mono.word_images.size()) != gog.edge_group(e).generator_count())
        continue;  // already reported above
      SubgroupHandle image = fold(mono.word_images, tg.alphabet.rank());
      rep.add(label, true,
              "quasiconvex; core diameter " + std::to_string(image.core.diameter()));
    } else {
      rep.add(label, true, "finite vertex group, diameter <= 1");
    }
  }

  return rep;
}

// ---------------------------------------------------------------------------
// presentation

int Presentation::family_count(int family) const {
  int n = 0;
  for (const auto& r : relators) n += (r.family == family);
  return n;
}

std::string Presentation::text() const {
  std::ostringstream out;
  out << "generators:";
  for (const auto& g : generators) out << " " << g;
  out << "\nrelators:\n";
  for (const auto& r : relators) {
    out << "  (" << r.family << ")";
    for (const auto& t : r.tokens) out << " " << t;
    out << "\n";
  }
  return out.str();
}

nlohmann::ordered_json Presentation::to_json() const {
  nlohmann::ordered_json rel = nlohmann::ordered_json::array();
  for (const auto& r : relators) rel.push_back({{"family", r.family}, {"tokens", r.tokens}});
  return nlohmann::ordered_json{{"generators", generators}, {"relators", rel}};
}

namespace {

std::vector<std::string> word_tokens(const Alphabet& alphabet, const Word& w, bool invert) {
  std::vector<std::string> tokens;
  Word v = invert ? w.inverse() : w;
  for (Letter l : v.letters()) tokens.push_back(alphabet.format_letter(l));
  return tokens;
}

}  // namespace

Presentation fundamental_presentation(const GraphOfGroups& gog) {
  Presentation pres;
  const auto& Y = gog.graph;
  for (int v = 0; v < Y.num_vertices; ++v) {
    const GroupSpec& spec = gog.vgroups[static_cast<size_t>(v)];
    if (spec.is_free()) {
      for (const auto& n : spec.alphabet.names) pres.generators.push_back(n);
    } else {
      for (int i = 0; i < spec.table.order; ++i)
        if (i != spec.table.identity)
          pres.generators.push_back(spec.table.element_names[static_cast<size_t>(i)]);
    }
  }
  for (const auto& n : gog.edge_names) pres.generators.push_back(n);

  // family (1): multiplication-table relators of the finite vertex groups;
  // free vertex groups contribute none
  for (int v = 0; v < Y.num_vertices; ++v) {
    const GroupSpec& spec = gog.vgroups[static_cast<size_t>(v)];
    if (spec.is_free()) continue;
    const FiniteGroupTable& tab = spec.table;
    auto name_of = [&](int i) { return tab.element_names[static_cast<size_t>(i)]; };
    for (int i = 0; i < tab.order; ++i) {
      if (i == tab.identity) continue;
      for (int j = 0; j < tab.order; ++j) {
        if (j == tab.identity) continue;
        int p = tab.mul(i, j);
        Presentation::Relator r;
        r.family = 1;
        r.tokens = {name_of(i), name_of(j)};
        if (p != tab.identity) r.tokens.push_back(name_of(p) + "^-1");
        pres.relators.push_back(std::move(r));
      }
    }
  }

  // family (2): ebar e, one per unoriented edge
  for (int k = 0; k < Y.num_unoriented_edges(); ++k) {
    Presentation::Relator r;
    r.family = 2;
    r.tokens = {gog.oriented_edge_name(2 * k + 1), gog.oriented_edge_name(2 * k)};
    pres.relators.push_back(std::move(r));
  }

  // family (3): e = 1 for tree edges
  for (int k = 0; k < Y.num_unoriented_edges(); ++k) {
    if (!gog.in_tree[static_cast<size_t>(k)]) continue;
    Presentation::Relator r;
    r.family = 3;
    r.tokens = {gog.oriented_edge_name(2 * k)};
    pres.relators.push_back(std::move(r));
  }

  // family (4): e phi_t(a) e^-1 phi_o(a)^-1 per edge-group generator, for
  // the configured orientation of each edge
  for (int k = 0; k < Y.num_unoriented_edges(); ++k) {
    int e = 2 * k;
    const GroupSpec& eg = gog.edge_group(e);
    const GroupSpec& tg = gog.vgroups[static_cast<size_t>(Y.t(e))];
    const GroupSpec& og = gog.vgroups[static_cast<size_t>(Y.o(e))];
    for (int i = 0; i < eg.generator_count(); ++i) {
      Presentation::Relator r;
      r.family = 4;
      r.tokens.push_back(gog.oriented_edge_name(e));
      if (tg.is_free()) {
        auto toks =
            word_tokens(tg.alphabet, gog.mono_to_t(e).word_images[static_cast<size_t>(i)], false);
        r.tokens.insert(r.tokens.end(), toks.begin(), toks.end());
      } else {
        int img = gog.mono_to_t(e).elt_images[static_cast<size_t>(i)];
        if (img != tg.table.identity)
          r.tokens.push_back(tg.table.element_names[static_cast<size_t>(img)]);
      }
      r.tokens.push_back(gog.oriented_edge_name(e) + "^-1");
      if (og.is_free()) {
        auto toks =
            word_tokens(og.alphabet, gog.mono_to_o(e).word_images[static_cast<size_t>(i)], true);
        r.tokens.insert(r.tokens.end(), toks.begin(), toks.end());
      } else {
        int img = gog.mono_to_o(e).elt_images[static_cast<size_t>(i)];
        int inv = og.table.inv(img);
        if (inv != og.table.identity)
          r.tokens.push_back(og.table.element_names[static_cast<size_t>(inv)]);
      }
      pres.relators.push_back(std::move(r));
    }
  }
  return pres;
}

// ---------------------------------------------------------------------------
// JSON config

namespace {

GroupSpec group_from_json(const nlohmann::json& j) {
  GroupSpec spec;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "free") {
    spec.kind = GroupSpec::Kind::Free;
    spec.alphabet.names = j.at("generators").get<std::vector<std::string>>();
  } else if (kind == "finite") {
    spec.kind = GroupSpec::Kind::Finite;
    spec.table.order = j.at("order").get<int>();
    spec.table.identity = j.value("identity", 0);
    auto rows = j.at("product").get<std::vector<std::vector<int>>>();
    for (const auto& row : rows)
      spec.table.product.insert(spec.table.product.end(), row.begin(), row.end());
    if (j.contains("inverse")) {
      spec.table.inverse = j.at("inverse").get<std::vector<int>>();
    } else {
      spec.table.derive_inverses();
    }
    if (j.contains("element_names")) {
      spec.table.element_names = j.at("element_names").get<std::vector<std::string>>();
    } else {
      for (int i = 0; i < spec.table.order; ++i)
        spec.table.element_names.push_back("x" + std::to_string(i));
    }
    if (j.contains("generators")) {
      spec.finite_gens = j.at("generators").get<std::vector<int>>();
    } else {
      for (int i = 0; i < spec.table.order; ++i)
        if (i != spec.table.identity) spec.finite_gens.push_back(i);
    }
  } else {
    throw Error("group kind must be 'free' or 'finite', got '" + kind + "'");
  }
  return spec;
}

nlohmann::ordered_json group_to_json(const GroupSpec& spec) {
  nlohmann::ordered_json j;
  if (spec.is_free()) {
    j["kind"] = "free";
    j["generators"] = spec.alphabet.names;
  } else {
    j["kind"] = "finite";
    j["order"] = spec.table.order;
    j["identity"] = spec.table.identity;
    std::vector<std::vector<int>> rows;
    for (int a = 0; a < spec.table.order; ++a) {
      std::vector<int> row;
      for (int b = 0; b < spec.table.order; ++b) row.push_back(spec.table.mul(a, b));
      rows.push_back(std::move(row));
    }
    j["product"] = rows;
    j["inverse"] = spec.table.inverse;
    j["element_names"] = spec.table.element_names;
    j["generators"] = spec.finite_gens;
  }
  return j;
}

MonoSide mono_from_json(const nlohmann::json& j, const GroupSpec& edge_group,
                        const GroupSpec& target, const std::string& where) {
  MonoSide side;
  int expected = edge_group.generator_count();
  if (!j.is_array() || static_cast<int>(j.size()) != expected)
    throw Error(where + ": expected " + std::to_string(expected) + " images");
  for (const auto& item : j) {
    if (target.is_free()) {
      side.word_images.push_back(target.alphabet.parse(item.get<std::string>()));
    } else {
      if (item.is_number_integer()) {
        side.elt_images.push_back(item.get<int>());
      } else {
        std::string name = item.get<std::string>();
        int idx = -1;
        for (int i = 0; i < target.table.order; ++i)
          if (target.table.element_names[static_cast<size_t>(i)] == name) idx = i;
        if (idx < 0) throw Error(where + ": unknown element '" + name + "'");
        side.elt_images.push_back(idx);
      }
    }
  }
  return side;
}

nlohmann::ordered_json mono_to_json(const MonoSide& side, const GroupSpec& target) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  if (target.is_free()) {
    for (const Word& w : side.word_images) arr.push_back(target.alphabet.format(w));
  } else {
    for (int e : side.elt_images)
      arr.push_back(target.table.element_names[static_cast<size_t>(e)]);
  }
  return arr;
}

}  // namespace

GogDocument document_from_json(const nlohmann::json& doc) {
  GogDocument out;
  GraphOfGroups& gog = out.gog;
  if (doc.contains("metadata")) {
    gog.name = doc["metadata"].value("name", "");
    out.description = doc["metadata"].value("description", "");
  }
  for (const auto& vj : doc.at("vertices")) {
    gog.vertex_names.push_back(vj.at("name").get<std::string>());
    gog.vgroups.push_back(group_from_json(vj.at("group")));
  }
  gog.graph.num_vertices = static_cast<int>(gog.vertex_names.size());
  for (const auto& ej : doc.at("edges")) {
    std::string name = ej.at("name").get<std::string>();
    int o = gog.vertex_by_name(ej.at("o").get<std::string>());
    int t = gog.vertex_by_name(ej.at("t").get<std::string>());
    if (o < 0 || t < 0) throw Error("edge '" + name + "': unknown endpoint vertex");
    gog.edge_names.push_back(name);
    gog.egroups.push_back(group_from_json(ej.at("group")));
    gog.graph.add_edge(o, t);
    const GroupSpec& eg = gog.egroups.back();
    MonoSide to_t = mono_from_json(ej.at("images_t"), eg, gog.vgroups[static_cast<size_t>(t)],
                                   "edge '" + name + "' images_t");
    MonoSide to_o = mono_from_json(ej.at("images_o"), eg, gog.vgroups[static_cast<size_t>(o)],
                                   "edge '" + name + "' images_o");
    gog.mono_t.push_back(std::move(to_t));
    gog.mono_t.push_back(std::move(to_o));
  }
  // base vertex: configured name or the lexicographically least vertex name
  if (doc.contains("base_vertex")) {
    gog.base_vertex = gog.vertex_by_name(doc.at("base_vertex").get<std::string>());
    if (gog.base_vertex < 0) throw Error("unknown base vertex");
  } else {
    int best = 0;
    for (int v = 1; v < gog.graph.num_vertices; ++v)
      if (gog.vertex_names[static_cast<size_t>(v)] < gog.vertex_names[static_cast<size_t>(best)])
        best = v;
    gog.base_vertex = best;
  }
  // spanning tree: configured edge names, or a BFS tree from the base
  gog.in_tree.assign(gog.edge_names.size(), 0);
  if (doc.contains("spanning_tree")) {
    for (const auto& nj : doc.at("spanning_tree")) {
      int k = gog.unoriented_edge_by_name(nj.get<std::string>());
      if (k < 0) throw Error("spanning_tree: unknown edge '" + nj.get<std::string>() + "'");
      gog.in_tree[static_cast<size_t>(k)] = 1;
    }
  } else {
    std::vector<char> seen(static_cast<size_t>(gog.graph.num_vertices), 0);
    seen[static_cast<size_t>(gog.base_vertex)] = 1;
    std::deque<int> q{gog.base_vertex};
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (int e = 0; e < gog.graph.num_oriented_edges(); ++e) {
        if (gog.graph.o(e) != v) continue;
        int w = gog.graph.t(e);
        if (!seen[static_cast<size_t>(w)]) {
          seen[static_cast<size_t>(w)] = 1;
          gog.in_tree[static_cast<size_t>(e / 2)] = 1;
          q.push_back(w);
        }
      }
    }
  }
  if (doc.contains("rays")) {
    for (const auto& rj : doc.at("rays")) {
      RaySpec r;
      r.name = rj.at("name").get<std::string>();
      r.anchor_vertex = rj.at("anchor_vertex").get<std::string>();
      r.anchor_coset = rj.value("anchor_coset", "");
      r.head = rj.value("head", "");
      r.period = rj.at("period").get<std::string>();
      out.rays.push_back(std::move(r));
    }
  }
  return out;
}

nlohmann::ordered_json document_to_json(const GogDocument& doc) {
  const GraphOfGroups& gog = doc.gog;
  nlohmann::ordered_json j;
  j["metadata"] = {{"name", gog.name}, {"description", doc.description}};
  nlohmann::ordered_json verts = nlohmann::ordered_json::array();
  for (size_t v = 0; v < gog.vertex_names.size(); ++v)
    verts.push_back({{"name", gog.vertex_names[v]}, {"group", group_to_json(gog.vgroups[v])}});
  j["vertices"] = verts;
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (int k = 0; k < gog.graph.num_unoriented_edges(); ++k) {
    int e = 2 * k;
    nlohmann::ordered_json ej;
    ej["name"] = gog.edge_names[static_cast<size_t>(k)];
    ej["o"] = gog.vertex_names[static_cast<size_t>(gog.graph.o(e))];
    ej["t"] = gog.vertex_names[static_cast<size_t>(gog.graph.t(e))];
    ej["group"] = group_to_json(gog.egroups[static_cast<size_t>(k)]);
    ej["images_t"] =
        mono_to_json(gog.mono_to_t(e), gog.vgroups[static_cast<size_t>(gog.graph.t(e))]);
    ej["images_o"] =
        mono_to_json(gog.mono_to_o(e), gog.vgroups[static_cast<size_t>(gog.graph.o(e))]);
    edges.push_back(std::move(ej));
  }
  j["edges"] = edges;
  j["base_vertex"] = gog.vertex_names[static_cast<size_t>(gog.base_vertex)];
  nlohmann::ordered_json tree = nlohmann::ordered_json::array();
  for (size_t k = 0; k < gog.edge_names.size(); ++k)
    if (gog.in_tree[k]) tree.push_back(gog.edge_names[k]);
  j["spanning_tree"] = tree;
  nlohmann::ordered_json rays = nlohmann::ordered_json::array();
  for (const auto& r : doc.rays)
    rays.push_back({{"name", r.name},
                    {"anchor_vertex", r.anchor_vertex},
                    {"anchor_coset", r.anchor_coset},
                    {"head", r.head},
                    {"period", r.period}});
  j["rays"] = rays;
  return j;
}

GogDocument load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return document_from_json(j);
}

void save_document(const GogDocument& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write config file: " + path);
  out << document_to_json(doc).dump(2) << "\n";
}

}  // namespace ggt
