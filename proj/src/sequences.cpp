#include "ggt/sequences.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace ggt {

GogContext::GogContext(GraphOfGroups gog) : gog_(std::move(gog)) {
  report_ = validate(gog_);
  if (!report_.ok) throw Error("invalid graph of groups:\n" + report_.summary());
  build_images();
  build_tree_paths();
}

void GogContext::build_images() {
  const auto& Y = gog_.graph;
  images_.resize(static_cast<size_t>(Y.num_oriented_edges()));
  for (int e = 0; e < Y.num_oriented_edges(); ++e) {
    EdgeImage& img = images_[static_cast<size_t>(e)];
    const GroupSpec& tg = gog_.vgroups[static_cast<size_t>(Y.t(e))];
    const GroupSpec& eg = gog_.edge_group(e);
    const MonoSide& mono = gog_.mono_to_t(e);
    img.target_free = tg.is_free();
    if (tg.is_free()) {
      img.image = fold(mono.word_images, tg.alphabet.rank());
      img.hist = fold_words_with_history(mono.word_images, tg.alphabet.rank());
    } else if (eg.is_free()) {
      // a free edge group maps injectively into a finite group only when
      // trivial (validation enforces rank 0): image is the identity
      img.fin_image.elements = {tg.table.identity};
      img.fin_preimage.assign(static_cast<size_t>(tg.table.order), -1);
      img.fin_preimage[static_cast<size_t>(tg.table.identity)] = 0;
    } else {
      // derive the full element map (validation guarantees a homomorphism)
      const FiniteGroupTable& src = eg.table;
      img.fin_elt_map.assign(static_cast<size_t>(src.order), -1);
      img.fin_elt_map[static_cast<size_t>(src.identity)] = tg.table.identity;
      std::deque<int> q{src.identity};
      while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        for (size_t i = 0; i < eg.finite_gens.size(); ++i) {
          int s = eg.finite_gens[i];
          int imgel = mono.elt_images[i];
          for (auto [nx, nimg] :
               {std::pair{src.mul(x, s),
                          tg.table.mul(img.fin_elt_map[static_cast<size_t>(x)], imgel)},
                std::pair{src.mul(x, src.inv(s)),
                          tg.table.mul(img.fin_elt_map[static_cast<size_t>(x)],
                                       tg.table.inv(imgel))}}) {
            if (img.fin_elt_map[static_cast<size_t>(nx)] < 0) {
              img.fin_elt_map[static_cast<size_t>(nx)] = nimg;
              q.push_back(nx);
            }
          }
        }
      }
      img.fin_preimage.assign(static_cast<size_t>(tg.table.order), -1);
      std::vector<int> elts;
      for (int a = 0; a < src.order; ++a) {
        int b = img.fin_elt_map[static_cast<size_t>(a)];
        img.fin_preimage[static_cast<size_t>(b)] = a;
        elts.push_back(b);
      }
      std::sort(elts.begin(), elts.end());
      img.fin_image.elements = std::move(elts);
    }
  }
}

void GogContext::build_tree_paths() {
  const auto& Y = gog_.graph;
  tree_paths_.assign(static_cast<size_t>(Y.num_vertices), Sequence{});
  std::vector<char> seen(static_cast<size_t>(Y.num_vertices), 0);
  int b = gog_.base_vertex;
  tree_paths_[static_cast<size_t>(b)] = seq_identity(b);
  seen[static_cast<size_t>(b)] = 1;
  std::deque<int> q{b};
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int e = 0; e < Y.num_oriented_edges(); ++e) {
      if (Y.o(e) != v || !gog_.edge_in_tree(e)) continue;
      int w = Y.t(e);
      if (seen[static_cast<size_t>(w)]) continue;
      seen[static_cast<size_t>(w)] = 1;
      Sequence path = tree_paths_[static_cast<size_t>(v)];
      path.tail.push_back({e, identity_elt(w)});
      tree_paths_[static_cast<size_t>(w)] = std::move(path);
      q.push_back(w);
    }
  }
}

// ---------------------------------------------------------------------------
// vertex group arithmetic

VertexElt GogContext::identity_elt(int v) const {
  const GroupSpec& spec = vgroup(v);
  return spec.is_free() ? VertexElt::free_elt(Word())
                        : VertexElt::finite_elt(spec.table.identity);
}

VertexElt GogContext::mul(int v, const VertexElt& a, const VertexElt& b) const {
  const GroupSpec& spec = vgroup(v);
  if (spec.is_free()) return VertexElt::free_elt(a.w * b.w);
  return VertexElt::finite_elt(spec.table.mul(a.fin, b.fin));
}

VertexElt GogContext::inv(int v, const VertexElt& a) const {
  const GroupSpec& spec = vgroup(v);
  if (spec.is_free()) return VertexElt::free_elt(a.w.inverse());
  return VertexElt::finite_elt(spec.table.inv(a.fin));
}

bool GogContext::is_identity(int v, const VertexElt& a) const {
  const GroupSpec& spec = vgroup(v);
  return spec.is_free() ? a.w.empty() : a.fin == spec.table.identity;
}

int GogContext::elt_length(int v, const VertexElt& a) const {
  const GroupSpec& spec = vgroup(v);
  if (spec.is_free()) return a.w.size();
  return a.fin == spec.table.identity ? 0 : 1;
}

std::string GogContext::format_elt(int v, const VertexElt& a) const {
  const GroupSpec& spec = vgroup(v);
  if (spec.is_free()) return a.w.empty() ? "1" : spec.alphabet.format(a.w);
  return spec.table.element_names[static_cast<size_t>(a.fin)];
}

VertexElt GogContext::parse_elt(int v, const std::string& text) const {
  const GroupSpec& spec = vgroup(v);
  if (spec.is_free()) return VertexElt::free_elt(spec.alphabet.parse(text));
  if (text.empty() || text == "1") return identity_elt(v);
  for (int i = 0; i < spec.table.order; ++i)
    if (spec.table.element_names[static_cast<size_t>(i)] == text)
      return VertexElt::finite_elt(i);
  throw Error("unknown element '" + text + "' of vertex group " +
              gog_.vertex_names[static_cast<size_t>(v)]);
}

// ---------------------------------------------------------------------------
// edge image machinery

bool GogContext::in_image_t(int e, const VertexElt& g) const {
  const EdgeImage& img = image_at_t(e);
  if (img.target_free) return img.image.core.accepts(g.w);
  return img.fin_preimage[static_cast<size_t>(g.fin)] >= 0;
}

VertexElt GogContext::apply_mono_t(int e, const VertexElt& a) const {
  const GroupSpec& eg = gog_.edge_group(e);
  const GroupSpec& tg = gog_.vgroups[static_cast<size_t>(gog_.graph.t(e))];
  const MonoSide& mono = gog_.mono_to_t(e);
  if (eg.is_free()) {
    if (tg.is_free()) {
      Word out;
      for (Letter l : a.w.letters()) {
        const Word& img = mono.word_images[static_cast<size_t>(gen_of(l))];
        out = out * (is_positive(l) ? img : img.inverse());
      }
      return VertexElt::free_elt(out);
    }
    int out = tg.table.identity;
    for (Letter l : a.w.letters()) {
      int img = mono.elt_images[static_cast<size_t>(gen_of(l))];
      out = tg.table.mul(out, is_positive(l) ? img : tg.table.inv(img));
    }
    return VertexElt::finite_elt(out);
  }
  if (tg.is_free()) return VertexElt::free_elt(Word());  // trivial finite edge group
  return VertexElt::finite_elt(image_at_t(e).fin_elt_map[static_cast<size_t>(a.fin)]);
}

VertexElt GogContext::transport_t_to_o(int e, const VertexElt& g) const {
  const EdgeImage& timg = image_at_t(e);
  int ebar = OrientedGraph::bar(e);
  const GroupSpec& eg = gog_.edge_group(e);
  if (timg.target_free) {
    auto expr = timg.hist.express(g.w);
    if (!expr) throw Error("transport: element is not in the t-side edge image");
    if (eg.is_free()) {
      std::vector<Letter> letters;
      for (auto [i, fwd] : *expr) letters.push_back(make_letter(i, fwd));
      return apply_mono_t(ebar, VertexElt::free_elt(Word(letters)));
    }
    // finite edge group into a free target only when trivial
    return apply_mono_t(ebar, VertexElt::finite_elt(eg.table.identity));
  }
  int a = timg.fin_preimage[static_cast<size_t>(g.fin)];
  if (a < 0) throw Error("transport: element is not in the t-side edge image");
  if (eg.is_free()) return apply_mono_t(ebar, VertexElt::free_elt(Word()));
  return apply_mono_t(ebar, VertexElt::finite_elt(a));
}

std::pair<VertexElt, VertexElt> GogContext::split_by_origin_image(int e, const VertexElt& g) const {
  // Im phi_{e,o(e)} is the t-side image of the bar orientation
  return split_by_image_t(OrientedGraph::bar(e), g);
}

std::pair<VertexElt, VertexElt> GogContext::split_by_image_t(int e, const VertexElt& g) const {
  const EdgeImage& img = image_at_t(e);
  int v = gog_.graph.t(e);
  if (img.target_free) {
    auto [rep, rem] = left_coset_split(g.w, img.image.core);
    return {VertexElt::free_elt(rep), VertexElt::free_elt(rem)};
  }
  const GroupSpec& spec = vgroup(v);
  int rep = img.fin_image.left_coset_rep(spec.table, g.fin);
  int rem = spec.table.mul(spec.table.inv(rep), g.fin);
  return {VertexElt::finite_elt(rep), VertexElt::finite_elt(rem)};
}

VertexElt GogContext::mono_t_preimage(int e, const VertexElt& g) const {
  const EdgeImage& img = image_at_t(e);
  const GroupSpec& eg = gog_.edge_group(e);
  if (img.target_free) {
    auto expr = img.hist.express(g.w);
    if (!expr) throw Error("mono_t_preimage: element is not in the image");
    if (eg.is_free()) {
      std::vector<Letter> letters;
      for (auto [i, fwd] : *expr) letters.push_back(make_letter(i, fwd));
      return VertexElt::free_elt(Word(letters));
    }
    return VertexElt::finite_elt(eg.table.identity);
  }
  int a = img.fin_preimage[static_cast<size_t>(g.fin)];
  if (a < 0) throw Error("mono_t_preimage: element is not in the image");
  if (eg.is_free()) return VertexElt::free_elt(Word());
  return VertexElt::finite_elt(a);
}

VertexElt GogContext::identity_edge_elt(int e) const {
  const GroupSpec& eg = gog_.edge_group(e);
  return eg.is_free() ? VertexElt::free_elt(Word()) : VertexElt::finite_elt(eg.table.identity);
}

// ---------------------------------------------------------------------------
// sequences

int GogContext::end_vertex(const Sequence& s) const {
  return s.tail.empty() ? s.start : gog_.graph.t(s.tail.back().edge);
}

void GogContext::check_path_consistent(const Sequence& s) const {
  int v = s.start;
  for (const Syllable& syl : s.tail) {
    if (gog_.graph.o(syl.edge) != v)
      throw Error("sequence is not path-consistent: edge " +
                  gog_.oriented_edge_name(syl.edge) + " does not start at vertex " +
                  gog_.vertex_names[static_cast<size_t>(v)]);
    v = gog_.graph.t(syl.edge);
  }
}

Sequence GogContext::seq_identity(int v) const { return Sequence{v, identity_elt(v), {}}; }

Sequence GogContext::seq_vertex(int v, VertexElt g) const { return Sequence{v, std::move(g), {}}; }

Sequence GogContext::seq_edge(int e) const {
  Sequence s{gog_.graph.o(e), identity_elt(gog_.graph.o(e)), {}};
  s.tail.push_back({e, identity_elt(gog_.graph.t(e))});
  return s;
}

Sequence GogContext::multiply(const Sequence& a, const Sequence& b) const {
  if (end_vertex(a) != b.start)
    throw Error("sequence product: endpoint mismatch (" +
                gog_.vertex_names[static_cast<size_t>(end_vertex(a))] + " vs " +
                gog_.vertex_names[static_cast<size_t>(b.start)] + ")");
  Sequence c = a;
  if (c.tail.empty()) {
    c.head = mul(c.start, c.head, b.head);
  } else {
    int v = end_vertex(c);
    c.tail.back().g = mul(v, c.tail.back().g, b.head);
  }
  c.tail.insert(c.tail.end(), b.tail.begin(), b.tail.end());
  return britton_reduce(std::move(c));
}

Sequence GogContext::inverse(const Sequence& a) const {
  Sequence r;
  r.start = end_vertex(a);
  if (a.tail.empty()) {
    r.head = inv(a.start, a.head);
    return r;
  }
  r.head = inv(r.start, a.tail.back().g);
  for (size_t i = a.tail.size(); i > 0; --i) {
    int e = OrientedGraph::bar(a.tail[i - 1].edge);
    const VertexElt& g = (i >= 2) ? a.tail[i - 2].g : a.head;
    r.tail.push_back({e, inv(gog_.graph.t(e), g)});
  }
  return r;
}

Sequence GogContext::britton_reduce(Sequence s) const {
  check_path_consistent(s);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i + 1 < s.tail.size(); ++i) {
      int e = s.tail[i].edge;
      if (s.tail[i + 1].edge != OrientedGraph::bar(e)) continue;
      const VertexElt& g = s.tail[i].g;
      if (!in_image_t(e, g)) continue;
      // e phi_t(a) ebar -> phi_o(a)
      VertexElt crossed = transport_t_to_o(e, g);
      VertexElt merged = mul(gog_.graph.o(e), crossed, s.tail[i + 1].g);
      if (i == 0) {
        s.head = mul(s.start, s.head, merged);
      } else {
        s.tail[i - 1].g = mul(gog_.graph.o(e), s.tail[i - 1].g, merged);
      }
      s.tail.erase(s.tail.begin() + static_cast<long>(i),
                   s.tail.begin() + static_cast<long>(i) + 2);
      changed = true;
      break;
    }
  }
  return s;
}

Sequence GogContext::canonicalize(Sequence s) const {
  s = britton_reduce(std::move(s));
  // left-to-right transversal splitting: each vertex element before an edge
  // becomes a canonical coset representative of the origin-side image, the
  // remainder crosses the edge
  for (size_t i = 0; i < s.tail.size(); ++i) {
    int e = s.tail[i].edge;
    VertexElt& slot = (i == 0) ? s.head : s.tail[i - 1].g;
    auto [rep, rem] = split_by_origin_image(e, slot);
    slot = rep;
    // rem lies in Im phi_{e,o(e)} = Im phi_{ebar,t(ebar)}; push it across
    VertexElt carried = transport_t_to_o(OrientedGraph::bar(e), rem);
    s.tail[i].g = mul(gog_.graph.t(e), carried, s.tail[i].g);
  }
  return s;
}

Sequence GogContext::tree_path(int from, int to) const {
  // both stored paths go base -> v; compose with backtrack cancellation
  Sequence down = inverse(tree_paths_[static_cast<size_t>(from)]);
  return multiply(down, tree_paths_[static_cast<size_t>(to)]);
}

Sequence GogContext::canonical_loop(const Sequence& s) const {
  check_path_consistent(s);
  Sequence closed = multiply(tree_paths_[static_cast<size_t>(s.start)], s);
  closed = multiply(closed, inverse(tree_paths_[static_cast<size_t>(end_vertex(s))]));
  return canonicalize(std::move(closed));
}

bool GogContext::element_eq(const Sequence& a, const Sequence& b) const {
  return canonical_loop(a) == canonical_loop(b);
}

bool GogContext::is_identity_element(const Sequence& s) const {
  Sequence c = canonical_loop(s);
  return c.tail.empty() && is_identity(c.start, c.head);
}

Sequence GogContext::coset_rep(const Sequence& g, int v) const {
  Sequence path = multiply(canonical_loop(g), tree_paths_[static_cast<size_t>(v)]);
  path = canonicalize(std::move(path));
  if (path.tail.empty()) {
    path.head = identity_elt(v);
  } else {
    path.tail.back().g = identity_elt(v);
  }
  return path;
}

int GogContext::seq_word_length(const Sequence& s) const {
  int len = elt_length(s.start, s.head);
  int v = s.start;
  for (const Syllable& syl : s.tail) {
    v = gog_.graph.t(syl.edge);
    len += 1 + elt_length(v, syl.g);
  }
  return len;
}

std::string GogContext::format(const Sequence& s) const {
  std::ostringstream out;
  out << "@" << gog_.vertex_names[static_cast<size_t>(s.start)] << " ";
  out << format_elt(s.start, s.head);
  int v = s.start;
  for (const Syllable& syl : s.tail) {
    v = gog_.graph.t(syl.edge);
    out << " . " << gog_.oriented_edge_name(syl.edge) << " . " << format_elt(v, syl.g);
  }
  return out.str();
}

std::string GogContext::key(const Sequence& s) const {
  std::ostringstream out;
  out << s.start << '|';
  auto emit = [&](int v, const VertexElt& g) {
    if (g.is_finite()) {
      out << 'f' << g.fin;
    } else {
      for (Letter l : g.w.letters()) out << l << ',';
    }
    out << '|';
  };
  emit(s.start, s.head);
  for (const Syllable& syl : s.tail) {
    out << 'e' << syl.edge << '|';
    emit(gog_.graph.t(syl.edge), syl.g);
  }
  return out.str();
}

}  // namespace ggt
