#pragma once

#include <algorithm>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "canonical.hpp"
#include "decoration.hpp"
#include "enumerate.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "rational.hpp"
#include "strata.hpp"

namespace twisted_strata {

/// Default label of the forgotten marking.
inline const std::string kBullet = "•";

// ---------------------------------------------------------------------------
// A-structures

/// An A-structure Gamma -> A: a surjection on vertices and an injection of
/// A's half-edges into Gamma's.
struct AStructure {
  std::vector<int> vertex_map;     // V(Gamma) -> V(A)
  std::vector<int> half_edge_map;  // H(A) -> H(Gamma)
  friend bool operator==(const AStructure&, const AStructure&) = default;
};

inline AStructure identity_structure(const TwistedGraph& g) {
  AStructure f;
  for (int v = 0; v < g.num_vertices(); ++v) f.vertex_map.push_back(v);
  for (int h = 0; h < g.num_half_edges(); ++h) f.half_edge_map.push_back(h);
  return f;
}

/// Checks every defining condition of an A-structure; nullopt when valid.
inline std::optional<std::string> structure_problem(const TwistedGraph& source, const TwistedGraph& target,
                                                    const AStructure& f) {
  if (static_cast<int>(f.vertex_map.size()) != source.num_vertices()) return "vertex map has the wrong size";
  if (static_cast<int>(f.half_edge_map.size()) != target.num_half_edges()) return "half-edge map has the wrong size";
  std::vector<int> image_of(source.num_half_edges(), -1);
  for (int h = 0; h < target.num_half_edges(); ++h) {
    int s = f.half_edge_map[h];
    if (s < 0 || s >= source.num_half_edges()) return "half-edge map leaves the source graph";
    if (image_of[s] != -1) return "half-edge map is not injective";
    image_of[s] = h;
  }
  std::vector<bool> hit(target.num_vertices(), false);
  for (int w : f.vertex_map) {
    if (w < 0 || w >= target.num_vertices()) return "vertex map leaves the target graph";
    hit[w] = true;
  }
  if (std::find(hit.begin(), hit.end(), false) != hit.end()) return "vertex map is not surjective";
  for (int h = 0; h < target.num_half_edges(); ++h) {
    int s = f.half_edge_map[h];
    if (f.vertex_map[source.half_edges[s].vertex] != target.half_edges[h].vertex) return "incidence not respected";
    if (source.half_edges[s].twist != target.half_edges[h].twist) return "twists not respected";
    if (target.is_leg(h)) {
      if (!source.is_leg(s) || source.leg_label(s) != target.leg_label(h)) return "legs not respected";
    } else if (source.involution[s] != f.half_edge_map[target.involution[h]]) {
      return "edge pairing not respected";
    }
  }
  // Every other half-edge of the source lies on an edge inside one Gamma_v.
  std::vector<int> internal_edges(target.num_vertices(), 0);
  std::vector<int> parent(source.num_vertices());
  for (int v = 0; v < source.num_vertices(); ++v) parent[v] = v;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int s = 0; s < source.num_half_edges(); ++s) {
    if (image_of[s] != -1) continue;
    if (source.is_leg(s)) return "leg of the source not hit by the structure";
    int t = source.involution[s];
    if (image_of[t] != -1) return "edge half hit on one side only";
    int a = source.half_edges[s].vertex, b = source.half_edges[t].vertex;
    if (f.vertex_map[a] != f.vertex_map[b]) return "contracted edge joins different target vertices";
    if (s < t) {
      ++internal_edges[f.vertex_map[a]];
      int ra = find(a), rb = find(b);
      if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
  }
  for (int v = 0; v < target.num_vertices(); ++v) {
    int root = -1, genus = 0, count = 0;
    std::optional<AValue> value;
    for (int w = 0; w < source.num_vertices(); ++w) {
      if (f.vertex_map[w] != v) continue;
      if (root == -1) root = find(w);
      if (find(w) != root) return "preimage of target vertex " + std::to_string(v) + " is disconnected";
      genus += source.vertices[w].genus;
      ++count;
      value = value ? *value + source.vertices[w].value : source.vertices[w].value;
    }
    if (genus + internal_edges[v] - count + 1 != target.vertices[v].genus)
      return "genus of the preimage of target vertex " + std::to_string(v) + " is wrong";
    if (*value != target.vertices[v].value)
      return "value of the preimage of target vertex " + std::to_string(v) + " is wrong";
  }
  return std::nullopt;
}

namespace detail {

inline Rational factorial(int n) {
  Rational out(1);
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

/// (sum_{w in targets} kappa_{w,j})^exponent, multinomially expanded.
inline DecorationSum kappa_power_sum(const std::vector<int>& targets, int j, int exponent) {
  DecorationSum out;
  std::vector<int> parts(targets.size(), 0);
  auto recurse = [&](auto&& self, std::size_t i, int left) -> void {
    if (i + 1 == targets.size()) {
      parts[i] = left;
      Decoration d;
      Rational c = factorial(exponent);
      for (std::size_t k = 0; k < targets.size(); ++k) {
        d.multiply_kappa(targets[k], j, parts[k]);
        c /= factorial(parts[k]);
      }
      accumulate(out, d, c);
      return;
    }
    for (int x = 0; x <= left; ++x) {
      parts[i] = x;
      self(self, i + 1, left - x);
    }
  };
  recurse(recurse, 0, exponent);
  return out;
}

}  // namespace detail

/// Pullback of a decoration on A along the gluing map of Gamma -> A:
/// psi at a half-edge of A moves to its image, kappa_{v,l} becomes the sum of
/// kappa_{w,l} over the vertices w of Gamma_v.
inline DecorationSum pullback_gluing(const TwistedGraph& source, const TwistedGraph& target, const AStructure& f,
                                     const Decoration& alpha) {
  (void)target;
  Decoration moved;
  for (const auto& [h, e] : alpha.psi) moved.multiply_psi(f.half_edge_map[h], e);
  DecorationSum out{{moved, Rational(1)}};
  auto preimage = [&](int v) {
    std::vector<int> ws;
    for (int w = 0; w < source.num_vertices(); ++w)
      if (f.vertex_map[w] == v) ws.push_back(w);
    return ws;
  };
  for (const auto& [vj, e] : alpha.kappa) out = out * detail::kappa_power_sum(preimage(vj.first), vj.second, e);
  for (const auto& [v, e] : alpha.kappa0) out = out * detail::kappa_power_sum(preimage(v), 0, e);
  return out;
}

// ---------------------------------------------------------------------------
// Generic (A,B)-structures

/// A graph Gamma with an A-structure and a B-structure whose half-edge images
/// together cover H(Gamma). Edges in both images are the common edges.
struct GenericPair {
  TwistedGraph graph;
  AStructure to_a;
  AStructure to_b;
  std::vector<std::pair<int, int>> common_edges;
  std::string key;  // canonical key of the triple
};

namespace detail {

inline std::vector<std::string> triple_labels(const TwistedGraph& g, const AStructure& fa, const AStructure& fb) {
  std::vector<std::string> labels(g.num_half_edges());
  for (std::size_t h = 0; h < fa.half_edge_map.size(); ++h) labels[fa.half_edge_map[h]] += "a" + std::to_string(h);
  for (std::size_t h = 0; h < fb.half_edge_map.size(); ++h) labels[fb.half_edge_map[h]] += "b" + std::to_string(h);
  return labels;
}

inline AStructure relabel_structure(const AStructure& f, const CanonicalForm& form) {
  auto hinv = inverse_permutation(form.half_edge_order);
  AStructure out;
  for (int old : form.vertex_order) out.vertex_map.push_back(f.vertex_map[old]);
  for (int h : f.half_edge_map) out.half_edge_map.push_back(hinv[h]);
  return out;
}

inline std::vector<int> distinct_edge_twists(const TwistedGraph& g) {
  std::set<int> t;
  for (auto [h1, h2] : g.edges()) t.insert(g.half_edges[h1].twist);
  return {t.begin(), t.end()};
}

inline std::multiset<int> edge_twist_multiset(const TwistedGraph& g, const std::vector<std::pair<int, int>>& edges) {
  std::multiset<int> out;
  for (auto [h1, h2] : edges) out.insert(g.half_edges[h1].twist);
  return out;
}

}  // namespace detail

/// All generic (A,B)-structures up to isomorphism of triples (an isomorphism
/// of Gamma commuting with both structure maps), sorted by canonical key.
///
/// Gamma is built by replacing each vertex v of A with a graph Gamma_v whose
/// internal edges are the B-only edges; the A-edges not shared with B are then
/// contracted and the quotient matched against B.
inline std::vector<GenericPair> generic_pairs(const TwistedGraph& a, const TwistedGraph& b) {
  const int ea = a.num_edges(), eb = b.num_edges();
  const auto b_twists = detail::edge_twist_multiset(b, b.edges());
  const auto twist_set = detail::distinct_edge_twists(b);

  // degenerations[v][k]: graphs on the vertex space of v with k edges.
  std::vector<std::vector<std::vector<TwistedGraph>>> degenerations(a.num_vertices(),
                                                                    std::vector<std::vector<TwistedGraph>>(eb + 1));
  for (int v = 0; v < a.num_vertices(); ++v)
    for (auto& [key, g] : detail::graphs_by_key(vertex_ambient(a, v), 0, eb, twist_set))
      degenerations[v][g.num_edges()].push_back(std::move(g));

  std::map<std::string, GenericPair> found;
  std::vector<TwistedGraph> pieces(a.num_vertices());
  const auto a_edges = a.edges();

  auto finish = [&](int extra_edges) {
    int common = eb - extra_edges;
    if (common < 0 || common > ea) return;
    Substitution sub = substitute(a, pieces);
    const TwistedGraph& gamma = sub.graph;
    AStructure fa{sub.vertex_origin, sub.skeleton_half_edge_map};

    std::vector<std::pair<int, int>> gamma_a_edges, new_edges;
    std::vector<bool> from_a(gamma.num_half_edges(), false);
    for (auto [h1, h2] : a_edges) {
      gamma_a_edges.emplace_back(fa.half_edge_map[h1], fa.half_edge_map[h2]);
      from_a[fa.half_edge_map[h1]] = from_a[fa.half_edge_map[h2]] = true;
    }
    for (auto [h1, h2] : gamma.edges())
      if (!from_a[h1]) new_edges.emplace_back(h1, h2);
    auto new_twists = detail::edge_twist_multiset(gamma, new_edges);
    if (!std::includes(b_twists.begin(), b_twists.end(), new_twists.begin(), new_twists.end())) return;

    // Choose which A-edges are shared with B; the rest get contracted.
    std::vector<int> choose(ea, 0);
    std::fill(choose.end() - common, choose.end(), 1);
    do {
      std::vector<bool> contract(gamma.num_half_edges(), false);
      std::vector<std::pair<int, int>> shared;
      for (int e = 0; e < ea; ++e) {
        if (choose[e]) {
          shared.push_back(gamma_a_edges[e]);
        } else {
          contract[gamma_a_edges[e].first] = contract[gamma_a_edges[e].second] = true;
        }
      }
      Contraction q = contract_edges(gamma, contract);
      if (q.graph.num_vertices() != b.num_vertices() || q.graph.num_half_edges() != b.num_half_edges()) continue;
      for (const GraphIso& iso : isomorphisms(q.graph, b)) {
        AStructure fb;
        for (int w = 0; w < gamma.num_vertices(); ++w) fb.vertex_map.push_back(iso.vertex_map[q.vertex_map[w]]);
        fb.half_edge_map.assign(b.num_half_edges(), -1);
        for (int qh = 0; qh < q.graph.num_half_edges(); ++qh) fb.half_edge_map[iso.half_edge_map[qh]] = q.half_edge_map[qh];
        auto labels = detail::triple_labels(gamma, fa, fb);
        auto form = canonical_form(gamma, {}, labels);
        if (found.contains(form.key)) continue;
        GenericPair pair;
        pair.graph = relabel(gamma, form);
        pair.to_a = detail::relabel_structure(fa, form);
        pair.to_b = detail::relabel_structure(fb, form);
        auto hinv = inverse_permutation(form.half_edge_order);
        for (auto [h1, h2] : shared) pair.common_edges.emplace_back(std::min(hinv[h1], hinv[h2]), std::max(hinv[h1], hinv[h2]));
        std::sort(pair.common_edges.begin(), pair.common_edges.end());
        pair.key = form.key;
        found.emplace(form.key, std::move(pair));
      }
    } while (std::next_permutation(choose.begin(), choose.end()));
  };

  auto recurse = [&](auto&& self, int v, int used) -> void {
    if (v == a.num_vertices()) {
      finish(used);
      return;
    }
    for (int k = 0; k + used <= eb; ++k)
      for (const auto& piece : degenerations[v][k]) {
        pieces[v] = piece;
        self(self, v + 1, used + k);
      }
  };
  recurse(recurse, 0, 0);

  std::vector<GenericPair> out;
  for (auto& [key, pair] : found) out.push_back(std::move(pair));
  return out;
}

/// Groups generic pairs by degeneration type: Gamma with each edge tagged as
/// A-only, B-only or common, forgetting the identification with A and B.
inline std::size_t count_degeneration_types(std::span<const GenericPair> pairs) {
  std::set<std::string> types;
  for (const auto& p : pairs) {
    std::vector<std::string> tags(p.graph.num_half_edges());
    for (int h : p.to_a.half_edge_map)
      if (!p.graph.is_leg(h)) tags[h] += "A";
    for (int h : p.to_b.half_edge_map)
      if (!p.graph.is_leg(h)) tags[h] += "B";
    types.insert(canonical_form(p.graph, {}, tags).key);
  }
  return types.size();
}

/// Top Chern class of the excess bundle: the product over common edges
/// (h, h') of (-psi_h - psi_h') / m(h).
inline DecorationSum excess(const GenericPair& p) {
  DecorationSum out = unit_sum();
  for (auto [h1, h2] : p.common_edges) {
    Rational c(-1, p.graph.half_edges[h1].twist);
    DecorationSum factor;
    Decoration d1, d2;
    d1.multiply_psi(h1, 1);
    d2.multiply_psi(h2, 1);
    accumulate(factor, d1, c);
    accumulate(factor, d2, c);
    out = out * factor;
  }
  return out;
}

namespace detail {

inline std::string graph_fingerprint(const TwistedGraph& g) {
  std::string s;
  for (const auto& v : g.vertices) s += std::to_string(v.genus) + ":" + v.value.to_string() + ";";
  s += "|";
  for (int h = 0; h < g.num_half_edges(); ++h)
    s += std::to_string(g.half_edges[h].vertex) + "," + std::to_string(g.half_edges[h].twist) + "," +
         std::to_string(g.involution[h]) + ";";
  s += "|";
  for (const auto& [label, h] : g.legs) s += label + "=" + std::to_string(h) + ";";
  return s;
}

/// Generic pairs memoized on the exact (canonical) graphs.
class PairCache {
 public:
  const std::vector<GenericPair>& get(const TwistedGraph& a, const TwistedGraph& b) {
    auto key = std::make_pair(graph_fingerprint(a), graph_fingerprint(b));
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, generic_pairs(a, b)).first;
    return it->second;
  }

 private:
  std::map<std::pair<std::string, std::string>, std::vector<GenericPair>> cache_;
};

inline void multiply_terms(const Term& x, const Term& y, PairCache& cache, TautClass& out) {
  const auto& sa = x.stratum;
  const auto& sb = y.stratum;
  for (const auto& pair : cache.get(sa.graph(), sb.graph())) {
    DecorationSum poly = pullback_gluing(pair.graph, sa.graph(), pair.to_a, sa.decoration()) *
                         pullback_gluing(pair.graph, sb.graph(), pair.to_b, sb.decoration()) * excess(pair);
    for (const auto& [d, c] : poly) out.add(DecoratedStratum::make(pair.graph, d), x.coeff * y.coeff * c);
  }
}

}  // namespace detail

/// Intersection product: bilinear over terms, summing over generic pairs of
/// pullback(alpha) * pullback(beta) * excess. With jobs > 1 the term pairs
/// are split across threads and folded back in a fixed order.
inline TautClass product(const TautClass& x, const TautClass& y, int jobs = 1) {
  x.require_same_ambient(y);
  std::vector<std::pair<const Term*, const Term*>> work;
  for (const auto& [kx, tx] : x.terms())
    for (const auto& [ky, ty] : y.terms()) work.emplace_back(&tx, &ty);
  TautClass out(x.ambient());
  if (jobs <= 1 || work.size() < 2) {
    detail::PairCache cache;
    for (auto [tx, ty] : work) detail::multiply_terms(*tx, *ty, cache, out);
    return out;
  }
  std::size_t chunks = std::min<std::size_t>(static_cast<std::size_t>(jobs), work.size());
  std::vector<std::future<TautClass>> parts;
  for (std::size_t c = 0; c < chunks; ++c) {
    parts.push_back(std::async(std::launch::async, [&, c] {
      detail::PairCache cache;
      TautClass partial(x.ambient());
      for (std::size_t i = c; i < work.size(); i += chunks) detail::multiply_terms(*work[i].first, *work[i].second, cache, partial);
      return partial;
    }));
  }
  for (auto& p : parts) out += p.get();
  return out;
}

// ---------------------------------------------------------------------------
// Gluing pushforward

/// The trivial-graph stratum on vertex_ambient(g, v) carrying the factor of
/// `alpha` at v.
inline DecoratedStratum vertex_piece(const TwistedGraph& g, const Decoration& alpha, int v) {
  TwistedGraph t = trivial_graph(vertex_ambient(g, v));
  Decoration d;
  for (int h : g.half_edges_at(v)) {
    auto it = alpha.psi.find(h);
    if (it != alpha.psi.end()) d.multiply_psi(t.legs.at(vertex_leg_label(g, h)), it->second);
  }
  for (const auto& [vj, e] : alpha.kappa)
    if (vj.first == v) d.multiply_kappa(0, vj.second, e);
  for (const auto& [w, e] : alpha.kappa0)
    if (w == v) d.multiply_kappa(0, 0, e);
  return DecoratedStratum::make(t, d);
}

/// Substitutes each piece's graph for its skeleton vertex and multiplies the
/// decorations together. No twist factor is applied.
inline DecoratedStratum glue_strata(const TwistedGraph& skeleton, std::span<const DecoratedStratum> pieces) {
  std::vector<TwistedGraph> graphs;
  for (const auto& p : pieces) graphs.push_back(p.graph());
  Substitution sub = substitute(skeleton, graphs);
  Decoration d;
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    const Decoration& pd = pieces[p].decoration();
    for (const auto& [h, e] : pd.psi) d.multiply_psi(sub.piece_half_edge_map[p][h], e);
    for (const auto& [vj, e] : pd.kappa) d.multiply_kappa(sub.piece_vertex_map[p][vj.first], vj.second, e);
    for (const auto& [v, e] : pd.kappa0) d.multiply_kappa(sub.piece_vertex_map[p][v], 0, e);
  }
  return DecoratedStratum::make(sub.graph, d);
}

/// Pushforward along the gluing map of `skeleton`: pieces[v] lives on
/// vertex_ambient(skeleton, v); the result carries 1 / prod_{edges} m.
inline TautClass pushforward_gluing(const TwistedGraph& skeleton, const AmbientSpace& ambient,
                                    std::span<const TautClass> pieces) {
  require_valid(skeleton, ambient);
  if (static_cast<int>(pieces.size()) != skeleton.num_vertices())
    throw DomainError("pushglue needs one class per skeleton vertex (" + std::to_string(skeleton.num_vertices()) +
                      "), got " + std::to_string(pieces.size()));
  for (int v = 0; v < skeleton.num_vertices(); ++v) {
    auto expected = vertex_ambient(skeleton, v);
    if (pieces[v].ambient() != expected)
      throw AmbientMismatch("interface mismatch at vertex " + std::to_string(v) + ": class lives on " +
                            pieces[v].ambient().to_string() + ", vertex space is " + expected.to_string());
  }
  Rational factor(1);
  for (auto [h1, h2] : skeleton.edges()) factor /= skeleton.half_edges[h1].twist;

  TautClass out(ambient);
  std::vector<const Term*> chosen(pieces.size());
  auto recurse = [&](auto&& self, std::size_t v) -> void {
    if (v == pieces.size()) {
      std::vector<DecoratedStratum> strata;
      Rational c = factor;
      for (const Term* t : chosen) {
        strata.push_back(t->stratum);
        c *= t->coeff;
      }
      out.add(glue_strata(skeleton, strata), c);
      return;
    }
    for (const auto& [key, term] : pieces[v].terms()) {
      chosen[v] = &term;
      self(self, v + 1);
    }
  };
  recurse(recurse, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Forgetful pushforward

/// psi_i (label) or kappa_j (index, j >= 0) on an ambient space.
struct Generator {
  enum class Kind { psi, kappa };
  Kind kind;
  std::string label;
  int index = 0;

  static Generator psi(std::string label) { return {Kind::psi, std::move(label), 0}; }
  static Generator kappa(int j) { return {Kind::kappa, {}, j}; }
};

/// D_{i,point}: a genus-0, value-0 bubble carrying legs i and `point`, joined
/// to the rest of the curve by one edge of twist m(i).
inline TwistedGraph bubble_graph(const AmbientSpace& extended, const std::string& label, const std::string& point) {
  GraphBuilder b;
  int main = b.add_vertex(extended.genus(), extended.value());
  int bubble = b.add_vertex(0, AValue::zero(extended.spec()));
  for (const auto& [l, twist] : extended.markings())
    if (l != label && l != point) b.add_leg(main, l, twist);
  b.add_leg(bubble, label, extended.twist(label));
  b.add_leg(bubble, point, extended.twist(point));
  b.add_edge(main, bubble, extended.twist(label));
  return b.build();
}

namespace detail {

inline void require_trivial_point(const AmbientSpace& extended, const std::string& point) {
  if (!extended.has_marking(point)) throw DomainError("forgotten point '" + point + "' is absent from the ambient");
  if (extended.twist(point) != 1)
    throw DomainError("forgotten point '" + point + "' must have trivial stack structure, has twist " +
                      std::to_string(extended.twist(point)));
}

}  // namespace detail

/// pi^* of a generator, as a class on the ambient with `point` added:
/// psi_i -> psi_i - D_{i,point};  kappa_j -> kappa_j - psi_point^j.
inline TautClass forgetful_comparison(const Generator& gen, const AmbientSpace& extended, const std::string& point) {
  detail::require_trivial_point(extended, point);
  if (gen.kind == Generator::Kind::psi) {
    if (gen.label == point || !extended.has_marking(gen.label))
      throw DomainError("comparison: psi label '" + gen.label + "' is not a marking of the base space");
    return psi_class(extended, gen.label) - make_class(bubble_graph(extended, gen.label, point), {}, extended);
  }
  if (gen.index < 0) throw DomainError("comparison: kappa index must be nonnegative");
  TautClass correction = gen.index == 0 ? TautClass::fundamental(extended) : psi_class(extended, point, gen.index);
  return kappa_class(extended, gen.index) - correction;
}

TautClass pushforward_forgetful(const TautClass& x, const std::string& point = kBullet);

namespace detail {

/// Stratum with a forgotten point on a vertex that becomes unstable: contract
/// it when it carries no decoration of positive degree, otherwise zero.
inline TautClass push_contracting(const DecoratedStratum& s, const AmbientSpace& target, int bullet_half_edge) {
  const TwistedGraph& g = s.graph();
  const Decoration& alpha = s.decoration();
  const int v = g.half_edges[bullet_half_edge].vertex;
  TautClass out(target);
  Decoration at_v = alpha.restricted_to(g, v);
  if (!at_v.psi.empty() || !at_v.kappa.empty()) return out;
  // kappa0 on the 3-pointed genus-0 stable vertex is pi_* psi_point on M_{0,4}, which is 1.
  std::vector<int> others;
  for (int h : g.half_edges_at(v))
    if (h != bullet_half_edge) others.push_back(h);
  int h1 = others[0], h2 = others[1];
  if (g.involution[h1] == h2 || (g.is_leg(h1) && g.is_leg(h2))) return out;  // target space admits no curves
  if (g.half_edges[h1].twist != g.half_edges[h2].twist)
    throw DomainError("cannot contract vertex " + std::to_string(v) + ": remaining half-edges have twists " +
                      std::to_string(g.half_edges[h1].twist) + " and " + std::to_string(g.half_edges[h2].twist));

  // Rebuild without v and its three half-edges.
  std::vector<int> new_vertex(g.num_vertices(), -1), new_half(g.num_half_edges(), -1);
  TwistedGraph r;
  for (int w = 0; w < g.num_vertices(); ++w)
    if (w != v) {
      new_vertex[w] = r.num_vertices();
      r.vertices.push_back(g.vertices[w]);
    }
  for (int h = 0; h < g.num_half_edges(); ++h)
    if (g.half_edges[h].vertex != v) {
      new_half[h] = r.num_half_edges();
      r.half_edges.push_back({new_vertex[g.half_edges[h].vertex], g.half_edges[h].twist});
    }
  r.involution.assign(r.num_half_edges(), -1);
  for (int h = 0; h < g.num_half_edges(); ++h)
    if (new_half[h] != -1 && new_half[g.involution[h]] != -1) r.involution[new_half[h]] = new_half[g.involution[h]];
  for (const auto& [label, h] : g.legs)
    if (new_half[h] != -1) {
      r.involution[new_half[h]] = new_half[h];
      r.legs[label] = new_half[h];
    }
  if (g.is_leg(h1)) std::swap(h1, h2);
  int p1 = new_half[g.involution[h1]];
  if (g.is_leg(h2)) {
    r.involution[p1] = p1;
    r.legs[*g.leg_label(h2)] = p1;
  } else {
    int p2 = new_half[g.involution[h2]];
    r.involution[p1] = p2;
    r.involution[p2] = p1;
  }
  Decoration d;
  for (const auto& [h, e] : alpha.psi)
    if (new_half[h] != -1) d.multiply_psi(new_half[h], e);
  for (const auto& [wj, e] : alpha.kappa)
    if (new_vertex[wj.first] != -1) d.multiply_kappa(new_vertex[wj.first], wj.second, e);
  for (const auto& [w, e] : alpha.kappa0)
    if (new_vertex[w] != -1) d.multiply_kappa(new_vertex[w], 0, e);
  out.add(DecoratedStratum::make(r, d), Rational(1));
  return out;
}

/// pi_* of a monomial on the trivial graph of `space`, which carries `point`.
/// Peels one non-point factor z at a time:
///   pi_*(z R) = z * pi_*(R) + pi_*((z - pi^*z) R).
inline TautClass push_vertex_monomial(const AmbientSpace& space, const Decoration& monomial, const std::string& point) {
  const AmbientSpace base = space.without_marking(point);
  const TwistedGraph t = trivial_graph(space);
  const int hb = t.legs.at(point);

  std::optional<Generator> gen;
  Decoration rest = monomial;
  if (!rest.kappa0.empty()) {
    gen = Generator::kappa(0);
    if (--rest.kappa0[0] == 0) rest.kappa0.erase(0);
  } else if (!rest.kappa.empty()) {
    auto it = rest.kappa.begin();
    gen = Generator::kappa(it->first.second);
    if (--it->second == 0) rest.kappa.erase(it);
  } else {
    for (auto it = rest.psi.begin(); it != rest.psi.end(); ++it) {
      if (it->first == hb) continue;
      gen = Generator::psi(*t.leg_label(it->first));
      if (--it->second == 0) rest.psi.erase(it);
      break;
    }
  }
  if (!gen) {
    // psi_point^l alone pushes to kappa_{l-1}.
    auto it = monomial.psi.find(hb);
    int l = it == monomial.psi.end() ? 0 : it->second;
    if (l == 0) return TautClass(base);
    return kappa_class(base, l - 1);
  }
  TautClass z_base = gen->kind == Generator::Kind::psi ? psi_class(base, gen->label) : kappa_class(base, gen->index);
  TautClass z_up = gen->kind == Generator::Kind::psi ? psi_class(space, gen->label) : kappa_class(space, gen->index);
  TautClass remainder = z_up - forgetful_comparison(*gen, space, point);
  TautClass rest_class = make_class(t, rest, space);

  TautClass out = product(z_base, push_vertex_monomial(space, rest, point));
  out += pushforward_forgetful(product(remainder, rest_class), point);
  return out;
}

inline TautClass push_stratum(const DecoratedStratum& s, const AmbientSpace& target, const std::string& point) {
  const TwistedGraph& g = s.graph();
  const int hb = g.legs.at(point);
  const int v = g.half_edges[hb].vertex;
  if (g.vertices[v].genus == 0 && g.vertices[v].value.is_zero() && g.valence(v) == 3)
    return push_contracting(s, target, hb);

  // Gamma' = Gamma without the point's leg.
  TwistedGraph reduced;
  std::vector<int> new_half(g.num_half_edges(), -1);
  reduced.vertices = g.vertices;
  for (int h = 0; h < g.num_half_edges(); ++h)
    if (h != hb) {
      new_half[h] = reduced.num_half_edges();
      reduced.half_edges.push_back(g.half_edges[h]);
    }
  for (int h = 0; h < g.num_half_edges(); ++h)
    if (h != hb) reduced.involution.push_back(new_half[g.involution[h]]);
  for (const auto& [label, h] : g.legs)
    if (h != hb) reduced.legs[label] = new_half[h];
  Decoration reduced_deco;
  for (const auto& [h, e] : s.decoration().psi)
    if (h != hb) reduced_deco.multiply_psi(new_half[h], e);
  reduced_deco.kappa = s.decoration().kappa;
  reduced_deco.kappa0 = s.decoration().kappa0;

  // The vertex space of v, with the point added back.
  AmbientSpace base = vertex_ambient(reduced, v);
  if (base.has_marking(point))
    throw DomainError("label '" + point + "' collides with a vertex-space label; rename the forgotten point");
  AmbientSpace space = base.with_marking(point, 1);
  TwistedGraph t = trivial_graph(space);
  Decoration monomial;
  for (int h : g.half_edges_at(v)) {
    auto it = s.decoration().psi.find(h);
    if (it == s.decoration().psi.end()) continue;
    std::string label = h == hb ? point : vertex_leg_label(reduced, new_half[h]);
    monomial.multiply_psi(t.legs.at(label), it->second);
  }
  for (const auto& [vj, e] : s.decoration().kappa)
    if (vj.first == v) monomial.multiply_kappa(0, vj.second, e);
  for (const auto& [w, e] : s.decoration().kappa0)
    if (w == v) monomial.multiply_kappa(0, 0, e);

  TautClass pushed = push_vertex_monomial(space, monomial, point);

  std::vector<DecoratedStratum> pieces;
  for (int w = 0; w < reduced.num_vertices(); ++w) pieces.push_back(vertex_piece(reduced, reduced_deco, w));
  TautClass out(target);
  for (const auto& [key, term] : pushed.terms()) {
    pieces[v] = term.stratum;
    out.add(glue_strata(reduced, pieces), term.coeff);
  }
  return out;
}

}  // namespace detail

/// Pushforward along the map forgetting `point` (which must have twist 1).
inline TautClass pushforward_forgetful(const TautClass& x, const std::string& point) {
  detail::require_trivial_point(x.ambient(), point);
  AmbientSpace target = x.ambient().without_marking(point);
  TautClass out(target);
  if (!target.admits_curves()) return out;
  for (const auto& [key, term] : x.terms()) {
    TautClass pushed = detail::push_stratum(term.stratum, target, point);
    out += pushed * term.coeff;
  }
  return out;
}

}  // namespace twisted_strata
