#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "semigroup.hpp"

namespace twisted_strata {

/// The moduli space M^{tw,triv}_{g,I,m,a}: genus, twisted marking labels, total value.
class AmbientSpace {
 public:
  AmbientSpace() = default;
  AmbientSpace(int genus, std::map<std::string, int> markings, AValue value)
      : genus_(genus), markings_(std::move(markings)), value_(std::move(value)) {
    if (genus_ < 0) throw DomainError("ambient genus must be nonnegative");
    for (const auto& [label, twist] : markings_)
      if (twist < 1) throw DomainError("bad twist: marking '" + label + "' has twist " + std::to_string(twist));
  }

  int genus() const { return genus_; }
  const std::map<std::string, int>& markings() const { return markings_; }
  int num_markings() const { return static_cast<int>(markings_.size()); }
  const AValue& value() const { return value_; }
  const SemigroupSpec& spec() const { return value_.spec(); }

  bool has_marking(const std::string& label) const { return markings_.contains(label); }
  int twist(const std::string& label) const {
    auto it = markings_.find(label);
    if (it == markings_.end()) throw DomainError("unknown marking '" + label + "'");
    return it->second;
  }

  AmbientSpace with_marking(const std::string& label, int twist) const {
    if (has_marking(label)) throw DomainError("marking '" + label + "' already present");
    auto m = markings_;
    m.emplace(label, twist);
    return AmbientSpace(genus_, std::move(m), value_);
  }
  AmbientSpace without_marking(const std::string& label) const {
    if (!has_marking(label)) throw DomainError("marking '" + label + "' absent from ambient");
    auto m = markings_;
    m.erase(label);
    return AmbientSpace(genus_, std::move(m), value_);
  }

  /// False when every curve would be a stable curve with 2g-2+n <= 0.
  bool admits_curves() const { return !value_.is_zero() || 2 * genus_ - 2 + num_markings() > 0; }

  std::string to_string() const {
    std::string out = "(g=" + std::to_string(genus_) + ", I={";
    bool first = true;
    for (const auto& [label, twist] : markings_) {
      if (!first) out += ",";
      first = false;
      out += label + ":" + std::to_string(twist);
    }
    return out + "}, a=" + value_.to_string() + ", " + spec().name() + ")";
  }

  friend bool operator==(const AmbientSpace&, const AmbientSpace&) = default;

 private:
  int genus_ = 0;
  std::map<std::string, int> markings_;
  AValue value_;
};

struct Vertex {
  int genus = 0;
  AValue value;
  friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct HalfEdge {
  int vertex = 0;
  int twist = 1;
  friend bool operator==(const HalfEdge&, const HalfEdge&) = default;
};

/// A prestable graph with twists and an A-valuation. Fixed points of the
/// involution are legs; its 2-cycles are edges.
struct TwistedGraph {
  std::vector<Vertex> vertices;
  std::vector<HalfEdge> half_edges;
  std::vector<int> involution;
  std::map<std::string, int> legs;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_half_edges() const { return static_cast<int>(half_edges.size()); }
  bool is_leg(int h) const { return involution[h] == h; }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int h = 0; h < num_half_edges(); ++h)
      if (involution[h] > h) out.emplace_back(h, involution[h]);
    return out;
  }
  int num_edges() const { return static_cast<int>(edges().size()); }

  std::vector<int> half_edges_at(int v) const {
    std::vector<int> out;
    for (int h = 0; h < num_half_edges(); ++h)
      if (half_edges[h].vertex == v) out.push_back(h);
    return out;
  }
  int valence(int v) const {
    return static_cast<int>(std::count_if(half_edges.begin(), half_edges.end(),
                                          [v](const HalfEdge& he) { return he.vertex == v; }));
  }

  std::optional<std::string> leg_label(int h) const {
    for (const auto& [label, leg] : legs)
      if (leg == h) return label;
    return std::nullopt;
  }

  friend bool operator==(const TwistedGraph&, const TwistedGraph&) = default;
};

/// Incremental construction helper.
class GraphBuilder {
 public:
  int add_vertex(int genus, AValue value) {
    graph_.vertices.push_back({genus, std::move(value)});
    return graph_.num_vertices() - 1;
  }
  int add_leg(int vertex, const std::string& label, int twist) {
    int h = push(vertex, twist);
    graph_.involution[h] = h;
    graph_.legs[label] = h;
    return h;
  }
  std::pair<int, int> add_edge(int v1, int v2, int twist) { return add_edge(v1, v2, twist, twist); }
  std::pair<int, int> add_edge(int v1, int v2, int twist1, int twist2) {
    int h1 = push(v1, twist1);
    int h2 = push(v2, twist2);
    graph_.involution[h1] = h2;
    graph_.involution[h2] = h1;
    return {h1, h2};
  }
  TwistedGraph build() const { return graph_; }

 private:
  int push(int vertex, int twist) {
    graph_.half_edges.push_back({vertex, twist});
    graph_.involution.push_back(-1);
    return graph_.num_half_edges() - 1;
  }
  TwistedGraph graph_;
};

/// The one-vertex graph with all markings as legs, in label order.
inline TwistedGraph trivial_graph(const AmbientSpace& ambient) {
  GraphBuilder b;
  b.add_vertex(ambient.genus(), ambient.value());
  for (const auto& [label, twist] : ambient.markings()) b.add_leg(0, label, twist);
  return b.build();
}

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
  malformed,
  spec_mismatch,
  bad_twist,
  unbalanced_node,
  leg_mismatch,
  disconnected,
  genus_mismatch,
  unstable_vertex,
  value_mismatch,
};

inline const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::malformed: return "malformed graph";
    case ViolationKind::spec_mismatch: return "semigroup mismatch";
    case ViolationKind::bad_twist: return "bad twist";
    case ViolationKind::unbalanced_node: return "unbalanced node";
    case ViolationKind::leg_mismatch: return "leg mismatch";
    case ViolationKind::disconnected: return "disconnected graph";
    case ViolationKind::genus_mismatch: return "genus mismatch";
    case ViolationKind::unstable_vertex: return "unstable vertex";
    case ViolationKind::value_mismatch: return "value mismatch";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const {
    return std::any_of(violations.begin(), violations.end(), [kind](const Violation& v) { return v.kind == kind; });
  }
  std::string to_string() const {
    if (ok()) return "ok";
    std::string out;
    for (const auto& v : violations) {
      if (!out.empty()) out += "\n";
      out += std::string(twisted_strata::to_string(v.kind)) + ": " + v.message;
    }
    return out;
  }
};

/// Index ranges and involution shape; everything else is left to validate().
inline std::optional<std::string> structural_problem(const TwistedGraph& g) {
  if (g.vertices.empty()) return "graph has no vertices";
  if (g.involution.size() != g.half_edges.size()) return "involution size differs from half-edge count";
  for (int h = 0; h < g.num_half_edges(); ++h) {
    if (g.half_edges[h].vertex < 0 || g.half_edges[h].vertex >= g.num_vertices())
      return "half-edge " + std::to_string(h) + " refers to missing vertex " + std::to_string(g.half_edges[h].vertex);
    int j = g.involution[h];
    if (j < 0 || j >= g.num_half_edges()) return "half-edge " + std::to_string(h) + " has no partner";
    if (g.involution[j] != h) return "involution is not an involution at half-edge " + std::to_string(h);
  }
  for (const auto& [label, h] : g.legs)
    if (h < 0 || h >= g.num_half_edges()) return "leg '" + label + "' refers to missing half-edge";
  return std::nullopt;
}

inline std::vector<int> connected_components(const TwistedGraph& g) {
  std::vector<int> comp(g.num_vertices());
  std::iota(comp.begin(), comp.end(), 0);
  auto find = [&](int x) {
    while (comp[x] != x) x = comp[x] = comp[comp[x]];
    return x;
  };
  for (auto [h1, h2] : g.edges()) {
    int a = find(g.half_edges[h1].vertex), b = find(g.half_edges[h2].vertex);
    if (a != b) comp[std::max(a, b)] = std::min(a, b);
  }
  for (int v = 0; v < g.num_vertices(); ++v) comp[v] = find(v);
  return comp;
}

inline bool is_connected(const TwistedGraph& g) {
  auto comp = connected_components(g);
  return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
}

/// #E - #V + 1 of a connected graph.
inline int first_betti(const TwistedGraph& g) {
  if (auto problem = structural_problem(g)) throw DomainError("malformed graph: " + *problem);
  if (!is_connected(g)) throw DomainError("first_betti: graph is disconnected");
  return g.num_edges() - g.num_vertices() + 1;
}

inline ValidationReport validate(const TwistedGraph& g, const AmbientSpace& ambient) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, std::string msg) { report.violations.push_back({kind, std::move(msg)}); };
  if (auto problem = structural_problem(g)) {
    add(ViolationKind::malformed, *problem);
    return report;
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (g.vertices[v].genus < 0) add(ViolationKind::malformed, "vertex " + std::to_string(v) + " has negative genus");
    if (g.vertices[v].value.spec() != ambient.spec())
      add(ViolationKind::spec_mismatch, "vertex " + std::to_string(v) + " is valued in " +
                                            g.vertices[v].value.spec().name() + ", ambient uses " +
                                            ambient.spec().name());
  }
  if (!report.ok()) return report;

  for (int h = 0; h < g.num_half_edges(); ++h)
    if (g.half_edges[h].twist < 1)
      add(ViolationKind::bad_twist, "half-edge " + std::to_string(h) + " has twist " +
                                        std::to_string(g.half_edges[h].twist) + " (twists must be >= 1)");
  for (auto [h1, h2] : g.edges())
    if (g.half_edges[h1].twist != g.half_edges[h2].twist)
      add(ViolationKind::unbalanced_node, "half-edges " + std::to_string(h1) + " and " + std::to_string(h2) +
                                              " have twists " + std::to_string(g.half_edges[h1].twist) + " and " +
                                              std::to_string(g.half_edges[h2].twist));

  std::set<int> leg_half_edges;
  for (const auto& [label, h] : g.legs) {
    leg_half_edges.insert(h);
    if (!g.is_leg(h)) {
      add(ViolationKind::leg_mismatch, "leg '" + label + "' is attached to half-edge " + std::to_string(h) +
                                           ", which is part of an edge");
      continue;
    }
    if (!ambient.has_marking(label)) {
      add(ViolationKind::leg_mismatch, "leg '" + label + "' is not a marking of the ambient space");
    } else if (g.half_edges[h].twist != ambient.twist(label)) {
      add(ViolationKind::leg_mismatch, "leg '" + label + "' has twist " + std::to_string(g.half_edges[h].twist) +
                                           ", marking twist is " + std::to_string(ambient.twist(label)));
    }
  }
  if (leg_half_edges.size() != g.legs.size())
    add(ViolationKind::leg_mismatch, "two labels share a leg half-edge");
  for (int h = 0; h < g.num_half_edges(); ++h)
    if (g.is_leg(h) && !leg_half_edges.contains(h))
      add(ViolationKind::leg_mismatch, "half-edge " + std::to_string(h) + " is a fixed point without a label");
  for (const auto& [label, twist] : ambient.markings())
    if (!g.legs.contains(label)) add(ViolationKind::leg_mismatch, "marking '" + label + "' has no leg");

  if (!is_connected(g)) {
    add(ViolationKind::disconnected, "the vertices do not form a single connected component");
  } else {
    int total = g.num_edges() - g.num_vertices() + 1;
    for (const auto& v : g.vertices) total += v.genus;
    if (total != ambient.genus())
      add(ViolationKind::genus_mismatch, "sum of vertex genera plus h^1 is " + std::to_string(total) +
                                             ", ambient genus is " + std::to_string(ambient.genus()));
  }

  for (int v = 0; v < g.num_vertices(); ++v) {
    const auto& vert = g.vertices[v];
    int n = g.valence(v);
    if (vert.value.is_zero() && 2 * vert.genus - 2 + n <= 0)
      add(ViolationKind::unstable_vertex, "vertex " + std::to_string(v) + " has value 0, genus " +
                                              std::to_string(vert.genus) + " and " + std::to_string(n) +
                                              " half-edges");
  }

  AValue sum = g.vertices[0].value;
  for (int v = 1; v < g.num_vertices(); ++v) sum = sum + g.vertices[v].value;
  if (sum != ambient.value())
    add(ViolationKind::value_mismatch,
        "vertex values sum to " + sum.to_string() + ", ambient value is " + ambient.value().to_string());
  return report;
}

// ---------------------------------------------------------------------------
// Vertex spaces, contraction and substitution

/// Label under which half-edge h appears as a marking of its vertex space.
/// Legs keep their marking label; edge half-edges are named "h<index>".
inline std::string vertex_leg_label(const TwistedGraph& g, int h) {
  if (g.is_leg(h)) {
    if (auto label = g.leg_label(h)) return *label;
  }
  std::string label = "h" + std::to_string(h);
  while (g.legs.contains(label)) label += "'";
  return label;
}

/// M_{g(v), H(v), m|H(v), a(v)}.
inline AmbientSpace vertex_ambient(const TwistedGraph& g, int v) {
  std::map<std::string, int> markings;
  for (int h : g.half_edges_at(v)) markings.emplace(vertex_leg_label(g, h), g.half_edges[h].twist);
  return AmbientSpace(g.vertices[v].genus, std::move(markings), g.vertices[v].value);
}

struct Contraction {
  TwistedGraph graph;
  std::vector<int> vertex_map;     // old vertex -> new vertex
  std::vector<int> half_edge_map;  // new half-edge -> old half-edge
};

/// Contracts every edge whose half-edges are flagged in `contract`.
/// Genera absorb the first Betti number of each contracted piece; values add.
inline Contraction contract_edges(const TwistedGraph& g, const std::vector<bool>& contract) {
  std::vector<int> parent(g.num_vertices());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [h1, h2] : g.edges()) {
    if (!contract[h1]) continue;
    int a = find(g.half_edges[h1].vertex), b = find(g.half_edges[h2].vertex);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  Contraction out;
  out.vertex_map.assign(g.num_vertices(), -1);
  std::map<int, int> root_index;
  for (int v = 0; v < g.num_vertices(); ++v) {
    int r = find(v);
    auto [it, inserted] = root_index.emplace(r, static_cast<int>(root_index.size()));
    out.vertex_map[v] = it->second;
  }
  int nv = static_cast<int>(root_index.size());
  std::vector<int> genus(nv, 0), vcount(nv, 0), ecount(nv, 0);
  std::vector<std::optional<AValue>> value(nv);
  for (int v = 0; v < g.num_vertices(); ++v) {
    int c = out.vertex_map[v];
    genus[c] += g.vertices[v].genus;
    ++vcount[c];
    value[c] = value[c] ? *value[c] + g.vertices[v].value : g.vertices[v].value;
  }
  for (auto [h1, h2] : g.edges())
    if (contract[h1]) ++ecount[out.vertex_map[g.half_edges[h1].vertex]];
  for (int c = 0; c < nv; ++c) out.graph.vertices.push_back({genus[c] + ecount[c] - vcount[c] + 1, *value[c]});
  std::vector<int> new_index(g.num_half_edges(), -1);
  for (int h = 0; h < g.num_half_edges(); ++h) {
    if (!g.is_leg(h) && contract[h]) continue;
    new_index[h] = static_cast<int>(out.half_edge_map.size());
    out.half_edge_map.push_back(h);
    out.graph.half_edges.push_back({out.vertex_map[g.half_edges[h].vertex], g.half_edges[h].twist});
  }
  for (int old : out.half_edge_map) out.graph.involution.push_back(new_index[g.involution[old]]);
  for (const auto& [label, h] : g.legs) out.graph.legs[label] = new_index[h];
  return out;
}

struct Substitution {
  TwistedGraph graph;
  std::vector<int> vertex_origin;                  // new vertex -> skeleton vertex
  std::vector<std::vector<int>> piece_vertex_map;  // piece p vertex -> new vertex
  std::vector<std::vector<int>> piece_half_edge_map;  // piece p half-edge -> new half-edge
  std::vector<int> skeleton_half_edge_map;         // skeleton half-edge -> new half-edge
};

/// Replaces every vertex v of `skeleton` by `pieces[v]`, a graph on
/// vertex_ambient(skeleton, v), and joins the legs named after skeleton
/// edge half-edges into edges.
inline Substitution substitute(const TwistedGraph& skeleton, std::span<const TwistedGraph> pieces) {
  if (static_cast<int>(pieces.size()) != skeleton.num_vertices())
    throw DomainError("substitution needs one piece per skeleton vertex");
  Substitution out;
  out.skeleton_half_edge_map.assign(skeleton.num_half_edges(), -1);
  std::map<std::string, int> label_to_skeleton;
  for (int h = 0; h < skeleton.num_half_edges(); ++h) label_to_skeleton[vertex_leg_label(skeleton, h)] = h;

  for (int v = 0; v < skeleton.num_vertices(); ++v) {
    const TwistedGraph& piece = pieces[v];
    std::vector<int> vmap, hmap;
    for (const auto& vert : piece.vertices) {
      vmap.push_back(out.graph.num_vertices());
      out.graph.vertices.push_back(vert);
      out.vertex_origin.push_back(v);
    }
    for (int h = 0; h < piece.num_half_edges(); ++h) {
      hmap.push_back(out.graph.num_half_edges());
      out.graph.half_edges.push_back({vmap[piece.half_edges[h].vertex], piece.half_edges[h].twist});
      out.graph.involution.push_back(-1);
    }
    for (auto [h1, h2] : piece.edges()) {
      out.graph.involution[hmap[h1]] = hmap[h2];
      out.graph.involution[hmap[h2]] = hmap[h1];
    }
    std::set<int> attached;
    for (const auto& [label, h] : piece.legs) {
      auto it = label_to_skeleton.find(label);
      if (it == label_to_skeleton.end() || skeleton.half_edges[it->second].vertex != v)
        throw AmbientMismatch("interface mismatch: piece for vertex " + std::to_string(v) + " has leg '" + label +
                              "' which is not a half-edge of that vertex");
      int sh = it->second;
      if (skeleton.half_edges[sh].twist != piece.half_edges[h].twist)
        throw AmbientMismatch("interface mismatch: leg '" + label + "' has twist " +
                              std::to_string(piece.half_edges[h].twist) + ", skeleton twist is " +
                              std::to_string(skeleton.half_edges[sh].twist));
      out.skeleton_half_edge_map[sh] = hmap[h];
      attached.insert(sh);
    }
    if (attached.size() != static_cast<std::size_t>(skeleton.valence(v)))
      throw AmbientMismatch("interface mismatch: piece for vertex " + std::to_string(v) +
                            " does not carry every half-edge of that vertex");
    out.piece_vertex_map.push_back(std::move(vmap));
    out.piece_half_edge_map.push_back(std::move(hmap));
  }
  for (int h = 0; h < skeleton.num_half_edges(); ++h) {
    int nh = out.skeleton_half_edge_map[h];
    if (skeleton.is_leg(h)) {
      out.graph.involution[nh] = nh;
      out.graph.legs[*skeleton.leg_label(h)] = nh;
    } else {
      out.graph.involution[nh] = out.skeleton_half_edge_map[skeleton.involution[h]];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Isomorphisms

/// A vertex and half-edge bijection preserving incidence, involution, twists,
/// genera, values and leg labels.
struct GraphIso {
  std::vector<int> vertex_map;
  std::vector<int> half_edge_map;
  friend bool operator==(const GraphIso&, const GraphIso&) = default;
};

/// All isomorphisms from `from` to `to`, found by backtracking over edges.
inline std::vector<GraphIso> isomorphisms(const TwistedGraph& from, const TwistedGraph& to) {
  std::vector<GraphIso> out;
  if (from.num_vertices() != to.num_vertices() || from.num_half_edges() != to.num_half_edges()) return out;
  if (from.legs.size() != to.legs.size()) return out;
  GraphIso iso{std::vector<int>(from.num_vertices(), -1), std::vector<int>(from.num_half_edges(), -1)};
  std::vector<int> vertex_inverse(to.num_vertices(), -1);
  std::vector<bool> used(to.num_half_edges(), false);

  auto compatible = [&](int v1, int v2) { return from.vertices[v1] == to.vertices[v2] && from.valence(v1) == to.valence(v2); };
  // Returns false on conflict; records assignments in `trail` for undo.
  auto bind_vertex = [&](int v1, int v2, std::vector<int>& trail) {
    if (iso.vertex_map[v1] == v2) return true;
    if (iso.vertex_map[v1] != -1 || vertex_inverse[v2] != -1 || !compatible(v1, v2)) return false;
    iso.vertex_map[v1] = v2;
    vertex_inverse[v2] = v1;
    trail.push_back(v1);
    return true;
  };
  auto undo = [&](std::vector<int>& trail) {
    for (int v1 : trail) {
      vertex_inverse[iso.vertex_map[v1]] = -1;
      iso.vertex_map[v1] = -1;
    }
    trail.clear();
  };

  std::vector<int> base_trail;
  for (const auto& [label, h1] : from.legs) {
    auto it = to.legs.find(label);
    if (it == to.legs.end()) return out;
    int h2 = it->second;
    if (from.half_edges[h1].twist != to.half_edges[h2].twist) return out;
    if (!bind_vertex(from.half_edges[h1].vertex, to.half_edges[h2].vertex, base_trail)) return out;
    iso.half_edge_map[h1] = h2;
    used[h2] = true;
  }
  // Visit edges so that each one touches an already-mapped vertex when possible.
  std::vector<std::pair<int, int>> order;
  {
    auto edges = from.edges();
    std::vector<bool> seen_vertex(from.num_vertices(), false), done(edges.size(), false);
    for (const auto& [label, h] : from.legs) seen_vertex[from.half_edges[h].vertex] = true;
    if (from.legs.empty()) seen_vertex[0] = true;
    for (std::size_t round = 0; round < edges.size(); ++round) {
      std::size_t pick = edges.size();
      for (std::size_t i = 0; i < edges.size() && pick == edges.size(); ++i)
        if (!done[i] && (seen_vertex[from.half_edges[edges[i].first].vertex] ||
                         seen_vertex[from.half_edges[edges[i].second].vertex]))
          pick = i;
      if (pick == edges.size())
        for (std::size_t i = 0; i < edges.size() && pick == edges.size(); ++i)
          if (!done[i]) pick = i;
      done[pick] = true;
      auto [h1, h2] = edges[pick];
      if (!seen_vertex[from.half_edges[h1].vertex]) std::swap(h1, h2);
      seen_vertex[from.half_edges[h1].vertex] = seen_vertex[from.half_edges[h2].vertex] = true;
      order.emplace_back(h1, h2);
    }
  }

  auto recurse = [&](auto&& self, std::size_t i) -> void {
    if (i == order.size()) {
      // Vertices without half-edges only occur in the one-vertex graph.
      std::vector<int> trail;
      bool ok = true;
      for (int v1 = 0; v1 < from.num_vertices() && ok; ++v1) {
        if (iso.vertex_map[v1] != -1) continue;
        ok = false;
        for (int v2 = 0; v2 < to.num_vertices(); ++v2)
          if (vertex_inverse[v2] == -1 && bind_vertex(v1, v2, trail)) {
            ok = true;
            break;
          }
      }
      if (ok) out.push_back(iso);
      undo(trail);
      return;
    }
    auto [a1, a2] = order[i];
    for (int b1 = 0; b1 < to.num_half_edges(); ++b1) {
      if (used[b1] || to.is_leg(b1)) continue;
      int b2 = to.involution[b1];
      if (used[b2]) continue;
      if (from.half_edges[a1].twist != to.half_edges[b1].twist || from.half_edges[a2].twist != to.half_edges[b2].twist)
        continue;
      std::vector<int> trail;
      if (bind_vertex(from.half_edges[a1].vertex, to.half_edges[b1].vertex, trail) &&
          bind_vertex(from.half_edges[a2].vertex, to.half_edges[b2].vertex, trail)) {
        iso.half_edge_map[a1] = b1;
        iso.half_edge_map[a2] = b2;
        used[b1] = used[b2] = true;
        self(self, i + 1);
        used[b1] = used[b2] = false;
        iso.half_edge_map[a1] = iso.half_edge_map[a2] = -1;
      }
      undo(trail);
    }
  };
  recurse(recurse, 0);
  return out;
}

}  // namespace twisted_strata
