#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "canonical.hpp"
#include "graph.hpp"
#include "strata.hpp"

namespace twisted_strata {

struct EnumBounds {
  int max_edges = 0;
  int twist_bound = 1;
  int max_decoration_degree = 0;
};

namespace detail {

/// Canonical key of a bare multigraph (edge list over vertices 0..n-1).
inline std::string multigraph_key(int n, const std::vector<std::pair<int, int>>& edges) {
  ColouredGraph cg;
  cg.vertex_labels.assign(n, 0);
  for (auto [a, b] : edges) {
    int h = static_cast<int>(cg.he_vertex.size());
    cg.he_vertex.insert(cg.he_vertex.end(), {a, b});
    cg.he_partner.insert(cg.he_partner.end(), {h + 1, h});
    cg.he_labels.insert(cg.he_labels.end(), {0, 0});
  }
  return Canonicalizer(cg).run().key;
}

inline bool multigraph_connected(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<int> comp(n);
  for (int i = 0; i < n; ++i) comp[i] = i;
  for (int round = 0; round < n; ++round)
    for (auto [a, b] : edges) comp[a] = comp[b] = std::min(comp[a], comp[b]);
  return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
}

/// Connected multigraphs with n vertices and e edges, one per isomorphism class.
inline std::vector<std::vector<std::pair<int, int>>> multigraphs(int n, int e) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) pairs.emplace_back(i, j);
  std::map<std::string, std::vector<std::pair<int, int>>> reps;
  std::vector<std::pair<int, int>> current;
  auto recurse = [&](auto&& self, std::size_t start) -> void {
    if (static_cast<int>(current.size()) == e) {
      if (multigraph_connected(n, current)) reps.try_emplace(multigraph_key(n, current), current);
      return;
    }
    for (std::size_t p = start; p < pairs.size(); ++p) {
      current.push_back(pairs[p]);
      self(self, p);
      current.pop_back();
    }
  };
  recurse(recurse, 0);
  std::vector<std::vector<std::pair<int, int>>> out;
  for (auto& [key, edges] : reps) out.push_back(std::move(edges));
  return out;
}

/// Compositions of `total` into `parts` nonnegative integers.
inline std::vector<std::vector<int>> compositions(int total, int parts) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  auto recurse = [&](auto&& self, int left) -> void {
    if (static_cast<int>(current.size()) == parts - 1) {
      current.push_back(left);
      out.push_back(current);
      current.pop_back();
      return;
    }
    for (int x = 0; x <= left; ++x) {
      current.push_back(x);
      self(self, left - x);
      current.pop_back();
    }
  };
  if (parts == 0) {
    if (total == 0) out.emplace_back();
    return out;
  }
  recurse(recurse, total);
  return out;
}

/// Valid graphs of `ambient` with an edge count in [min_edges, max_edges] and
/// node twists from `twists`, keyed by canonical key.
inline std::map<std::string, TwistedGraph> graphs_by_key(const AmbientSpace& ambient, int min_edges, int max_edges,
                                                         const std::vector<int>& twists) {
  std::map<std::string, TwistedGraph> found;
  if (!ambient.admits_curves()) return found;
  std::vector<std::pair<std::string, int>> markings(ambient.markings().begin(), ambient.markings().end());
  const int n_markings = static_cast<int>(markings.size());

  for (int ne = min_edges; ne <= max_edges; ++ne) {
    for (int nv = 1; nv <= ne + 1; ++nv) {
      int betti = ne - nv + 1;
      int genus_budget = ambient.genus() - betti;
      if (genus_budget < 0) continue;
      if (ne > 0 && twists.empty()) continue;
      auto value_choices = decompose(ambient.value(), nv);
      auto genus_choices = compositions(genus_budget, nv);

      for (const auto& edges : multigraphs(nv, ne)) {
        std::vector<int> valence(nv, 0);
        for (auto [a, b] : edges) ++valence[a], ++valence[b];
        // Stage 2: legs, genera and values, with placeholder node twists.
        std::map<std::string, TwistedGraph> shapes;
        std::vector<int> leg_vertex(n_markings, 0);
        while (true) {
          std::vector<int> val = valence;
          for (int i = 0; i < n_markings; ++i) ++val[leg_vertex[i]];
          for (const auto& genera : genus_choices) {
            for (const auto& values : value_choices) {
              bool stable = true;
              for (int v = 0; v < nv && stable; ++v)
                stable = !values[v].is_zero() || 2 * genera[v] - 2 + val[v] > 0;
              if (!stable) continue;
              GraphBuilder b;
              for (int v = 0; v < nv; ++v) b.add_vertex(genera[v], values[v]);
              for (int i = 0; i < n_markings; ++i) b.add_leg(leg_vertex[i], markings[i].first, markings[i].second);
              for (auto [x, y] : edges) b.add_edge(x, y, 0);
              TwistedGraph g = b.build();
              shapes.try_emplace(canonical_form(g).key, std::move(g));
            }
          }
          int i = 0;
          while (i < n_markings && leg_vertex[i] == nv - 1) leg_vertex[i++] = 0;
          if (i == n_markings) break;
          ++leg_vertex[i];
        }
        // Stage 3: node twists.
        for (const auto& [shape_key, shape] : shapes) {
          auto shape_edges = shape.edges();
          std::vector<std::size_t> choice(shape_edges.size(), 0);
          while (true) {
            TwistedGraph g = shape;
            for (std::size_t e = 0; e < shape_edges.size(); ++e) {
              g.half_edges[shape_edges[e].first].twist = twists[choice[e]];
              g.half_edges[shape_edges[e].second].twist = twists[choice[e]];
            }
            if (validate(g, ambient).ok()) {
              auto form = canonical_form(g);
              if (!found.contains(form.key)) found.emplace(form.key, relabel(g, form));
            }
            std::size_t e = 0;
            while (e < choice.size() && choice[e] + 1 == twists.size()) choice[e++] = 0;
            if (e == choice.size()) break;
            ++choice[e];
          }
        }
      }
    }
  }
  return found;
}

inline std::vector<int> twist_range(int bound) {
  std::vector<int> out;
  for (int t = 1; t <= bound; ++t) out.push_back(t);
  return out;
}

}  // namespace detail

inline void check_bounds(const AmbientSpace& ambient, const EnumBounds& bounds) {
  if (bounds.max_edges < 0 || bounds.max_decoration_degree < 0) throw DomainError("enumeration bounds must be >= 0");
  if (bounds.twist_bound < 1) throw DomainError("twist bound must be >= 1");
  for (const auto& [label, twist] : ambient.markings())
    if (twist > bounds.twist_bound)
      throw DomainError("twist bound " + std::to_string(bounds.twist_bound) + " is below the twist of marking '" +
                        label + "'");
}

/// Isomorphism classes of valid graphs with at most max_edges edges and node
/// twists at most twist_bound, sorted by canonical key.
inline std::vector<TwistedGraph> enumerate_graphs(const AmbientSpace& ambient, const EnumBounds& bounds) {
  check_bounds(ambient, bounds);
  std::vector<TwistedGraph> out;
  for (auto& [key, g] : detail::graphs_by_key(ambient, 0, bounds.max_edges, detail::twist_range(bounds.twist_bound)))
    out.push_back(std::move(g));
  return out;
}

/// All decorations of exact degree `degree` on g (kappa0 excluded).
inline std::vector<Decoration> enumerate_decorations(const TwistedGraph& g, int degree) {
  struct Slot {
    bool psi;
    int index;
    int weight;
  };
  std::vector<Slot> slots;
  for (int h = 0; h < g.num_half_edges(); ++h) slots.push_back({true, h, 1});
  for (int v = 0; v < g.num_vertices(); ++v)
    for (int j = 1; j <= degree; ++j) slots.push_back({false, v, j});
  std::vector<Decoration> out;
  Decoration current;
  auto recurse = [&](auto&& self, std::size_t i, int left) -> void {
    if (left == 0) {
      out.push_back(current);
      return;
    }
    if (i == slots.size()) return;
    const Slot& s = slots[i];
    for (int e = 0; e * s.weight <= left; ++e) {
      Decoration saved = current;
      if (s.psi)
        current.multiply_psi(s.index, e);
      else
        current.multiply_kappa(s.index, s.weight, e);
      self(self, i + 1, left - e * s.weight);
      current = std::move(saved);
    }
  };
  recurse(recurse, 0, degree);
  return out;
}

/// Decorated strata of the given codimension within bounds, sorted by key.
inline std::vector<DecoratedStratum> enumerate_strata(const AmbientSpace& ambient, const EnumBounds& bounds,
                                                      int codimension) {
  check_bounds(ambient, bounds);
  std::map<std::string, DecoratedStratum> found;
  int edge_cap = std::min(bounds.max_edges, codimension);
  for (const auto& [key, g] :
       detail::graphs_by_key(ambient, 0, std::max(edge_cap, -1), detail::twist_range(bounds.twist_bound))) {
    int degree = codimension - g.num_edges();
    if (degree < 0 || degree > bounds.max_decoration_degree) continue;
    for (const auto& d : enumerate_decorations(g, degree)) {
      auto s = DecoratedStratum::make(g, d);
      found.try_emplace(s.key(), std::move(s));
    }
  }
  std::vector<DecoratedStratum> out;
  for (auto& [key, s] : found) out.push_back(std::move(s));
  return out;
}

}  // namespace twisted_strata
