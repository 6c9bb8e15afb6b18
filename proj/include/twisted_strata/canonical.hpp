#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "decoration.hpp"
#include "graph.hpp"

namespace twisted_strata {

/// Canonical labelling of a decorated graph.
struct CanonicalForm {
  std::string key;                   // equal iff the inputs are isomorphic
  std::uint64_t automorphisms = 1;   // order of the label-preserving automorphism group
  std::vector<int> vertex_order;     // canonical vertex i is input vertex vertex_order[i]
  std::vector<int> half_edge_order;  // canonical half-edge j is input half-edge half_edge_order[j]
};

namespace detail {

/// Vertex-coloured multigraph with coloured half-edges; legs are half-edges
/// that are their own partner.
struct ColouredGraph {
  std::vector<nlohmann::json> vertex_labels;
  std::vector<int> he_vertex;
  std::vector<int> he_partner;
  std::vector<nlohmann::json> he_labels;
};

/// Ranks labels by their serialized text; any fixed total order will do.
inline std::vector<int> dense_ranks(const std::vector<nlohmann::json>& labels) {
  std::vector<std::string> text;
  for (const auto& l : labels) text.push_back(l.dump());
  std::vector<std::string> sorted = text;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> out;
  for (const auto& t : text) out.push_back(static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin()));
  return out;
}

class Canonicalizer {
 public:
  explicit Canonicalizer(const ColouredGraph& g)
      : g_(g), n_(static_cast<int>(g.vertex_labels.size())), vrank_(dense_ranks(g.vertex_labels)),
        hrank_(dense_ranks(g.he_labels)), at_(n_) {
    for (int h = 0; h < static_cast<int>(g.he_vertex.size()); ++h) at_[g.he_vertex[h]].push_back(h);
  }

  CanonicalForm run() {
    search(refine(vrank_));
    CanonicalForm out;
    std::vector<int> pos = best_pos_;
    out.vertex_order.assign(n_, -1);
    for (int v = 0; v < n_; ++v) out.vertex_order[pos[v]] = v;

    // Half-edge order: legs, then edges, each sorted by their serialized sides.
    using Side = std::pair<int, int>;
    std::vector<std::tuple<Side, int>> legs;
    std::vector<std::tuple<Side, Side, int, int>> edges;
    for (int h = 0; h < static_cast<int>(g_.he_vertex.size()); ++h) {
      int p = g_.he_partner[h];
      Side s{pos[g_.he_vertex[h]], hrank_[h]};
      if (p == h) {
        legs.emplace_back(s, h);
      } else if (h < p) {
        Side t{pos[g_.he_vertex[p]], hrank_[p]};
        if (t < s)
          edges.emplace_back(t, s, p, h);
        else
          edges.emplace_back(s, t, h, p);
      }
    }
    std::sort(legs.begin(), legs.end());
    std::sort(edges.begin(), edges.end());
    for (const auto& [s, h] : legs) out.half_edge_order.push_back(h);
    for (const auto& [s, t, h, p] : edges) {
      out.half_edge_order.push_back(h);
      out.half_edge_order.push_back(p);
    }

    // Automorphisms: vertex permutations times permutations of parallel
    // identical edges (and flips of symmetric loops) fixing every vertex.
    std::uint64_t factor = 1;
    auto count_runs = [&](auto& items, auto same, auto symmetric) {
      for (std::size_t i = 0; i < items.size();) {
        std::size_t j = i;
        while (j < items.size() && same(items[i], items[j])) ++j;
        for (std::size_t k = 2; k <= j - i; ++k) factor *= k;
        if (symmetric(items[i])) factor <<= (j - i);
        i = j;
      }
    };
    count_runs(legs, [](const auto& a, const auto& b) { return std::get<0>(a) == std::get<0>(b); },
               [](const auto&) { return false; });
    count_runs(edges,
               [](const auto& a, const auto& b) { return std::get<0>(a) == std::get<0>(b) && std::get<1>(a) == std::get<1>(b); },
               [](const auto& e) { return std::get<0>(e) == std::get<1>(e); });
    out.automorphisms = best_count_ * factor;

    nlohmann::json key = nlohmann::json::object();
    key["v"] = nlohmann::json::array();
    for (int i = 0; i < n_; ++i) key["v"].push_back(g_.vertex_labels[out.vertex_order[i]]);
    key["l"] = nlohmann::json::array();
    for (const auto& [s, h] : legs) key["l"].push_back({s.first, g_.he_labels[h]});
    key["e"] = nlohmann::json::array();
    for (const auto& [s, t, h, p] : edges)
      key["e"].push_back({{s.first, g_.he_labels[h]}, {t.first, g_.he_labels[p]}});
    out.key = key.dump();
    return out;
  }

 private:
  std::vector<int> refine(std::vector<int> colours) const {
    using Sig = std::pair<int, std::vector<std::tuple<int, int, int>>>;
    int classes = count_classes(colours);
    while (true) {
      std::vector<Sig> sig(n_);
      for (int v = 0; v < n_; ++v) {
        sig[v].first = colours[v];
        for (int h : at_[v]) {
          int p = g_.he_partner[h];
          if (p == h)
            sig[v].second.emplace_back(hrank_[h], -1, -1);
          else
            sig[v].second.emplace_back(hrank_[h], colours[g_.he_vertex[p]], hrank_[p]);
        }
        std::sort(sig[v].second.begin(), sig[v].second.end());
      }
      std::vector<int> order(n_);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int a, int b) { return sig[a] < sig[b]; });
      std::vector<int> next(n_);
      int c = 0;
      for (int i = 0; i < n_; ++i) {
        if (i > 0 && sig[order[i]] != sig[order[i - 1]]) ++c;
        next[order[i]] = c;
      }
      int next_classes = n_ ? c + 1 : 0;
      colours = std::move(next);
      if (next_classes == classes) return colours;
      classes = next_classes;
    }
  }

  static int count_classes(const std::vector<int>& colours) {
    std::vector<int> c = colours;
    std::sort(c.begin(), c.end());
    return static_cast<int>(std::unique(c.begin(), c.end()) - c.begin());
  }

  std::vector<int> serialize(const std::vector<int>& pos) const {
    std::vector<int> out(n_);
    for (int v = 0; v < n_; ++v) out[pos[v]] = vrank_[v];
    std::vector<std::array<int, 2>> legs;
    std::vector<std::array<int, 4>> edges;
    for (int h = 0; h < static_cast<int>(g_.he_vertex.size()); ++h) {
      int p = g_.he_partner[h];
      std::array<int, 2> s{pos[g_.he_vertex[h]], hrank_[h]};
      if (p == h) {
        legs.push_back(s);
      } else if (h < p) {
        std::array<int, 2> t{pos[g_.he_vertex[p]], hrank_[p]};
        if (t < s) std::swap(s, t);
        edges.push_back({s[0], s[1], t[0], t[1]});
      }
    }
    std::sort(legs.begin(), legs.end());
    std::sort(edges.begin(), edges.end());
    for (const auto& l : legs) out.insert(out.end(), l.begin(), l.end());
    for (const auto& e : edges) out.insert(out.end(), e.begin(), e.end());
    return out;
  }

  void search(const std::vector<int>& colours) {
    int classes = count_classes(colours);
    if (classes == n_) {
      auto s = serialize(colours);
      if (best_count_ == 0 || s < best_) {
        best_ = std::move(s);
        best_pos_ = colours;
        best_count_ = 1;
      } else if (s == best_) {
        ++best_count_;
      }
      return;
    }
    // Individualize each vertex of the first non-singleton cell in turn.
    std::vector<int> size(n_, 0);
    for (int c : colours) ++size[c];
    int cell = 0;
    while (size[cell] < 2) ++cell;
    for (int v = 0; v < n_; ++v) {
      if (colours[v] != cell) continue;
      std::vector<int> next(n_);
      for (int u = 0; u < n_; ++u) next[u] = 2 * colours[u] + (colours[u] == cell && u != v ? 1 : 0);
      search(refine(dense(next)));
    }
  }

  static std::vector<int> dense(const std::vector<int>& c) {
    std::vector<int> sorted = c;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> out;
    for (int x : c) out.push_back(static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin()));
    return out;
  }

  const ColouredGraph& g_;
  int n_;
  std::vector<int> vrank_, hrank_;
  std::vector<std::vector<int>> at_;
  std::vector<int> best_, best_pos_;
  std::uint64_t best_count_ = 0;
};

}  // namespace detail

/// Canonical labelling of (graph, decoration). `extra_labels`, when given,
/// attaches one more string to each half-edge; isomorphisms must preserve it.
inline CanonicalForm canonical_form(const TwistedGraph& g, const Decoration& deco = {},
                                    std::span<const std::string> extra_labels = {}) {
  detail::ColouredGraph cg;
  for (int v = 0; v < g.num_vertices(); ++v) {
    nlohmann::json kappa = nlohmann::json::array();
    for (const auto& [vj, e] : deco.kappa)
      if (vj.first == v) kappa.push_back({vj.second, e});
    auto k0 = deco.kappa0.find(v);
    cg.vertex_labels.push_back(
        {g.vertices[v].genus, g.vertices[v].value.to_string(), kappa, k0 == deco.kappa0.end() ? 0 : k0->second});
  }
  std::vector<std::string> labels(g.num_half_edges());
  for (const auto& [label, h] : g.legs) labels[h] = label;
  for (int h = 0; h < g.num_half_edges(); ++h) {
    cg.he_vertex.push_back(g.half_edges[h].vertex);
    cg.he_partner.push_back(g.involution[h]);
    auto psi = deco.psi.find(h);
    nlohmann::json label = {g.half_edges[h].twist, psi == deco.psi.end() ? 0 : psi->second};
    if (g.is_leg(h)) label.push_back(labels[h]);
    if (!extra_labels.empty()) label.push_back(extra_labels[h]);
    cg.he_labels.push_back(std::move(label));
  }
  return detail::Canonicalizer(cg).run();
}

struct CanonicalizeResult {
  std::string key;
  std::uint64_t automorphism_count;
};

inline CanonicalizeResult canonicalize(const TwistedGraph& g, const Decoration& deco) {
  auto form = canonical_form(g, deco);
  return {form.key, form.automorphisms};
}

inline std::vector<int> inverse_permutation(const std::vector<int>& p) {
  std::vector<int> inv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<int>(i);
  return inv;
}

/// The graph renumbered so that vertex i is old vertex_order[i], etc.
inline TwistedGraph relabel(const TwistedGraph& g, const CanonicalForm& form) {
  auto hinv = inverse_permutation(form.half_edge_order);
  auto vinv = inverse_permutation(form.vertex_order);
  TwistedGraph out;
  for (int v : form.vertex_order) out.vertices.push_back(g.vertices[v]);
  for (int h : form.half_edge_order) {
    out.half_edges.push_back({vinv[g.half_edges[h].vertex], g.half_edges[h].twist});
    out.involution.push_back(hinv[g.involution[h]]);
  }
  for (const auto& [label, h] : g.legs) out.legs[label] = hinv[h];
  return out;
}

inline Decoration relabel(const Decoration& d, const CanonicalForm& form) {
  auto hinv = inverse_permutation(form.half_edge_order);
  auto vinv = inverse_permutation(form.vertex_order);
  Decoration out;
  for (const auto& [h, e] : d.psi) out.psi[hinv[h]] = e;
  for (const auto& [vj, e] : d.kappa) out.kappa[{vinv[vj.first], vj.second}] = e;
  for (const auto& [v, e] : d.kappa0) out.kappa0[vinv[v]] = e;
  return out;
}

}  // namespace twisted_strata
