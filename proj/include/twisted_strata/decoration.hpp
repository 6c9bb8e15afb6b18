#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "graph.hpp"
#include "rational.hpp"

namespace twisted_strata {

/// Monomial in psi classes (per half-edge) and kappa classes (per vertex).
/// kappa0 is kept as a formal degree-0 symbol.
struct Decoration {
  std::map<int, int> psi;                    // half-edge -> exponent
  std::map<std::pair<int, int>, int> kappa;  // (vertex, j >= 1) -> exponent
  std::map<int, int> kappa0;                 // vertex -> exponent

  bool is_one() const { return psi.empty() && kappa.empty() && kappa0.empty(); }

  int degree() const {
    int d = 0;
    for (const auto& [h, e] : psi) d += e;
    for (const auto& [vj, e] : kappa) d += vj.second * e;
    return d;
  }

  void multiply_psi(int h, int e) {
    if (e > 0) psi[h] += e;
  }
  /// j == 0 goes to the formal kappa0 symbol.
  void multiply_kappa(int v, int j, int e) {
    if (e <= 0) return;
    if (j == 0)
      kappa0[v] += e;
    else
      kappa[{v, j}] += e;
  }

  Decoration& operator*=(const Decoration& other) {
    for (const auto& [h, e] : other.psi) multiply_psi(h, e);
    for (const auto& [vj, e] : other.kappa) multiply_kappa(vj.first, vj.second, e);
    for (const auto& [v, e] : other.kappa0) multiply_kappa(v, 0, e);
    return *this;
  }
  friend Decoration operator*(Decoration a, const Decoration& b) { return a *= b; }

  /// The factor sitting at vertex v (psi on its half-edges, kappa at v).
  Decoration restricted_to(const TwistedGraph& g, int v) const {
    Decoration out;
    for (const auto& [h, e] : psi)
      if (g.half_edges[h].vertex == v) out.psi.emplace(h, e);
    for (const auto& [vj, e] : kappa)
      if (vj.first == v) out.kappa.emplace(vj, e);
    for (const auto& [w, e] : kappa0)
      if (w == v) out.kappa0.emplace(w, e);
    return out;
  }

  friend bool operator==(const Decoration&, const Decoration&) = default;
  friend auto operator<=>(const Decoration&, const Decoration&) = default;
};

inline std::optional<std::string> decoration_problem(const Decoration& d, const TwistedGraph& g) {
  for (const auto& [h, e] : d.psi) {
    if (h < 0 || h >= g.num_half_edges()) return "psi on missing half-edge " + std::to_string(h);
    if (e <= 0) return "nonpositive psi exponent on half-edge " + std::to_string(h);
  }
  for (const auto& [vj, e] : d.kappa) {
    if (vj.first < 0 || vj.first >= g.num_vertices()) return "kappa on missing vertex " + std::to_string(vj.first);
    if (vj.second < 1) return "kappa index must be >= 1 (kappa0 is stored separately)";
    if (e <= 0) return "nonpositive kappa exponent at vertex " + std::to_string(vj.first);
  }
  for (const auto& [v, e] : d.kappa0) {
    if (v < 0 || v >= g.num_vertices()) return "kappa0 on missing vertex " + std::to_string(v);
    if (e <= 0) return "nonpositive kappa0 exponent at vertex " + std::to_string(v);
  }
  return std::nullopt;
}

/// Rational combination of decorations on one fixed graph.
using DecorationSum = std::map<Decoration, Rational>;

inline void accumulate(DecorationSum& into, const Decoration& d, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = into.emplace(d, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) into.erase(it);
  }
}

inline DecorationSum operator*(const DecorationSum& a, const DecorationSum& b) {
  DecorationSum out;
  for (const auto& [da, ca] : a)
    for (const auto& [db, cb] : b) accumulate(out, da * db, ca * cb);
  return out;
}

inline DecorationSum unit_sum() { return DecorationSum{{Decoration{}, Rational(1)}}; }

}  // namespace twisted_strata
