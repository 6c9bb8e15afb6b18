#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "canonical.hpp"
#include "decoration.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "rational.hpp"

namespace twisted_strata {

/// A (graph, decoration) pair stored in canonical form.
class DecoratedStratum {
 public:
  DecoratedStratum() = default;

  /// Canonicalizes; the decoration must be well formed for the graph.
  static DecoratedStratum make(const TwistedGraph& graph, const Decoration& deco) {
    if (auto problem = structural_problem(graph)) throw DomainError("malformed graph: " + *problem);
    if (auto problem = decoration_problem(deco, graph)) throw DomainError("malformed decoration: " + *problem);
    auto form = canonical_form(graph, deco);
    DecoratedStratum s;
    s.graph_ = relabel(graph, form);
    s.decoration_ = relabel(deco, form);
    s.key_ = std::move(form.key);
    s.automorphisms_ = form.automorphisms;
    return s;
  }

  const TwistedGraph& graph() const { return graph_; }
  const Decoration& decoration() const { return decoration_; }
  const std::string& key() const { return key_; }
  std::uint64_t automorphisms() const { return automorphisms_; }

  /// #E + deg(decoration).
  int codim() const { return graph_.num_edges() + decoration_.degree(); }

  friend bool operator==(const DecoratedStratum& a, const DecoratedStratum& b) { return a.key_ == b.key_; }

 private:
  TwistedGraph graph_;
  Decoration decoration_;
  std::string key_;
  std::uint64_t automorphisms_ = 1;
};

inline int codim(const DecoratedStratum& s) { return s.codim(); }

struct Term {
  DecoratedStratum stratum;
  Rational coeff;
  friend bool operator==(const Term& a, const Term& b) { return a.stratum == b.stratum && a.coeff == b.coeff; }
};

/// Finite Q-linear combination of decorated strata on one ambient space,
/// keyed by canonical key; zero coefficients are never stored.
class TautClass {
 public:
  TautClass() = default;
  explicit TautClass(AmbientSpace ambient) : ambient_(std::move(ambient)) {}

  static TautClass fundamental(const AmbientSpace& ambient) {
    TautClass out(ambient);
    out.add(DecoratedStratum::make(trivial_graph(ambient), {}), Rational(1));
    return out;
  }

  const AmbientSpace& ambient() const { return ambient_; }
  const std::map<std::string, Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Coefficient of the stratum with this key, 0 when absent.
  Rational coefficient(const std::string& key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? Rational(0) : it->second.coeff;
  }

  void add(const DecoratedStratum& s, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(s.key(), Term{s, c});
    if (!inserted) {
      it->second.coeff += c;
      if (it->second.coeff == 0) terms_.erase(it);
    }
  }

  TautClass& operator+=(const TautClass& other) {
    require_same_ambient(other);
    for (const auto& [key, term] : other.terms_) add(term.stratum, term.coeff);
    return *this;
  }
  TautClass& operator-=(const TautClass& other) {
    require_same_ambient(other);
    for (const auto& [key, term] : other.terms_) add(term.stratum, -term.coeff);
    return *this;
  }
  TautClass& operator*=(const Rational& c) {
    if (c == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [key, term] : terms_) term.coeff *= c;
    return *this;
  }
  friend TautClass operator+(TautClass a, const TautClass& b) { return a += b; }
  friend TautClass operator-(TautClass a, const TautClass& b) { return a -= b; }
  friend TautClass operator*(TautClass a, const Rational& c) { return a *= c; }
  friend TautClass operator*(const Rational& c, TautClass a) { return a *= c; }
  TautClass operator-() const { return *this * Rational(-1); }

  std::set<int> codims() const {
    std::set<int> out;
    for (const auto& [key, term] : terms_) out.insert(term.stratum.codim());
    return out;
  }
  /// The codimension when all terms share one; nullopt for mixed or empty classes.
  std::optional<int> pure_codim() const {
    auto c = codims();
    if (c.size() != 1) return std::nullopt;
    return *c.begin();
  }
  TautClass graded_part(int d) const {
    TautClass out(ambient_);
    for (const auto& [key, term] : terms_)
      if (term.stratum.codim() == d) out.add(term.stratum, term.coeff);
    return out;
  }

  void require_same_ambient(const TautClass& other) const {
    if (ambient_ != other.ambient_)
      throw AmbientMismatch("ambient mismatch: " + ambient_.to_string() + " vs " + other.ambient_.to_string());
  }

  friend bool operator==(const TautClass& a, const TautClass& b) {
    return a.ambient_ == b.ambient_ && a.terms_ == b.terms_;
  }

 private:
  AmbientSpace ambient_;
  std::map<std::string, Term> terms_;
};

/// Throws DomainError listing every violated invariant.
inline void require_valid(const TwistedGraph& g, const AmbientSpace& ambient) {
  auto report = validate(g, ambient);
  if (!report.ok()) throw DomainError(report.to_string());
}

/// coeff * [(graph, decoration)] after validation against the ambient space.
inline TautClass make_class(const TwistedGraph& graph, const Decoration& deco, const AmbientSpace& ambient,
                            const Rational& coeff = Rational(1)) {
  require_valid(graph, ambient);
  TautClass out(ambient);
  out.add(DecoratedStratum::make(graph, deco), coeff);
  return out;
}

struct WeightedStratum {
  AmbientSpace ambient;
  TwistedGraph graph;
  Decoration decoration;
  Rational coeff;
};

/// Combines like terms via canonical keys and drops zeros.
inline TautClass normalize(std::span<const WeightedStratum> summands) {
  if (summands.empty()) return TautClass();
  TautClass out(summands.front().ambient);
  for (const auto& s : summands) {
    if (s.ambient != out.ambient())
      throw AmbientMismatch("normalize: mixed ambients " + out.ambient().to_string() + " and " + s.ambient.to_string());
    out += make_class(s.graph, s.decoration, s.ambient, s.coeff);
  }
  return out;
}

inline TautClass psi_class(const AmbientSpace& ambient, const std::string& label, int exponent = 1) {
  TwistedGraph g = trivial_graph(ambient);
  if (!g.legs.contains(label)) throw DomainError("psi: unknown marking '" + label + "'");
  Decoration d;
  d.multiply_psi(g.legs.at(label), exponent);
  return make_class(g, d, ambient);
}

/// kappa_j on the trivial graph; j == 0 gives the formal kappa0 symbol.
inline TautClass kappa_class(const AmbientSpace& ambient, int j, int exponent = 1) {
  if (j < 0) throw DomainError("kappa index must be nonnegative");
  Decoration d;
  d.multiply_kappa(0, j, exponent);
  return make_class(trivial_graph(ambient), d, ambient);
}

/// Drops every term with a vertex valued 0; such strata lie in the closed
/// complement of M^{tw,triv}_{g,I,m} inside the 1-valued space.
inline TautClass restrict_to_unvalued(const TautClass& x) {
  const auto& amb = x.ambient();
  if (amb.spec() != SemigroupSpec::a0() || amb.value() != AValue::one())
    throw DomainError("restrict needs an A0 ambient with total value 1, got " + amb.to_string());
  TautClass out(amb);
  for (const auto& [key, term] : x.terms()) {
    const auto& verts = term.stratum.graph().vertices;
    bool touches_zero = std::any_of(verts.begin(), verts.end(), [](const Vertex& v) { return v.value.is_zero(); });
    if (!touches_zero) out.add(term.stratum, term.coeff);
  }
  return out;
}

/// Replaces kappa0 at v by the number 2g(v) - 2 + #H(v).
inline TautClass substitute_kappa0(const TautClass& x) {
  TautClass out(x.ambient());
  for (const auto& [key, term] : x.terms()) {
    const auto& s = term.stratum;
    if (s.decoration().kappa0.empty()) {
      out.add(s, term.coeff);
      continue;
    }
    Rational c = term.coeff;
    Decoration d = s.decoration();
    for (const auto& [v, e] : d.kappa0) {
      int chi = 2 * s.graph().vertices[v].genus - 2 + s.graph().valence(v);
      for (int i = 0; i < e; ++i) c *= chi;
    }
    d.kappa0.clear();
    out.add(DecoratedStratum::make(s.graph(), d), c);
  }
  return out;
}

/// Every stored term validates and is in canonical form.
inline std::optional<std::string> closure_problem(const TautClass& x) {
  for (const auto& [key, term] : x.terms()) {
    if (term.coeff == 0) return "zero coefficient stored";
    const auto& s = term.stratum;
    auto report = validate(s.graph(), x.ambient());
    if (!report.ok()) return "term fails validation: " + report.to_string();
    if (auto p = decoration_problem(s.decoration(), s.graph())) return "bad decoration: " + *p;
    auto again = DecoratedStratum::make(s.graph(), s.decoration());
    if (again.key() != key || !(again.graph() == s.graph()) || !(again.decoration() == s.decoration()))
      return "term is not in canonical form";
  }
  return std::nullopt;
}

}  // namespace twisted_strata
