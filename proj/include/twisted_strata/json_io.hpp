#pragma once

#include <nlohmann/json.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "calculus.hpp"
#include "decoration.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "rational.hpp"
#include "semigroup.hpp"
#include "strata.hpp"

namespace twisted_strata {

using json = nlohmann::json;

namespace detail {

template <typename T>
T get_field(const json& j, const char* field, const char* what) {
  if (!j.is_object() || !j.contains(field)) throw InputError(std::string(what) + ": missing field '" + field + "'");
  try {
    return j.at(field).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string(what) + ": field '" + field + "' has the wrong type");
  }
}

inline int parse_index(const std::string& text, const char* what) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw InputError(std::string(what) + ": '" + text + "' is not an integer");
  return value;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Values and ambients

inline json to_json(const AValue& a) {
  if (a.spec().kind() == SemigroupSpec::Kind::a0) return a.to_string();
  return json(std::vector<int>(a.coords().begin(), a.coords().end()));
}

inline AValue avalue_from_json(const json& j, const SemigroupSpec& spec) {
  if (j.is_string()) return parse_avalue(j.get<std::string>(), spec);
  if (j.is_number_integer() && spec.kind() == SemigroupSpec::Kind::a0) return parse_avalue(std::to_string(j.get<int>()), spec);
  if (j.is_array()) {
    std::vector<int> coords;
    for (const auto& c : j) {
      if (!c.is_number_integer()) throw InputError("semigroup element: coordinates must be integers");
      coords.push_back(c.get<int>());
    }
    return AValue(spec, std::move(coords));
  }
  throw InputError("semigroup element: expected \"0\", \"1\" or an array, got " + j.dump());
}

inline json to_json(const AmbientSpace& amb) {
  json legs = json::object();
  for (const auto& [label, twist] : amb.markings()) legs[label] = twist;
  return {{"g", amb.genus()}, {"legs", legs}, {"a", to_json(amb.value())}, {"semigroup", amb.spec().name()}};
}

/// `fallback` is used when the object carries no "semigroup" field.
inline AmbientSpace ambient_from_json(const json& j, const SemigroupSpec& fallback = SemigroupSpec::a0()) {
  if (!j.is_object()) throw InputError("ambient: expected an object");
  SemigroupSpec spec = j.contains("semigroup") ? SemigroupSpec::parse(detail::get_field<std::string>(j, "semigroup", "ambient"))
                                               : fallback;
  std::map<std::string, int> legs;
  if (j.contains("legs")) {
    if (!j["legs"].is_object()) throw InputError("ambient: 'legs' must map labels to twists");
    for (const auto& [label, twist] : j["legs"].items()) {
      if (!twist.is_number_integer()) throw InputError("ambient: twist of '" + label + "' must be an integer");
      legs[label] = twist.get<int>();
    }
  }
  if (!j.contains("a")) throw InputError("ambient: missing field 'a'");
  return AmbientSpace(detail::get_field<int>(j, "g", "ambient"), std::move(legs), avalue_from_json(j["a"], spec));
}

// ---------------------------------------------------------------------------
// Graphs and decorations

inline json to_json(const TwistedGraph& g) {
  json vertices = json::array(), half_edges = json::array(), edges = json::array(), legs = json::object();
  for (const auto& v : g.vertices) vertices.push_back({{"g", v.genus}, {"a", to_json(v.value)}});
  for (const auto& h : g.half_edges) half_edges.push_back({{"v", h.vertex}, {"m", h.twist}});
  for (auto [h1, h2] : g.edges()) edges.push_back(json::array({h1, h2}));
  for (const auto& [label, h] : g.legs) legs[label] = h;
  return {{"vertices", vertices}, {"half_edges", half_edges}, {"edges", edges}, {"legs", legs}};
}

inline TwistedGraph graph_from_json(const json& j, const SemigroupSpec& spec) {
  if (!j.is_object()) throw InputError("graph: expected an object");
  TwistedGraph g;
  for (const auto& v : detail::get_field<json>(j, "vertices", "graph")) {
    if (!v.contains("a")) throw InputError("graph: vertex without 'a'");
    g.vertices.push_back({detail::get_field<int>(v, "g", "graph vertex"), avalue_from_json(v["a"], spec)});
  }
  for (const auto& h : detail::get_field<json>(j, "half_edges", "graph"))
    g.half_edges.push_back({detail::get_field<int>(h, "v", "graph half-edge"), detail::get_field<int>(h, "m", "graph half-edge")});
  const int n = g.num_half_edges();
  g.involution.assign(n, -1);
  auto check = [&](int h) {
    if (h < 0 || h >= n) throw InputError("graph: half-edge index " + std::to_string(h) + " out of range");
    if (g.involution[h] != -1) throw InputError("graph: half-edge " + std::to_string(h) + " used twice");
  };
  if (j.contains("edges")) {
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() != 2) throw InputError("graph: each edge must be a pair of half-edges");
      int h1 = e[0].get<int>(), h2 = e[1].get<int>();
      check(h1);
      check(h2);
      if (h1 == h2) throw InputError("graph: edge joins half-edge " + std::to_string(h1) + " to itself");
      g.involution[h1] = h2;
      g.involution[h2] = h1;
    }
  }
  if (j.contains("legs")) {
    for (const auto& [label, h] : j["legs"].items()) {
      int hh = h.get<int>();
      check(hh);
      g.involution[hh] = hh;
      g.legs[label] = hh;
    }
  }
  for (int h = 0; h < n; ++h)
    if (g.involution[h] == -1) throw InputError("graph: half-edge " + std::to_string(h) + " is neither a leg nor on an edge");
  if (auto problem = structural_problem(g)) throw InputError("graph: " + *problem);
  return g;
}

inline json to_json(const Decoration& d) {
  json out = json::object();
  if (!d.psi.empty()) {
    json psi = json::object();
    for (const auto& [h, e] : d.psi) psi[std::to_string(h)] = e;
    out["psi"] = psi;
  }
  if (!d.kappa.empty()) {
    json kappa = json::object();
    for (const auto& [vj, e] : d.kappa) kappa[std::to_string(vj.first)][std::to_string(vj.second)] = e;
    out["kappa"] = kappa;
  }
  if (!d.kappa0.empty()) {
    json k0 = json::object();
    for (const auto& [v, e] : d.kappa0) k0[std::to_string(v)] = e;
    out["kappa0"] = k0;
  }
  return out;
}

inline Decoration decoration_from_json(const json& j) {
  Decoration d;
  if (j.is_null()) return d;
  if (!j.is_object()) throw InputError("decoration: expected an object");
  auto exponent = [](const json& e) {
    if (!e.is_number_integer() || e.get<int>() < 0) throw InputError("decoration: exponents must be nonnegative integers");
    return e.get<int>();
  };
  if (j.contains("psi"))
    for (const auto& [h, e] : j["psi"].items()) d.multiply_psi(detail::parse_index(h, "decoration psi"), exponent(e));
  if (j.contains("kappa"))
    for (const auto& [v, per] : j["kappa"].items())
      for (const auto& [jj, e] : per.items())
        d.multiply_kappa(detail::parse_index(v, "decoration kappa"), detail::parse_index(jj, "decoration kappa"), exponent(e));
  if (j.contains("kappa0"))
    for (const auto& [v, e] : j["kappa0"].items()) d.multiply_kappa(detail::parse_index(v, "decoration kappa0"), 0, exponent(e));
  return d;
}

// ---------------------------------------------------------------------------
// Classes

inline json to_json(const TautClass& x) {
  json terms = json::array();
  for (const auto& [key, term] : x.terms())
    terms.push_back({{"coeff", to_string(term.coeff)},
                     {"codim", term.stratum.codim()},
                     {"graph", to_json(term.stratum.graph())},
                     {"decoration", to_json(term.stratum.decoration())}});
  return {{"ambient", to_json(x.ambient())}, {"terms", terms}};
}

inline Rational coeff_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  throw InputError("coefficient must be a string \"p/q\" or an integer");
}

/// Reads {"ambient", "terms"}; the ambient comes from the document unless
/// `ambient` is given, in which case a document ambient must agree with it.
inline TautClass class_from_json(const json& j, const std::optional<AmbientSpace>& ambient = std::nullopt,
                                 const SemigroupSpec& fallback = SemigroupSpec::a0()) {
  if (!j.is_object() || !j.contains("terms")) throw InputError("class: expected an object with 'terms'");
  std::optional<AmbientSpace> amb = ambient;
  if (j.contains("ambient")) {
    AmbientSpace declared = ambient_from_json(j["ambient"], ambient ? ambient->spec() : fallback);
    if (amb && *amb != declared)
      throw AmbientMismatch("class file declares " + declared.to_string() + " but the ambient is " + amb->to_string());
    amb = declared;
  }
  if (!amb) throw InputError("class: no ambient space given (use --ambient or an 'ambient' field)");
  TautClass out(*amb);
  for (const auto& t : j["terms"]) {
    if (!t.contains("graph")) throw InputError("class term: missing 'graph'");
    TwistedGraph g = graph_from_json(t["graph"], amb->spec());
    Decoration d = decoration_from_json(t.contains("decoration") ? t["decoration"] : json());
    Rational c = t.contains("coeff") ? coeff_from_json(t["coeff"]) : Rational(1);
    out += make_class(g, d, *amb, c);
  }
  return out;
}

inline json to_json(const AStructure& f) { return {{"vertex_map", f.vertex_map}, {"half_edge_map", f.half_edge_map}}; }

inline AStructure structure_from_json(const json& j) {
  return {detail::get_field<std::vector<int>>(j, "vertex_map", "structure"),
          detail::get_field<std::vector<int>>(j, "half_edge_map", "structure")};
}

inline json to_json(const GenericPair& p) {
  json common = json::array();
  for (auto [h1, h2] : p.common_edges) common.push_back(json::array({h1, h2}));
  return {{"graph", to_json(p.graph)}, {"to_a", to_json(p.to_a)}, {"to_b", to_json(p.to_b)}, {"common_edges", common}};
}

inline json to_json(const DecorationSum& s) {
  json out = json::array();
  for (const auto& [d, c] : s) out.push_back({{"coeff", to_string(c)}, {"decoration", to_json(d)}});
  return out;
}

// ---------------------------------------------------------------------------
// Text rendering

inline std::string describe(const TwistedGraph& g) {
  std::ostringstream out;
  out << "V:";
  for (int v = 0; v < g.num_vertices(); ++v)
    out << (v ? " " : "") << "v" << v << "(g=" << g.vertices[v].genus << ",a=" << g.vertices[v].value.to_string() << ")";
  auto edges = g.edges();
  if (!edges.empty()) {
    out << " E:";
    for (auto [h1, h2] : edges)
      out << " v" << g.half_edges[h1].vertex << "-v" << g.half_edges[h2].vertex << "[h" << h1 << ",h" << h2
          << ";m=" << g.half_edges[h1].twist << "]";
  }
  if (!g.legs.empty()) {
    out << " L:";
    for (const auto& [label, h] : g.legs)
      out << " " << label << "@v" << g.half_edges[h].vertex << "[h" << h << ";m=" << g.half_edges[h].twist << "]";
  }
  return out.str();
}

inline std::string describe(const Decoration& d) {
  if (d.is_one()) return "1";
  std::ostringstream out;
  bool first = true;
  auto sep = [&] {
    if (!first) out << "*";
    first = false;
  };
  for (const auto& [h, e] : d.psi) {
    sep();
    out << "psi(h" << h << ")";
    if (e > 1) out << "^" << e;
  }
  for (const auto& [vj, e] : d.kappa) {
    sep();
    out << "kappa" << vj.second << "(v" << vj.first << ")";
    if (e > 1) out << "^" << e;
  }
  for (const auto& [v, e] : d.kappa0) {
    sep();
    out << "kappa0(v" << v << ")";
    if (e > 1) out << "^" << e;
  }
  return out.str();
}

inline std::string describe(const TautClass& x) {
  std::ostringstream out;
  out << "ambient " << x.ambient().to_string() << "\n";
  if (x.empty()) out << "0\n";
  for (const auto& [key, term] : x.terms())
    out << to_string(term.coeff) << " * [" << describe(term.stratum.graph()) << " | " << describe(term.stratum.decoration())
        << "]  codim " << term.stratum.codim() << "\n";
  return out.str();
}

}  // namespace twisted_strata
