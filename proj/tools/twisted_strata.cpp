// twisted-strata: command-line front end for the tautological calculus.
//
// Exit status: 0 success, 1 domain error (invalid graph, mismatched spaces,
// failed selfcheck), 2 usage or input error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "twisted_strata/twisted_strata.hpp"
#include "twisted_strata/testing/acceptance.hpp"

namespace ts = twisted_strata;
using ts::json;

namespace {

struct Options {
  std::string kappa0 = "formal";
  std::string semigroup = "a0";
  std::string format = "json";
  int jobs = 1;

  std::string ambient_file;
  std::optional<int> genus;
  std::string legs;
  std::string value;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ts::InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ts::InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

ts::SemigroupSpec spec_of(const Options& o) { return ts::SemigroupSpec::parse(o.semigroup); }

/// "1:1,2:3" -> {1:1, 2:3}
std::map<std::string, int> parse_legs(const std::string& text) {
  std::map<std::string, int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto colon = item.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == item.size())
      throw ts::InputError("leg spec '" + item + "' is not label:twist");
    std::string twist = item.substr(colon + 1);
    if (twist.find_first_not_of("0123456789") != std::string::npos) throw ts::InputError("leg twist '" + twist + "' is not an integer");
    if (!out.emplace(item.substr(0, colon), std::stoi(twist)).second)
      throw ts::InputError("leg label '" + item.substr(0, colon) + "' repeated");
  }
  return out;
}

/// The ambient from --ambient or from --g/--legs/--a; nullopt when neither is given.
std::optional<ts::AmbientSpace> flag_ambient(const Options& o) {
  bool inline_flags = o.genus || !o.legs.empty() || !o.value.empty();
  if (!o.ambient_file.empty()) {
    if (inline_flags) throw ts::InputError("give either --ambient or --g/--legs/--a, not both");
    return ts::ambient_from_json(read_json_file(o.ambient_file), spec_of(o));
  }
  if (!inline_flags) return std::nullopt;
  if (!o.genus) throw ts::InputError("--g is required with --legs/--a");
  if (o.value.empty()) throw ts::InputError("--a is required with --g");
  ts::SemigroupSpec spec = spec_of(o);
  return ts::AmbientSpace(*o.genus, parse_legs(o.legs), ts::parse_avalue(o.value, spec));
}

ts::AmbientSpace require_ambient(const Options& o) {
  auto amb = flag_ambient(o);
  if (!amb) throw ts::InputError("an ambient space is required (--ambient FILE or --g/--legs/--a)");
  return *amb;
}

ts::TautClass read_class(const std::string& path, const Options& o, const std::optional<ts::AmbientSpace>& ambient) {
  return ts::class_from_json(read_json_file(path), ambient, spec_of(o));
}

/// A graph file: either a bare graph or {"graph": ..., "decoration": ...}.
std::pair<ts::TwistedGraph, ts::Decoration> read_stratum(const std::string& path, const ts::SemigroupSpec& spec) {
  json j = read_json_file(path);
  if (j.contains("graph"))
    return {ts::graph_from_json(j["graph"], spec), ts::decoration_from_json(j.contains("decoration") ? j["decoration"] : json())};
  return {ts::graph_from_json(j, spec), {}};
}

void emit_class(ts::TautClass x, const Options& o) {
  if (o.kappa0 == "substitute") x = ts::substitute_kappa0(x);
  if (o.format == "text")
    std::cout << ts::describe(x);
  else
    std::cout << ts::to_json(x).dump(2) << "\n";
}

int run_validate(const std::string& path, const Options& o) {
  ts::AmbientSpace amb = require_ambient(o);
  auto [g, d] = read_stratum(path, amb.spec());
  auto report = ts::validate(g, amb);
  if (report.ok())
    if (auto p = ts::decoration_problem(d, g)) report.violations.push_back({ts::ViolationKind::malformed, *p});
  if (o.format == "json") {
    json problems = json::array();
    for (const auto& v : report.violations) problems.push_back({{"kind", ts::to_string(v.kind)}, {"message", v.message}});
    std::cout << json{{"ok", report.ok()}, {"violations", problems}}.dump(2) << "\n";
  } else {
    std::cout << (report.ok() ? "ok" : report.to_string()) << "\n";
  }
  return report.ok() ? 0 : 1;
}

int run_canon(const std::string& path, const Options& o) {
  auto amb = flag_ambient(o);
  auto [g, d] = read_stratum(path, amb ? amb->spec() : spec_of(o));
  if (amb) ts::require_valid(g, *amb);
  auto s = ts::DecoratedStratum::make(g, d);
  if (o.format == "text") {
    std::cout << "key " << s.key() << "\nautomorphisms " << s.automorphisms() << "\ncodim " << s.codim() << "\n"
              << ts::describe(s.graph()) << " | " << ts::describe(s.decoration()) << "\n";
  } else {
    std::cout << json{{"key", s.key()},
                      {"automorphisms", s.automorphisms()},
                      {"codim", s.codim()},
                      {"graph", ts::to_json(s.graph())},
                      {"decoration", ts::to_json(s.decoration())}}
                     .dump(2)
              << "\n";
  }
  return 0;
}

int run_pull(const std::string& path, const Options& o) {
  json j = read_json_file(path);
  auto amb = flag_ambient(o);
  ts::SemigroupSpec spec = amb ? amb->spec() : spec_of(o);
  for (const char* field : {"source", "target", "structure"})
    if (!j.contains(field)) throw ts::InputError(std::string("pull: missing field '") + field + "'");
  ts::TwistedGraph source = ts::graph_from_json(j["source"], spec);
  ts::TwistedGraph target = ts::graph_from_json(j["target"], spec);
  if (amb) {
    ts::require_valid(source, *amb);
    ts::require_valid(target, *amb);
  }
  ts::AStructure f = ts::structure_from_json(j["structure"]);
  if (auto problem = ts::structure_problem(source, target, f)) throw ts::DomainError("not an A-structure: " + *problem);
  ts::Decoration alpha = ts::decoration_from_json(j.contains("decoration") ? j["decoration"] : json());
  if (auto problem = ts::decoration_problem(alpha, target)) throw ts::DomainError("decoration on target: " + *problem);
  ts::DecorationSum pulled = ts::pullback_gluing(source, target, f, alpha);
  if (o.format == "text") {
    std::cout << ts::describe(source) << "\n";
    for (const auto& [d, c] : pulled) std::cout << ts::to_string(c) << " * " << ts::describe(d) << "\n";
  } else {
    std::cout << json{{"graph", ts::to_json(source)}, {"terms", ts::to_json(pulled)}}.dump(2) << "\n";
  }
  return 0;
}

int run_enumerate(const Options& o, const ts::EnumBounds& bounds, std::optional<int> codim) {
  ts::AmbientSpace amb = require_ambient(o);
  auto line = [&](const ts::TwistedGraph& g, const ts::Decoration* d, const std::string& key) {
    if (o.format == "text") {
      std::cout << ts::describe(g);
      if (d) std::cout << " | " << ts::describe(*d);
      std::cout << "\n";
      return;
    }
    json j{{"key", key}, {"graph", ts::to_json(g)}};
    if (d) j["decoration"] = ts::to_json(*d);
    std::cout << j.dump() << "\n";
  };
  if (codim) {
    if (*codim < 0) throw ts::InputError("--codim must be nonnegative");
    for (const auto& s : ts::enumerate_strata(amb, bounds, *codim)) line(s.graph(), &s.decoration(), s.key());
  } else {
    for (const auto& g : ts::enumerate_graphs(amb, bounds)) line(g, nullptr, ts::canonical_form(g).key);
  }
  return 0;
}

int run_selfcheck(const std::string& size, std::optional<std::uint64_t> seed_flag) {
  namespace tt = ts::testing;
  const std::uint64_t seed = seed_flag ? *seed_flag : tt::seed_from_env();
  auto sizes = size == "full" ? tt::AcceptanceSizes::full() : tt::AcceptanceSizes::small();
  std::printf("selfcheck (%s), seed %llu\n", size.c_str(), static_cast<unsigned long long>(seed));
  bool ok = true;
  for (const auto& r : tt::run_acceptance(seed, sizes)) {
    std::printf("  %d  %-4s  %s\n       %s\n", r.id, r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    ok = ok && r.pass;
  }
  std::printf("%s\n", ok ? "all criteria passed" : "selfcheck FAILED");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic calculus of decorated strata on moduli of twisted curves"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--kappa0", o.kappa0, "kappa_0 handling")->check(CLI::IsMember({"formal", "substitute"}));
  app.add_option("--semigroup", o.semigroup, "valuation semigroup: a0 or free:k");
  app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--jobs", o.jobs, "worker threads for products")->check(CLI::PositiveNumber);
  app.add_option("--ambient", o.ambient_file, "ambient space JSON file");
  app.add_option("--g", o.genus, "ambient genus");
  app.add_option("--legs", o.legs, "marking twists, e.g. 1:1,2:3");
  app.add_option("--a", o.value, "ambient value (0/1/zero/one, or c1,c2 for free:k)");

  std::string path, path2, point = ts::kBullet, expression, size = "small";
  std::vector<std::string> pieces, binds;
  std::optional<std::uint64_t> seed;
  ts::EnumBounds bounds;
  std::optional<int> codim;

  auto* validate = app.add_subcommand("validate", "check a graph against the ambient space");
  validate->add_option("graph", path, "graph JSON")->required();
  auto* canon = app.add_subcommand("canon", "canonical key and automorphism count");
  canon->add_option("stratum", path, "graph or {graph, decoration} JSON")->required();
  auto* prod = app.add_subcommand("product", "intersection product of two classes");
  prod->add_option("x", path, "class JSON")->required();
  prod->add_option("y", path2, "class JSON")->required();
  auto* glue = app.add_subcommand("pushglue", "pushforward along a gluing map");
  glue->add_option("skeleton", path, "skeleton graph JSON")->required();
  glue->add_option("pieces", pieces, "one class JSON per skeleton vertex");
  auto* forget = app.add_subcommand("pushforget", "pushforward along forgetting a point");
  forget->add_option("x", path, "class JSON on the space with the point")->required();
  forget->add_option("--point", point, "label of the forgotten point");
  auto* pull = app.add_subcommand("pull", "pull a decoration back along an A-structure");
  pull->add_option("structure", path, "{source, target, structure, decoration} JSON")->required();
  auto* restrict = app.add_subcommand("restrict", "restrict to the open part where no vertex has value 0");
  restrict->add_option("x", path, "class JSON")->required();
  auto* enumerate = app.add_subcommand("enumerate", "list graphs or decorated strata within bounds");
  enumerate->add_option("--max-edges", bounds.max_edges)->required();
  enumerate->add_option("--twist-bound", bounds.twist_bound)->required();
  enumerate->add_option("--max-degree", bounds.max_decoration_degree, "bound on decoration degree (strata only)");
  enumerate->add_option("--codim", codim, "list decorated strata of this codimension");
  auto* selfcheck = app.add_subcommand("selfcheck", "run the acceptance criteria");
  selfcheck->add_option("--size", size)->check(CLI::IsMember({"small", "full"}));
  selfcheck->add_option("--seed", seed, "overrides TWISTED_STRATA_SEED");
  auto* eval = app.add_subcommand("eval", "evaluate a class expression");
  eval->add_option("expression", expression)->required();
  eval->add_option("--bind", binds, "NAME=file.json (class or graph)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (codim && !enumerate->count("--max-degree")) bounds.max_decoration_degree = *codim;

    if (*validate) return run_validate(path, o);
    if (*canon) return run_canon(path, o);
    if (*pull) return run_pull(path, o);
    if (*enumerate) return run_enumerate(o, bounds, codim);
    if (*selfcheck) return run_selfcheck(size, seed);

    auto amb = flag_ambient(o);
    if (*prod) {
      ts::TautClass x = read_class(path, o, amb);
      ts::TautClass y = read_class(path2, o, amb ? amb : std::optional(x.ambient()));
      emit_class(ts::product(x, y, o.jobs), o);
    } else if (*glue) {
      ts::AmbientSpace target = require_ambient(o);
      auto [skeleton, ignored] = read_stratum(path, target.spec());
      ts::require_valid(skeleton, target);
      if (static_cast<int>(pieces.size()) != skeleton.num_vertices())
        throw ts::InputError("pushglue needs " + std::to_string(skeleton.num_vertices()) + " piece files, got " +
                             std::to_string(pieces.size()));
      std::vector<ts::TautClass> classes;
      for (int v = 0; v < skeleton.num_vertices(); ++v)
        classes.push_back(read_class(pieces[v], o, ts::vertex_ambient(skeleton, v)));
      emit_class(ts::pushforward_gluing(skeleton, target, classes), o);
    } else if (*forget) {
      emit_class(ts::pushforward_forgetful(read_class(path, o, amb), point), o);
    } else if (*restrict) {
      emit_class(ts::restrict_to_unvalued(read_class(path, o, amb)), o);
    } else if (*eval) {
      ts::AmbientSpace target = require_ambient(o);
      ts::Bindings bindings;
      for (const auto& b : binds) {
        auto eq = b.find('=');
        if (eq == std::string::npos || eq == 0) throw ts::InputError("--bind expects NAME=file.json, got '" + b + "'");
        std::string name = b.substr(0, eq);
        json j = read_json_file(b.substr(eq + 1));
        if (j.contains("terms"))
          bindings.classes.emplace(name, ts::class_from_json(j, std::nullopt, target.spec()));
        else
          bindings.graphs.emplace(name, ts::graph_from_json(j.contains("graph") ? j["graph"] : j, target.spec()));
      }
      emit_class(ts::parse_class_expr(expression, target, bindings, o.jobs), o);
    }
    return 0;
  } catch (const ts::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << "\n";
    return 2;
  } catch (const ts::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
