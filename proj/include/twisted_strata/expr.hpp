#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "calculus.hpp"
#include "errors.hpp"
#include "rational.hpp"
#include "strata.hpp"

namespace twisted_strata {

/// Malformed expression text; `position` is a byte offset into the input.
class ExprSyntaxError : public InputError {
 public:
  ExprSyntaxError(const std::string& message, std::size_t position)
      : InputError("syntax error at position " + std::to_string(position) + ": " + message), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Names usable in expressions: classes, and graphs (skeletons for pushglue,
/// or the undecorated stratum class when used as a value).
struct Bindings {
  std::map<std::string, TautClass> classes;
  std::map<std::string, TwistedGraph> graphs;
};

namespace expr {

struct Node;
using NodePtr = std::unique_ptr<Node>;

struct Node {
  enum class Kind { number, name, psi, kappa, add, sub, mul, pow, neg, pushglue, pushforget, restrict };
  Kind kind;
  std::size_t position = 0;
  Rational number;
  std::string text;  // name, psi label, pushglue skeleton or forgotten label
  int integer = 0;   // kappa index or exponent
  std::vector<NodePtr> args;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr out = sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ExprSyntaxError(message, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  static NodePtr make(Node::Kind kind, std::size_t position) {
    auto n = std::make_unique<Node>();
    n->kind = kind;
    n->position = position;
    return n;
  }

  NodePtr sum() {
    NodePtr left = product();
    while (true) {
      skip_space();
      std::size_t at = pos_;
      Node::Kind kind;
      if (accept('+'))
        kind = Node::Kind::add;
      else if (accept('-'))
        kind = Node::Kind::sub;
      else
        return left;
      NodePtr n = make(kind, at);
      n->args.push_back(std::move(left));
      n->args.push_back(product());
      left = std::move(n);
    }
  }

  NodePtr product() {
    NodePtr left = unary();
    while (true) {
      skip_space();
      std::size_t at = pos_;
      if (!accept('*')) return left;
      NodePtr n = make(Node::Kind::mul, at);
      n->args.push_back(std::move(left));
      n->args.push_back(unary());
      left = std::move(n);
    }
  }

  NodePtr unary() {
    skip_space();
    std::size_t at = pos_;
    if (accept('-')) {
      NodePtr n = make(Node::Kind::neg, at);
      n->args.push_back(unary());
      return n;
    }
    return power();
  }

  NodePtr power() {
    NodePtr left = primary();
    while (true) {
      skip_space();
      std::size_t at = pos_;
      if (!accept('^')) return left;
      skip_space();
      NodePtr n = make(Node::Kind::pow, at);
      n->integer = integer("exponent");
      n->args.push_back(std::move(left));
      left = std::move(n);
    }
  }

  int integer(const char* what) {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail(std::string("expected a nonnegative integer ") + what);
    if (pos_ - start > 6) fail(std::string(what) + " too large");
    return std::stoi(std::string(text_.substr(start, pos_ - start)));
  }

  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || static_cast<unsigned char>(c) >= 0x80;
  }

  std::string identifier() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && name_char(text_[pos_])) ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  /// A marking label: a name, or a quoted string.
  std::string label() {
    skip_space();
    if (accept('"')) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] != '"') ++pos_;
      if (pos_ == text_.size()) fail("unterminated string");
      std::string out(text_.substr(start, pos_ - start));
      ++pos_;
      return out;
    }
    return identifier();
  }

  NodePtr primary() {
    skip_space();
    std::size_t at = pos_;
    if (pos_ == text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = sum();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '/') {
        ++pos_;
        std::size_t den = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (den == pos_) fail("expected a denominator");
      }
      NodePtr n = make(Node::Kind::number, at);
      try {
        n->number = parse_rational(text_.substr(start, pos_ - start));
      } catch (const InputError& e) {
        throw ExprSyntaxError(e.what(), start);
      }
      return n;
    }
    if (!name_char(c)) fail("unexpected '" + std::string(1, c) + "'");
    std::string id = identifier();
    skip_space();
    bool call = pos_ < text_.size() && text_[pos_] == '(';
    if (!call) {
      NodePtr n = make(Node::Kind::name, at);
      n->text = id;
      return n;
    }
    ++pos_;
    NodePtr n;
    if (id == "psi") {
      n = make(Node::Kind::psi, at);
      n->text = label();
    } else if (id == "kappa") {
      n = make(Node::Kind::kappa, at);
      n->integer = integer("kappa index");
    } else if (id == "pushglue") {
      n = make(Node::Kind::pushglue, at);
      n->text = identifier();
      while (accept(',')) n->args.push_back(sum());
    } else if (id == "pushforget") {
      n = make(Node::Kind::pushforget, at);
      n->args.push_back(sum());
      n->text = accept(',') ? label() : kBullet;
    } else if (id == "restrict") {
      n = make(Node::Kind::restrict, at);
      n->args.push_back(sum());
    } else {
      pos_ = at;
      fail("unknown function '" + id + "'");
    }
    expect(')');
    return n;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

/// A scalar stays a scalar until it meets a class, so literals need no ambient.
using Value = std::variant<Rational, TautClass>;

class Evaluator {
 public:
  Evaluator(const Bindings& bindings, int jobs) : bindings_(bindings), jobs_(jobs) {}

  TautClass as_class(const Value& v, const AmbientSpace& ambient) const {
    if (const auto* q = std::get_if<Rational>(&v)) return TautClass::fundamental(ambient) * *q;
    return std::get<TautClass>(v);
  }

  Value eval(const Node& n, const AmbientSpace& ambient) const {
    try {
      return eval_inner(n, ambient);
    } catch (const ExprSyntaxError&) {
      throw;
    } catch (const AmbientMismatch& e) {
      throw AmbientMismatch(std::string(e.what()) + " (at position " + std::to_string(n.position) + ")");
    }
  }

 private:
  Value combine(const Value& a, const Value& b, Node::Kind kind, const AmbientSpace& ambient) const {
    const auto* qa = std::get_if<Rational>(&a);
    const auto* qb = std::get_if<Rational>(&b);
    if (qa && qb) {
      if (kind == Node::Kind::add) return *qa + *qb;
      if (kind == Node::Kind::sub) return *qa - *qb;
      return Rational(*qa * *qb);
    }
    if (kind == Node::Kind::mul) {
      if (qa) return std::get<TautClass>(b) * *qa;
      if (qb) return std::get<TautClass>(a) * *qb;
      return product(std::get<TautClass>(a), std::get<TautClass>(b), jobs_);
    }
    const AmbientSpace& amb = qa ? std::get<TautClass>(b).ambient() : std::get<TautClass>(a).ambient();
    TautClass ca = as_class(a, qa ? amb : ambient), cb = as_class(b, qb ? amb : ambient);
    return kind == Node::Kind::add ? ca + cb : ca - cb;
  }

  Value eval_inner(const Node& n, const AmbientSpace& ambient) const {
    switch (n.kind) {
      case Node::Kind::number:
        return n.number;
      case Node::Kind::name: {
        if (auto it = bindings_.classes.find(n.text); it != bindings_.classes.end()) return it->second;
        if (auto it = bindings_.graphs.find(n.text); it != bindings_.graphs.end())
          return make_class(it->second, {}, ambient);
        throw InputError("unbound name '" + n.text + "' at position " + std::to_string(n.position));
      }
      case Node::Kind::psi:
        return psi_class(ambient, n.text);
      case Node::Kind::kappa:
        return kappa_class(ambient, n.integer);
      case Node::Kind::add:
      case Node::Kind::sub:
      case Node::Kind::mul:
        return combine(eval(*n.args[0], ambient), eval(*n.args[1], ambient), n.kind, ambient);
      case Node::Kind::neg: {
        Value v = eval(*n.args[0], ambient);
        if (auto* q = std::get_if<Rational>(&v)) return Rational(-*q);
        return -std::get<TautClass>(v);
      }
      case Node::Kind::pow: {
        Value base = eval(*n.args[0], ambient);
        if (auto* q = std::get_if<Rational>(&base)) {
          Rational out(1);
          for (int i = 0; i < n.integer; ++i) out *= *q;
          return out;
        }
        const auto& c = std::get<TautClass>(base);
        TautClass out = TautClass::fundamental(c.ambient());
        for (int i = 0; i < n.integer; ++i) out = product(out, c, jobs_);
        return out;
      }
      case Node::Kind::pushglue: {
        auto it = bindings_.graphs.find(n.text);
        if (it == bindings_.graphs.end())
          throw InputError("pushglue: '" + n.text + "' is not bound to a graph (position " + std::to_string(n.position) + ")");
        const TwistedGraph& skeleton = it->second;
        if (static_cast<int>(n.args.size()) != skeleton.num_vertices())
          throw DomainError("pushglue: skeleton '" + n.text + "' has " + std::to_string(skeleton.num_vertices()) +
                            " vertices but " + std::to_string(n.args.size()) + " classes were given");
        std::vector<TautClass> pieces;
        for (int v = 0; v < skeleton.num_vertices(); ++v) {
          AmbientSpace piece_ambient = vertex_ambient(skeleton, v);
          pieces.push_back(as_class(eval(*n.args[v], piece_ambient), piece_ambient));
        }
        return pushforward_gluing(skeleton, ambient, pieces);
      }
      case Node::Kind::pushforget: {
        AmbientSpace extended = ambient.with_marking(n.text, 1);
        TautClass inner = as_class(eval(*n.args[0], extended), extended);
        TautClass out = pushforward_forgetful(inner, n.text);
        out.require_same_ambient(TautClass(ambient));
        return out;
      }
      case Node::Kind::restrict:
        return restrict_to_unvalued(as_class(eval(*n.args[0], ambient), ambient));
    }
    throw InputError("unknown expression node");
  }

  const Bindings& bindings_;
  int jobs_;
};

}  // namespace expr

/// Parses and evaluates a class expression on `ambient`. Arguments of
/// pushglue(G, x_0, ...) are read on the vertex spaces of G; the argument of
/// pushforget(x, label) is read on the ambient with `label` added.
inline TautClass parse_class_expr(std::string_view text, const AmbientSpace& ambient, const Bindings& bindings = {},
                                  int jobs = 1) {
  expr::NodePtr root = expr::Parser(text).parse();
  expr::Evaluator ev(bindings, jobs);
  TautClass out = ev.as_class(ev.eval(*root, ambient), ambient);
  out.require_same_ambient(TautClass(ambient));
  return out;
}

}  // namespace twisted_strata
