#pragma once

#include <algorithm>
#include <compare>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace twisted_strata {

/// The valuation semigroup: either the two-element semigroup {0, 1} with
/// 1 absorbing everything nonzero, or the free commutative monoid N^rank.
/// Both have an indecomposable zero and finite decomposition.
class SemigroupSpec {
 public:
  enum class Kind { a0, free_monoid };

  static SemigroupSpec a0() { return SemigroupSpec(Kind::a0, 1); }
  static SemigroupSpec free_monoid(int rank) {
    if (rank < 1) throw DomainError("free monoid rank must be positive");
    return SemigroupSpec(Kind::free_monoid, rank);
  }

  /// "a0" or "free:k".
  static SemigroupSpec parse(std::string_view text) {
    if (text == "a0" || text == "A0") return a0();
    if (text.starts_with("free:")) {
      std::string rest(text.substr(5));
      if (rest.empty() || !std::all_of(rest.begin(), rest.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw InputError("malformed semigroup '" + std::string(text) + "'");
      return free_monoid(std::stoi(rest));
    }
    throw InputError("unknown semigroup '" + std::string(text) + "' (expected a0 or free:k)");
  }

  Kind kind() const { return kind_; }
  int rank() const { return rank_; }
  std::string name() const { return kind_ == Kind::a0 ? "a0" : "free:" + std::to_string(rank_); }

  friend bool operator==(const SemigroupSpec&, const SemigroupSpec&) = default;
  friend auto operator<=>(const SemigroupSpec&, const SemigroupSpec&) = default;

 private:
  SemigroupSpec(Kind kind, int rank) : kind_(kind), rank_(rank) {}

  Kind kind_;
  int rank_;
};

/// An element of a SemigroupSpec. For A0 the payload is {0} or {1}; for
/// FreeMonoid(k) it is a k-tuple of nonnegative integers.
class AValue {
 public:
  AValue() : spec_(SemigroupSpec::a0()), coords_{0} {}

  AValue(SemigroupSpec spec, std::vector<int> coords) : spec_(spec), coords_(std::move(coords)) {
    if (static_cast<int>(coords_.size()) != spec_.rank())
      throw DomainError("semigroup element has " + std::to_string(coords_.size()) + " coordinates, expected " +
                        std::to_string(spec_.rank()));
    for (int c : coords_) {
      if (c < 0) throw DomainError("semigroup element has a negative coordinate");
      if (spec_.kind() == SemigroupSpec::Kind::a0 && c > 1) throw DomainError("A0 element must be 0 or 1");
    }
  }

  static AValue zero(SemigroupSpec spec) { return AValue(spec, std::vector<int>(spec.rank(), 0)); }
  static AValue one() { return AValue(SemigroupSpec::a0(), {1}); }

  const SemigroupSpec& spec() const { return spec_; }
  std::span<const int> coords() const { return coords_; }
  bool is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](int c) { return c == 0; });
  }

  /// "0"/"1" for A0, "(c1,...,ck)" for free monoids.
  std::string to_string() const {
    if (spec_.kind() == SemigroupSpec::Kind::a0) return coords_[0] ? "1" : "0";
    std::string out = "(";
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(coords_[i]);
    }
    return out + ")";
  }

  friend bool operator==(const AValue&, const AValue&) = default;
  friend auto operator<=>(const AValue&, const AValue&) = default;

 private:
  SemigroupSpec spec_;
  std::vector<int> coords_;
};

inline AValue operator+(const AValue& a, const AValue& b) {
  if (a.spec() != b.spec())
    throw SpecMismatch("cannot add elements of " + a.spec().name() + " and " + b.spec().name());
  std::vector<int> out(a.coords().begin(), a.coords().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (a.spec().kind() == SemigroupSpec::Kind::a0)
      out[i] = std::max(out[i], b.coords()[i]);
    else
      out[i] += b.coords()[i];
  }
  return AValue(a.spec(), std::move(out));
}

/// Every ordered `parts`-tuple summing to `a`, in lexicographic order.
inline std::vector<std::vector<AValue>> decompose(const AValue& a, int parts) {
  if (parts < 1) throw DomainError("decompose needs at least one part");
  const SemigroupSpec spec = a.spec();
  // Candidate summands: anything that can appear in a decomposition of a.
  std::vector<AValue> candidates;
  if (spec.kind() == SemigroupSpec::Kind::a0) {
    candidates.push_back(AValue::zero(spec));
    if (!a.is_zero()) candidates.push_back(a);
  } else {
    // Coordinates of a summand are bounded by the target's coordinates.
    std::vector<int> c(spec.rank(), 0);
    while (true) {
      candidates.emplace_back(spec, c);
      int i = spec.rank() - 1;
      while (i >= 0 && c[i] == a.coords()[i]) c[i--] = 0;
      if (i < 0) break;
      ++c[i];
    }
  }
  std::vector<std::vector<AValue>> out;
  std::vector<AValue> current;
  auto recurse = [&](auto&& self, const AValue& partial) -> void {
    if (static_cast<int>(current.size()) == parts) {
      if (partial == a) out.push_back(current);
      return;
    }
    for (const AValue& c : candidates) {
      AValue next = current.empty() ? c : partial + c;
      // Prune: the partial sum must stay below a coordinatewise.
      bool fits = true;
      for (int i = 0; i < spec.rank(); ++i) fits = fits && next.coords()[i] <= a.coords()[i];
      if (!fits) continue;
      current.push_back(c);
      self(self, next);
      current.pop_back();
    }
  };
  recurse(recurse, AValue::zero(spec));
  return out;
}

/// Parses "0"/"1"/"zero"/"one" for A0, or "c1,c2,..." / "(c1,...)" for free monoids.
inline AValue parse_avalue(std::string_view text, const SemigroupSpec& spec) {
  if (spec.kind() == SemigroupSpec::Kind::a0) {
    if (text == "0" || text == "zero") return AValue::zero(spec);
    if (text == "1" || text == "one") return AValue::one();
    throw InputError("A0 value must be 0 or 1, got '" + std::string(text) + "'");
  }
  std::string body(text);
  if (!body.empty() && (body.front() == '(' || body.front() == '[')) body = body.substr(1);
  if (!body.empty() && (body.back() == ')' || body.back() == ']')) body.pop_back();
  std::vector<int> coords;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    auto comma = body.find(',', pos);
    std::string item = body.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (item.empty() || !std::all_of(item.begin(), item.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw InputError("malformed free-monoid value '" + std::string(text) + "'");
    coords.push_back(std::stoi(item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  try {
    return AValue(spec, std::move(coords));
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

}  // namespace twisted_strata
