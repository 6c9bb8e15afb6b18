#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "twisted_strata/semigroup.hpp"

using namespace twisted_strata;

namespace {

const SemigroupSpec kA0 = SemigroupSpec::a0();

AValue zero() { return AValue::zero(kA0); }
AValue one() { return AValue::one(); }
AValue fm(std::vector<int> c) {
  auto spec = SemigroupSpec::free_monoid(static_cast<int>(c.size()));
  return AValue(spec, std::move(c));
}

// Every element of `spec` with coordinates at most `bound`.
std::vector<AValue> bounded(const SemigroupSpec& spec, int bound) {
  if (spec.kind() == SemigroupSpec::Kind::a0) return {zero(), one()};
  std::vector<AValue> out;
  std::vector<int> c(spec.rank(), 0);
  while (true) {
    out.emplace_back(spec, c);
    int i = spec.rank() - 1;
    while (i >= 0 && c[i] == bound) c[i--] = 0;
    if (i < 0) break;
    ++c[i];
  }
  return out;
}

std::vector<std::vector<AValue>> brute_decompose(const AValue& a, int parts, const std::vector<AValue>& pool) {
  std::vector<std::vector<AValue>> out;
  std::vector<std::size_t> idx(parts, 0);
  while (true) {
    AValue sum = pool[idx[0]];
    for (int i = 1; i < parts; ++i) sum = sum + pool[idx[i]];
    if (sum == a) {
      std::vector<AValue> t;
      for (auto i : idx) t.push_back(pool[i]);
      out.push_back(t);
    }
    int i = parts - 1;
    while (i >= 0 && idx[i] + 1 == pool.size()) idx[i--] = 0;
    if (i < 0) break;
    ++idx[i];
  }
  return out;
}

}  // namespace

TEST(Semigroup, A0Addition) {
  EXPECT_EQ(zero() + zero(), zero());
  EXPECT_EQ(one() + one(), one());
  EXPECT_EQ(zero() + one(), one());
  EXPECT_EQ(one() + zero(), one());
}

TEST(Semigroup, FreeMonoidAddition) { EXPECT_EQ(fm({1, 0}) + fm({0, 2}), fm({1, 2})); }

TEST(Semigroup, MixedSpecsRefuse) { EXPECT_THROW(one() + fm({1}), SpecMismatch); }

TEST(Semigroup, DecomposeExamples) {
  EXPECT_EQ(decompose(zero(), 2), (std::vector<std::vector<AValue>>{{zero(), zero()}}));
  std::set<std::vector<AValue>> got;
  for (auto& t : decompose(one(), 2)) got.insert(t);
  EXPECT_EQ(got, (std::set<std::vector<AValue>>{{zero(), one()}, {one(), zero()}, {one(), one()}}));
  EXPECT_EQ(decompose(fm({2}), 2),
            (std::vector<std::vector<AValue>>{{fm({0}), fm({2})}, {fm({1}), fm({1})}, {fm({2}), fm({0})}}));
}

TEST(Semigroup, DecomposeRejectsZeroParts) { EXPECT_THROW(decompose(one(), 0), DomainError); }

TEST(Semigroup, AxiomsOnBoundedSets) {
  for (const auto& spec : {kA0, SemigroupSpec::free_monoid(1), SemigroupSpec::free_monoid(2)}) {
    auto pool = bounded(spec, 2);
    for (const auto& a : pool)
      for (const auto& b : pool) {
        EXPECT_EQ(a + b, b + a);
        if ((a + b).is_zero()) {
          EXPECT_TRUE(a.is_zero());
          EXPECT_TRUE(b.is_zero());
        }
        for (const auto& c : pool) EXPECT_EQ((a + b) + c, a + (b + c));
      }
  }
}

TEST(Semigroup, DecomposeMatchesBruteForce) {
  for (const auto& spec : {kA0, SemigroupSpec::free_monoid(1), SemigroupSpec::free_monoid(2)}) {
    auto pool = bounded(spec, 2);
    for (const auto& a : pool)
      for (int parts = 1; parts <= 3; ++parts) {
        auto fast = decompose(a, parts);
        auto slow = brute_decompose(a, parts, pool);
        EXPECT_EQ(std::set<std::vector<AValue>>(fast.begin(), fast.end()),
                  std::set<std::vector<AValue>>(slow.begin(), slow.end()))
            << spec.name() << " " << a.to_string() << " parts " << parts;
        EXPECT_EQ(fast.size(), slow.size());
      }
  }
}

TEST(Semigroup, Parsing) {
  EXPECT_EQ(SemigroupSpec::parse("a0"), kA0);
  EXPECT_EQ(SemigroupSpec::parse("free:3").rank(), 3);
  EXPECT_THROW(SemigroupSpec::parse("free:"), InputError);
  EXPECT_THROW(SemigroupSpec::parse("z"), InputError);
  EXPECT_EQ(parse_avalue("one", kA0), one());
  EXPECT_EQ(parse_avalue("0", kA0), zero());
  EXPECT_THROW(parse_avalue("2", kA0), InputError);
  EXPECT_EQ(parse_avalue("(1,2)", SemigroupSpec::free_monoid(2)), fm({1, 2}));
  EXPECT_THROW(parse_avalue("1", SemigroupSpec::free_monoid(2)), InputError);
  EXPECT_EQ(fm({1, 2}).to_string(), "(1,2)");
}

TEST(Semigroup, InvalidElements) {
  EXPECT_THROW(AValue(kA0, {2}), DomainError);
  EXPECT_THROW(AValue(SemigroupSpec::free_monoid(1), {-1}), DomainError);
  EXPECT_THROW(SemigroupSpec::free_monoid(0), DomainError);
}
