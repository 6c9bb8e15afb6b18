#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "twisted_strata/strata.hpp"
#include "twisted_strata/testing/acceptance.hpp"
#include "twisted_strata/testing/oracle.hpp"

using namespace twisted_strata;
using namespace twisted_strata::testing;

namespace {

const AValue kZero = AValue::zero(SemigroupSpec::a0());
const AValue kOne = AValue::one();

AmbientSpace g1_two_legs() { return AmbientSpace(1, {{"1", 1}, {"2", 2}}, kOne); }

}  // namespace

TEST(MakeClass, TrivialGraphIsTheUnit) {
  auto amb = g1_two_legs();
  auto x = make_class(trivial_graph(amb), {}, amb);
  EXPECT_EQ(x, TautClass::fundamental(amb));
  EXPECT_EQ(x.pure_codim(), 0);
}

TEST(MakeClass, PsiSquared) {
  auto amb = g1_two_legs();
  Decoration d;
  d.multiply_psi(trivial_graph(amb).legs.at("1"), 2);
  auto x = make_class(trivial_graph(amb), d, amb);
  EXPECT_EQ(x, psi_class(amb, "1", 2));
  EXPECT_EQ(x.pure_codim(), 2);
}

TEST(MakeClass, LoopIsCodimensionOne) {
  auto x = make_class(loop_graph(2), {}, loop_ambient());
  EXPECT_EQ(x.size(), 1u);
  EXPECT_EQ(x.pure_codim(), 1);
}

TEST(MakeClass, RejectsInvalidInput) {
  Decoration bad;
  bad.multiply_psi(7, 1);
  EXPECT_THROW(make_class(loop_graph(2), bad, loop_ambient()), DomainError);
  auto unbalanced = loop_graph(2);
  unbalanced.half_edges[1].twist = 3;
  EXPECT_THROW(make_class(unbalanced, {}, loop_ambient()), DomainError);
  EXPECT_THROW(psi_class(loop_ambient(), "5"), DomainError);
}

TEST(Normalize, Cancellation) {
  auto x = make_class(loop_graph(1), {}, loop_ambient());
  EXPECT_TRUE((x + Rational(-1) * x).empty());
}

TEST(Normalize, IsomorphicRelabelingsMerge) {
  // The same banana with its vertices listed in the other order.
  GraphBuilder b;
  int w = b.add_vertex(0, kOne);
  int u = b.add_vertex(0, kZero);
  b.add_edge(w, u, 2);
  b.add_edge(w, u, 2);
  b.add_leg(u, "1", 1);
  std::vector<WeightedStratum> parts = {{loop_ambient(), banana_graph(2, kZero, kOne), {}, Rational(1)},
                                        {loop_ambient(), b.build(), {}, Rational(1)}};
  auto x = normalize(parts);
  ASSERT_EQ(x.size(), 1u);
  EXPECT_EQ(x.terms().begin()->second.coeff, Rational(2));
}

TEST(Normalize, MixedCodimensionsCoexist) {
  auto amb = g1_two_legs();
  auto x = psi_class(amb, "1") + psi_class(amb, "1", 2);
  EXPECT_EQ(x.size(), 2u);
  EXPECT_EQ(x.codims(), (std::set<int>{1, 2}));
  EXPECT_FALSE(x.pure_codim());
  EXPECT_EQ(x.graded_part(2), psi_class(amb, "1", 2));
}

TEST(Normalize, IdempotentAndOrderFree) {
  Rng rng(23);
  for (int i = 0; i < 40; ++i) {
    auto amb = random_ambient(rng);
    std::vector<WeightedStratum> parts;
    for (int k = 0; k < 5; ++k) {
      auto g = random_graph_upto(rng, amb, 2);
      parts.push_back({amb, g, random_decoration(rng, g, 2), random_coeff(rng)});
    }
    parts.push_back(parts.front());
    auto x = normalize(parts);
    std::shuffle(parts.begin(), parts.end(), rng);
    EXPECT_EQ(normalize(parts), x);
    std::vector<WeightedStratum> again;
    for (const auto& [key, t] : x.terms()) again.push_back({amb, t.stratum.graph(), t.stratum.decoration(), t.coeff});
    if (!again.empty()) {
      EXPECT_EQ(normalize(again), x);
    }
    EXPECT_FALSE(closure_problem(x));
  }
}

TEST(Normalize, MixedAmbientsRefuse) {
  auto amb = g1_two_legs();
  std::vector<WeightedStratum> parts = {{amb, trivial_graph(amb), {}, Rational(1)},
                                        {loop_ambient(), loop_graph(1), {}, Rational(1)}};
  EXPECT_THROW(normalize(parts), AmbientMismatch);
  EXPECT_THROW(TautClass::fundamental(amb) + TautClass::fundamental(loop_ambient()), AmbientMismatch);
}

TEST(Codim, Examples) {
  auto amb = g1_two_legs();
  EXPECT_EQ(DecoratedStratum::make(trivial_graph(amb), {}).codim(), 0);
  EXPECT_EQ(DecoratedStratum::make(loop_graph(3), {}).codim(), 1);
  Decoration d;
  d.multiply_kappa(0, 2, 1);
  d.multiply_psi(0, 1);
  EXPECT_EQ(DecoratedStratum::make(trivial_graph(amb), d).codim(), 3);
  Decoration k0;
  k0.multiply_kappa(0, 0, 2);
  EXPECT_EQ(DecoratedStratum::make(trivial_graph(amb), k0).codim(), 0);
}

TEST(Restrict, DropsStrataThroughZeroValuedVertices) {
  auto amb = loop_ambient();
  auto x = make_class(loop_graph(2), {}, amb);
  auto y = make_class(banana_graph(2, kZero, kOne), {}, amb, Rational(3));
  auto z = make_class(banana_graph(2, kOne, kOne), {}, amb);
  EXPECT_EQ(restrict_to_unvalued(x), x);
  EXPECT_TRUE(restrict_to_unvalued(y).empty());
  EXPECT_EQ(restrict_to_unvalued(x + y), x);
  EXPECT_EQ(restrict_to_unvalued(x + y + z), x + z);
}

TEST(Restrict, NeedsValueOne) {
  AmbientSpace zero_amb(1, {{"1", 1}}, kZero);
  EXPECT_THROW(restrict_to_unvalued(TautClass::fundamental(zero_amb)), DomainError);
}

TEST(Kappa0, SubstitutionUsesEulerCharacteristic) {
  auto amb = g1_two_legs();
  auto x = kappa_class(amb, 0, 2);
  // 2g - 2 + n = 2 on (g=1, two legs).
  EXPECT_EQ(substitute_kappa0(x), Rational(4) * TautClass::fundamental(amb));
  Decoration d;
  d.multiply_kappa(0, 0, 1);
  auto on_loop = make_class(loop_graph(2), d, loop_ambient());
  // One genus-0 vertex with three half-edges.
  EXPECT_EQ(substitute_kappa0(on_loop), make_class(loop_graph(2), {}, loop_ambient()));
}

TEST(MakeClass, IsomorphicInputsShareKeys) {
  Rng rng(29);
  for (int i = 0; i < 60; ++i) {
    auto amb = random_ambient(rng);
    auto g = random_graph_upto(rng, amb, 3);
    auto d = random_decoration(rng, g, 2);
    auto s = DecoratedStratum::make(g, d);
    auto again = DecoratedStratum::make(s.graph(), s.decoration());
    EXPECT_EQ(s.key(), again.key());
    EXPECT_EQ(s.graph(), again.graph());
    EXPECT_EQ(make_class(g, d, amb), make_class(s.graph(), s.decoration(), amb));
  }
}
