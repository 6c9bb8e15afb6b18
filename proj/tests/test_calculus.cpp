#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "twisted_strata/calculus.hpp"
#include "twisted_strata/enumerate.hpp"
#include "twisted_strata/testing/acceptance.hpp"
#include "twisted_strata/testing/oracle.hpp"

using namespace twisted_strata;
using namespace twisted_strata::testing;

namespace {

const AValue kZero = AValue::zero(SemigroupSpec::a0());
const AValue kOne = AValue::one();

Decoration psi(int h, int e = 1) {
  Decoration d;
  d.multiply_psi(h, e);
  return d;
}

Decoration kappa(int v, int j, int e = 1) {
  Decoration d;
  d.multiply_kappa(v, j, e);
  return d;
}

// u (genus 0, leg "1") joined to w (genus 1) by one edge of twist r.
TwistedGraph split_graph(int r, const AValue& a_u, const AValue& a_w) {
  GraphBuilder b;
  int u = b.add_vertex(0, a_u), w = b.add_vertex(1, a_w);
  b.add_leg(u, "1", 1);
  b.add_edge(u, w, r);
  return b.build();
}

TautClass bubble(const AmbientSpace& up, const std::string& label) {
  return make_class(bubble_graph(up, label, kBullet), {}, up);
}

}  // namespace

// ---------------------------------------------------------------------------
// Pullback along gluing maps

TEST(Pullback, IdentityKeepsDecoration) {
  auto g = loop_graph(2);
  auto d = psi(1) * kappa(0, 1);
  EXPECT_EQ(pullback_gluing(g, g, identity_structure(g), d), (DecorationSum{{d, Rational(1)}}));
}

TEST(Pullback, KappaSpreadsOverPreimage) {
  auto source = split_graph(2, kOne, kOne);
  auto target = trivial_graph(loop_ambient());
  AStructure f{{0, 0}, {source.legs.at("1")}};
  ASSERT_FALSE(structure_problem(source, target, f));
  EXPECT_EQ(pullback_gluing(source, target, f, kappa(0, 1)),
            (DecorationSum{{kappa(0, 1), Rational(1)}, {kappa(1, 1), Rational(1)}}));
  EXPECT_EQ(pullback_gluing(source, target, f, kappa(0, 1, 2)),
            (DecorationSum{{kappa(0, 1, 2), Rational(1)}, {kappa(0, 1) * kappa(1, 1), Rational(2)}, {kappa(1, 1, 2), Rational(1)}}));
  EXPECT_EQ(pullback_gluing(source, target, f, psi(0)), (DecorationSum{{psi(source.legs.at("1")), Rational(1)}}));
}

TEST(Pullback, MatchesOracleRule) {
  Rng rng(31);
  for (int i = 0; i < 40; ++i) {
    auto amb = random_ambient(rng);
    auto a = random_graph_upto(rng, amb, 1);
    auto b = random_graph_upto(rng, amb, 2);
    for (const auto& p : generic_pairs(a, b)) {
      auto alpha = random_decoration(rng, a, 3);
      EXPECT_EQ(pullback_gluing(p.graph, a, p.to_a, alpha), twisted_strata::testing::detail::reference_pullback(p.graph, p.to_a, alpha));
    }
  }
}

TEST(Structure, DetectsBrokenMaps) {
  auto source = split_graph(2, kOne, kOne);
  auto target = trivial_graph(loop_ambient());
  EXPECT_TRUE(structure_problem(source, target, AStructure{{0}, {0}}));
  EXPECT_TRUE(structure_problem(source, target, AStructure{{0, 0}, {1}}));
  EXPECT_TRUE(structure_problem(source, target, AStructure{{0, 1}, {0}}));
}

// ---------------------------------------------------------------------------
// Generic pairs and excess

TEST(GenericPairs, TrivialTimesTrivial) {
  auto t = trivial_graph(loop_ambient());
  auto pairs = generic_pairs(t, t);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].graph.num_vertices(), 1);
  EXPECT_EQ(pairs[0].to_a, identity_structure(pairs[0].graph));
  EXPECT_EQ(pairs[0].to_b, identity_structure(pairs[0].graph));
  EXPECT_TRUE(pairs[0].common_edges.empty());
}

TEST(GenericPairs, TrivialTimesAnything) {
  auto t = trivial_graph(loop_ambient());
  for (const auto& b : {loop_graph(2), banana_graph(3, kZero, kOne), split_graph(2, kOne, kZero)}) {
    auto pairs = generic_pairs(t, b);
    ASSERT_EQ(pairs.size(), 1u);
    EXPECT_EQ(canonical_form(pairs[0].graph).key, canonical_form(b).key);
    EXPECT_FALSE(structure_problem(pairs[0].graph, b, pairs[0].to_b));
    EXPECT_FALSE(structure_problem(pairs[0].graph, t, pairs[0].to_a));
    EXPECT_TRUE(pairs[0].common_edges.empty());
  }
}

TEST(GenericPairs, LoopSelfPairs) {
  for (int r = 1; r <= 3; ++r) {
    auto l = loop_graph(r);
    auto pairs = generic_pairs(l, l);
    // Two self-intersection triples (the flip of B's loop gives a second one)
    // and four for each banana valuation.
    EXPECT_EQ(pairs.size(), 10u);
    EXPECT_EQ(count_degeneration_types(pairs), 3u);
    std::multiset<std::string> shapes;
    for (const auto& p : pairs) {
      EXPECT_FALSE(structure_problem(p.graph, l, p.to_a));
      EXPECT_FALSE(structure_problem(p.graph, l, p.to_b));
      if (p.graph.num_vertices() == 1) {
        EXPECT_EQ(p.common_edges.size(), 1u);
        shapes.insert("loop");
      } else {
        EXPECT_TRUE(p.common_edges.empty());
        EXPECT_EQ(p.graph.vertices[p.graph.half_edges[p.graph.legs.at("1")].vertex].genus, 0);
        shapes.insert(canonical_form(p.graph).key);
      }
    }
    EXPECT_EQ(shapes.count("loop"), 2u);
    EXPECT_EQ(shapes.count(canonical_form(banana_graph(r, kZero, kOne)).key), 4u);
    EXPECT_EQ(shapes.count(canonical_form(banana_graph(r, kOne, kOne)).key), 4u);
    EXPECT_EQ(shapes.count(canonical_form(banana_graph(r, kOne, kZero)).key), 0u);
  }
}

TEST(GenericPairs, AgreeWithOracle) {
  Rng rng(37);
  for (int i = 0; i < 60; ++i) {
    auto amb = random_ambient(rng);
    int ea = uniform(rng, 0, 2);
    auto a = random_graph_upto(rng, amb, ea);
    auto b = random_graph_upto(rng, amb, 2 - ea);
    std::set<std::string> mine, theirs;
    auto pairs = generic_pairs(a, b);
    for (const auto& p : pairs) mine.insert(signature_of(p, a, b));
    for (const auto& p : oracle_generic_pairs(a, b)) theirs.insert(p.signature);
    EXPECT_EQ(mine, theirs) << amb.to_string();
    EXPECT_EQ(mine.size(), pairs.size());
  }
}

TEST(Excess, NoCommonEdges) {
  GenericPair p;
  p.graph = loop_graph(2);
  EXPECT_EQ(excess(p), unit_sum());
}

TEST(Excess, OneCommonEdge) {
  GenericPair p;
  p.graph = loop_graph(3);
  p.common_edges = {{1, 2}};
  EXPECT_EQ(excess(p), (DecorationSum{{psi(1), Rational(-1, 3)}, {psi(2), Rational(-1, 3)}}));
}

TEST(Excess, TwoCommonEdges) {
  GraphBuilder b;
  int u = b.add_vertex(0, kZero), w = b.add_vertex(0, kOne);
  b.add_leg(u, "1", 1);
  auto [h1, h2] = b.add_edge(u, w, 2);
  auto [h3, h4] = b.add_edge(u, w, 3);
  GenericPair p;
  p.graph = b.build();
  p.common_edges = {{h1, h2}, {h3, h4}};
  Rational c(1, 6);
  EXPECT_EQ(excess(p), (DecorationSum{{psi(h1) * psi(h3), c}, {psi(h1) * psi(h4), c}, {psi(h2) * psi(h3), c},
                                      {psi(h2) * psi(h4), c}}));
}

// ---------------------------------------------------------------------------
// Products

TEST(Product, UnitAndPsiSquare) {
  auto amb = AmbientSpace(1, {{"1", 1}, {"2", 3}}, kOne);
  auto one = TautClass::fundamental(amb);
  auto x = psi_class(amb, "2") + Rational(2) * kappa_class(amb, 1);
  EXPECT_EQ(product(one, x), x);
  EXPECT_EQ(product(x, one), x);
  EXPECT_EQ(product(psi_class(amb, "1"), psi_class(amb, "1")), psi_class(amb, "1", 2));
}

TEST(Product, LoopSquared) {
  auto amb = loop_ambient();
  for (int r = 1; r <= 3; ++r) {
    auto l = loop_graph(r);
    auto L = make_class(l, {}, amb);
    auto expected = make_class(l, psi(1), amb, Rational(-4, r)) + make_class(banana_graph(r, kZero, kOne), {}, amb, Rational(4)) +
                    make_class(banana_graph(r, kOne, kOne), {}, amb, Rational(4));
    auto sq = product(L, L);
    EXPECT_EQ(sq, expected) << "r=" << r;
    EXPECT_EQ(sq.pure_codim(), 2);
  }
}

TEST(Product, MatchesReferenceOnRandomClasses) {
  Rng rng(41);
  for (int i = 0; i < 40; ++i) {
    auto amb = random_ambient(rng);
    int ex = uniform(rng, 0, 2);
    auto x = random_class(rng, amb, ex, 2);
    auto y = random_class(rng, amb, 2 - max_edges_of(x), 2);
    auto xy = product(x, y);
    EXPECT_EQ(xy, reference_product(x, y)) << amb.to_string();
    EXPECT_EQ(xy, product(y, x));
    EXPECT_FALSE(closure_problem(xy));
  }
}

TEST(Product, UntwistedVariantAgreesWhenAllTwistsAreOne) {
  Rng rng(43);
  for (int i = 0; i < 30; ++i) {
    auto amb = random_ambient(rng, 2, 3, 1);
    auto x = random_class(rng, amb, 1, 2, 1);
    auto y = random_class(rng, amb, 1, 2, 1);
    EXPECT_EQ(product(x, y), reference_product(x, y, false));
  }
}

TEST(Product, ThreadCountDoesNotChangeTheResult) {
  Rng rng(47);
  auto amb = loop_ambient();
  auto x = random_class(rng, amb, 1, 2) + make_class(loop_graph(2), {}, amb);
  auto y = random_class(rng, amb, 1, 2) + make_class(loop_graph(1), psi(0), amb);
  auto serial = product(x, y, 1);
  EXPECT_EQ(product(x, y, 3), serial);
  EXPECT_EQ(product(x, y, 8), serial);
}

TEST(Product, AmbientsMustAgree) {
  EXPECT_THROW(product(TautClass::fundamental(loop_ambient()), TautClass::fundamental(AmbientSpace(2, {}, kOne))),
               AmbientMismatch);
}

// ---------------------------------------------------------------------------
// Gluing pushforward

TEST(PushGlue, TrivialSkeletonIsIdentity) {
  auto amb = AmbientSpace(1, {{"1", 1}, {"2", 2}}, kOne);
  auto skeleton = trivial_graph(amb);
  std::vector<TautClass> pieces{psi_class(vertex_ambient(skeleton, 0), "2", 2) + kappa_class(vertex_ambient(skeleton, 0), 1)};
  EXPECT_EQ(pushforward_gluing(skeleton, amb, pieces), pieces[0]);
}

TEST(PushGlue, OneEdgeCarriesInverseTwist) {
  auto amb = loop_ambient();
  for (int r = 1; r <= 4; ++r) {
    auto g = split_graph(r, kOne, kZero);
    std::vector<TautClass> pieces{TautClass::fundamental(vertex_ambient(g, 0)), TautClass::fundamental(vertex_ambient(g, 1))};
    EXPECT_EQ(pushforward_gluing(g, amb, pieces), make_class(g, {}, amb, Rational(1, r)));
  }
}

TEST(PushGlue, DecorationsFollowTheirVertex) {
  auto amb = loop_ambient();
  auto g = split_graph(3, kOne, kOne);
  int hw = g.edges()[0].second;
  auto s1 = vertex_ambient(g, 1);
  std::vector<TautClass> pieces{TautClass::fundamental(vertex_ambient(g, 0)),
                                psi_class(s1, vertex_leg_label(g, hw)) + Rational(2) * kappa_class(s1, 1)};
  auto expected = make_class(g, psi(hw), amb, Rational(1, 3)) + make_class(g, kappa(1, 1), amb, Rational(2, 3));
  EXPECT_EQ(pushforward_gluing(g, amb, pieces), expected);
}

TEST(PushGlue, IteratedEqualsOneShot) {
  // Chain v0 -2- v1 -3- v2.
  AmbientSpace amb(0, {{"1", 1}, {"2", 1}, {"3", 1}}, kOne);
  GraphBuilder cb;
  int v0 = cb.add_vertex(0, kOne), v1 = cb.add_vertex(0, kZero), v2 = cb.add_vertex(0, kOne);
  cb.add_leg(v0, "1", 1);
  cb.add_leg(v1, "2", 1);
  cb.add_leg(v2, "3", 1);
  cb.add_edge(v0, v1, 2);
  cb.add_edge(v1, v2, 3);
  auto chain = cb.build();
  std::vector<TautClass> direct_pieces;
  for (int v = 0; v < 3; ++v) direct_pieces.push_back(TautClass::fundamental(vertex_ambient(chain, v)));
  auto direct = pushforward_gluing(chain, amb, direct_pieces);
  EXPECT_EQ(direct, make_class(chain, {}, amb, Rational(1, 6)));

  // Outer skeleton u -2- w with w standing for v1 -3- v2.
  GraphBuilder ob;
  int u = ob.add_vertex(0, kOne), w = ob.add_vertex(0, kOne);
  ob.add_leg(u, "1", 1);
  ob.add_leg(w, "2", 1);
  ob.add_leg(w, "3", 1);
  auto hw = ob.add_edge(u, w, 2).second;
  auto outer = ob.build();
  GraphBuilder ib;
  int i1 = ib.add_vertex(0, kZero), i2 = ib.add_vertex(0, kOne);
  ib.add_leg(i1, "2", 1);
  ib.add_leg(i1, vertex_leg_label(outer, hw), 2);
  ib.add_leg(i2, "3", 1);
  ib.add_edge(i1, i2, 3);
  auto inner = ib.build();
  auto w_space = vertex_ambient(outer, w);
  std::vector<TautClass> inner_pieces{TautClass::fundamental(vertex_ambient(inner, 0)),
                                      TautClass::fundamental(vertex_ambient(inner, 1))};
  std::vector<TautClass> outer_pieces{TautClass::fundamental(vertex_ambient(outer, u)),
                                      pushforward_gluing(inner, w_space, inner_pieces)};
  EXPECT_EQ(pushforward_gluing(outer, amb, outer_pieces), direct);
}

TEST(PushGlue, InterfaceMismatch) {
  auto amb = loop_ambient();
  auto g = split_graph(2, kOne, kOne);
  std::vector<TautClass> wrong{TautClass::fundamental(vertex_ambient(g, 1)), TautClass::fundamental(vertex_ambient(g, 0))};
  EXPECT_THROW(pushforward_gluing(g, amb, wrong), AmbientMismatch);
  std::vector<TautClass> short_list{TautClass::fundamental(vertex_ambient(g, 0))};
  EXPECT_THROW(pushforward_gluing(g, amb, short_list), DomainError);
}

// ---------------------------------------------------------------------------
// Forgetful pushforward

TEST(Comparison, PsiAndKappa) {
  auto base = AmbientSpace(1, {{"1", 2}}, kOne);
  auto up = base.with_marking(kBullet, 1);
  EXPECT_EQ(forgetful_comparison(Generator::psi("1"), up, kBullet), psi_class(up, "1") - bubble(up, "1"));
  EXPECT_EQ(forgetful_comparison(Generator::kappa(1), up, kBullet), kappa_class(up, 1) - psi_class(up, kBullet));
  EXPECT_EQ(forgetful_comparison(Generator::kappa(2), up, kBullet), kappa_class(up, 2) - psi_class(up, kBullet, 2));
}

TEST(Comparison, NeedsTrivialPoint) {
  auto up = AmbientSpace(1, {{"1", 1}, {kBullet, 2}}, kOne);
  EXPECT_THROW(forgetful_comparison(Generator::kappa(1), up, kBullet), DomainError);
  EXPECT_THROW(pushforward_forgetful(TautClass::fundamental(up)), DomainError);
  EXPECT_THROW(pushforward_forgetful(TautClass::fundamental(loop_ambient())), DomainError);
}

TEST(PushForget, KappaFromPsiBullet) {
  auto base = AmbientSpace(1, {{"1", 2}}, kOne);
  auto up = base.with_marking(kBullet, 1);
  for (int m = 0; m <= 3; ++m) EXPECT_EQ(pushforward_forgetful(psi_class(up, kBullet, m + 1)), kappa_class(base, m));
}

TEST(PushForget, FundamentalClassGoesToZero) {
  auto up = AmbientSpace(2, {{"1", 1}, {kBullet, 1}}, kOne);
  EXPECT_TRUE(pushforward_forgetful(TautClass::fundamental(up)).empty());
}

TEST(PushForget, PsiOfAnotherMarking) {
  auto base = AmbientSpace(1, {{"1", 3}, {"2", 1}}, kOne);
  auto up = base.with_marking(kBullet, 1);
  EXPECT_EQ(pushforward_forgetful(psi_class(up, "1")), TautClass::fundamental(base));
  EXPECT_EQ(pushforward_forgetful(bubble(up, "1")), TautClass::fundamental(base));
  // The pulled-back part pushes forward to zero.
  EXPECT_TRUE(pushforward_forgetful(forgetful_comparison(Generator::psi("1"), up, kBullet)).empty());
  EXPECT_TRUE(pushforward_forgetful(forgetful_comparison(Generator::kappa(1), up, kBullet)).empty());
}

TEST(PushForget, DecoratedBubbleVanishes) {
  auto up = AmbientSpace(1, {{"1", 2}, {kBullet, 1}}, kOne);
  auto g = bubble_graph(up, "1", kBullet);
  EXPECT_TRUE(pushforward_forgetful(make_class(g, psi(g.legs.at("1")), up)).empty());
  Decoration k;
  k.multiply_kappa(1, 1, 1);
  EXPECT_TRUE(pushforward_forgetful(make_class(g, k, up)).empty());
}

TEST(PushForget, LowersCodimensionByOne) {
  Rng rng(53);
  int refused = 0;
  for (int i = 0; i < 30; ++i) {
    auto base = random_ambient(rng, 2, 2, 3);
    auto up = base.with_marking(kBullet, 1);
    auto g = random_graph_upto(rng, up, 1, 3);
    int degree = uniform(rng, 1, 3);
    auto decorations = enumerate_decorations(g, degree);
    auto d = decorations[uniform(rng, 0, static_cast<int>(decorations.size()) - 1)];
    TautClass pushed;
    try {
      pushed = pushforward_forgetful(make_class(g, d, up));
    } catch (const DomainError& e) {
      // Contracting a bubble whose other two half-edges carry different twists.
      EXPECT_NE(std::string(e.what()).find("cannot contract"), std::string::npos) << e.what();
      ++refused;
      continue;
    }
    for (int c : pushed.codims()) EXPECT_EQ(c, g.num_edges() + degree - 1);
    EXPECT_FALSE(closure_problem(pushed));
  }
  EXPECT_LT(refused, 10);
}

TEST(PushForget, ProjectionFormula) {
  // pi_*(pi^*z * y) = z * pi_*(y) for generators z.
  Rng rng(59);
  for (int i = 0; i < 12; ++i) {
    auto base = random_ambient(rng, 1, 2, 2);
    auto up = base.with_marking(kBullet, 1);
    auto y = random_class(rng, up, 1, 2, 2);
    std::vector<Generator> gens{Generator::kappa(1)};
    for (const auto& [label, twist] : base.markings()) gens.push_back(Generator::psi(label));
    for (const auto& z : gens) {
      auto z_base = z.kind == Generator::Kind::psi ? psi_class(base, z.label) : kappa_class(base, z.index);
      auto lhs = pushforward_forgetful(product(forgetful_comparison(z, up, kBullet), y));
      auto rhs = product(z_base, pushforward_forgetful(y));
      EXPECT_EQ(lhs, rhs) << base.to_string();
    }
  }
}
