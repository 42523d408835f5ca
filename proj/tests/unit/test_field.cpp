#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "savg/errors.hpp"
#include "savg/fixtures.hpp"
#include "savg/field.hpp"
#include "savg/oracle.hpp"

#include <cmath>

using namespace savg;

namespace {

Dag dagOf(const AvGrammar& g, const char* tree) { return std::get<Dag>(deriveDag(g, parseTree(g.skeleton(), tree))); }

const Property kAtomA{Pattern::single("a"), Semantics::Presence};

}  // namespace

TEST_CASE("embedding counts") {
  const auto g2 = fixtures::g2();
  const auto x1 = dagOf(g2, "(S (A a) (A a))");
  const auto x3 = dagOf(g2, "(S (B a a))");
  const Pattern arc({"A", "a"}, {{0, "1", 1}});
  CHECK(countEmbeddings(arc, x1) == 2);
  CHECK(countEmbeddings(Pattern::single("a"), x1) == 1);
  CHECK(countEmbeddings(Pattern::single("a"), x3) == 2);
  CHECK(countEmbeddings(Pattern::single("A"), x3) == 0);
  CHECK(countProperty({Pattern::single("a"), Semantics::Presence}, x3) == 1);
  const Pattern vee({"A", "A", "a"}, {{0, "1", 2}, {1, "1", 2}});
  CHECK(countEmbeddings(vee, x1) == 2);
  const auto cf = dagOf(fixtures::g1(), "(S (A a) (A a))");
  CHECK(countEmbeddings(vee, cf) == 0);
  CHECK(countEmbeddings(Pattern::fromDag(x1), x1) == 1);
}

TEST_CASE("counts agree with the brute-force oracle") {
  const auto g2 = fixtures::g2();
  const auto l = enumerateLanguage(g2, 10);
  std::vector<Pattern> patterns{Pattern::single("S"), Pattern({"A", "a"}, {{0, "1", 1}}),
                                Pattern({"S", "A"}, {{0, "2", 1}}), Pattern({"S", "B", "b"}, {{0, "1", 1}, {1, "2", 2}}),
                                Pattern({"A", "A", "a"}, {{0, "1", 2}, {1, "1", 2}})};
  for (const auto& item : l.items)
    for (const auto& p : patterns) CHECK(countEmbeddings(p, item.dag) == oracle::embeddings(p, item.dag));
}

TEST_CASE("rule properties reproduce rule frequencies on CF dags") {
  const auto g1 = fixtures::g1();
  const auto props = ruleProperties(g1);
  REQUIRE(props.size() == 6);
  for (const auto& item : enumerateLanguage(g1, 10).items) {
    const auto f = ruleFrequencies(g1.skeleton(), item.derivation);
    for (int i = 1; i <= 6; ++i) CHECK(countProperty(props[i - 1], item.dag) == f[i]);
  }
}

TEST_CASE("ERF field over L(G2)") {
  const auto g2 = fixtures::g2();
  const auto erf = erfEstimate(g2.skeleton(), derivationCorpus(g2.skeleton(), fixtures::skewedCorpus()));
  const auto f = fixtures::ruleField(g2, erf.theta());
  const auto n = normalizeExact(f, enumerateLanguage(g2, 10));
  REQUIRE(n.exactZ);
  CHECK(*n.exactZ == Rational(7, 9));
  REQUIRE(n.exactProbs);
  const std::vector<Rational> want{Rational(2, 7), Rational(1, 14), Rational(9, 28), Rational(9, 28)};
  CHECK(*n.exactProbs == want);
  const auto pTilde = empiricalFromCorpus(g2, fixtures::skewedCorpus());
  CHECK(klDivergence(pTilde, n.q).value == doctest::Approx(0.07).epsilon(0.07));
}

TEST_CASE("the sqrt 2 rule field reproduces the corpus") {
  const auto g2 = fixtures::g2();
  const auto f = fixtures::ruleField(g2, fixtures::optimalRuleWeights());
  const auto n = normalizeExact(f, enumerateLanguage(g2, 10));
  const auto pTilde = empiricalFromCorpus(g2, fixtures::skewedCorpus());
  for (std::size_t i = 0; i < n.q.size(); ++i)
    CHECK(std::abs(n.q.probs()[i] - pTilde.probability(n.q.support()[i])) < 1e-9);
  CHECK(std::abs(klDivergence(pTilde, n.q).value) < 1e-12);
  CHECK(n.z == doctest::Approx(3 / (3 + std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("two-property field") {
  const auto f = fixtures::twoPropertyField();
  const auto l = enumerateLanguage(f.grammar(), 10);
  const auto n = normalizeExact(f, l);
  CHECK(n.z == doctest::Approx(6).epsilon(1e-12));
  const std::vector<double> want{1.0 / 3, 1.0 / 6, 0.25, 0.25};
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(n.q.probs()[i] - want[i]) < 1e-12);
  const auto s = fixtures::twoPropertyField(InitialMode::Scfg);
  const auto ns = normalizeExact(s, l);
  CHECK(ns.consistentMass == doctest::Approx(2.0 / 3));
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(ns.q.probs()[i] - want[i]) < 1e-12);
}

TEST_CASE("null field is uniform") {
  const FieldModel null(fixtures::g2(), InitialMode::Uniform);
  const auto n = normalizeExact(null, enumerateLanguage(null.grammar(), 10));
  CHECK(*n.exactZ == 4);
  for (double p : n.q.probs()) CHECK(p == doctest::Approx(0.25));
  const auto pTilde = empiricalFromCorpus(null.grammar(), fixtures::skewedCorpus());
  CHECK(klDivergence(pTilde, n.q).value == doctest::Approx(0.03).epsilon(0.17));
}

TEST_CASE("scfg null field over a CF grammar is the SCFG") {
  const auto g1 = fixtures::g1();
  const FieldModel f(g1, InitialMode::Scfg, fixtures::m1());
  const auto n = normalizeExact(f, enumerateLanguage(g1, 10));
  CHECK(n.consistentMass == doctest::Approx(1));
  CHECK(n.exactZ);
  for (std::size_t i = 0; i < n.q.size(); ++i) {
    const auto d = recoverDerivation(g1, n.q.support()[i]);
    CHECK(n.q.probs()[i] == doctest::Approx(treeProbability(fixtures::m1(), *d)));
  }
}

TEST_CASE("field weights are log-space products") {
  const auto f = fixtures::twoPropertyField();
  const auto x1 = dagOf(f.grammar(), "(S (A a) (A a))");
  CHECK(propertyCounts(f, x1) == std::vector<int>{2, 0});
  CHECK(fieldWeight(f, x1) == doctest::Approx(2));
  CHECK(logFieldWeight(f, x1) == doctest::Approx(std::log(2.0)));
  const auto x3 = dagOf(f.grammar(), "(S (B a a))");
  CHECK(*exactFieldWeight(f, x3) == Rational(3, 2));
  CHECK_FALSE(exactFieldWeight(f, x1));
  CHECK(unnormalized(f, x3) == doctest::Approx(1.5));
  CHECK_THROWS_AS(unnormalized(f, dagOf(fixtures::g1(), "(S (A a) (A a))")), std::invalid_argument);
}

TEST_CASE("mutations invalidate the cached normalizer") {
  auto f = fixtures::twoPropertyField();
  const auto l = enumerateLanguage(f.grammar(), 10);
  normalizeAndCache(f, l);
  REQUIRE(f.zCache());
  CHECK(f.zCache()->z == doctest::Approx(6));
  const auto v = f.version();
  f.setBeta(1, Weight(2.0));
  CHECK(f.version() > v);
  CHECK_FALSE(f.zCache());
  f.addProperty(kAtomA, Weight(1.0));
  CHECK(f.size() == 3);
  CHECK_THROWS(FieldModel(fixtures::g2(), InitialMode::Scfg));
}

TEST_CASE("KL reports the dag q misses") {
  const auto g2 = fixtures::g2();
  const auto pTilde = empiricalFromCorpus(g2, fixtures::skewedCorpus());
  CHECK(klDivergence(pTilde, pTilde).value == doctest::Approx(0));
  const auto partial = Distribution::fromWeights({pTilde.support()[0]}, {1});
  const auto r = klDivergence(pTilde, partial);
  CHECK_FALSE(r.finite());
  CHECK(std::isinf(r.value));
  CHECK_THROWS_AS(empiricalFromCorpus(g2, parseCorpus("1 (S (A a) (A b))\n")), InputError);
}

TEST_CASE("semantics and mode names") {
  CHECK((parseSemantics("presence") == Semantics::Presence));
  CHECK((parseInitialMode("scfg") == InitialMode::Scfg));
  CHECK_THROWS_AS(parseSemantics("count"), std::invalid_argument);
  CHECK(kAtomA.toString() == "a (presence)");
}
