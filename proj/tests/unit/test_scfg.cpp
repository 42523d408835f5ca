#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "savg/errors.hpp"
#include "savg/fixtures.hpp"
#include "savg/scfg.hpp"

#include <cmath>
#include <map>

using namespace savg;

namespace {

double cfDivergence(const CfModel& m, const EmpiricalDistribution& corpus) {
  double d = 0;
  for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
    const double p = toDouble(corpus.probability(i));
    d += p * (std::log(p) - logTreeProbability(m, corpus.entries[i].derivation));
  }
  return d;
}

}  // namespace

TEST_CASE("tree probabilities under M1") {
  const auto m = fixtures::m1();
  const auto s = m.skeleton();
  CHECK(*exactTreeProbability(m, parseTree(s, "(S (A a) (A a))")) == Rational(2, 9));
  CHECK(*exactTreeProbability(m, parseTree(s, "(S (B a a))")) == Rational(1, 4));
  CHECK(treeProbability(m, parseTree(s, "(S (A a) (A b))")) == doctest::Approx(1.0 / 9));
  CHECK(m.isProper());
  CHECK(ruleFrequencies(s, parseTree(s, "(S (A a) (A a))"))[3] == 2);
}

TEST_CASE("disambiguation picks the B analysis") {
  const auto m = fixtures::m1();
  const auto s = m.skeleton();
  const std::vector<Derivation> parses{parseTree(s, "(S (A a) (A a))"), parseTree(s, "(S (B a a))")};
  CHECK(disambiguate(m, parses) == 1);
  CHECK(disambiguate(m, std::vector<Derivation>{parses[0]}) == 0);
  CHECK_THROWS_AS(disambiguate(m, std::vector<Derivation>{}), std::invalid_argument);
  const auto half = fixtures::halfWeights();
  // 1/8 vs 1/4: still B; ties go to the smaller rule sequence.
  CHECK(disambiguate(half, parses) == 1);
  const CfModel even(s, {Weight(Rational(1, 2)), Weight(Rational(1, 2)), Weight(Rational(1, 2)),
                         Weight(Rational(1, 2)), Weight(Rational(1, 4)), Weight(Rational(3, 4))});
  CHECK(disambiguate(even, parses) == 0);
}

TEST_CASE("ERF on the skewed corpus") {
  const auto s = fixtures::g1().skeleton();
  const auto corpus = derivationCorpus(s, fixtures::skewedCorpus());
  CHECK(corpus.total == 12);
  const auto m = erfEstimate(s, corpus);
  const std::vector<Rational> want{Rational(1, 2), Rational(1, 2), Rational(2, 3),
                                   Rational(1, 3), Rational(1, 2), Rational(1, 2)};
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(*m.theta()[i].exact == want[i]);
  CHECK(cfDivergence(m, corpus) == doctest::Approx(0.32).epsilon(0.016));
  // (1/3) ln(8/3) + (1/6) ln(4/3): the rounded table terms add to 0.38.
  CHECK(cfDivergence(fixtures::halfWeights(), corpus) ==
        doctest::Approx(std::log(8.0 / 3) / 3 + std::log(4.0 / 3) / 6).epsilon(1e-12));
}

TEST_CASE("ERF rejects corpora that zero out a rule") {
  const auto s = fixtures::g1().skeleton();
  CHECK_THROWS_AS(erfEstimate(s, derivationCorpus(s, parseCorpus("2 (S (A a) (A b))\n"))), InputError);
}

TEST_CASE("ERF leaves unattested groups uniform") {
  const auto g = parseGrammar("start S\nrule 1: S -> 'x'\nrule 2: A -> 'a'\nrule 3: A -> 'b'\n");
  const auto m = erfEstimate(g.skeleton(), derivationCorpus(g.skeleton(), parseCorpus("3 (S x)\n")));
  CHECK(*m.weight(1).exact == 1);
  CHECK(*m.weight(2).exact == Rational(1, 2));
}

TEST_CASE("ERF is the CF maximum likelihood estimate") {
  const auto s = fixtures::g1().skeleton();
  const auto corpus = derivationCorpus(s, fixtures::skewedCorpus());
  const auto erf = erfEstimate(s, corpus);
  const double best = cfDivergence(erf, corpus);
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Weight> theta(6);
    for (int lhs = 0; lhs < 3; ++lhs) {
      const double u = 0.01 + 0.98 * rng.uniform();
      theta[2 * lhs] = u;
      theta[2 * lhs + 1] = 1 - u;
    }
    REQUIRE(cfDivergence(CfModel(s, theta), corpus) >= best - 1e-12);
  }
}

TEST_CASE("corpus and weight file errors") {
  CHECK_THROWS_AS(parseCorpus("x (S (A a) (A a))\n"), InputError);
  CHECK_THROWS_AS(parseCorpus("0 (S (A a) (A a))\n"), InputError);
  CHECK(parseCorpus("# c\n\n1 (S (B a a))\n").size() == 1);
  const auto s = fixtures::g1().skeleton();
  try {
    derivationCorpus(s, parseCorpus("1 (S (B a a))\n1 (S (B a b))\n"));
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parseWeights(s, "rule 1 1/2\n"), InputError);
  CHECK_THROWS(parseWeights(s, "rule 1 0\nrule 2 1\nrule 3 1\nrule 4 1\nrule 5 1\nrule 6 1\n"));
  CHECK_THROWS_AS(CfModel(s, std::vector<Weight>(5, Weight(1.0))), std::invalid_argument);
  const auto m = fixtures::m1();
  const auto again = parseWeights(s, formatWeights(m));
  for (int i = 1; i <= 6; ++i) CHECK(*again.weight(i).exact == *m.weight(i).exact);
}

TEST_CASE("sampling follows the rule weights") {
  const auto m = fixtures::m1();
  Rng rng(3);
  std::map<std::vector<int>, int> counts;
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[ruleSequence(sampleDerivation(m, rng))];
  CHECK(counts.size() == 6);
  CHECK(static_cast<double>(counts[{2, 5}]) / n == doctest::Approx(0.25).epsilon(0.04));
  CHECK(static_cast<double>(counts[{1, 3, 3}]) / n == doctest::Approx(2.0 / 9).epsilon(0.04));
  Rng again(3);
  Rng other(3);
  CHECK(sampleDerivation(m, again) == sampleDerivation(m, other));
}

TEST_CASE("depth cap abandons runaway derivations") {
  const auto g = parseGrammar("start S\nrule 1: S -> S S\nrule 2: S -> 'a'\n");
  const CfModel m(g.skeleton(), {Weight(0.6), Weight(0.4)});
  Rng rng(5);
  std::size_t resamples = 0;
  for (int i = 0; i < 200; ++i) {
    const auto d = sampleDerivation(m, rng, {10, 100000}, &resamples);
    REQUIRE(derivationDepth(d) <= 10);
  }
  CHECK(resamples > 0);
  const CfModel runaway(g.skeleton(), {Weight(0.999), Weight(0.001)});
  CHECK_THROWS_AS(sampleDerivation(runaway, rng, {3, 5}), SamplingError);
}
