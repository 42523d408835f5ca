#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "savg/fixtures.hpp"
#include "savg/oracle.hpp"

#include <cmath>

using namespace savg;

TEST_CASE("compare") {
  CHECK(oracle::compare("x", 1, 1 + 1e-13, 1e-12).pass);
  CHECK_FALSE(oracle::compare("x", 1, 1.1, 1e-12).pass);
  CHECK_FALSE(oracle::compare("x", 1, NAN, 1e-12).pass);
  CHECK(oracle::compare("x", 0, 0, 0).pass);
}

TEST_CASE("oracle expectations") {
  const FieldModel q1(fixtures::g1(), InitialMode::Scfg, fixtures::m1());
  const Property rule1 = ruleProperties(q1.grammar())[0];
  CHECK(oracle::exactExpectation(q1, [&](const Dag& x) { return oracle::propertyValue(rule1, x); }) ==
        doctest::Approx(0.5));
  CHECK(oracle::exactExpectation(q1, [](const Dag&) { return 3.0; }) == doctest::Approx(3));
  const auto f = fixtures::twoPropertyField();
  CHECK(oracle::exactExpectation(f, [&](const Dag& x) { return oracle::propertyValue(f.properties()[0], x); }) ==
        doctest::Approx(2.0 / 3));
  CHECK(oracle::normalizer(f) == doctest::Approx(6));
  const auto rec = parseGrammar("start S\nrule 1: S -> S 'a'\nrule 2: S -> 'a'\n");
  CHECK_THROWS_AS(oracle::distribution(FieldModel(rec, InitialMode::Uniform), 5), std::runtime_error);
}

TEST_CASE("grid search") {
  const auto g2 = fixtures::g2();
  const FieldModel null(g2, InitialMode::Uniform);
  const auto pTilde = empiricalFromCorpus(g2, fixtures::skewedCorpus());
  std::vector<std::pair<Dag, double>> pts;
  for (std::size_t i = 0; i < pTilde.size(); ++i) pts.emplace_back(pTilde.support()[i], pTilde.probs()[i]);
  CHECK(std::abs(oracle::gridSearchBestWeight(null, {Pattern::single("a"), Semantics::Presence}, pts) - 1.4) < 1e-6);
  CHECK(std::abs(oracle::gridSearchBestWeight(null, {Pattern::single("S"), Semantics::Presence}, pts) - 1) < 1e-6);
}

TEST_CASE("null kernel rows are the proposal") {
  const FieldModel null(fixtures::g2(), InitialMode::Scfg, fixtures::m1());
  const auto k = oracle::exhaustiveKernel(null);
  for (std::size_t x = 0; x < k.states.size(); ++x)
    for (std::size_t y = 0; y < k.states.size(); ++y) CHECK(k.k[x][y] == doctest::Approx(k.p[y]));
  for (std::size_t y = 0; y < k.states.size(); ++y) CHECK(k.stationary[y] == doctest::Approx(k.p[y]));
}

TEST_CASE("oracle-check table is green") {
  const auto reports = oracle::runChecks();
  CHECK(reports.size() > 40);
  for (const auto& r : reports) {
    INFO(r.quantity);
    CHECK(r.pass);
  }
  const auto tsv = oracle::formatReports(reports);
  CHECK(tsv.rfind("quantity\toracle\tsubject", 0) == 0);
}
