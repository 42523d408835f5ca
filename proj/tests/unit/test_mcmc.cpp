#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "savg/fixtures.hpp"
#include "savg/mcmc.hpp"
#include "savg/oracle.hpp"

#include <cmath>

using namespace savg;

namespace {

ChainConfig shortChain(std::size_t length, std::uint64_t seed = 0x5eed) {
  ChainConfig c;
  c.burnIn = 1000;
  c.length = length;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("acceptance probability") {
  CHECK(acceptanceProbability(0.0, 1.0) == 1);
  CHECK(acceptanceProbability(1.0, 0.0) == doctest::Approx(std::exp(-1.0)));
  const auto f = fixtures::twoPropertyField(InitialMode::Scfg);
  const auto l = enumerateLanguage(f.grammar(), 10);
  const auto& x1 = l.items[0].dag;
  const auto& x3 = l.items[2].dag;
  CHECK(acceptanceProbability(f, x1, x3) == doctest::Approx(0.75));
  CHECK(acceptanceProbability(f, x3, x1) == 1);
}

TEST_CASE("proposals are consistent dags and report failures") {
  const auto f = fixtures::twoPropertyField(InitialMode::Scfg);
  const auto l = enumerateLanguage(f.grammar(), 10);
  Rng rng(9);
  std::size_t failures = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto p = proposeDag(f, rng);
    REQUIRE(l.find(p.dag));
    failures += p.failures;
  }
  // Failure rate 1/3 under flat weights: about 1000 failures per 2000 draws.
  CHECK(failures > 850);
  CHECK(failures < 1150);
  CHECK_THROWS(proposeDag(FieldModel(f.grammar(), InitialMode::Uniform), rng));
}

TEST_CASE("proposal budget") {
  const auto g = parseGrammar("start S\nrule 1: S -> A B | eq 1.1 = 2.1\nrule 2: A -> 'a'\nrule 3: B -> 'b'\n");
  const FieldModel f(g, InitialMode::Scfg, CfModel(g.skeleton(), std::vector<Weight>(3, Weight(1.0))));
  Rng rng(1);
  CHECK_THROWS_AS(proposeDag(f, rng, 50), ProposalError);
}

TEST_CASE("rejected steps duplicate the current state") {
  const auto f = fixtures::twoPropertyField(InitialMode::Scfg);
  for (std::size_t thinning : {1, 3}) {
    auto c = shortChain(9000);
    c.thinning = thinning;
    const auto s = runChain(f, c);
    CHECK(s.retained == 9000 / thinning);
    std::size_t total = 0;
    for (const auto& x : s.samples) total += x.count;
    CHECK(total == s.retained);
    CHECK(s.accepted < s.steps);
    CHECK(s.steps == c.burnIn + c.length);
  }
}

TEST_CASE("null field accepts everything") {
  const FieldModel null(fixtures::g2(), InitialMode::Scfg, fixtures::flatG2Weights());
  const auto s = runChain(null, shortChain(5000));
  CHECK(s.acceptanceRate() == 1);
  const auto b = detailedBalanceCheck(null, enumerateLanguage(null.grammar(), 10));
  for (const auto& row : b.kernel)
    for (std::size_t y = 0; y < row.size(); ++y) CHECK(row[y] == doctest::Approx(b.kernel[0][y]));
  CHECK(b.maxViolation < 1e-15);
}

TEST_CASE("exact kernel satisfies detailed balance") {
  for (const auto& f : {fixtures::twoPropertyField(InitialMode::Scfg),
                        FieldModel(fixtures::g2(), InitialMode::Scfg, fixtures::m1())}) {
    const auto b = detailedBalanceCheck(f, enumerateLanguage(f.grammar(), 10));
    CHECK(b.maxViolation < 1e-12);
    CHECK(b.maxStationarity < 1e-12);
    for (const auto& row : b.kernel) {
      double sum = 0;
      for (double v : row) sum += v;
      CHECK(sum == doctest::Approx(1).epsilon(1e-12));
    }
  }
}

TEST_CASE("acceptance matches the unsimplified ratio") {
  const auto f = FieldModel(fixtures::g2(), InitialMode::Scfg, fixtures::m1());
  auto withProps = f;
  withProps.addProperty({Pattern::single("a"), Semantics::Presence}, Weight(1.7));
  const auto k = oracle::exhaustiveKernel(withProps);
  for (std::size_t x = 0; x < k.states.size(); ++x)
    for (std::size_t y = 0; y < k.states.size(); ++y) {
      if (x == y) continue;
      const double full = std::min(1.0, k.q[y] * k.p[x] / (k.q[x] * k.p[y]));
      CHECK(std::abs(full - acceptanceProbability(withProps, k.states[x], k.states[y])) < 1e-12);
    }
}

TEST_CASE("chain estimates converge on the two-property field") {
  const auto f = fixtures::twoPropertyField(InitialMode::Scfg);
  const auto s = runChain(f, shortChain(50000));
  REQUIRE(s.estimates.means.size() == 2);
  CHECK(s.estimates.means[0] == doctest::Approx(2.0 / 3).epsilon(0.05));
  CHECK(s.estimates.means[1] == doctest::Approx(0.5).epsilon(0.05));
  const auto& h = s.estimates.histograms[1];
  REQUIRE(h.size() == 2);
  CHECK(h[0] + h[1] == doctest::Approx(1));
  CHECK(std::exp(s.logMeanProposalFieldWeight) == doctest::Approx(1.5).epsilon(0.03));
  CHECK(1 - s.failureRate() == doctest::Approx(2.0 / 3).epsilon(0.03));
  const Property constant{Pattern::single("S"), Semantics::Presence};
  const auto e = estimateExpectations(s, {constant});
  CHECK(e.means[0] == doctest::Approx(1));
  CHECK(e.histograms[0].back() == doctest::Approx(1));
}

TEST_CASE("identical seeds give identical chains") {
  const auto f = fixtures::twoPropertyField(InitialMode::Scfg);
  const auto a = runChain(f, shortChain(20000, 77));
  const auto b = runChain(f, shortChain(20000, 77));
  const auto c = runChain(f, shortChain(20000, 78));
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].dag == b.samples[i].dag);
    CHECK(a.samples[i].count == b.samples[i].count);
  }
  CHECK(a.accepted == b.accepted);
  CHECK(a.proposalFailures == b.proposalFailures);
  CHECK(a.estimates.means == b.estimates.means);
  CHECK(a.logMeanProposalFieldWeight == b.logMeanProposalFieldWeight);
  CHECK(a.accepted != c.accepted);
}

TEST_CASE("chain config validation") {
  ChainConfig c;
  c.thinning = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.length = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
