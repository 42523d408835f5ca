#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "savg/dag.hpp"
#include "savg/distribution.hpp"
#include "savg/numeric.hpp"
#include "savg/pattern.hpp"
#include "savg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using namespace savg;

namespace {

// (S (A #1=a) (A #1)), built with the nodes shuffled.
Dag sharedAtom() {
  std::vector<Dag::Node> nodes(4);
  nodes[0] = {"a", {}};
  nodes[1] = {"A", {{"1", 0}}};
  nodes[2] = {"S", {{"2", 3}, {"1", 1}}};
  nodes[3] = {"A", {{"1", 0}}};
  return Dag::fromGraph(nodes, 2);
}

Dag flat(const std::string& cat, const std::string& atom) {
  return Dag::fromGraph({{"S", {{"1", 1}}}, {cat, {{"1", 2}, {"2", 3}}}, {atom, {}}, {atom, {}}}, 0);
}

}  // namespace

TEST_CASE("weights keep exact fractions") {
  auto w = parseWeight("2/3");
  REQUIRE(w.isExact());
  CHECK(*w.exact == Rational(2, 3));
  CHECK(w.value == doctest::Approx(2.0 / 3));
  CHECK(parseWeight("3").isExact());
  CHECK_FALSE(parseWeight("1e-3").isExact());
  CHECK(parseWeight("1e-3").value == doctest::Approx(1e-3));
  CHECK_THROWS_AS(parseWeight("two"), std::invalid_argument);
  CHECK_THROWS_AS(parseWeight("1/0"), std::invalid_argument);
  CHECK(formatRational(Rational(7, 9)) == "7/9");
  CHECK(formatRational(Rational(4)) == "4");
}

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng base(42);
  auto s0 = base.split(0), s1 = base.split(1);
  CHECK(s0.seed() != s1.seed());
  CHECK(s0.next() != s1.next());
  CHECK(Rng(42).split(3).seed() == Rng(42).split(3).seed());
  Rng u(7);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double x = u.uniform();
    REQUIRE(x >= 0);
    REQUIRE(x < 1);
    sum += x;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
  CHECK(u.uniformPositive() > 0);
}

TEST_CASE("dag canonical form ignores node numbering") {
  const auto d = sharedAtom();
  CHECK(d.size() == 4);
  CHECK(d.node(0).label == "S");
  CHECK(d.toString() == "(S (A #1=a) (A #1))");
  std::vector<Dag::Node> again(4);
  again[3] = {"S", {{"1", 1}, {"2", 2}}};
  again[1] = {"A", {{"1", 0}}};
  again[2] = {"A", {{"1", 0}}};
  again[0] = {"a", {}};
  CHECK(Dag::fromGraph(again, 3) == d);
  CHECK(flat("B", "a") != flat("B", "b"));
  CHECK(d.parents()[d.child(d.child(0, "1"), "1")].size() == 2);
}

TEST_CASE("dag validation") {
  CHECK_THROWS_AS(Dag::fromGraph({{"S", {{"1", 1}}}, {"A", {{"1", 0}}}}, 0), std::invalid_argument);
  CHECK_THROWS_AS(Dag::fromGraph({{"S", {{"1", 1}, {"1", 1}}}, {"a", {}}}, 0), std::invalid_argument);
  CHECK_THROWS_AS(Dag::fromGraph({{"S", {{"1", 5}}}}, 0), std::invalid_argument);
  CHECK_THROWS_AS(Dag::fromGraph({{"S", {}}, {"a", {}}}, 0), std::invalid_argument);
}

TEST_CASE("edge labels order numerically first") {
  CHECK(edgeLabelLess("2", "10"));
  CHECK(edgeLabelLess("10", "a"));
  CHECK(edgeLabelLess("agr", "head"));
  CHECK_FALSE(edgeLabelLess("1", "1"));
}

TEST_CASE("pattern keys are invariant under relabelling") {
  const Pattern p({"A", "a"}, {{0, "1", 1}});
  const Pattern q({"a", "A"}, {{1, "1", 0}});
  CHECK(p == q);
  CHECK(p.key() == "A a | 0-1->1");
  CHECK(Pattern::single("B").key() == "B");
  CHECK(Pattern::single("B") < p);
  CHECK(Pattern::fromDag(sharedAtom()).size() == 4);
  const Pattern v({"A", "A", "a"}, {{0, "1", 2}, {1, "1", 2}});
  const Pattern w({"a", "A", "A"}, {{2, "1", 0}, {1, "1", 0}});
  CHECK(v == w);
  CHECK_THROWS_AS(Pattern({"A", "a"}, {}), std::invalid_argument);
  CHECK_THROWS_AS(Pattern({"A", "a"}, {{0, "1", 1}, {1, "1", 0}}), std::invalid_argument);
}

TEST_CASE("pattern join") {
  const auto a = Pattern::single("A");
  const auto atom = Pattern::single("a");
  auto j = Pattern::join(a, 0, atom, 0, "1", true);
  REQUIRE(j);
  CHECK(j->key() == "A a | 0-1->1");
  auto twice = Pattern::join(*j, 0, atom, 0, "1", true);
  CHECK_FALSE(twice);
  auto back = Pattern::join(atom, 0, a, 0, "1", false);
  REQUIRE(back);
  CHECK(*back == *j);
}

TEST_CASE("distribution") {
  const auto x = sharedAtom();
  const auto y = flat("B", "a");
  const auto d = Distribution::fromWeights({x, y, x}, {1, 2, 1});
  CHECK(d.size() == 2);
  CHECK(d.probability(x) == doctest::Approx(0.5));
  CHECK(d.probability(flat("B", "b")) == 0);
  CHECK(expectation(d, [](const Dag& g) { return static_cast<double>(g.size()); }) == doctest::Approx(4));
  CHECK_THROWS_AS(Distribution({x, y}, {0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(Distribution({x, x}, {0.5, 0.5}), std::invalid_argument);
}
