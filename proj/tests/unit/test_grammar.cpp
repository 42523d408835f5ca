#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "savg/errors.hpp"
#include "savg/fixtures.hpp"
#include "savg/grammar.hpp"

using namespace savg;

TEST_CASE("grammar text round-trips") {
  const auto g = fixtures::g2();
  CHECK(g.ruleCount() == 6);
  CHECK(g.symbols().start == "S");
  CHECK(g.rule(1).constraints.size() == 1);
  CHECK(g.rule(1).constraints[0].left.toString() == "1.1");
  const auto again = parseGrammar(formatGrammar(g));
  CHECK(formatGrammar(again) == formatGrammar(g));
  CHECK(g.skeleton().rulesFor("A") == std::vector<int>{3, 4});
}

TEST_CASE("grammar errors carry line numbers") {
  try {
    parseGrammar("start S\nrule 1: S -> A\nrule 2: A -> 'a' | eq 3.1 = 1.1\n");
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parseGrammar("start S\nrule 1: S -> A\n"), InputError);
  CHECK_THROWS_AS(parseGrammar("start S\nrule 2: S -> 'a'\n"), InputError);
  CHECK_THROWS_AS(parseGrammar("rule 1: S -> 'a'\nfoo\n"), InputError);
}

TEST_CASE("cf analogue of G2 is G1") {
  const auto a = cfAnalogue(fixtures::g2());
  const auto g1 = fixtures::g1().skeleton();
  REQUIRE(a.rules.size() == g1.rules.size());
  for (std::size_t i = 0; i < a.rules.size(); ++i) {
    CHECK(a.rules[i].lhs == g1.rules[i].lhs);
    CHECK(a.rules[i].rhs.size() == g1.rules[i].rhs.size());
  }
}

TEST_CASE("trees parse and print") {
  const auto s = fixtures::g1().skeleton();
  const auto d = parseTree(s, "(S (A a) (A b))");
  CHECK(ruleSequence(d) == std::vector<int>{1, 3, 4});
  CHECK(formatTree(s, d) == "(S (A a) (A b))");
  CHECK(derivationDepth(d) == 2);
  CHECK(internalNodes(d) == 3);
  CHECK(yield(s, d) == std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(parseTree(s, "(S (A c) (A b))"), InputError);
  CHECK_THROWS_AS(parseTree(s, "(A a)"), InputError);
  CHECK_THROWS_AS(parseTree(s, "(S (A a)"), InputError);
}

TEST_CASE("unification shares the atom or fails") {
  const auto g = fixtures::g2();
  const auto s = g.skeleton();
  auto ok = deriveDag(g, parseTree(s, "(S (A a) (A a))"));
  REQUIRE(std::holds_alternative<Dag>(ok));
  CHECK(std::get<Dag>(ok).toString() == "(S (A #1=a) (A #1))");
  CHECK(std::get<Dag>(ok).size() == 4);
  CHECK(std::holds_alternative<UnificationFailure>(deriveDag(g, parseTree(s, "(S (A a) (A b))"))));
  auto cf = deriveDag(fixtures::g1(), parseTree(s, "(S (A a) (A a))"));
  CHECK(std::get<Dag>(cf).size() == 5);
}

TEST_CASE("enumeration of L(G2)") {
  const auto l = enumerateLanguage(fixtures::g2(), 10);
  CHECK(l.items.size() == 4);
  CHECK(l.failedDerivations == 2);
  CHECK_FALSE(l.truncated);
  const auto l1 = enumerateLanguage(fixtures::g1(), 10);
  CHECK(l1.items.size() == 6);
  CHECK(enumerateLanguage(fixtures::g1(), 1).items.empty());
  CHECK(enumerateLanguage(fixtures::g1(), 1).truncated);
  for (const auto& item : l.items) CHECK(l.find(item.dag).has_value());
}

TEST_CASE("recursive grammars truncate") {
  const auto g = parseGrammar("start S\nrule 1: S -> S 'a'\nrule 2: S -> 'a'\n");
  const auto l = enumerateLanguage(g, 4);
  CHECK(l.truncated);
  CHECK(l.items.size() == 4);
}

TEST_CASE("parses of a sentence and recovery from dags") {
  const auto g1 = fixtures::g1();
  const auto parses = parseDags(g1, {"a", "a"}, 10);
  CHECK(parses.size() == 2);
  CHECK(parseDags(g1, {"a", "b", "a"}, 10).empty());
  for (const auto& item : enumerateLanguage(fixtures::g2(), 10).items) {
    auto d = recoverDerivation(fixtures::g2(), item.dag);
    REQUIRE(d);
    CHECK(*d == item.derivation);
  }
  // Two derivations of one dag: A -> 'a' and A -> 'a' again through a
  // second rule with the same shape.
  const auto amb = parseGrammar("start S\nrule 1: S -> A\nrule 2: A -> 'a'\nrule 3: A -> 'a'\n");
  const auto l = enumerateLanguage(amb, 10);
  REQUIRE(l.items.size() == 1);
  CHECK(l.items[0].others.size() == 1);
  CHECK(recoverDerivations(amb, l.items[0].dag).size() == 2);
}

TEST_CASE("derivation validation") {
  const auto s = fixtures::g1().skeleton();
  CHECK_NOTHROW(validateDerivation(s, Derivation{2, {Derivation{5, {}}}}));
  CHECK_THROWS_AS(validateDerivation(s, Derivation{2, {Derivation{3, {}}}}), InputError);
  CHECK_THROWS_AS(validateDerivation(s, Derivation{3, {}}), InputError);
}
