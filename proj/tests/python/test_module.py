import math

import pytest

import savg
from savg import fixtures


def test_grammar_and_enumeration():
    g = savg.Grammar(fixtures.G2)
    assert g.rule_count == 6
    rows = g.enumerate()
    assert len(rows) == 4
    assert rows[0][1] == "(S (A #1=a) (A #1))"
    assert savg.Grammar(fixtures.G1).parses(["a", "a"]) == ["(S (A a) (A a))", "(S (B a a))"]


def test_erf_and_normalization():
    g = savg.Grammar(fixtures.G2)
    weights = savg.erf_estimate(g, fixtures.SKEWED_CORPUS)
    assert weights == ["1/2", "1/2", "2/3", "1/3", "1/2", "1/2"]
    f = savg.Field(g)
    f.add_property(["a"], semantics="presence", beta=1.4)
    assert [r["q"] for r in f.distribution()] == pytest.approx([1.4 / 4.8, 1 / 4.8, 1.4 / 4.8, 1 / 4.8], abs=1e-12)
    assert f.kl(fixtures.SKEWED_CORPUS) == pytest.approx(0.0143625915641, abs=1e-10)


def test_two_property_field():
    f = savg.Field(savg.Grammar(fixtures.G2))
    f.add_property(["A", "a"], [(0, "1", 1)], beta=math.sqrt(2))
    f.add_property(["B"], beta=1.5)
    assert f.z() == pytest.approx(6, abs=1e-12)
    assert [r["q"] for r in f.distribution()] == pytest.approx([1 / 3, 1 / 6, 1 / 4, 1 / 4], abs=1e-12)


def test_sampler():
    g = savg.Grammar(fixtures.G2)
    f = savg.Field(g, "scfg", "rule 1 2/3\nrule 2 1/3\nrule 3 1/2\nrule 4 1/2\nrule 5 1/2\nrule 6 1/2\n")
    f.add_property(["A", "a"], [(0, "1", 1)], beta=math.sqrt(2))
    f.add_property(["B"], beta=1.5)
    a = f.sample(length=20000, seed=3)
    b = f.sample(length=20000, seed=3)
    assert a == b
    assert a["retained"] == 20000
    assert a["expectations"][0] == pytest.approx(2 / 3, abs=0.03)


def test_induce_and_round_trip():
    r = savg.induce(savg.Field(savg.Grammar(fixtures.G2)), fixtures.SKEWED_CORPUS)
    assert r["converged"]
    assert r["trace"][-1]["divergence"] < 1e-4
    again = savg.Field.parse(r["field"].to_json())
    assert again.properties == r["field"].properties
    assert again.kl(fixtures.SKEWED_CORPUS) < 1e-4


def test_errors():
    with pytest.raises(savg.InputError):
        savg.Grammar("start S\nrule 1: S -> A\n")
    with pytest.raises(ValueError):
        savg.Field(savg.Grammar(fixtures.G2), "scfg")


def test_oracle_check():
    rows = savg.oracle_check()
    assert rows and all(r["pass"] for r in rows)
