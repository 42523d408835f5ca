#include "savg/fixtures.hpp"
#include "savg/induction.hpp"
#include "savg/mcmc.hpp"
#include "savg/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <map>

namespace savg::oracle {

namespace {

using Points = std::vector<std::pair<Dag, double>>;

/// p~ straight from the records: parse, unify, count.
Points corpusPoints(const AvGrammar& g, const std::vector<CorpusRecord>& records) {
  std::map<std::string, std::pair<Dag, double>> byKey;
  double total = 0;
  for (const auto& r : records) {
    auto dag = std::get<Dag>(deriveDag(g, parseTree(g.skeleton(), r.tree)));
    auto& slot = byKey.try_emplace(dag.key(), dag, 0.0).first->second;
    slot.second += static_cast<double>(r.count);
    total += static_cast<double>(r.count);
  }
  Points out;
  for (auto& [k, v] : byKey) out.emplace_back(v.first, v.second / total);
  return out;
}

double lookup(const Points& pts, const Dag& x) {
  for (const auto& [y, v] : pts)
    if (y == x) return v;
  return 0;
}

FieldModel scfgField(const AvGrammar& g, const CfModel& theta) { return FieldModel(g, InitialMode::Scfg, theta); }

}  // namespace

std::vector<Report> runChecks() {
  std::vector<Report> out;
  const auto g1 = fixtures::g1();
  const auto g2 = fixtures::g2();
  const auto m1 = fixtures::m1();
  const auto records = fixtures::skewedCorpus();
  const auto l1 = enumerateLanguage(g1, 10);
  const auto l2 = enumerateLanguage(g2, 10);
  std::vector<double> m1Theta;
  for (const auto& w : m1.theta()) m1Theta.push_back(w.value);

  // SCFG basics
  {
    const auto x1 = parseTree(g1.skeleton(), "(S (A a) (A a))");
    out.push_back(compare("tree probability M1 [S [A a][A a]]", treeProduct(m1Theta, x1),
                          toDouble(*exactTreeProbability(m1, x1)), 1e-15));
    std::vector<Derivation> parses;
    for (const auto& item : parseDags(g1, {"a", "a"}, 10)) parses.push_back(item.derivation);
    out.push_back(compare("disambiguate 'a a' under M1 (parse index)", static_cast<double>(disambiguate(m1Theta, parses)),
                          static_cast<double>(savg::disambiguate(m1, parses)), 0));
    const auto corpus = derivationCorpus(g1.skeleton(), records);
    std::vector<std::pair<Derivation, long long>> counted;
    for (const auto& e : corpus.entries) counted.emplace_back(e.derivation, e.count);
    const auto w = erfWeights(g1.skeleton(), counted);
    const auto erf = erfEstimate(g1.skeleton(), corpus);
    for (std::size_t i = 0; i < w.size(); ++i)
      out.push_back(compare("ERF weight rule " + std::to_string(i + 1), w[i], erf.theta()[i].value, 1e-15));
  }

  // CF divergences over L(G1)
  const auto pG1 = corpusPoints(g1, records);
  const auto pTilde1 = empiricalFromCorpus(g1, records);
  for (const auto& [name, model] : {std::pair<std::string, CfModel>{"M1", m1}, {"all-1/2", fixtures::halfWeights()}}) {
    const auto f = scfgField(g1, model);
    const auto subject = klDivergence(pTilde1, normalizeExact(f, l1).q).value;
    out.push_back(compare("D(p~||q) CF model " + name, kl(pG1, distribution(f)), subject, 1e-12));
  }
  {
    const auto f = scfgField(g1, m1);
    auto subject = expectation(normalizeExact(f, l1).q, [&](const Dag& x) {
      return static_cast<double>(ruleFrequencies(g1.skeleton(), *recoverDerivation(g1, x))[1]);
    });
    const Property rule1 = ruleProperties(g1)[0];
    out.push_back(compare("q1[f_1] over L(G1)", exactExpectation(f, [&](const Dag& x) { return propertyValue(rule1, x); }),
                          subject, 1e-12));
  }

  // AV normalisation
  const auto pG2 = corpusPoints(g2, records);
  const auto pTilde2 = empiricalFromCorpus(g2, records);
  {
    const auto erf = erfEstimate(g2.skeleton(), derivationCorpus(g2.skeleton(), records));
    const auto f = fixtures::ruleField(g2, erf.theta());
    const auto n = normalizeExact(f, l2);
    out.push_back(compare("Z, ERF rule field over L(G2)", normalizer(f), n.z, 1e-12));
    const auto od = distribution(f);
    for (std::size_t i = 0; i < n.q.size(); ++i)
      out.push_back(compare("q2 " + n.q.support()[i].toString(), lookup(od, n.q.support()[i]), n.q.probs()[i], 1e-12));
    out.push_back(compare("D(p~||q2)", kl(pG2, od), klDivergence(pTilde2, n.q).value, 1e-12));
  }
  {
    const auto f = fixtures::ruleField(g2, fixtures::optimalRuleWeights());
    const auto n = normalizeExact(f, l2);
    out.push_back(compare("Z, optimal rule field", normalizer(f), n.z, 1e-12));
    out.push_back(compare("D(p~||q*)", kl(pG2, distribution(f)), klDivergence(pTilde2, n.q).value, 1e-12));
  }
  {
    const auto f = fixtures::twoPropertyField();
    const auto n = normalizeExact(f, l2);
    out.push_back(compare("Z, two-property field", normalizer(f), n.z, 1e-12));
    const auto od = distribution(f);
    for (std::size_t i = 0; i < n.q.size(); ++i)
      out.push_back(compare("q two-property " + n.q.support()[i].toString(), lookup(od, n.q.support()[i]), n.q.probs()[i], 1e-12));
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto& p = f.properties()[i];
      out.push_back(compare("f_" + std::to_string(i + 1) + " counts summed over L(G2)",
                            [&] {
                              double s = 0;
                              for (const auto& item : l2.items) s += propertyValue(p, item.dag);
                              return s;
                            }(),
                            [&] {
                              double s = 0;
                              for (const auto& item : l2.items) s += countProperty(p, item.dag);
                              return s;
                            }(),
                            0));
    }
  }

  // Initial weights
  {
    const FieldModel null(g2, InitialMode::Uniform);
    const auto snap = exactSnapshot(null, l2, pTilde2);
    out.push_back(compare("D(p~||null field)", kl(pG2, distribution(null)), snap.divergence, 1e-12));
    for (const char* label : {"a", "b", "A", "B"}) {
      const Property c{Pattern::single(label), Semantics::Presence};
      const auto s = solveInitialWeight(snap, c, pTilde2);
      out.push_back(compare(std::string("best weight, presence of ") + label, gridSearchBestWeight(null, c, pG2), s.beta, 1e-6));
      FieldModel with = null;
      with.addProperty(c, s.beta);
      out.push_back(compare(std::string("D after adding presence of ") + label, kl(pG2, distribution(with)), s.newDivergence,
                            1e-10));
    }
  }

  // Iterative scaling and induction
  {
    auto f = fixtures::ruleField(g2, std::vector<Weight>(6, Weight(1.0)));
    const auto adj = adjustWeights(f, l2, pTilde2);
    out.push_back(compare("D after weight scaling, rule field", kl(pG2, distribution(f)), adj.divergence.back(), 1e-10));
    const auto ind = induceField(FieldModel(g2, InitialMode::Uniform), pTilde2);
    out.push_back(compare("D after induction, G2", kl(pG2, distribution(ind.field)),
                          ind.trace.empty() ? ind.initialDivergence : ind.trace.back().divergence, 1e-10));
  }

  // Sampling
  {
    const auto f = fixtures::twoPropertyField(InitialMode::Scfg);
    const auto k = exhaustiveKernel(f);
    const auto b = detailedBalanceCheck(f, l2);
    out.push_back(compare("detailed balance violation", k.maxBalanceViolation, b.maxViolation, 1e-12));
    const auto q = normalizeExact(f, l2).q;
    for (std::size_t y = 0; y < k.states.size(); ++y) {
      const auto idx = *l2.find(k.states[y]);
      double flow = 0;
      for (std::size_t x = 0; x < b.kernel.size(); ++x) flow += q.probs()[x] * b.kernel[x][idx];
      out.push_back(compare("stationary mass " + k.states[y].toString(), k.stationary[y], flow, 1e-12));
    }
    double worst = 0;
    for (std::size_t x = 0; x < k.states.size(); ++x)
      for (std::size_t y = 0; y < k.states.size(); ++y)
        if (x != y)
          worst = std::max(worst, std::abs(k.k[x][y] / k.p[y] - acceptanceProbability(f, k.states[x], k.states[y])));
    out.push_back(compare("acceptance form gap, all ordered pairs", 0.0, worst, 1e-12));

    ChainConfig cfg;
    const auto chain = runChain(f, cfg);
    const auto emp = chain.empirical();
    double l1dist = 0;
    for (const auto& [x, q] : distribution(f)) l1dist += std::abs(q - emp.probability(x));
    out.push_back(compare("chain L1 distance to q (200k steps)", 0.0, l1dist, 0.02));
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto& p = f.properties()[i];
      out.push_back(compare("chain E[f_" + std::to_string(i + 1) + "]",
                            exactExpectation(f, [&](const Dag& x) { return propertyValue(p, x); }),
                            chain.estimates.means[i], 0.02));
    }
  }
  return out;
}

std::string formatReports(const std::vector<Report>& reports) {
  std::string out = "quantity\toracle\tsubject\tabs_error\trel_error\ttolerance\tstatus\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  for (const auto& r : reports)
    out += r.quantity + "\t" + num(r.oracle) + "\t" + num(r.subject) + "\t" + num(r.absError) + "\t" + num(r.relError) +
           "\t" + num(r.tolerance) + "\t" + (r.pass ? "PASS" : "FAIL") + "\n";
  return out;
}

}  // namespace savg::oracle
