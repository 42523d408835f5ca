#include "savg/fixtures.hpp"

#include <cmath>

namespace savg::fixtures {

const std::string_view kG1 = R"(start S
rule 1: S -> A A
rule 2: S -> B
rule 3: A -> 'a'
rule 4: A -> 'b'
rule 5: B -> 'a' 'a'
rule 6: B -> 'b' 'b'
)";

const std::string_view kG2 = R"(start S
rule 1: S -> A A | eq 1.1 = 2.1
rule 2: S -> B
rule 3: A -> 'a'
rule 4: A -> 'b'
rule 5: B -> 'a' 'a'
rule 6: B -> 'b' 'b'
)";

const std::string_view kSkewedCorpus = R"(4 (S (A a) (A a))
2 (S (A b) (A b))
3 (S (B a a))
3 (S (B b b))
)";

const std::string_view kUniformCorpus = R"(1 (S (A a) (A a))
1 (S (A b) (A b))
1 (S (B a a))
1 (S (B b b))
)";

const std::string_view kM1Weights = R"(rule 1 1/2
rule 2 1/2
rule 3 2/3
rule 4 1/3
rule 5 1/2
rule 6 1/2
)";

AvGrammar g1() { return parseGrammar(kG1); }
AvGrammar g2() { return parseGrammar(kG2); }
CfModel m1() { return parseWeights(g1().skeleton(), kM1Weights); }
std::vector<CorpusRecord> skewedCorpus() { return parseCorpus(kSkewedCorpus); }
std::vector<CorpusRecord> uniformCorpus() { return parseCorpus(kUniformCorpus); }

CfModel halfWeights() { return CfModel(g1().skeleton(), std::vector<Weight>(6, Weight(Rational(1, 2)))); }

std::vector<Weight> optimalRuleWeights() {
  const double r2 = std::sqrt(2.0);
  return {(3 + 2 * r2) / (6 + 2 * r2), 3 / (6 + 2 * r2), r2 / (1 + r2), 1 / (1 + r2), Weight(Rational(1, 2)),
          Weight(Rational(1, 2))};
}

FieldModel ruleField(const AvGrammar& g, const std::vector<Weight>& beta) {
  FieldModel m(g, InitialMode::Uniform);
  auto props = ruleProperties(g);
  for (std::size_t i = 0; i < props.size(); ++i) m.addProperty(std::move(props[i]), beta.at(i));
  return m;
}

CfModel flatG2Weights() {
  std::vector<Weight> w{Weight(Rational(2, 3)), Weight(Rational(1, 3))};
  for (int i = 0; i < 4; ++i) w.emplace_back(Rational(1, 2));
  return CfModel(g2().skeleton(), std::move(w));
}

FieldModel twoPropertyField(InitialMode mode) {
  auto g = g2();
  std::optional<CfModel> theta;
  if (mode == InitialMode::Scfg) theta = flatG2Weights();
  FieldModel m(g, mode, std::move(theta));
  m.addProperty({Pattern({"A", "a"}, {{0, "1", 1}}), Semantics::Embeddings}, std::sqrt(2.0));
  m.addProperty({Pattern::single("B"), Semantics::Embeddings}, Weight(Rational(3, 2)));
  return m;
}

}  // namespace savg::fixtures
