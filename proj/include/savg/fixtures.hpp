#pragma once

#include "savg/field.hpp"
#include "savg/grammar.hpp"
#include "savg/scfg.hpp"

#include <string_view>
#include <vector>

/// The desk-scale grammars, corpora and models the tests and the
/// oracle-check command are pinned to.
namespace savg::fixtures {

/// S -> A A | B, A -> a | b, B -> a a | b b, no constraints.
extern const std::string_view kG1;
/// kG1 with the two A daughters forced to share their atom.
extern const std::string_view kG2;
/// 4 x [S [A a][A a]], 2 x [S [A b][A b]], 3 x [S [B a a]], 3 x [S [B b b]].
extern const std::string_view kSkewedCorpus;
/// One of each dag of L(G2).
extern const std::string_view kUniformCorpus;
/// (1/2, 1/2, 2/3, 1/3, 1/2, 1/2).
extern const std::string_view kM1Weights;

AvGrammar g1();
AvGrammar g2();
CfModel m1();
std::vector<CorpusRecord> skewedCorpus();
std::vector<CorpusRecord> uniformCorpus();

/// All weights 1/2.
CfModel halfWeights();

/// Rule weights under which the rule-local-tree field over G2 reproduces the
/// skewed corpus exactly (they involve sqrt 2).
std::vector<Weight> optimalRuleWeights();

/// Rule-local-tree properties over `g` weighted by `beta`, uniform initial.
FieldModel ruleField(const AvGrammar& g, const std::vector<Weight>& beta);

/// G2 with two properties: A -1-> a (embeddings) at sqrt 2 and a single B
/// node at 3/2. In scfg mode the initial weights make p uniform over L(G2).
FieldModel twoPropertyField(InitialMode mode = InitialMode::Uniform);

/// CF weights under which p restricted to L(G2) is uniform.
CfModel flatG2Weights();

}  // namespace savg::fixtures
