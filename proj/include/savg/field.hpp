#pragma once

#include "savg/distribution.hpp"
#include "savg/grammar.hpp"
#include "savg/numeric.hpp"
#include "savg/pattern.hpp"
#include "savg/scfg.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace savg {

enum class Semantics { Embeddings, Presence };
enum class InitialMode { Uniform, Scfg };

std::string_view toString(Semantics s);
std::string_view toString(InitialMode m);
/// Throw std::invalid_argument on unknown names.
Semantics parseSemantics(std::string_view name);
InitialMode parseInitialMode(std::string_view name);

struct Property {
  Pattern pattern;
  Semantics semantics = Semantics::Embeddings;

  /// Pattern key, suffixed with "(presence)" in presence mode.
  std::string toString() const;
  friend bool operator==(const Property&, const Property&) = default;
};

/// Injective maps from pattern nodes to dag nodes that preserve node
/// labels and map every pattern edge onto a dag edge with the same label.
std::size_t countEmbeddings(const Pattern& pattern, const Dag& dag);
/// Embeddings, or min(1, embeddings) in presence mode.
int countProperty(const Property& p, const Dag& dag);

/// One embeddings-mode property per rule: the lhs node with an arc to each
/// rhs item.
std::vector<Property> ruleProperties(const AvGrammar& g);

/// Initial distribution p plus weighted properties.
///
/// In uniform mode p(x) is the constant 1 (Z absorbs |L(G)|). In scfg mode
/// p(x) is the CF-analogue mass of x's derivations divided by the mass of
/// all consistent derivations. Any mutation bumps version() and drops the
/// cached normalizer.
class FieldModel {
 public:
  struct ZCache {
    double z = 0;
    std::optional<Rational> exactZ;
    std::size_t languageSize = 0;
    std::uint64_t version = 0;
  };

  /// Scfg mode requires theta; theta's skeleton must be the grammar's.
  FieldModel(AvGrammar grammar, InitialMode mode, std::optional<CfModel> theta = std::nullopt);

  const AvGrammar& grammar() const { return grammar_; }
  InitialMode mode() const { return mode_; }
  const std::optional<CfModel>& theta() const { return theta_; }
  const std::vector<Property>& properties() const { return properties_; }
  const std::vector<Weight>& beta() const { return beta_; }
  std::size_t size() const { return properties_.size(); }
  std::uint64_t version() const { return version_; }

  void addProperty(Property p, Weight beta);
  void setBeta(std::size_t i, Weight beta);
  void setBetas(std::vector<Weight> beta);

  /// Present only when computed at the current version.
  std::optional<ZCache> zCache() const;
  void storeZ(ZCache cache);

  const std::string& grammarPath() const { return grammarPath_; }
  void setGrammarPath(std::string path) { grammarPath_ = std::move(path); }

 private:
  void touch();

  AvGrammar grammar_;
  InitialMode mode_;
  std::optional<CfModel> theta_;
  std::vector<Property> properties_;
  std::vector<Weight> beta_;
  std::uint64_t version_ = 0;
  std::optional<ZCache> zCache_;
  std::string grammarPath_;
};

std::vector<int> propertyCounts(const FieldModel& m, const Dag& dag);

/// sum_i f_i(x) ln beta_i.
double logFieldWeight(const FieldModel& m, const Dag& dag);
/// F(x) = prod_i beta_i^f_i(x).
double fieldWeight(const FieldModel& m, const Dag& dag);
std::optional<Rational> exactFieldWeight(const FieldModel& m, const Dag& dag);

/// p(x) up to the consistent-derivation mass: 1 in uniform mode, the summed
/// tree probability of the item's derivations in scfg mode.
double initialMass(const FieldModel& m, const LanguageItem& item);

/// F(x) times initialMass. The Dag overload recovers the derivations and
/// throws std::invalid_argument when x has none.
double unnormalized(const FieldModel& m, const LanguageItem& item);
double unnormalized(const FieldModel& m, const Dag& dag);

struct NormalizedField {
  Distribution q;
  double z = 0;
  std::optional<Rational> exactZ;
  std::optional<std::vector<Rational>> exactProbs;
  double consistentMass = 1;  // P_ok in scfg mode, 1 in uniform mode
};

/// q over a full enumeration. Exact rationals are carried along when every
/// weight involved is exact. Throws std::invalid_argument on an empty
/// language.
NormalizedField normalizeExact(const FieldModel& m, const Language& language);
/// Also stores Z in the model's cache.
NormalizedField normalizeAndCache(FieldModel& m, const Language& language);

struct KlResult {
  double value = 0;
  std::optional<Dag> offending;  // a p~-supported dag with q = 0

  bool finite() const { return !offending; }
};

/// D(p~ || q) = sum_x p~(x) ln(p~(x) / q(x)).
KlResult klDivergence(const Distribution& pTilde, const Distribution& q);

/// p~ over dags: records are parsed against the CF skeleton and unified.
/// Throws InputError naming every record that does not parse or unify.
Distribution empiricalFromCorpus(const AvGrammar& g, const std::vector<CorpusRecord>& records);

}  // namespace savg
