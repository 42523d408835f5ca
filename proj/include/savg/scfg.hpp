#pragma once

#include "savg/grammar.hpp"
#include "savg/numeric.hpp"
#include "savg/rng.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace savg {

/// A CF skeleton with one positive weight per rule.
class CfModel {
 public:
  /// Throws std::invalid_argument unless there is one weight per rule and
  /// every weight is positive and finite.
  CfModel(CfSkeleton skeleton, std::vector<Weight> theta);

  const CfSkeleton& skeleton() const { return skeleton_; }
  const std::vector<Weight>& theta() const { return theta_; }
  const Weight& weight(int ruleId) const { return theta_.at(static_cast<std::size_t>(ruleId - 1)); }

  /// Weights sharing a lhs sum to 1 within tol, for every lhs.
  bool isProper(double tol = 1e-9) const;

  /// Rule ids expanding `lhs`, ascending.
  const std::vector<int>& group(std::string_view lhs) const;

 private:
  CfSkeleton skeleton_;
  std::vector<Weight> theta_;
  std::map<std::string, std::vector<int>, std::less<>> groups_;
};

/// f_i(d): number of uses of each rule, indexed by rule id.
struct RuleFrequencies {
  std::vector<int> counts;  // counts[id - 1]

  int operator[](int ruleId) const { return counts.at(static_cast<std::size_t>(ruleId - 1)); }
  int total() const;
};

RuleFrequencies ruleFrequencies(const CfSkeleton& s, const Derivation& d);

/// sum_i f_i(d) ln theta_i.
double logTreeProbability(const CfModel& m, const Derivation& d);
/// prod_i theta_i^f_i(d), accumulated in log space.
double treeProbability(const CfModel& m, const Derivation& d);
/// The exact product, when every weight the derivation uses is exact.
std::optional<Rational> exactTreeProbability(const CfModel& m, const Derivation& d);

/// Index of the most probable parse. Ties go to the lexicographically
/// smallest rule sequence. Throws std::invalid_argument on an empty list.
std::size_t disambiguate(const CfModel& m, std::span<const Derivation> parses);

/// One `<count> <bracketed tree>` line of a corpus file.
struct CorpusRecord {
  long long count = 0;
  std::string tree;
  int line = 0;
};

/// Throws InputError naming every malformed line. Blank lines and '#'
/// comments are skipped.
std::vector<CorpusRecord> parseCorpus(std::string_view text);
std::vector<CorpusRecord> loadCorpus(const std::filesystem::path& path);
std::string formatCorpus(const std::vector<CorpusRecord>& records);

/// Counted derivations; p~(x_i) = c_i / sum_j c_j.
struct EmpiricalDistribution {
  struct Entry {
    Derivation derivation;
    long long count = 0;
  };
  std::vector<Entry> entries;  // identical trees merged
  long long total = 0;

  Rational probability(std::size_t i) const { return Rational(entries[i].count, total); }
};

/// Parses each record's tree against the skeleton. Throws InputError
/// listing every record that does not parse.
EmpiricalDistribution derivationCorpus(const CfSkeleton& s, const std::vector<CorpusRecord>& records);

/// p~[f_i] for every rule, exactly.
std::vector<Rational> expectedRuleFrequencies(const CfSkeleton& s, const EmpiricalDistribution& corpus);

/// Expected rule frequency estimate: theta_i proportional to p~[f_i] within
/// each lhs group. A group with zero total gets uniform weights. Weights
/// are exact rationals.
CfModel erfEstimate(const CfSkeleton& s, const EmpiricalDistribution& corpus);

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SamplingLimits {
  std::size_t depthCap = 50;
  std::size_t resampleBudget = 10000;
};

/// Top-down stochastic derivation. A derivation that exceeds the depth cap
/// is abandoned and redrawn; `resamples` (if given) accumulates how often.
/// Throws SamplingError when the budget runs out.
Derivation sampleDerivation(const CfModel& m, Rng& rng, const SamplingLimits& limits = {},
                            std::size_t* resamples = nullptr);

/// `rule <id> <weight>` lines; weights may be fractions.
CfModel parseWeights(const CfSkeleton& s, std::string_view text);
CfModel loadWeights(const CfSkeleton& s, const std::filesystem::path& path);
std::string formatWeights(const CfModel& m);

}  // namespace savg
