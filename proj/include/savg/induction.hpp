#pragma once

#include "savg/field.hpp"
#include "savg/mcmc.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace savg {

enum class ExpectationMode { Auto, Exact, Sampled };
enum class UpdateRule { Multiplicative, Replace };

struct InductionConfig {
  std::size_t maxProperties = 8;
  double scoreTolerance = 1e-6;
  double weightTolerance = 1e-10;
  double scalingTolerance = 1e-9;
  std::size_t maxScalingIterations = 20000;
  double sampledScalingTolerance = 0.02;
  std::size_t sampledMaxRounds = 30;
  ChainConfig sampler{1000, 50000};
  std::size_t exactThreshold = 10000;
  std::size_t maxDepth = 10;
  Semantics semantics = Semantics::Presence;
  ExpectationMode mode = ExpectationMode::Auto;
  UpdateRule updateRule = UpdateRule::Multiplicative;
  double weightFloor = 1e-9;
  std::size_t maxPatternNodes = 6;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct EdgeLabelOrder {
  bool operator()(const std::string& a, const std::string& b) const { return edgeLabelLess(a, b); }
};
using LabelSet = std::set<std::string, EdgeLabelOrder>;

/// Edge labels occurring in the given dags.
LabelSet observedEdgeLabels(const std::vector<Dag>& dags);

struct CandidateSet {
  std::vector<Property> atoms;
  std::vector<Property> combos;

  std::vector<Property> all() const;
};

/// Atoms: one single-node pattern per grammar label. Combos: a field
/// property joined by one arc to another field property or an atom, over
/// every attachment point, direction and observed edge label. Patterns
/// already in the field and patterns above maxPatternNodes are left out.
CandidateSet generateCandidates(const FieldModel& field, const LabelSet& edgeLabels, Semantics semantics,
                                std::size_t maxPatternNodes = 6);

/// The current field q_old seen through a finite support: the full
/// enumeration (exact) or the distinct states of a chain (sampled).
struct FieldSnapshot {
  std::vector<Dag> support;
  std::vector<double> q;
  double divergence = 0;  // D(p~ || q_old), estimated in sampled mode
  bool sampled = false;
  std::vector<Dag> corpusDags;  // p~'s support, for histogram bounds
};

FieldSnapshot exactSnapshot(const FieldModel& field, const Language& language, const Distribution& pTilde);
/// Runs one chain; D uses Z ~ mean proposal field weight and the
/// consistent-derivation mass ~ 1 - failure rate.
FieldSnapshot sampledSnapshot(const FieldModel& field, const Distribution& pTilde, const ChainConfig& chain);

/// q_old[f = k] for k = 0..kmax, with kmax the largest count seen on the
/// snapshot or the corpus, plus two guard buckets.
std::vector<double> histogram(const FieldSnapshot& snap, const Property& p);

enum class WeightStatus { Solved, Boundary, Degenerate };

struct WeightSolution {
  double beta = 1;
  double newDivergence = 0;
  double score = 0;
  WeightStatus status = WeightStatus::Solved;
};

/// Solves q_{f,beta}[f] = p~[f] by bisection on ln beta in [-30, 30] against
/// the histogram. A target at the edge of the histogram's range gives a
/// Boundary result with beta clamped to floor or 1/floor; a candidate
/// constant on the support is Degenerate (beta 1, score 0).
WeightSolution solveInitialWeight(const std::vector<double>& hist, double target, double oldDivergence,
                                  const InductionConfig& config = {});
WeightSolution solveInitialWeight(const FieldSnapshot& snap, const Property& candidate, const Distribution& pTilde,
                                  const InductionConfig& config = {});

/// q_{f,beta}[f] from a histogram.
double tiltedMean(const std::vector<double>& hist, double beta);

struct CandidateScore {
  Property property;
  WeightSolution solution;
};

/// Best-scoring candidate, ties to fewer nodes and then pattern order;
/// empty (the stop signal) when no score exceeds scoreTolerance.
std::optional<CandidateScore> selectProperty(const FieldSnapshot& snap, const std::vector<Property>& candidates,
                                             const Distribution& pTilde, const InductionConfig& config = {});

struct AdjustResult {
  std::size_t rounds = 0;
  bool converged = false;
  std::vector<double> divergence;  // after each round, starting with the input field
  std::vector<bool> floored;       // per property
  std::vector<std::string> warnings;
  bool monotone = true;
};

/// Iterative scaling: each round solves, for every i at once,
/// sum_x q(x) f_i(x) b_i^{f#(x)} = p~[f_i] and rescales the weights by the
/// b_i (or sets them to b_i under UpdateRule::Replace).
AdjustResult adjustWeights(FieldModel& field, const Language& language, const Distribution& pTilde,
                           const InductionConfig& config = {});
/// The same with expectations from a fresh chain per round.
AdjustResult adjustWeightsSampled(FieldModel& field, const Distribution& pTilde, const InductionConfig& config = {});

/// D(p~ || q) over a full enumeration.
double exactDivergence(const FieldModel& field, const Language& language, const Distribution& pTilde);

struct TraceEntry {
  std::size_t step = 0;
  std::string pattern;
  double beta = 1;        // the initial weight at selection
  double divergence = 0;  // after readjustment
  bool sampled = false;
};

struct InductionResult {
  FieldModel field;
  std::vector<TraceEntry> trace;
  double initialDivergence = 0;
  bool converged = false;
  bool sampled = false;
  std::vector<std::string> warnings;
};

/// Starts from the null field over `initial` (its properties are dropped)
/// and alternates selection and readjustment until the stop signal or
/// maxProperties.
InductionResult induceField(const FieldModel& initial, const Distribution& pTilde, const InductionConfig& config = {});

std::string formatTrace(const std::vector<TraceEntry>& trace);

}  // namespace savg
