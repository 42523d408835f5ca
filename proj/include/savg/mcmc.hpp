#pragma once

#include "savg/field.hpp"
#include "savg/rng.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace savg {

struct ChainConfig {
  std::size_t burnIn = 5000;
  std::size_t length = 200000;  // steps after burn-in; every thinning-th is kept
  std::uint64_t seed = 0x5eed;
  std::size_t proposalResampleBudget = 100000;
  std::size_t thinning = 1;
  std::size_t depthCap = 50;

  /// Throws std::invalid_argument.
  void validate() const;
};

class ProposalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Proposal {
  Dag dag;
  Derivation derivation;
  double logProposalWeight = 0;  // ln of the derivation's CF probability
  std::size_t failures = 0;      // unification failures discarded first
};

/// Draws derivations from the CF analogue until one unifies. The
/// consistent-mass renormalizer is never needed: it cancels in the
/// acceptance ratio. Requires scfg mode; throws ProposalError when the
/// budget runs out.
Proposal proposeDag(const FieldModel& m, Rng& rng, std::size_t budget = 100000, std::size_t depthCap = 50);

/// min{1, F(proposed)/F(current)}, from log field weights.
double acceptanceProbability(const FieldModel& m, const Dag& current, const Dag& proposed);
double acceptanceProbability(double logFCurrent, double logFProposed);

struct Estimates {
  std::vector<double> means;
  std::vector<std::vector<double>> histograms;  // histograms[i][k] = q[f_i = k]
};

struct ChainSummary {
  struct Sample {
    Dag dag;
    Derivation derivation;
    std::size_t count = 0;
  };
  std::vector<Sample> samples;  // in order of first retention
  std::size_t retained = 0;
  std::size_t steps = 0;  // MH steps after the initial state
  std::size_t accepted = 0;
  std::size_t proposals = 0;
  std::size_t proposalFailures = 0;
  std::size_t depthResamples = 0;
  /// ln of the mean field weight over all proposals: an estimate of
  /// ln E_p[F], hence of ln Z.
  double logMeanProposalFieldWeight = 0;
  Estimates estimates;  // for the model's own properties
  ChainConfig config;

  double acceptanceRate() const { return steps ? static_cast<double>(accepted) / static_cast<double>(steps) : 0.0; }
  double failureRate() const {
    const auto drawn = proposals + proposalFailures;
    return drawn ? static_cast<double>(proposalFailures) / static_cast<double>(drawn) : 0.0;
  }
  /// Retained relative frequencies.
  Distribution empirical() const;
};

/// Independence Metropolis-Hastings with the CF proposal. The first
/// successful proposal is the initial state; rejected steps repeat the
/// current dag.
ChainSummary runChain(const FieldModel& m, const ChainConfig& config);

/// Means and histograms of each property over the retained states. Each
/// histogram runs from 0 to the largest observed value plus `guard`.
Estimates estimateExpectations(const ChainSummary& summary, const std::vector<Property>& properties,
                               std::size_t guard = 0);

struct BalanceReport {
  double maxViolation = 0;     // max_{x != y} |q(x)K(x,y) - q(y)K(y,x)|
  double maxStationarity = 0;  // max_y |(qK)(y) - q(y)|
  std::vector<std::vector<double>> kernel;
};

/// Builds the exact kernel K(x,y) = p(y) A(y|x) off the diagonal, with the
/// remaining mass on the diagonal. Uses p = 1/|L| in uniform mode.
BalanceReport detailedBalanceCheck(const FieldModel& m, const Language& language);

}  // namespace savg
