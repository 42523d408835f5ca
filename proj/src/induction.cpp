#include "savg/induction.hpp"

#include "savg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace savg {

namespace {

constexpr double kLogLo = -30.0;
constexpr double kLogHi = 30.0;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logSumExp(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

/// Root of an increasing function on [lo, hi]; clamps to the ends.
double bisect(const std::function<double(double)>& g, double lo = kLogLo, double hi = kLogHi) {
  if (g(lo) >= 0) return lo;
  if (g(hi) <= 0) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::uint64_t streamSeed(std::uint64_t base, std::uint64_t stream) { return Rng(base).split(stream).seed(); }

}  // namespace

void InductionConfig::validate() const {
  if (!(scoreTolerance > 0) || !(weightTolerance > 0) || !(scalingTolerance > 0) || !(sampledScalingTolerance > 0))
    throw std::invalid_argument("tolerances must be positive");
  if (!(weightFloor > 0) || weightFloor >= 1) throw std::invalid_argument("weight floor must lie in (0, 1)");
  if (maxDepth == 0) throw std::invalid_argument("max depth must be positive");
  if (maxPatternNodes == 0) throw std::invalid_argument("max pattern nodes must be positive");
  sampler.validate();
}

LabelSet observedEdgeLabels(const std::vector<Dag>& dags) {
  LabelSet labels;
  for (const auto& d : dags)
    for (const auto& n : d.nodes())
      for (const auto& e : n.out) labels.insert(e.label);
  return labels;
}

std::vector<Property> CandidateSet::all() const {
  auto out = atoms;
  out.insert(out.end(), combos.begin(), combos.end());
  return out;
}

CandidateSet generateCandidates(const FieldModel& field, const LabelSet& edgeLabels, Semantics semantics,
                                std::size_t maxPatternNodes) {
  CandidateSet set;
  std::set<std::string> seen;
  for (const auto& p : field.properties())
    if (p.semantics == semantics) seen.insert(p.pattern.key());

  std::vector<Pattern> atoms;
  for (const auto& label : field.grammar().symbols().labels()) {
    atoms.push_back(Pattern::single(label));
    if (seen.insert(atoms.back().key()).second) set.atoms.push_back({atoms.back(), semantics});
  }

  std::vector<Pattern> partners;
  for (const auto& p : field.properties()) partners.push_back(p.pattern);
  partners.insert(partners.end(), atoms.begin(), atoms.end());

  std::vector<Pattern> combos;
  for (const auto& prop : field.properties()) {
    const Pattern& a = prop.pattern;
    for (const auto& b : partners) {
      if (a.size() + b.size() > maxPatternNodes) continue;
      for (int u = 0; u < static_cast<int>(a.size()); ++u)
        for (int v = 0; v < static_cast<int>(b.size()); ++v)
          for (const auto& label : edgeLabels)
            for (bool aToB : {true, false})
              if (auto joined = Pattern::join(a, u, b, v, label, aToB); joined && seen.insert(joined->key()).second)
                combos.push_back(std::move(*joined));
    }
  }
  std::sort(combos.begin(), combos.end());
  for (auto& c : combos) set.combos.push_back({std::move(c), semantics});
  return set;
}

// ---------------------------------------------------------------- snapshot

FieldSnapshot exactSnapshot(const FieldModel& field, const Language& language, const Distribution& pTilde) {
  FieldSnapshot snap;
  const auto normalized = normalizeExact(field, language);
  snap.support = normalized.q.support();
  snap.q = normalized.q.probs();
  const auto kl = klDivergence(pTilde, normalized.q);
  if (!kl.finite()) throw InputError("corpus dag " + kl.offending->toString() + " is not in L(G)");
  snap.divergence = kl.value;
  snap.corpusDags = pTilde.support();
  return snap;
}

namespace {

/// ln of the CF probability mass of every derivation of `dag`.
double logDerivationMass(const FieldModel& field, const Dag& dag) {
  const auto ds = recoverDerivations(field.grammar(), dag);
  if (ds.empty()) return kNegInf;
  std::vector<double> logs;
  for (const auto& d : ds) logs.push_back(logTreeProbability(*field.theta(), d));
  return logSumExp(logs);
}

FieldSnapshot snapshotFromChain(const FieldModel& field, const Distribution& pTilde, const ChainSummary& chain) {
  FieldSnapshot snap;
  snap.sampled = true;
  const auto emp = chain.empirical();
  snap.support = emp.support();
  snap.q = emp.probs();
  snap.corpusDags = pTilde.support();
  // ln q(x) = ln F(x) + ln p_breve(x) - ln P_ok - ln Z
  const double logPok = std::log(std::max(1.0 - chain.failureRate(), 1e-300));
  const double logZ = chain.logMeanProposalFieldWeight;
  double d = 0;
  for (std::size_t i = 0; i < pTilde.size(); ++i) {
    const double p = pTilde.probs()[i];
    if (p == 0) continue;
    const auto& x = pTilde.support()[i];
    const double logQ = logFieldWeight(field, x) + logDerivationMass(field, x) - logPok - logZ;
    d += p * (std::log(p) - logQ);
  }
  snap.divergence = d;
  return snap;
}

}  // namespace

FieldSnapshot sampledSnapshot(const FieldModel& field, const Distribution& pTilde, const ChainConfig& chain) {
  return snapshotFromChain(field, pTilde, runChain(field, chain));
}

std::vector<double> histogram(const FieldSnapshot& snap, const Property& p) {
  std::vector<int> f;
  int kmax = 0;
  for (const auto& x : snap.support) {
    f.push_back(countProperty(p, x));
    kmax = std::max(kmax, f.back());
  }
  for (const auto& x : snap.corpusDags) kmax = std::max(kmax, countProperty(p, x));
  std::vector<double> h(static_cast<std::size_t>(kmax) + 3, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) h[static_cast<std::size_t>(f[i])] += snap.q[i];
  return h;
}

// ------------------------------------------------------------------ eq (1)

double tiltedMean(const std::vector<double>& hist, double beta) {
  const double lb = std::log(beta);
  std::vector<double> logs;
  for (std::size_t k = 0; k < hist.size(); ++k)
    if (hist[k] > 0) logs.push_back(std::log(hist[k]) + static_cast<double>(k) * lb);
  const double lz = logSumExp(logs);
  double mean = 0;
  for (std::size_t k = 0; k < hist.size(); ++k)
    if (hist[k] > 0) mean += static_cast<double>(k) * std::exp(std::log(hist[k]) + static_cast<double>(k) * lb - lz);
  return mean;
}

namespace {

/// t ln beta - ln sum_k h_k beta^k: the drop in divergence.
double gain(const std::vector<double>& hist, double target, double logBeta) {
  std::vector<double> logs;
  for (std::size_t k = 0; k < hist.size(); ++k)
    if (hist[k] > 0) logs.push_back(std::log(hist[k]) + static_cast<double>(k) * logBeta);
  return target * logBeta - logSumExp(logs);
}

}  // namespace

WeightSolution solveInitialWeight(const std::vector<double>& hist, double target, double oldDivergence,
                                  const InductionConfig& config) {
  WeightSolution s;
  s.newDivergence = oldDivergence;
  int kmin = -1, kmax = -1;
  for (std::size_t k = 0; k < hist.size(); ++k)
    if (hist[k] > 0) {
      if (kmin < 0) kmin = static_cast<int>(k);
      kmax = static_cast<int>(k);
    }
  if (kmin < 0 || kmin == kmax) {
    s.status = WeightStatus::Degenerate;
    return s;
  }
  const double edge = 1e-12 * std::max(1.0, static_cast<double>(kmax));
  double logBeta;
  if (target <= kmin + edge) {
    s.status = WeightStatus::Boundary;
    logBeta = std::log(config.weightFloor);
  } else if (target >= kmax - edge) {
    s.status = WeightStatus::Boundary;
    logBeta = -std::log(config.weightFloor);
  } else {
    logBeta = bisect([&](double lb) { return tiltedMean(hist, std::exp(lb)) - target; });
  }
  s.beta = std::exp(logBeta);
  s.score = gain(hist, target, logBeta);
  s.newDivergence = oldDivergence - s.score;
  return s;
}

WeightSolution solveInitialWeight(const FieldSnapshot& snap, const Property& candidate, const Distribution& pTilde,
                                  const InductionConfig& config) {
  const double target = expectation(pTilde, [&](const Dag& x) { return countProperty(candidate, x); });
  return solveInitialWeight(histogram(snap, candidate), target, snap.divergence, config);
}

std::optional<CandidateScore> selectProperty(const FieldSnapshot& snap, const std::vector<Property>& candidates,
                                             const Distribution& pTilde, const InductionConfig& config) {
  std::optional<CandidateScore> best;
  for (const auto& c : candidates) {
    auto sol = solveInitialWeight(snap, c, pTilde, config);
    if (!best) {
      best = CandidateScore{c, sol};
      continue;
    }
    const double diff = sol.score - best->solution.score;
    const double slack = 1e-12 * std::max(1.0, std::abs(best->solution.score));
    const bool better = diff > slack || (std::abs(diff) <= slack && c.pattern < best->property.pattern);
    if (better) best = CandidateScore{c, sol};
  }
  if (!best || best->solution.score <= config.scoreTolerance) return std::nullopt;
  return best;
}

// ------------------------------------------------------------------ eq (2)

namespace {

/// Everything one scaling round needs, over a fixed finite support.
struct ScalingProblem {
  std::vector<std::vector<int>> counts;  // counts[x][i]
  std::vector<int> total;                // f#(x)
  std::vector<double> logBase;           // ln p(x) up to a constant
  std::vector<double> target;            // p~[f_i]
};

ScalingProblem scalingProblem(const FieldModel& field, const std::vector<Dag>& support, std::vector<double> logBase,
                              const Distribution& pTilde) {
  ScalingProblem sp;
  sp.logBase = std::move(logBase);
  for (const auto& x : support) {
    sp.counts.push_back(propertyCounts(field, x));
    int t = 0;
    for (int c : sp.counts.back()) t += c;
    sp.total.push_back(t);
  }
  for (const auto& p : field.properties())
    sp.target.push_back(expectation(pTilde, [&](const Dag& x) { return countProperty(p, x); }));
  return sp;
}

std::vector<double> logQ(const ScalingProblem& sp, const std::vector<double>& logGamma) {
  std::vector<double> lq(sp.counts.size());
  for (std::size_t x = 0; x < lq.size(); ++x) {
    lq[x] = sp.logBase[x];
    for (std::size_t i = 0; i < logGamma.size(); ++i)
      if (sp.counts[x][i]) lq[x] += sp.counts[x][i] * logGamma[i];
  }
  const double lz = logSumExp(lq);
  for (auto& v : lq) v -= lz;
  return lq;
}

/// ln b_i per property; -inf marks "drive to zero".
std::vector<double> scalingFactors(const ScalingProblem& sp, const std::vector<double>& lq, std::vector<std::string>* warnings) {
  const std::size_t n = sp.target.size();
  std::vector<double> lb(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> base;
    std::vector<int> power;
    for (std::size_t x = 0; x < lq.size(); ++x)
      if (sp.counts[x][i] > 0) {
        base.push_back(lq[x] + std::log(static_cast<double>(sp.counts[x][i])));
        power.push_back(sp.total[x]);
      }
    if (sp.target[i] == 0) {
      lb[i] = kNegInf;
      continue;
    }
    if (base.empty()) {
      if (warnings) warnings->push_back("property " + std::to_string(i + 1) + " never occurs on the support; left unchanged");
      continue;
    }
    const double lt = std::log(sp.target[i]);
    std::vector<double> terms(base.size());
    lb[i] = bisect([&](double l) {
      for (std::size_t k = 0; k < base.size(); ++k) terms[k] = base[k] + power[k] * l;
      return logSumExp(terms) - lt;
    });
  }
  return lb;
}

}  // namespace

double exactDivergence(const FieldModel& field, const Language& language, const Distribution& pTilde) {
  auto kl = klDivergence(pTilde, normalizeExact(field, language).q);
  return kl.value;
}

namespace {

struct RoundOutcome {
  double maxChange = 0;
};

/// Applies one round's factors to logGamma, honouring the floor. Pinned
/// weights (at the floor and still pushed down) do not count as change.
RoundOutcome applyFactors(std::vector<double>& logGamma, const std::vector<double>& lb, const InductionConfig& config,
                          std::vector<bool>& floored) {
  RoundOutcome r;
  const double logFloor = std::log(config.weightFloor);
  for (std::size_t i = 0; i < logGamma.size(); ++i) {
    double l = lb[i] == kNegInf ? logFloor - 1.0 : lb[i];
    double next = config.updateRule == UpdateRule::Multiplicative ? logGamma[i] + l : l;
    bool pinned = false;
    if (next <= logFloor) {
      pinned = logGamma[i] <= logFloor + 1e-12 || lb[i] == kNegInf;
      next = logFloor;
      floored[i] = true;
    } else {
      floored[i] = false;
    }
    if (!pinned) r.maxChange = std::max(r.maxChange, std::abs(std::exp(next - logGamma[i]) - 1.0));
    logGamma[i] = next;
  }
  return r;
}

std::vector<double> logWeights(const FieldModel& field) {
  std::vector<double> lg;
  for (const auto& b : field.beta()) lg.push_back(std::log(b.value));
  return lg;
}

void storeWeights(FieldModel& field, const std::vector<double>& logGamma) {
  std::vector<Weight> w;
  for (double l : logGamma) w.emplace_back(std::exp(l));
  field.setBetas(std::move(w));
}

}  // namespace

AdjustResult adjustWeights(FieldModel& field, const Language& language, const Distribution& pTilde,
                           const InductionConfig& config) {
  AdjustResult res;
  res.floored.assign(field.size(), false);
  if (field.size() == 0) throw std::invalid_argument("adjusting weights needs at least one property");
  std::vector<double> logBase;
  for (const auto& item : language.items) logBase.push_back(std::log(initialMass(field, item)));
  const auto sp = scalingProblem(field, language.dags(), std::move(logBase), pTilde);

  std::vector<double> pt(language.items.size(), 0.0);
  double entropy = 0;
  for (std::size_t x = 0; x < pt.size(); ++x) {
    pt[x] = pTilde.probability(language.items[x].dag);
    if (pt[x] > 0) entropy += pt[x] * std::log(pt[x]);
  }
  auto divergence = [&](const std::vector<double>& lq) {
    double d = entropy;
    for (std::size_t x = 0; x < pt.size(); ++x)
      if (pt[x] > 0) d -= pt[x] * lq[x];
    return d;
  };

  auto logGamma = logWeights(field);
  auto lq = logQ(sp, logGamma);
  res.divergence.push_back(divergence(lq));
  for (std::size_t round = 0; round < config.maxScalingIterations; ++round) {
    const auto lb = scalingFactors(sp, lq, round == 0 ? &res.warnings : nullptr);
    const auto outcome = applyFactors(logGamma, lb, config, res.floored);
    lq = logQ(sp, logGamma);
    res.divergence.push_back(divergence(lq));
    ++res.rounds;
    const double before = res.divergence[res.divergence.size() - 2];
    if (res.divergence.back() > before + 1e-10 && res.monotone) {
      res.monotone = false;
      res.warnings.push_back("divergence rose in round " + std::to_string(round + 1) + " (" + formatDecimal(before) +
                             " -> " + formatDecimal(res.divergence.back()) + ")");
    }
    if (outcome.maxChange < config.scalingTolerance) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged)
    res.warnings.push_back("weight scaling did not converge in " + std::to_string(config.maxScalingIterations) + " rounds");
  for (std::size_t i = 0; i < res.floored.size(); ++i)
    if (res.floored[i]) res.warnings.push_back("property " + std::to_string(i + 1) + " weight held at the floor");
  storeWeights(field, logGamma);
  return res;
}

AdjustResult adjustWeightsSampled(FieldModel& field, const Distribution& pTilde, const InductionConfig& config) {
  AdjustResult res;
  res.floored.assign(field.size(), false);
  if (field.size() == 0) throw std::invalid_argument("adjusting weights needs at least one property");
  auto logGamma = logWeights(field);
  for (std::size_t round = 0; round < config.sampledMaxRounds; ++round) {
    ChainConfig chain = config.sampler;
    chain.seed = streamSeed(config.sampler.seed, 0x10000 + round + 1000 * field.size());
    const auto summary = runChain(field, chain);
    const auto snap = snapshotFromChain(field, pTilde, summary);
    res.divergence.push_back(snap.divergence);
    std::vector<double> logBase;
    for (double q : snap.q) logBase.push_back(std::log(q));
    // Chain frequencies already include the current weights.
    auto sp = scalingProblem(field, snap.support, std::move(logBase), pTilde);
    const auto lb = scalingFactors(sp, logQ(sp, std::vector<double>(field.size(), 0.0)), round == 0 ? &res.warnings : nullptr);
    const auto outcome = applyFactors(logGamma, lb, config, res.floored);
    storeWeights(field, logGamma);
    ++res.rounds;
    if (outcome.maxChange < config.sampledScalingTolerance) {
      res.converged = true;
      break;
    }
  }
  ChainConfig chain = config.sampler;
  chain.seed = streamSeed(config.sampler.seed, 0x20000 + field.size());
  res.divergence.push_back(sampledSnapshot(field, pTilde, chain).divergence);
  if (!res.converged)
    res.warnings.push_back("sampled weight scaling did not settle within " + std::to_string(config.sampledMaxRounds) +
                           " rounds");
  return res;
}

// --------------------------------------------------------------- induction

InductionResult induceField(const FieldModel& initial, const Distribution& pTilde, const InductionConfig& config) {
  config.validate();
  InductionResult res{FieldModel(initial.grammar(), initial.mode(), initial.theta()), {}, 0, false, false, {}};
  FieldModel& field = res.field;
  field.setGrammarPath(initial.grammarPath());

  std::optional<Language> language;
  if (config.mode != ExpectationMode::Sampled) {
    language = enumerateLanguage(field.grammar(), config.maxDepth);
    const bool tooBig = language->truncated || language->items.size() > config.exactThreshold;
    if (tooBig && config.mode == ExpectationMode::Exact)
      throw std::invalid_argument("exact mode needs a finite language; enumeration to depth " +
                                  std::to_string(config.maxDepth) + (language->truncated ? " was truncated" : " is too large"));
    if (tooBig) language.reset();
  }
  res.sampled = !language;
  if (res.sampled && field.mode() != InitialMode::Scfg)
    throw std::invalid_argument("sampled expectations need scfg initial mode");

  std::size_t snapshotCount = 0;
  auto snapshot = [&]() {
    if (language) return exactSnapshot(field, *language, pTilde);
    ChainConfig chain = config.sampler;
    chain.seed = streamSeed(config.sampler.seed, snapshotCount++);
    return sampledSnapshot(field, pTilde, chain);
  };

  auto snap = snapshot();
  res.initialDivergence = snap.divergence;
  double previous = snap.divergence;
  for (std::size_t step = 1;; ++step) {
    std::vector<Dag> seen = snap.support;
    seen.insert(seen.end(), pTilde.support().begin(), pTilde.support().end());
    const auto candidates = generateCandidates(field, observedEdgeLabels(seen), config.semantics, config.maxPatternNodes);
    auto choice = selectProperty(snap, candidates.all(), pTilde, config);
    if (!choice) {
      res.converged = true;
      break;
    }
    if (field.size() >= config.maxProperties) {
      res.warnings.push_back("stopped at " + std::to_string(config.maxProperties) +
                             " properties with candidate gain " + formatDecimal(choice->solution.score) + " left");
      break;
    }
    field.addProperty(choice->property, choice->solution.beta);
    AdjustResult adj = language ? adjustWeights(field, *language, pTilde, config) : adjustWeightsSampled(field, pTilde, config);
    for (auto& w : adj.warnings) res.warnings.push_back("step " + std::to_string(step) + ": " + w);
    snap = snapshot();
    // Trace D is the exact divergence in exact mode; the final chain
    // estimate in sampled mode.
    const double d = language ? snap.divergence : adj.divergence.back();
    res.trace.push_back({step, choice->property.toString(), choice->solution.beta, d, res.sampled});
    if (!(d < previous) && !res.sampled)
      res.warnings.push_back("step " + std::to_string(step) + ": divergence did not decrease");
    previous = d;
  }
  return res;
}

std::string formatTrace(const std::vector<TraceEntry>& trace) {
  std::ostringstream out;
  for (const auto& t : trace)
    out << t.step << '\t' << t.pattern << '\t' << formatDecimal(t.beta) << '\t' << formatDecimal(t.divergence) << '\t'
        << (t.sampled ? "sampled" : "exact") << '\n';
  return out.str();
}

}  // namespace savg
