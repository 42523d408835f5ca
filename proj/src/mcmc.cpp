#include "savg/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace savg {

void ChainConfig::validate() const {
  if (length == 0) throw std::invalid_argument("chain length must be positive");
  if (thinning == 0) throw std::invalid_argument("thinning must be positive");
  if (depthCap == 0) throw std::invalid_argument("depth cap must be positive");
}

namespace {

std::string derivationKey(const Derivation& d) {
  std::string key;
  for (int id : ruleSequence(d)) key += std::to_string(id) + ',';
  return key;
}

const CfModel& proposalModel(const FieldModel& m) {
  if (m.mode() != InitialMode::Scfg || !m.theta())
    throw std::invalid_argument("sampling needs a model in scfg initial mode");
  return *m.theta();
}

[[noreturn]] void throwBudgetExhausted(std::size_t budget, std::size_t failures, std::size_t depth) {
  throw ProposalError("no consistent derivation in " + std::to_string(budget) + " proposals (" +
                      std::to_string(failures) + " unification failures, " + std::to_string(depth) +
                      " depth-cap resamples)");
}

}  // namespace

Proposal proposeDag(const FieldModel& m, Rng& rng, std::size_t budget, std::size_t depthCap) {
  const auto& theta = proposalModel(m);
  Proposal p;
  std::size_t depth = 0;
  for (std::size_t i = 0; i < budget; ++i) {
    Derivation d = sampleDerivation(theta, rng, {depthCap, budget}, &depth);
    auto result = deriveDag(m.grammar(), d);
    if (auto* dag = std::get_if<Dag>(&result)) {
      p.dag = std::move(*dag);
      p.logProposalWeight = logTreeProbability(theta, d);
      p.derivation = std::move(d);
      return p;
    }
    ++p.failures;
  }
  throwBudgetExhausted(budget, p.failures, depth);
}

double acceptanceProbability(double logFCurrent, double logFProposed) {
  const double diff = logFProposed - logFCurrent;
  return diff >= 0 ? 1.0 : std::exp(diff);
}

double acceptanceProbability(const FieldModel& m, const Dag& current, const Dag& proposed) {
  return acceptanceProbability(logFieldWeight(m, current), logFieldWeight(m, proposed));
}

Distribution ChainSummary::empirical() const {
  std::vector<Dag> dags;
  std::vector<double> w;
  for (const auto& s : samples) {
    dags.push_back(s.dag);
    w.push_back(static_cast<double>(s.count));
  }
  return Distribution::fromWeights(dags, w);
}

ChainSummary runChain(const FieldModel& m, const ChainConfig& config) {
  config.validate();
  const auto& theta = proposalModel(m);
  Rng rng(config.seed);
  ChainSummary out;
  out.config = config;

  // Derivation key -> cached outcome; index into `states`, or -1 on failure.
  struct State {
    Dag dag;
    Derivation derivation;
    double logF;
    std::size_t sample = std::numeric_limits<std::size_t>::max();
  };
  std::vector<State> states;
  std::unordered_map<std::string, int> byDerivation;
  std::unordered_map<std::string, int> byDag;

  // Running log-sum-exp of F over proposals.
  double logSumF = -std::numeric_limits<double>::infinity();

  auto propose = [&]() -> int {
    for (std::size_t i = 0; i < config.proposalResampleBudget; ++i) {
      Derivation d = sampleDerivation(theta, rng, {config.depthCap, config.proposalResampleBudget}, &out.depthResamples);
      auto key = derivationKey(d);
      auto it = byDerivation.find(key);
      if (it == byDerivation.end()) {
        int idx = -1;
        auto result = deriveDag(m.grammar(), d);
        if (auto* dag = std::get_if<Dag>(&result)) {
          auto found = byDag.find(dag->key());
          if (found != byDag.end()) {
            idx = found->second;
          } else {
            idx = static_cast<int>(states.size());
            byDag.emplace(dag->key(), idx);
            const double lf = logFieldWeight(m, *dag);
            states.push_back({std::move(*dag), d, lf});
          }
        }
        it = byDerivation.emplace(std::move(key), idx).first;
      }
      if (it->second < 0) {
        ++out.proposalFailures;
        continue;
      }
      ++out.proposals;
      const double lf = states[static_cast<std::size_t>(it->second)].logF;
      logSumF = std::max(logSumF, lf) + std::log1p(std::exp(-std::abs(logSumF - lf)));
      return it->second;
    }
    throwBudgetExhausted(config.proposalResampleBudget, out.proposalFailures, out.depthResamples);
  };

  auto retain = [&](int idx) {
    auto& s = states[static_cast<std::size_t>(idx)];
    if (s.sample == std::numeric_limits<std::size_t>::max()) {
      s.sample = out.samples.size();
      out.samples.push_back({s.dag, s.derivation, 0});
    }
    ++out.samples[s.sample].count;
    ++out.retained;
  };

  int current = propose();
  const std::size_t total = config.burnIn + config.length;
  for (std::size_t step = 1; step <= total; ++step) {
    const int proposed = propose();
    const double a = acceptanceProbability(states[static_cast<std::size_t>(current)].logF,
                                           states[static_cast<std::size_t>(proposed)].logF);
    const double u = rng.uniform();
    if (u < a) {
      current = proposed;
      ++out.accepted;
    }
    ++out.steps;
    if (step > config.burnIn && (step - config.burnIn) % config.thinning == 0) retain(current);
  }
  out.logMeanProposalFieldWeight = logSumF - std::log(static_cast<double>(out.proposals));
  out.estimates = estimateExpectations(out, m.properties());
  return out;
}

Estimates estimateExpectations(const ChainSummary& summary, const std::vector<Property>& properties,
                               std::size_t guard) {
  if (summary.retained == 0) throw std::invalid_argument("empty chain summary");
  Estimates e;
  const double n = static_cast<double>(summary.retained);
  for (const auto& p : properties) {
    std::vector<std::pair<int, std::size_t>> observed;
    int kmax = 0;
    for (const auto& s : summary.samples) {
      const int f = countProperty(p, s.dag);
      observed.emplace_back(f, s.count);
      kmax = std::max(kmax, f);
    }
    std::vector<double> hist(static_cast<std::size_t>(kmax) + 1 + guard, 0.0);
    double mean = 0;
    for (const auto& [f, c] : observed) {
      hist[static_cast<std::size_t>(f)] += static_cast<double>(c) / n;
      mean += static_cast<double>(f) * static_cast<double>(c) / n;
    }
    e.means.push_back(mean);
    e.histograms.push_back(std::move(hist));
  }
  return e;
}

BalanceReport detailedBalanceCheck(const FieldModel& m, const Language& language) {
  const auto normalized = normalizeExact(m, language);
  const auto& q = normalized.q.probs();
  const std::size_t n = language.items.size();
  std::vector<double> p(n), logF(n);
  double mass = 0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = initialMass(m, language.items[i]);
    mass += p[i];
    logF[i] = logFieldWeight(m, language.items[i].dag);
  }
  for (auto& x : p) x /= mass;

  BalanceReport r;
  r.kernel.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t x = 0; x < n; ++x) {
    double off = 0;
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      r.kernel[x][y] = p[y] * acceptanceProbability(logF[x], logF[y]);
      off += r.kernel[x][y];
    }
    r.kernel[x][x] = 1.0 - off;
  }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y)
      r.maxViolation = std::max(r.maxViolation, std::abs(q[x] * r.kernel[x][y] - q[y] * r.kernel[y][x]));
  for (std::size_t y = 0; y < n; ++y) {
    double flow = 0;
    for (std::size_t x = 0; x < n; ++x) flow += q[x] * r.kernel[x][y];
    r.maxStationarity = std::max(r.maxStationarity, std::abs(flow - q[y]));
  }
  return r;
}

}  // namespace savg
