#include "savg/scfg.hpp"

#include "savg/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace savg {

CfModel::CfModel(CfSkeleton skeleton, std::vector<Weight> theta) : skeleton_(std::move(skeleton)), theta_(std::move(theta)) {
  if (theta_.size() != skeleton_.rules.size())
    throw std::invalid_argument("expected " + std::to_string(skeleton_.rules.size()) + " rule weights, got " +
                                std::to_string(theta_.size()));
  for (std::size_t i = 0; i < theta_.size(); ++i)
    if (!(theta_[i].value > 0) || !std::isfinite(theta_[i].value))
      throw std::invalid_argument("rule " + std::to_string(i + 1) + " weight must be positive");
  for (const auto& r : skeleton_.rules) groups_[r.lhs].push_back(r.id);
}

const std::vector<int>& CfModel::group(std::string_view lhs) const {
  auto it = groups_.find(lhs);
  if (it == groups_.end()) throw std::out_of_range("no rules for '" + std::string(lhs) + "'");
  return it->second;
}

bool CfModel::isProper(double tol) const {
  std::map<std::string, double> sums;
  for (const auto& r : skeleton_.rules) sums[r.lhs] += weight(r.id).value;
  return std::all_of(sums.begin(), sums.end(), [&](const auto& kv) { return std::abs(kv.second - 1.0) <= tol; });
}

int RuleFrequencies::total() const {
  int t = 0;
  for (int c : counts) t += c;
  return t;
}

RuleFrequencies ruleFrequencies(const CfSkeleton& s, const Derivation& d) {
  RuleFrequencies f{std::vector<int>(s.rules.size(), 0)};
  for (int id : ruleSequence(d)) ++f.counts.at(static_cast<std::size_t>(id - 1));
  return f;
}

double logTreeProbability(const CfModel& m, const Derivation& d) {
  const auto f = ruleFrequencies(m.skeleton(), d);
  double logp = 0;
  for (std::size_t i = 0; i < f.counts.size(); ++i)
    if (f.counts[i] > 0) logp += f.counts[i] * std::log(m.theta()[i].value);
  return logp;
}

double treeProbability(const CfModel& m, const Derivation& d) { return std::exp(logTreeProbability(m, d)); }

std::optional<Rational> exactTreeProbability(const CfModel& m, const Derivation& d) {
  const auto f = ruleFrequencies(m.skeleton(), d);
  Rational p = 1;
  for (std::size_t i = 0; i < f.counts.size(); ++i) {
    if (f.counts[i] == 0) continue;
    if (!m.theta()[i].exact) return std::nullopt;
    for (int k = 0; k < f.counts[i]; ++k) p *= *m.theta()[i].exact;
  }
  return p;
}

std::size_t disambiguate(const CfModel& m, std::span<const Derivation> parses) {
  if (parses.empty()) throw std::invalid_argument("no parses to disambiguate");
  std::size_t best = 0;
  double bestLog = logTreeProbability(m, parses[0]);
  auto bestSeq = ruleSequence(parses[0]);
  for (std::size_t i = 1; i < parses.size(); ++i) {
    const double lp = logTreeProbability(m, parses[i]);
    auto seq = ruleSequence(parses[i]);
    // Relative slack so equal weights reached by different products tie.
    const double slack = 1e-12 * std::max(1.0, std::abs(bestLog));
    if (lp > bestLog + slack || (std::abs(lp - bestLog) <= slack && seq < bestSeq)) {
      best = i;
      bestLog = lp;
      bestSeq = std::move(seq);
    }
  }
  return best;
}

// ------------------------------------------------------------------ corpus

std::vector<CorpusRecord> parseCorpus(std::string_view text) {
  std::vector<CorpusRecord> records;
  std::vector<int> bad;
  std::string firstReason;
  std::istringstream in{std::string(text)};
  int lineNo = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineNo;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i == line.size()) continue;
    std::size_t j = i;
    while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
    std::string rest = line.substr(j);
    auto start = rest.find_first_not_of(" \t");
    long long count = 0;
    bool ok = j > i && j - i <= 18 && j < line.size() && std::isspace(static_cast<unsigned char>(line[j])) &&
              start != std::string::npos && rest[start] == '(';
    if (ok) {
      count = std::stoll(line.substr(i, j - i));
      ok = count > 0;
    }
    if (!ok) {
      if (bad.empty()) firstReason = "expected '<positive count> (<tree>)'";
      bad.push_back(lineNo);
      continue;
    }
    auto end = rest.find_last_not_of(" \t\r");
    records.push_back({count, rest.substr(start, end - start + 1), lineNo});
  }
  if (!bad.empty()) {
    std::string lines;
    for (int b : bad) lines += (lines.empty() ? "" : ", ") + std::to_string(b);
    throw InputError("malformed corpus record on line(s) " + lines + ": " + firstReason, bad.front());
  }
  return records;
}

std::vector<CorpusRecord> loadCorpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open corpus file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parseCorpus(buf.str());
}

std::string formatCorpus(const std::vector<CorpusRecord>& records) {
  std::string out;
  for (const auto& r : records) out += std::to_string(r.count) + " " + r.tree + "\n";
  return out;
}

EmpiricalDistribution derivationCorpus(const CfSkeleton& s, const std::vector<CorpusRecord>& records) {
  EmpiricalDistribution corpus;
  std::vector<std::string> errors;
  int firstBad = 0;
  for (const auto& rec : records) {
    try {
      Derivation d = parseTree(s, rec.tree);
      auto it = std::find_if(corpus.entries.begin(), corpus.entries.end(),
                             [&](const EmpiricalDistribution::Entry& e) { return e.derivation == d; });
      if (it == corpus.entries.end())
        corpus.entries.push_back({std::move(d), rec.count});
      else
        it->count += rec.count;
      corpus.total += rec.count;
    } catch (const InputError& e) {
      if (!firstBad) firstBad = rec.line;
      errors.push_back("line " + std::to_string(rec.line) + ": " + e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = "unusable corpus records:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw InputError(msg, firstBad);
  }
  if (corpus.entries.empty()) throw InputError("corpus is empty");
  return corpus;
}

std::vector<Rational> expectedRuleFrequencies(const CfSkeleton& s, const EmpiricalDistribution& corpus) {
  std::vector<Rational> expect(s.rules.size(), Rational(0));
  for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
    const auto f = ruleFrequencies(s, corpus.entries[i].derivation);
    const Rational p = corpus.probability(i);
    for (std::size_t r = 0; r < f.counts.size(); ++r)
      if (f.counts[r]) expect[r] += p * f.counts[r];
  }
  return expect;
}

CfModel erfEstimate(const CfSkeleton& s, const EmpiricalDistribution& corpus) {
  const auto expect = expectedRuleFrequencies(s, corpus);
  std::map<std::string, Rational> groupTotal;
  std::map<std::string, int> groupSize;
  for (const auto& r : s.rules) {
    groupTotal[r.lhs] += expect[static_cast<std::size_t>(r.id - 1)];
    ++groupSize[r.lhs];
  }
  std::vector<Weight> theta;
  for (const auto& r : s.rules) {
    const Rational& total = groupTotal[r.lhs];
    theta.emplace_back(total == 0 ? Rational(1, groupSize[r.lhs]) : expect[static_cast<std::size_t>(r.id - 1)] / total);
  }
  // A rule unused within a used group gets weight 0, which CfModel rejects.
  for (std::size_t i = 0; i < theta.size(); ++i)
    if (theta[i].value == 0)
      throw InputError("rule " + std::to_string(i + 1) + " never occurs in the corpus; its ERF weight is 0");
  return CfModel(s, std::move(theta));
}

// ---------------------------------------------------------------- sampling

namespace {

struct Cutoff {};

Derivation expand(const CfModel& m, Rng& rng, const std::string& cat, std::size_t depth, std::size_t cap) {
  if (depth > cap) throw Cutoff{};
  const auto& ids = m.group(cat);
  double total = 0;
  for (int id : ids) total += m.weight(id).value;
  double u = rng.uniform() * total;
  int chosen = ids.back();
  for (int id : ids) {
    u -= m.weight(id).value;
    if (u < 0) {
      chosen = id;
      break;
    }
  }
  Derivation d{chosen, {}};
  for (const auto& item : m.skeleton().rule(chosen).rhs)
    if (!item.isTerminal()) d.children.push_back(expand(m, rng, item.symbol, depth + 1, cap));
  return d;
}

}  // namespace

Derivation sampleDerivation(const CfModel& m, Rng& rng, const SamplingLimits& limits, std::size_t* resamples) {
  for (std::size_t attempt = 0; attempt <= limits.resampleBudget; ++attempt) {
    try {
      return expand(m, rng, m.skeleton().symbols.start, 1, limits.depthCap);
    } catch (const Cutoff&) {
      if (resamples) ++*resamples;
    }
  }
  throw SamplingError("every one of " + std::to_string(limits.resampleBudget + 1) +
                      " derivation attempts exceeded depth cap " + std::to_string(limits.depthCap));
}

// ----------------------------------------------------------------- weights

CfModel parseWeights(const CfSkeleton& s, std::string_view text) {
  std::vector<std::optional<Weight>> theta(s.rules.size());
  std::istringstream in{std::string(text)};
  int lineNo = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineNo;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string kw, id, value, extra;
    if (!(words >> kw)) continue;
    if (kw != "rule" || !(words >> id >> value) || (words >> extra)) throw InputError("expected 'rule <id> <weight>'", lineNo);
    int rid = 0;
    try {
      std::size_t used = 0;
      rid = std::stoi(id, &used);
      if (used != id.size()) throw std::invalid_argument("id");
    } catch (const std::exception&) {
      throw InputError("malformed rule id '" + id + "'", lineNo);
    }
    if (rid < 1 || rid > static_cast<int>(s.rules.size())) throw InputError("no rule " + id, lineNo);
    if (theta[static_cast<std::size_t>(rid - 1)]) throw InputError("rule " + id + " weighted twice", lineNo);
    try {
      theta[static_cast<std::size_t>(rid - 1)] = parseWeight(value);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what(), lineNo);
    }
  }
  std::vector<Weight> out;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!theta[i]) throw InputError("rule " + std::to_string(i + 1) + " has no weight");
    out.push_back(*theta[i]);
  }
  try {
    return CfModel(s, std::move(out));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

CfModel loadWeights(const CfSkeleton& s, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open weights file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parseWeights(s, buf.str());
}

std::string formatWeights(const CfModel& m) {
  std::string out;
  for (const auto& r : m.skeleton().rules) out += "rule " + std::to_string(r.id) + " " + formatWeight(m.weight(r.id)) + "\n";
  return out;
}

}  // namespace savg
