#include "savg/field.hpp"

#include "savg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

namespace savg {

std::string_view toString(Semantics s) { return s == Semantics::Presence ? "presence" : "embeddings"; }
std::string_view toString(InitialMode m) { return m == InitialMode::Scfg ? "scfg" : "uniform"; }

Semantics parseSemantics(std::string_view name) {
  if (name == "embeddings") return Semantics::Embeddings;
  if (name == "presence") return Semantics::Presence;
  throw std::invalid_argument("unknown counting semantics '" + std::string(name) + "' (embeddings|presence)");
}

InitialMode parseInitialMode(std::string_view name) {
  if (name == "uniform") return InitialMode::Uniform;
  if (name == "scfg") return InitialMode::Scfg;
  throw std::invalid_argument("unknown initial mode '" + std::string(name) + "' (uniform|scfg)");
}

std::string Property::toString() const {
  return semantics == Semantics::Presence ? pattern.key() + " (presence)" : pattern.key();
}

// ------------------------------------------------------------- embeddings

namespace {

struct Incidence {
  int other;
  const std::string* label;
  bool outgoing;  // pattern edge runs from this node to `other`
};

}  // namespace

std::size_t countEmbeddings(const Pattern& pattern, const Dag& dag) {
  const std::size_t n = pattern.size();
  if (n > dag.size()) return 0;
  std::vector<std::vector<Incidence>> adj(n);
  for (const auto& e : pattern.edges()) {
    adj[static_cast<std::size_t>(e.from)].push_back({e.to, &e.label, true});
    adj[static_cast<std::size_t>(e.to)].push_back({e.from, &e.label, false});
  }
  // Visit order: each node after the first touches an earlier one, so its
  // image is pinned by an already-mapped neighbour.
  std::vector<int> order{0};
  std::vector<char> seen(n, 0);
  seen[0] = 1;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (const auto& inc : adj[static_cast<std::size_t>(order[i])])
      if (!seen[static_cast<std::size_t>(inc.other)]) {
        seen[static_cast<std::size_t>(inc.other)] = 1;
        order.push_back(inc.other);
      }

  const auto parents = dag.parents();
  std::vector<int> image(n, -1);
  std::vector<char> used(dag.size(), 0);
  std::size_t count = 0;

  auto consistent = [&](int p, int x) {
    if (dag.node(x).label != pattern.labels()[static_cast<std::size_t>(p)] || used[static_cast<std::size_t>(x)])
      return false;
    for (const auto& inc : adj[static_cast<std::size_t>(p)]) {
      const int y = image[static_cast<std::size_t>(inc.other)];
      if (y < 0) continue;
      if (inc.outgoing ? dag.child(x, *inc.label) != y : dag.child(y, *inc.label) != x) return false;
    }
    return true;
  };

  std::function<void(std::size_t)> extend = [&](std::size_t depth) {
    if (depth == n) {
      ++count;
      return;
    }
    const int p = order[depth];
    auto tryNode = [&](int x) {
      if (!consistent(p, x)) return;
      image[static_cast<std::size_t>(p)] = x;
      used[static_cast<std::size_t>(x)] = 1;
      extend(depth + 1);
      used[static_cast<std::size_t>(x)] = 0;
      image[static_cast<std::size_t>(p)] = -1;
    };
    const Incidence* anchor = nullptr;
    for (const auto& inc : adj[static_cast<std::size_t>(p)])
      if (image[static_cast<std::size_t>(inc.other)] >= 0) {
        anchor = &inc;
        break;
      }
    if (!anchor) {
      for (int x = 0; x < static_cast<int>(dag.size()); ++x) tryNode(x);
      return;
    }
    const int y = image[static_cast<std::size_t>(anchor->other)];
    if (!anchor->outgoing) {
      // The anchor is p's parent.
      if (int x = dag.child(y, *anchor->label); x >= 0) tryNode(x);
    } else {
      for (const auto& [parent, label] : parents[static_cast<std::size_t>(y)])
        if (label == *anchor->label) tryNode(parent);
    }
  };
  extend(0);
  return count;
}

int countProperty(const Property& p, const Dag& dag) {
  const auto k = countEmbeddings(p.pattern, dag);
  if (p.semantics == Semantics::Presence) return k > 0 ? 1 : 0;
  return static_cast<int>(k);
}

std::vector<Property> ruleProperties(const AvGrammar& g) {
  std::vector<Property> props;
  for (const auto& r : g.rules()) {
    std::vector<std::string> labels{r.lhs};
    std::vector<Pattern::Edge> edges;
    for (const auto& item : r.rhs) {
      edges.push_back({0, item.edgeLabel, static_cast<int>(labels.size())});
      labels.push_back(item.symbol);
    }
    props.push_back({Pattern(std::move(labels), std::move(edges)), Semantics::Embeddings});
  }
  return props;
}

// ------------------------------------------------------------------ model

FieldModel::FieldModel(AvGrammar grammar, InitialMode mode, std::optional<CfModel> theta)
    : grammar_(std::move(grammar)), mode_(mode), theta_(std::move(theta)) {
  if (mode_ == InitialMode::Scfg && !theta_) throw std::invalid_argument("scfg initial mode needs rule weights");
  if (theta_ && theta_->skeleton().rules.size() != grammar_.ruleCount())
    throw std::invalid_argument("rule weights do not match the grammar");
}

void FieldModel::touch() {
  ++version_;
  zCache_.reset();
}

void FieldModel::addProperty(Property p, Weight beta) {
  if (!(beta.value > 0)) throw std::invalid_argument("property weight must be positive");
  properties_.push_back(std::move(p));
  beta_.push_back(std::move(beta));
  touch();
}

void FieldModel::setBeta(std::size_t i, Weight beta) {
  if (!(beta.value > 0)) throw std::invalid_argument("property weight must be positive");
  beta_.at(i) = std::move(beta);
  touch();
}

void FieldModel::setBetas(std::vector<Weight> beta) {
  if (beta.size() != properties_.size()) throw std::invalid_argument("one weight per property expected");
  for (const auto& b : beta)
    if (!(b.value > 0)) throw std::invalid_argument("property weight must be positive");
  beta_ = std::move(beta);
  touch();
}

std::optional<FieldModel::ZCache> FieldModel::zCache() const {
  if (zCache_ && zCache_->version == version_) return zCache_;
  return std::nullopt;
}

void FieldModel::storeZ(ZCache cache) {
  cache.version = version_;
  zCache_ = std::move(cache);
}

// ---------------------------------------------------------------- weights

std::vector<int> propertyCounts(const FieldModel& m, const Dag& dag) {
  std::vector<int> f;
  f.reserve(m.size());
  for (const auto& p : m.properties()) f.push_back(countProperty(p, dag));
  return f;
}

double logFieldWeight(const FieldModel& m, const Dag& dag) {
  double s = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (int f = countProperty(m.properties()[i], dag)) s += f * std::log(m.beta()[i].value);
  return s;
}

double fieldWeight(const FieldModel& m, const Dag& dag) { return std::exp(logFieldWeight(m, dag)); }

std::optional<Rational> exactFieldWeight(const FieldModel& m, const Dag& dag) {
  Rational w = 1;
  for (std::size_t i = 0; i < m.size(); ++i) {
    int f = countProperty(m.properties()[i], dag);
    if (f == 0) continue;
    if (!m.beta()[i].exact) return std::nullopt;
    for (int k = 0; k < f; ++k) w *= *m.beta()[i].exact;
  }
  return w;
}

namespace {

double derivationMass(const FieldModel& m, const Derivation& first, const std::vector<Derivation>& others) {
  double mass = treeProbability(*m.theta(), first);
  for (const auto& d : others) mass += treeProbability(*m.theta(), d);
  return mass;
}

std::optional<Rational> exactDerivationMass(const FieldModel& m, const LanguageItem& item) {
  auto mass = exactTreeProbability(*m.theta(), item.derivation);
  if (!mass) return std::nullopt;
  for (const auto& d : item.others) {
    auto p = exactTreeProbability(*m.theta(), d);
    if (!p) return std::nullopt;
    *mass += *p;
  }
  return mass;
}

}  // namespace

double initialMass(const FieldModel& m, const LanguageItem& item) {
  if (m.mode() == InitialMode::Uniform) return 1.0;
  return derivationMass(m, item.derivation, item.others);
}

double unnormalized(const FieldModel& m, const LanguageItem& item) {
  return std::exp(logFieldWeight(m, item.dag)) * initialMass(m, item);
}

double unnormalized(const FieldModel& m, const Dag& dag) {
  auto derivations = recoverDerivations(m.grammar(), dag);
  if (derivations.empty()) throw std::invalid_argument("dag " + dag.toString() + " has no derivation");
  LanguageItem item{dag, derivations.front(), {derivations.begin() + 1, derivations.end()}};
  return unnormalized(m, item);
}

NormalizedField normalizeExact(const FieldModel& m, const Language& language) {
  if (language.items.empty()) throw std::invalid_argument("cannot normalize over an empty language");
  const std::size_t n = language.items.size();
  std::vector<double> weights(n);
  std::vector<Rational> exact;
  bool allExact = true;
  double mass = 0;
  Rational exactMass = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& item = language.items[i];
    weights[i] = unnormalized(m, item);
    mass += initialMass(m, item);
    if (!allExact) continue;
    auto f = exactFieldWeight(m, item.dag);
    std::optional<Rational> p = Rational(1);
    if (m.mode() == InitialMode::Scfg) p = exactDerivationMass(m, item);
    if (!f || !p) {
      allExact = false;
      continue;
    }
    exact.push_back(*f * *p);
    exactMass += *p;
  }

  NormalizedField out;
  double sum = 0;
  for (double w : weights) sum += w;
  std::vector<double> probs(n);
  for (std::size_t i = 0; i < n; ++i) probs[i] = weights[i] / sum;
  out.consistentMass = m.mode() == InitialMode::Scfg ? mass : 1.0;
  out.z = sum / out.consistentMass;
  if (allExact) {
    Rational total = 0;
    for (const auto& w : exact) total += w;
    std::vector<Rational> q;
    for (const auto& w : exact) q.push_back(w / total);
    for (std::size_t i = 0; i < n; ++i) probs[i] = toDouble(q[i]);
    out.exactZ = m.mode() == InitialMode::Scfg ? total / exactMass : total;
    out.exactProbs = std::move(q);
    out.z = toDouble(*out.exactZ);
  }
  out.q = Distribution(language.dags(), std::move(probs));
  return out;
}

NormalizedField normalizeAndCache(FieldModel& m, const Language& language) {
  auto out = normalizeExact(m, language);
  m.storeZ({out.z, out.exactZ, language.items.size(), 0});
  return out;
}

KlResult klDivergence(const Distribution& pTilde, const Distribution& q) {
  KlResult r;
  for (std::size_t i = 0; i < pTilde.size(); ++i) {
    const double p = pTilde.probs()[i];
    if (p == 0) continue;
    const double qx = q.probability(pTilde.support()[i]);
    if (qx <= 0) {
      r.value = std::numeric_limits<double>::infinity();
      r.offending = pTilde.support()[i];
      return r;
    }
    r.value += p * std::log(p / qx);
  }
  return r;
}

Distribution empiricalFromCorpus(const AvGrammar& g, const std::vector<CorpusRecord>& records) {
  const auto corpus = derivationCorpus(g.skeleton(), records);
  std::vector<Dag> dags;
  std::vector<double> counts;
  std::vector<std::string> errors;
  for (const auto& e : corpus.entries) {
    auto result = deriveDag(g, e.derivation);
    if (auto* fail = std::get_if<UnificationFailure>(&result)) {
      const auto tree = formatTree(g.skeleton(), e.derivation);
      std::string lines;
      for (const auto& rec : records)
        if (parseTree(g.skeleton(), rec.tree) == e.derivation)
          lines += (lines.empty() ? "" : ", ") + std::to_string(rec.line);
      errors.push_back("line(s) " + lines + ": " + tree + " does not unify: " + fail->reason);
      continue;
    }
    dags.push_back(std::get<Dag>(std::move(result)));
    counts.push_back(static_cast<double>(e.count));
  }
  if (!errors.empty()) {
    std::string msg = "corpus records outside L(G):";
    for (const auto& e : errors) msg += "\n  " + e;
    throw InputError(msg);
  }
  return Distribution::fromWeights(dags, counts);
}

}  // namespace savg
