#include "savg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace savg::oracle {

Report compare(std::string quantity, double oracleValue, double subjectValue, double tolerance) {
  Report r{std::move(quantity), oracleValue, subjectValue, 0, 0, tolerance, false};
  if (oracleValue == subjectValue) {
    r.pass = true;
    return r;
  }
  r.absError = std::abs(oracleValue - subjectValue);
  r.relError = oracleValue != 0 ? r.absError / std::abs(oracleValue) : std::numeric_limits<double>::infinity();
  r.pass = r.absError <= tolerance;
  return r;
}

std::size_t embeddings(const Pattern& pattern, const Dag& dag) {
  const std::size_t k = pattern.size(), n = dag.size();
  if (k > n) return 0;
  // Odometer over all k-tuples of dag nodes; keep injective, structure
  // preserving ones.
  std::vector<std::size_t> t(k, 0);
  std::size_t count = 0;
  while (true) {
    bool ok = true;
    for (std::size_t i = 0; i < k && ok; ++i) {
      if (dag.node(static_cast<int>(t[i])).label != pattern.labels()[i]) ok = false;
      for (std::size_t j = 0; j < i && ok; ++j)
        if (t[i] == t[j]) ok = false;
    }
    for (std::size_t e = 0; e < pattern.edges().size() && ok; ++e) {
      const auto& edge = pattern.edges()[e];
      bool found = false;
      for (const auto& out : dag.node(static_cast<int>(t[static_cast<std::size_t>(edge.from)])).out)
        if (out.label == edge.label && out.child == static_cast<int>(t[static_cast<std::size_t>(edge.to)])) found = true;
      ok = found;
    }
    if (ok) ++count;
    std::size_t i = 0;
    while (i < k && ++t[i] == n) t[i++] = 0;
    if (i == k) break;
  }
  return count;
}

int propertyValue(const Property& p, const Dag& dag) {
  const auto e = embeddings(p.pattern, dag);
  return p.semantics == Semantics::Presence ? (e ? 1 : 0) : static_cast<int>(e);
}

double treeProduct(const std::vector<double>& theta, const Derivation& d) {
  double p = theta.at(static_cast<std::size_t>(d.rule - 1));
  for (const auto& c : d.children) p *= treeProduct(theta, c);
  return p;
}

namespace {

std::vector<double> thetaValues(const FieldModel& m) {
  std::vector<double> theta;
  for (const auto& w : m.theta()->theta()) theta.push_back(w.value);
  return theta;
}

/// (dag, F(x) p_breve(x), p_breve(x)).
struct Term {
  Dag dag;
  double weight;
  double initial;
};

std::vector<Term> terms(const FieldModel& m, std::size_t maxDepth) {
  const auto lang = enumerateLanguage(m.grammar(), maxDepth);
  if (lang.truncated) throw std::runtime_error("oracle enumeration truncated at depth " + std::to_string(maxDepth));
  if (lang.items.empty()) throw std::runtime_error("oracle enumeration is empty");
  std::vector<double> theta;
  if (m.mode() == InitialMode::Scfg) theta = thetaValues(m);
  std::vector<Term> out;
  for (const auto& item : lang.items) {
    double p = 1;
    if (m.mode() == InitialMode::Scfg) {
      p = treeProduct(theta, item.derivation);
      for (const auto& d : item.others) p += treeProduct(theta, d);
    }
    double f = 1;
    for (std::size_t i = 0; i < m.size(); ++i) f *= std::pow(m.beta()[i].value, propertyValue(m.properties()[i], item.dag));
    out.push_back({item.dag, f * p, p});
  }
  return out;
}

}  // namespace

std::vector<std::pair<Dag, double>> distribution(const FieldModel& m, std::size_t maxDepth) {
  const auto t = terms(m, maxDepth);
  double z = 0;
  for (const auto& x : t) z += x.weight;
  std::vector<std::pair<Dag, double>> out;
  for (const auto& x : t) out.emplace_back(x.dag, x.weight / z);
  return out;
}

double normalizer(const FieldModel& m, std::size_t maxDepth) {
  const auto t = terms(m, maxDepth);
  double z = 0, mass = 0;
  for (const auto& x : t) {
    z += x.weight;
    mass += x.initial;
  }
  return m.mode() == InitialMode::Scfg ? z / mass : z;
}

double exactExpectation(const FieldModel& m, const std::function<double(const Dag&)>& f, std::size_t maxDepth) {
  double e = 0;
  for (const auto& [x, q] : distribution(m, maxDepth)) e += q * f(x);
  return e;
}

double kl(const std::vector<std::pair<Dag, double>>& p, const std::vector<std::pair<Dag, double>>& q) {
  std::map<std::string, double> qByKey;
  for (const auto& [x, v] : q) qByKey[x.key()] += v;
  double d = 0;
  for (const auto& [x, v] : p) {
    if (v == 0) continue;
    auto it = qByKey.find(x.key());
    if (it == qByKey.end() || it->second == 0) return std::numeric_limits<double>::infinity();
    d += v * std::log(v / it->second);
  }
  return d;
}

std::vector<double> erfWeights(const CfSkeleton& s, const std::vector<std::pair<Derivation, long long>>& corpus) {
  std::vector<double> uses(s.rules.size(), 0.0);
  std::function<void(const Derivation&, double)> walk = [&](const Derivation& d, double c) {
    uses[static_cast<std::size_t>(d.rule - 1)] += c;
    for (const auto& ch : d.children) walk(ch, c);
  };
  for (const auto& [d, c] : corpus) walk(d, static_cast<double>(c));
  std::vector<double> w(s.rules.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    double total = 0, size = 0;
    for (std::size_t j = 0; j < w.size(); ++j)
      if (s.rules[j].lhs == s.rules[i].lhs) {
        total += uses[j];
        size += 1;
      }
    w[i] = total > 0 ? uses[i] / total : 1.0 / size;
  }
  return w;
}

std::size_t disambiguate(const std::vector<double>& theta, const std::vector<Derivation>& parses) {
  std::function<void(const Derivation&, std::vector<int>&)> seq = [&](const Derivation& d, std::vector<int>& out) {
    out.push_back(d.rule);
    for (const auto& c : d.children) seq(c, out);
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < parses.size(); ++i) {
    const double a = treeProduct(theta, parses[i]), b = treeProduct(theta, parses[best]);
    std::vector<int> sa, sb;
    seq(parses[i], sa);
    seq(parses[best], sb);
    if (a > b * (1 + 1e-12) || (std::abs(a - b) <= 1e-12 * b && sa < sb)) best = i;
  }
  return best;
}

double gridSearchBestWeight(const FieldModel& field, const Property& candidate,
                            const std::vector<std::pair<Dag, double>>& pTilde, const GridSpec& grid,
                            std::size_t maxDepth) {
  const auto old = distribution(field, maxDepth);
  std::vector<int> f;
  for (const auto& [x, q] : old) f.push_back(propertyValue(candidate, x));
  // A constant property leaves q unchanged for every beta.
  if (std::adjacent_find(f.begin(), f.end(), std::not_equal_to<>()) == f.end()) return 1;
  auto divergence = [&](double beta) {
    std::vector<std::pair<Dag, double>> q = old;
    double z = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      q[i].second *= std::pow(beta, f[i]);
      z += q[i].second;
    }
    for (auto& x : q) x.second /= z;
    return kl(pTilde, q);
  };
  const double llo = std::log(grid.lo), lhi = std::log(grid.hi);
  const std::size_t n = std::max<std::size_t>(grid.points, 3);
  std::size_t best = 0;
  double bestD = std::numeric_limits<double>::infinity();
  std::vector<double> lgrid(n);
  for (std::size_t i = 0; i < n; ++i) {
    lgrid[i] = llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1);
    const double d = divergence(std::exp(lgrid[i]));
    if (d < bestD) {
      bestD = d;
      best = i;
    }
  }
  double a = lgrid[best == 0 ? 0 : best - 1], b = lgrid[std::min(best + 1, n - 1)];
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = divergence(std::exp(c)), fd = divergence(std::exp(d));
  while (b - a > 1e-11) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = divergence(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = divergence(std::exp(d));
    }
  }
  return std::exp(0.5 * (a + b));
}

Kernel exhaustiveKernel(const FieldModel& m, std::size_t maxDepth) {
  const auto t = terms(m, maxDepth);
  Kernel k;
  const std::size_t n = t.size();
  double z = 0, mass = 0;
  for (const auto& x : t) {
    z += x.weight;
    mass += x.initial;
  }
  std::vector<double>& p = k.p;
  for (std::size_t i = 0; i < n; ++i) {
    k.states.push_back(t[i].dag);
    k.q.push_back(t[i].weight / z);
    p.push_back(t[i].initial / mass);
  }
  k.k.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t x = 0; x < n; ++x) {
    double stay = 1;
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      const double a = std::min(1.0, (k.q[y] * p[x]) / (k.q[x] * p[y]));
      k.k[x][y] = p[y] * a;
      stay -= k.k[x][y];
    }
    k.k[x][x] = stay;
  }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      k.maxBalanceViolation = std::max(k.maxBalanceViolation, std::abs(k.q[x] * k.k[x][y] - k.q[y] * k.k[y][x]));
  std::vector<double> pi = p;
  for (int it = 0; it < 100000; ++it) {
    std::vector<double> next(n, 0.0);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) next[y] += pi[x] * k.k[x][y];
    double change = 0;
    for (std::size_t y = 0; y < n; ++y) change = std::max(change, std::abs(next[y] - pi[y]));
    pi = std::move(next);
    if (change < 1e-17) break;
  }
  k.stationary = std::move(pi);
  return k;
}

}  // namespace savg::oracle
