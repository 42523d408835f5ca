#include "savg/distribution.hpp"

#include <cmath>
#include <stdexcept>

namespace savg {

Distribution::Distribution(std::vector<Dag> support, std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  if (support_.size() != probs_.size()) throw std::invalid_argument("support and probabilities differ in length");
  double total = 0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (!(probs_[i] >= 0)) throw std::invalid_argument("negative probability");
    total += probs_[i];
    if (!index_.emplace(support_[i].key(), i).second) throw std::invalid_argument("duplicate dag in support");
  }
  if (!support_.empty() && std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("probabilities sum to " + std::to_string(total));
}

Distribution Distribution::fromWeights(const std::vector<Dag>& support, const std::vector<double>& weights) {
  if (support.size() != weights.size()) throw std::invalid_argument("support and weights differ in length");
  std::vector<Dag> dags;
  std::vector<double> merged;
  std::unordered_map<std::string, std::size_t> seen;
  double total = 0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!(weights[i] >= 0) || !std::isfinite(weights[i])) throw std::invalid_argument("invalid weight");
    total += weights[i];
    auto [it, fresh] = seen.emplace(support[i].key(), dags.size());
    if (fresh) {
      dags.push_back(support[i]);
      merged.push_back(weights[i]);
    } else {
      merged[it->second] += weights[i];
    }
  }
  if (!(total > 0)) throw std::invalid_argument("weights sum to zero");
  for (auto& w : merged) w /= total;
  return Distribution(std::move(dags), std::move(merged));
}

std::optional<std::size_t> Distribution::find(const Dag& dag) const {
  if (auto it = index_.find(dag.key()); it != index_.end()) return it->second;
  return std::nullopt;
}

double Distribution::probability(const Dag& dag) const {
  auto i = find(dag);
  return i ? probs_[*i] : 0.0;
}

double expectation(const Distribution& dist, const std::function<double(const Dag&)>& f) {
  double total = 0, mass = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    mass += dist.probs()[i];
    if (dist.probs()[i] > 0) total += dist.probs()[i] * f(dist.support()[i]);
  }
  if (!dist.empty() && std::abs(mass - 1.0) > 1e-9) throw std::invalid_argument("distribution does not sum to 1");
  return total;
}

}  // namespace savg
