#pragma once

#include "savg/dag.hpp"

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace savg {

/// A finite probability distribution over dags.
class Distribution {
 public:
  Distribution() = default;
  /// Throws std::invalid_argument on duplicate support points, negative
  /// probabilities, or a total more than 1e-9 away from 1.
  Distribution(std::vector<Dag> support, std::vector<double> probs);

  /// Normalizes nonnegative weights; duplicate dags are merged.
  static Distribution fromWeights(const std::vector<Dag>& support, const std::vector<double>& weights);

  const std::vector<Dag>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return support_.size(); }
  bool empty() const { return support_.empty(); }

  std::optional<std::size_t> find(const Dag& dag) const;
  /// Zero off the support.
  double probability(const Dag& dag) const;

 private:
  std::vector<Dag> support_;
  std::vector<double> probs_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// p[f] = sum_x p(x) f(x).
double expectation(const Distribution& dist, const std::function<double(const Dag&)>& f);

}  // namespace savg
