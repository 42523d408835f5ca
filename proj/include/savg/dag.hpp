#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace savg {

/// Orders edge labels: numeric labels numerically and before any others,
/// the rest lexicographically.
bool edgeLabelLess(std::string_view a, std::string_view b);

struct DagEdge {
  std::string label;
  int child = 0;
};

/// A rooted, acyclic, node- and edge-labelled graph in canonical form.
///
/// Out-edge labels are unique per node, so a depth-first walk from the root
/// that follows edges in label order visits nodes in an order fixed by the
/// graph's shape alone. Nodes are stored in that order (root = 0); two dags
/// are isomorphic iff their canonical keys are equal.
class Dag {
 public:
  struct Node {
    std::string label;
    std::vector<DagEdge> out;  // sorted by edgeLabelLess
  };

  Dag() = default;

  /// Validates and canonicalizes. Throws std::invalid_argument when the graph
  /// has a cycle, a repeated out-edge label, a dangling edge, or a node the
  /// root does not reach.
  static Dag fromGraph(std::vector<Node> nodes, int root);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  static constexpr int root() { return 0; }

  /// Child reached from `node` over `label`, or -1.
  int child(int node, std::string_view label) const;
  /// Parents of each node, as (parent, edge label) pairs.
  std::vector<std::vector<std::pair<int, std::string>>> parents() const;

  const std::string& key() const { return key_; }

  /// Bracketed rendering, e.g. "(S (A #1=a) (A #1))". Nodes with more than
  /// one parent are tagged on first visit and referenced afterwards. Edge
  /// labels are printed only when they are not the positional 1..k.
  std::string toString() const;

  friend bool operator==(const Dag& a, const Dag& b) { return a.key_ == b.key_; }
  friend bool operator<(const Dag& a, const Dag& b) { return a.key_ < b.key_; }

 private:
  std::vector<Node> nodes_;
  std::string key_;
};

}  // namespace savg

template <>
struct std::hash<savg::Dag> {
  std::size_t operator()(const savg::Dag& d) const noexcept { return std::hash<std::string>{}(d.key()); }
};
