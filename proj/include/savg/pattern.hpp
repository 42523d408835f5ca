#pragma once

#include "savg/dag.hpp"

#include <optional>
#include <string>
#include <vector>

namespace savg {

/// A connected labelled subgraph used as a property of dags.
///
/// Unlike Dag, a pattern may have several source nodes (two arcs into a
/// shared node, say). Nodes are stored in a canonical order chosen by
/// minimising over relabellings, so isomorphic patterns compare equal.
class Pattern {
 public:
  struct Edge {
    int from = 0;
    std::string label;
    int to = 0;
  };

  /// Throws std::invalid_argument unless the graph is nonempty, weakly
  /// connected, acyclic, and has unique out-edge labels per node.
  Pattern(std::vector<std::string> labels, std::vector<Edge> edges);

  static Pattern single(std::string label);
  static Pattern fromDag(const Dag& dag);

  /// Disjoint union of a and b plus one arc between aNode (in a) and bNode
  /// (in b), directed a->b when aToB. Empty if the arc would repeat an
  /// out-edge label.
  static std::optional<Pattern> join(const Pattern& a, int aNode, const Pattern& b, int bNode,
                                     const std::string& label, bool aToB);

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return labels_.size(); }

  /// Canonical text form, e.g. "A a | 0-1->1".
  const std::string& key() const { return key_; }

  friend bool operator==(const Pattern& a, const Pattern& b) { return a.key_ == b.key_; }
  /// Fewer nodes first, then canonical key.
  friend bool operator<(const Pattern& a, const Pattern& b) {
    return a.size() != b.size() ? a.size() < b.size() : a.key_ < b.key_;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<Edge> edges_;
  std::string key_;
};

}  // namespace savg
