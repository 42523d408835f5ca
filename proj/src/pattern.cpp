#include "savg/pattern.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace savg {

namespace {

struct Serial {
  std::vector<std::string> labels;
  std::vector<std::tuple<int, std::string, int>> edges;

  bool operator<(const Serial& o) const { return std::tie(labels, edges) < std::tie(o.labels, o.edges); }
};

void validate(const std::vector<std::string>& labels, const std::vector<Pattern::Edge>& edges) {
  const int n = static_cast<int>(labels.size());
  if (n == 0) throw std::invalid_argument("pattern has no nodes");
  for (const auto& l : labels)
    if (l.empty()) throw std::invalid_argument("pattern node with empty label");

  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) throw std::invalid_argument("pattern edge out of range");
    if (e.from == e.to) throw std::invalid_argument("pattern edge is a self-loop");
    for (std::size_t j = 0; j < i; ++j)
      if (edges[j].from == e.from && edges[j].label == e.label)
        throw std::invalid_argument("pattern node has two out-edges labelled '" + e.label + "'");
    adj[static_cast<std::size_t>(e.from)].push_back(e.to);
    adj[static_cast<std::size_t>(e.to)].push_back(e.from);
    succ[static_cast<std::size_t>(e.from)].push_back(e.to);
  }

  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[static_cast<std::size_t>(u)])
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++reached;
        stack.push_back(v);
      }
  }
  if (reached != n) throw std::invalid_argument("pattern is not connected");

  // Kahn's algorithm for acyclicity.
  std::vector<int> indeg(static_cast<std::size_t>(n), 0);
  for (const auto& e : edges) ++indeg[static_cast<std::size_t>(e.to)];
  std::vector<int> ready;
  for (int i = 0; i < n; ++i)
    if (indeg[static_cast<std::size_t>(i)] == 0) ready.push_back(i);
  int removed = 0;
  while (!ready.empty()) {
    int u = ready.back();
    ready.pop_back();
    ++removed;
    for (int v : succ[static_cast<std::size_t>(u)])
      if (--indeg[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
  }
  if (removed != n) throw std::invalid_argument("pattern contains a cycle");
}

}  // namespace

Pattern::Pattern(std::vector<std::string> labels, std::vector<Edge> edges) {
  validate(labels, edges);
  const int n = static_cast<int>(labels.size());

  // Permutations are tried only within blocks of nodes sharing an
  // isomorphism invariant (label, in/out edge label multisets).
  std::vector<std::string> invariant(static_cast<std::size_t>(n));
  {
    std::vector<std::vector<std::string>> outs(static_cast<std::size_t>(n)), ins(static_cast<std::size_t>(n));
    for (const auto& e : edges) {
      outs[static_cast<std::size_t>(e.from)].push_back(e.label + ">" + labels[static_cast<std::size_t>(e.to)]);
      ins[static_cast<std::size_t>(e.to)].push_back(e.label + "<" + labels[static_cast<std::size_t>(e.from)]);
    }
    for (int i = 0; i < n; ++i) {
      auto& o = outs[static_cast<std::size_t>(i)];
      auto& in = ins[static_cast<std::size_t>(i)];
      std::sort(o.begin(), o.end());
      std::sort(in.begin(), in.end());
      std::string s = labels[static_cast<std::size_t>(i)] + "|";
      for (const auto& x : o) s += x + ",";
      s += "|";
      for (const auto& x : in) s += x + ",";
      invariant[static_cast<std::size_t>(i)] = std::move(s);
    }
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::tie(invariant[static_cast<std::size_t>(a)], a) < std::tie(invariant[static_cast<std::size_t>(b)], b);
  });
  std::vector<std::pair<int, int>> blocks;  // [begin, end) into order
  for (int i = 0; i < n;) {
    int j = i + 1;
    while (j < n && invariant[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] ==
                        invariant[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])])
      ++j;
    blocks.emplace_back(i, j);
    i = j;
  }

  auto serialise = [&](const std::vector<int>& newToOld) {
    std::vector<int> oldToNew(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) oldToNew[static_cast<std::size_t>(newToOld[static_cast<std::size_t>(i)])] = i;
    Serial s;
    s.labels.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) s.labels.push_back(labels[static_cast<std::size_t>(newToOld[static_cast<std::size_t>(i)])]);
    for (const auto& e : edges)
      s.edges.emplace_back(oldToNew[static_cast<std::size_t>(e.from)], e.label, oldToNew[static_cast<std::size_t>(e.to)]);
    std::sort(s.edges.begin(), s.edges.end());
    return s;
  };

  std::vector<int> best = order;
  Serial bestSerial = serialise(order);
  // Odometer over per-block permutations; each block starts sorted.
  std::vector<int> current = order;
  for (auto [b, e] : blocks) std::sort(current.begin() + b, current.begin() + e);
  while (true) {
    Serial s = serialise(current);
    if (s < bestSerial) {
      bestSerial = std::move(s);
      best = current;
    }
    std::size_t k = 0;
    for (; k < blocks.size(); ++k) {
      auto [b, e] = blocks[k];
      if (std::next_permutation(current.begin() + b, current.begin() + e)) break;
    }
    if (k == blocks.size()) break;
  }

  labels_ = std::move(bestSerial.labels);
  for (auto& [f, l, t] : bestSerial.edges) edges_.push_back({f, l, t});
  for (std::size_t i = 0; i < labels_.size(); ++i) key_ += (i ? " " : "") + labels_[i];
  if (!edges_.empty()) {
    key_ += " |";
    for (std::size_t i = 0; i < edges_.size(); ++i)
      key_ += (i ? ", " : " ") + std::to_string(edges_[i].from) + "-" + edges_[i].label + "->" + std::to_string(edges_[i].to);
  }
}

Pattern Pattern::single(std::string label) { return Pattern({std::move(label)}, {}); }

Pattern Pattern::fromDag(const Dag& dag) {
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < dag.size(); ++i) {
    labels.push_back(dag.node(static_cast<int>(i)).label);
    for (const auto& e : dag.node(static_cast<int>(i)).out) edges.push_back({static_cast<int>(i), e.label, e.child});
  }
  return Pattern(std::move(labels), std::move(edges));
}

std::optional<Pattern> Pattern::join(const Pattern& a, int aNode, const Pattern& b, int bNode, const std::string& label,
                                     bool aToB) {
  const int offset = static_cast<int>(a.size());
  std::vector<std::string> labels = a.labels_;
  labels.insert(labels.end(), b.labels_.begin(), b.labels_.end());
  std::vector<Edge> edges = a.edges_;
  for (const auto& e : b.edges_) edges.push_back({e.from + offset, e.label, e.to + offset});
  const int from = aToB ? aNode : bNode + offset;
  const int to = aToB ? bNode + offset : aNode;
  for (const auto& e : edges)
    if (e.from == from && e.label == label) return std::nullopt;
  edges.push_back({from, label, to});
  // The two parts are disjoint, so one arc cannot close a cycle.
  return Pattern(std::move(labels), std::move(edges));
}

}  // namespace savg
