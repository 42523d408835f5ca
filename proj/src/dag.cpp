#include "savg/dag.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace savg {

namespace {

bool allDigits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

bool edgeLabelLess(std::string_view a, std::string_view b) {
  const bool na = allDigits(a), nb = allDigits(b);
  if (na != nb) return na;
  if (na) {
    auto trim = [](std::string_view s) {
      while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
      return s;
    };
    a = trim(a);
    b = trim(b);
    if (a.size() != b.size()) return a.size() < b.size();
  }
  return a < b;
}

Dag Dag::fromGraph(std::vector<Node> nodes, int root) {
  const int n = static_cast<int>(nodes.size());
  if (n == 0) throw std::invalid_argument("dag has no nodes");
  if (root < 0 || root >= n) throw std::invalid_argument("dag root out of range");

  for (auto& node : nodes) {
    std::sort(node.out.begin(), node.out.end(),
              [](const DagEdge& x, const DagEdge& y) { return edgeLabelLess(x.label, y.label); });
    for (std::size_t i = 0; i < node.out.size(); ++i) {
      if (node.out[i].child < 0 || node.out[i].child >= n)
        throw std::invalid_argument("dag edge to missing node");
      if (i > 0 && node.out[i - 1].label == node.out[i].label)
        throw std::invalid_argument("node '" + node.label + "' has two out-edges labelled '" + node.out[i].label + "'");
    }
  }

  // Preorder from the root in edge-label order; colour 1 = on stack.
  std::vector<int> order(static_cast<std::size_t>(n), -1);
  std::vector<char> colour(static_cast<std::size_t>(n), 0);
  std::vector<int> visit;
  visit.reserve(static_cast<std::size_t>(n));
  struct Frame {
    int node;
    std::size_t next;
  };
  std::vector<Frame> stack{{root, 0}};
  colour[static_cast<std::size_t>(root)] = 1;
  order[static_cast<std::size_t>(root)] = 0;
  visit.push_back(root);
  while (!stack.empty()) {
    auto& top = stack.back();
    const auto& out = nodes[static_cast<std::size_t>(top.node)].out;
    if (top.next == out.size()) {
      colour[static_cast<std::size_t>(top.node)] = 2;
      stack.pop_back();
      continue;
    }
    const int c = out[top.next++].child;
    auto& cc = colour[static_cast<std::size_t>(c)];
    if (cc == 1) throw std::invalid_argument("dag contains a cycle");
    if (cc == 0) {
      cc = 1;
      order[static_cast<std::size_t>(c)] = static_cast<int>(visit.size());
      visit.push_back(c);
      stack.push_back({c, 0});
    }
  }
  if (static_cast<int>(visit.size()) != n) throw std::invalid_argument("dag root does not reach every node");

  Dag dag;
  dag.nodes_.resize(static_cast<std::size_t>(n));
  for (int old = 0; old < n; ++old) {
    auto& dst = dag.nodes_[static_cast<std::size_t>(order[static_cast<std::size_t>(old)])];
    dst.label = std::move(nodes[static_cast<std::size_t>(old)].label);
    dst.out = std::move(nodes[static_cast<std::size_t>(old)].out);
    for (auto& e : dst.out) e.child = order[static_cast<std::size_t>(e.child)];
  }
  for (const auto& node : dag.nodes_) {
    dag.key_ += node.label;
    dag.key_ += '(';
    for (const auto& e : node.out) {
      dag.key_ += e.label;
      dag.key_ += '>';
      dag.key_ += std::to_string(e.child);
      dag.key_ += ',';
    }
    dag.key_ += ");";
  }
  return dag;
}

int Dag::child(int node, std::string_view label) const {
  for (const auto& e : nodes_[static_cast<std::size_t>(node)].out)
    if (e.label == label) return e.child;
  return -1;
}

std::vector<std::vector<std::pair<int, std::string>>> Dag::parents() const {
  std::vector<std::vector<std::pair<int, std::string>>> result(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    for (const auto& e : nodes_[i].out) result[static_cast<std::size_t>(e.child)].emplace_back(static_cast<int>(i), e.label);
  return result;
}

std::string Dag::toString() const {
  if (nodes_.empty()) return "()";
  std::vector<int> indegree(nodes_.size(), 0);
  for (const auto& node : nodes_)
    for (const auto& e : node.out) ++indegree[static_cast<std::size_t>(e.child)];
  std::vector<int> tag(nodes_.size(), 0);
  int nextTag = 1;

  std::string out;
  auto render = [&](auto&& self, int i) -> void {
    const auto& node = nodes_[static_cast<std::size_t>(i)];
    auto& t = tag[static_cast<std::size_t>(i)];
    if (t > 0) {
      out += '#' + std::to_string(t);
      return;
    }
    std::string head = node.label;
    if (indegree[static_cast<std::size_t>(i)] > 1) {
      t = nextTag++;
      head = '#' + std::to_string(t) + '=' + head;
    }
    if (node.out.empty()) {
      out += head;
      return;
    }
    bool positional = true;
    for (std::size_t k = 0; k < node.out.size(); ++k)
      if (node.out[k].label != std::to_string(k + 1)) positional = false;
    out += '(';
    out += head;
    for (const auto& e : node.out) {
      out += ' ';
      if (!positional) out += e.label + ':';
      self(self, e.child);
    }
    out += ')';
  };
  render(render, 0);
  return out;
}

}  // namespace savg
