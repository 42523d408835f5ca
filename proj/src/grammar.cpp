#include "savg/grammar.hpp"

#include "savg/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace savg {

// ---------------------------------------------------------------- symbols

bool SymbolTable::isNonterminal(std::string_view s) const {
  return std::find(nonterminals.begin(), nonterminals.end(), s) != nonterminals.end();
}

bool SymbolTable::isTerminal(std::string_view s) const {
  return std::find(terminals.begin(), terminals.end(), s) != terminals.end();
}

std::vector<std::string> SymbolTable::labels() const {
  std::vector<std::string> all = nonterminals;
  all.insert(all.end(), terminals.begin(), terminals.end());
  return all;
}

std::string FeaturePath::toString() const {
  std::string s = std::to_string(slot);
  for (const auto& a : attributes) s += "." + a;
  return s;
}

std::size_t CfRule::arity() const {
  return static_cast<std::size_t>(std::count_if(rhs.begin(), rhs.end(), [](const RhsItem& i) { return !i.isTerminal(); }));
}

std::vector<int> CfSkeleton::rulesFor(std::string_view lhs) const {
  std::vector<int> ids;
  for (const auto& r : rules)
    if (r.lhs == lhs) ids.push_back(r.id);
  return ids;
}

// ---------------------------------------------------------------- grammar

namespace {

bool validLabel(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) return false;
    if (std::string_view("()#|;,'=>").find(c) != std::string_view::npos) return false;
  }
  return true;
}

}  // namespace

AvGrammar::AvGrammar(SymbolTable symbols, std::vector<AvRule> rules) : symbols_(std::move(symbols)) {
  std::sort(rules.begin(), rules.end(), [](const AvRule& a, const AvRule& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < rules.size(); ++i)
    if (rules[i].id != static_cast<int>(i + 1))
      throw InputError("rule ids must be 1.." + std::to_string(rules.size()) + " without gaps");
  if (rules.empty()) throw InputError("grammar has no rules");

  for (const auto& nt : symbols_.nonterminals) {
    if (!validLabel(nt)) throw InputError("invalid category label '" + nt + "'");
    if (symbols_.isTerminal(nt)) throw InputError("'" + nt + "' is both a category and an atom");
  }
  for (const auto& t : symbols_.terminals)
    if (!validLabel(t)) throw InputError("invalid atom label '" + t + "'");
  {
    std::set<std::string> seen;
    for (const auto& s : symbols_.labels())
      if (!seen.insert(s).second) throw InputError("duplicate symbol '" + s + "'");
  }
  if (!symbols_.isNonterminal(symbols_.start)) throw InputError("start symbol '" + symbols_.start + "' has no rules");

  for (auto& r : rules) {
    if (!symbols_.isNonterminal(r.lhs)) throw InputError("rule " + std::to_string(r.id) + ": unknown lhs '" + r.lhs + "'");
    std::set<std::string> edgeLabels;
    for (std::size_t i = 0; i < r.rhs.size(); ++i) {
      auto& item = r.rhs[i];
      if (item.edgeLabel.empty()) item.edgeLabel = std::to_string(i + 1);
      if (!validLabel(item.edgeLabel)) throw InputError("rule " + std::to_string(r.id) + ": invalid edge label");
      if (!edgeLabels.insert(item.edgeLabel).second)
        throw InputError("rule " + std::to_string(r.id) + ": repeated edge label '" + item.edgeLabel + "'");
      const bool known = item.isTerminal() ? symbols_.isTerminal(item.symbol) : symbols_.isNonterminal(item.symbol);
      if (!known) throw InputError("rule " + std::to_string(r.id) + ": undefined symbol '" + item.symbol + "'");
    }
    for (auto& eq : r.constraints) {
      for (const auto* p : {&eq.left, &eq.right})
        if (p->slot < 1 || p->slot > static_cast<int>(r.rhs.size()))
          throw InputError("rule " + std::to_string(r.id) + ": constraint names missing slot " + std::to_string(p->slot));
      if (eq.right < eq.left) std::swap(eq.left, eq.right);
    }
    std::sort(r.constraints.begin(), r.constraints.end());
    r.constraints.erase(std::unique(r.constraints.begin(), r.constraints.end()), r.constraints.end());
  }
  for (const auto& nt : symbols_.nonterminals)
    if (std::none_of(rules.begin(), rules.end(), [&](const AvRule& r) { return r.lhs == nt; }))
      throw InputError("category '" + nt + "' has no rules");

  rules_ = std::move(rules);
  skeleton_.symbols = symbols_;
  for (const auto& r : rules_) skeleton_.rules.push_back({r.id, r.lhs, r.rhs});
}

AvGrammar AvGrammar::fromSkeleton(const CfSkeleton& skeleton) {
  std::vector<AvRule> rules;
  for (const auto& r : skeleton.rules) rules.push_back({r.id, r.lhs, r.rhs, {}});
  return AvGrammar(skeleton.symbols, std::move(rules));
}

CfSkeleton cfAnalogue(const AvGrammar& g) { return g.skeleton(); }

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> splitWords(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

FeaturePath parsePath(const std::string& text, int line) {
  FeaturePath p;
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (true) {
    auto dot = text.find('.', begin);
    parts.push_back(text.substr(begin, dot - begin));
    if (dot == std::string::npos) break;
    begin = dot + 1;
  }
  try {
    std::size_t used = 0;
    p.slot = std::stoi(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("slot");
  } catch (const std::exception&) {
    throw InputError("malformed path '" + text + "'", line);
  }
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i].empty()) throw InputError("empty attribute in path '" + text + "'", line);
    p.attributes.push_back(parts[i]);
  }
  return p;
}

}  // namespace

AvGrammar parseGrammar(std::string_view text) {
  SymbolTable symbols;
  std::vector<AvRule> rules;
  std::vector<std::pair<std::string, int>> mentioned;  // unquoted rhs symbols, with line
  std::istringstream in{std::string(text)};
  int lineNo = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineNo;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::string line = trim(raw);
    if (line.empty()) continue;

    auto words = splitWords(line);
    if (words[0] == "start") {
      if (words.size() != 2) throw InputError("expected 'start <category>'", lineNo);
      symbols.start = words[1];
      continue;
    }
    if (words[0] != "rule") throw InputError("expected 'start' or 'rule', got '" + words[0] + "'", lineNo);

    auto colon = line.find(':');
    auto arrow = line.find("->");
    if (colon == std::string::npos || arrow == std::string::npos || colon > arrow)
      throw InputError("expected 'rule <id>: <lhs> -> <rhs>'", lineNo);
    AvRule rule;
    try {
      std::size_t used = 0;
      std::string idText = trim(std::string_view(line).substr(4, colon - 4));
      rule.id = std::stoi(idText, &used);
      if (used != idText.size()) throw std::invalid_argument("id");
    } catch (const std::exception&) {
      throw InputError("malformed rule id", lineNo);
    }
    rule.lhs = trim(std::string_view(line).substr(colon + 1, arrow - colon - 1));
    if (!validLabel(rule.lhs)) throw InputError("invalid lhs '" + rule.lhs + "'", lineNo);

    std::string rest = line.substr(arrow + 2);
    std::vector<std::string> clauses;
    for (std::size_t begin = 0;;) {
      auto bar = rest.find('|', begin);
      clauses.push_back(trim(std::string_view(rest).substr(begin, bar - begin)));
      if (bar == std::string::npos) break;
      begin = bar + 1;
    }

    for (const auto& token : splitWords(clauses[0])) {
      RhsItem item;
      std::string body = token;
      if (auto c = token.find(':'); c != std::string::npos && token.front() != '\'') {
        item.edgeLabel = token.substr(0, c);
        body = token.substr(c + 1);
      }
      if (body.size() >= 2 && body.front() == '\'' && body.back() == '\'') {
        item.kind = RhsItem::Kind::Terminal;
        item.symbol = body.substr(1, body.size() - 2);
        if (!validLabel(item.symbol)) throw InputError("invalid atom " + body, lineNo);
        if (!symbols.isTerminal(item.symbol)) symbols.terminals.push_back(item.symbol);
      } else {
        if (!validLabel(body)) throw InputError("invalid rhs item '" + token + "'", lineNo);
        item.symbol = body;
        mentioned.emplace_back(body, lineNo);
      }
      rule.rhs.push_back(std::move(item));
    }

    for (std::size_t c = 1; c < clauses.size(); ++c) {
      auto w = splitWords(clauses[c]);
      if (w.size() != 4 || w[0] != "eq" || w[2] != "=") throw InputError("expected 'eq <path> = <path>'", lineNo);
      PathEquation eq{parsePath(w[1], lineNo), parsePath(w[3], lineNo)};
      for (const auto* p : {&eq.left, &eq.right})
        if (p->slot < 1 || p->slot > static_cast<int>(rule.rhs.size()))
          throw InputError("constraint names missing slot " + std::to_string(p->slot), lineNo);
      rule.constraints.push_back(std::move(eq));
    }

    if (!symbols.isNonterminal(rule.lhs)) symbols.nonterminals.push_back(rule.lhs);
    rules.push_back(std::move(rule));
  }

  for (const auto& [sym, line] : mentioned)
    if (!symbols.isNonterminal(sym)) throw InputError("category '" + sym + "' has no rules", line);
  if (rules.empty()) throw InputError("grammar has no rules");
  if (symbols.start.empty()) {
    auto first = std::min_element(rules.begin(), rules.end(), [](const AvRule& a, const AvRule& b) { return a.id < b.id; });
    symbols.start = first->lhs;
  }
  // Start category first keeps the symbol table order stable across files.
  auto it = std::find(symbols.nonterminals.begin(), symbols.nonterminals.end(), symbols.start);
  if (it != symbols.nonterminals.end()) std::rotate(symbols.nonterminals.begin(), it, it + 1);
  return AvGrammar(std::move(symbols), std::move(rules));
}

AvGrammar loadGrammar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open grammar file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parseGrammar(buf.str());
}

std::string formatGrammar(const AvGrammar& g) {
  std::string out = "start " + g.symbols().start + "\n";
  for (const auto& r : g.rules()) {
    out += "rule " + std::to_string(r.id) + ": " + r.lhs + " ->";
    for (std::size_t i = 0; i < r.rhs.size(); ++i) {
      const auto& item = r.rhs[i];
      out += ' ';
      if (item.edgeLabel != std::to_string(i + 1)) out += item.edgeLabel + ':';
      out += item.isTerminal() ? "'" + item.symbol + "'" : item.symbol;
    }
    for (const auto& eq : r.constraints) out += " | eq " + eq.left.toString() + " = " + eq.right.toString();
    out += '\n';
  }
  return out;
}

// ------------------------------------------------------------ derivations

void validateDerivation(const CfSkeleton& s, const Derivation& d) {
  auto check = [&](auto&& self, const Derivation& node, const std::string& expected) -> void {
    if (node.rule < 1 || node.rule > static_cast<int>(s.rules.size()))
      throw InputError("derivation uses unknown rule " + std::to_string(node.rule));
    const auto& r = s.rule(node.rule);
    if (r.lhs != expected)
      throw InputError("rule " + std::to_string(r.id) + " expands " + r.lhs + ", expected " + expected);
    if (node.children.size() != r.arity())
      throw InputError("rule " + std::to_string(r.id) + " needs " + std::to_string(r.arity()) + " children");
    std::size_t k = 0;
    for (const auto& item : r.rhs)
      if (!item.isTerminal()) self(self, node.children[k++], item.symbol);
  };
  check(check, d, s.symbols.start);
}

std::vector<int> ruleSequence(const Derivation& d) {
  std::vector<int> seq;
  auto walk = [&](auto&& self, const Derivation& n) -> void {
    seq.push_back(n.rule);
    for (const auto& c : n.children) self(self, c);
  };
  walk(walk, d);
  return seq;
}

std::size_t derivationDepth(const Derivation& d) {
  std::size_t deepest = 0;
  for (const auto& c : d.children) deepest = std::max(deepest, derivationDepth(c));
  return deepest + 1;
}

std::size_t internalNodes(const Derivation& d) {
  std::size_t n = 1;
  for (const auto& c : d.children) n += internalNodes(c);
  return n;
}

std::vector<std::string> yield(const CfSkeleton& s, const Derivation& d) {
  std::vector<std::string> out;
  auto walk = [&](auto&& self, const Derivation& n) -> void {
    std::size_t k = 0;
    for (const auto& item : s.rule(n.rule).rhs) {
      if (item.isTerminal())
        out.push_back(item.symbol);
      else
        self(self, n.children[k++]);
    }
  };
  walk(walk, d);
  return out;
}

std::string formatTree(const CfSkeleton& s, const Derivation& d) {
  std::string out;
  auto walk = [&](auto&& self, const Derivation& n) -> void {
    const auto& r = s.rule(n.rule);
    out += '(' + r.lhs;
    std::size_t k = 0;
    for (const auto& item : r.rhs) {
      out += ' ';
      if (item.isTerminal())
        out += item.symbol;
      else
        self(self, n.children[k++]);
    }
    out += ')';
  };
  walk(walk, d);
  return out;
}

Derivation parseTree(const CfSkeleton& s, std::string_view text) {
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < text.size();) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(' || c == ')' || c == '[' || c == ']') {
      tokens.emplace_back(1, c == '[' ? '(' : c == ']' ? ')' : c);
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
             std::string_view("()[]").find(text[j]) == std::string_view::npos)
        ++j;
      std::string tok(text.substr(i, j - i));
      if (tok.size() >= 2 && tok.front() == '\'' && tok.back() == '\'') tok = tok.substr(1, tok.size() - 2);
      tokens.push_back(std::move(tok));
      i = j;
    }
  }

  std::size_t pos = 0;
  auto parseNode = [&](auto&& self) -> Derivation {
    if (pos >= tokens.size() || tokens[pos] != "(") throw InputError("expected '(' in tree");
    ++pos;
    if (pos >= tokens.size() || tokens[pos] == "(" || tokens[pos] == ")") throw InputError("expected category after '('");
    std::string label = tokens[pos++];
    struct Child {
      bool tree;
      std::string symbol;
      Derivation derivation;
    };
    std::vector<Child> children;
    while (pos < tokens.size() && tokens[pos] != ")") {
      if (tokens[pos] == "(") {
        std::string childLabel = pos + 1 < tokens.size() ? tokens[pos + 1] : "";
        Derivation sub = self(self);
        children.push_back({true, childLabel, std::move(sub)});
      } else {
        children.push_back({false, tokens[pos++], {}});
      }
    }
    if (pos >= tokens.size()) throw InputError("unbalanced parentheses in tree");
    ++pos;

    for (int id : s.rulesFor(label)) {
      const auto& r = s.rule(id);
      if (r.rhs.size() != children.size()) continue;
      bool match = true;
      for (std::size_t i = 0; i < r.rhs.size() && match; ++i)
        match = r.rhs[i].isTerminal() != children[i].tree && r.rhs[i].symbol == children[i].symbol;
      if (!match) continue;
      Derivation d{id, {}};
      for (auto& c : children)
        if (c.tree) d.children.push_back(std::move(c.derivation));
      return d;
    }
    std::string shape = label + " ->";
    for (const auto& c : children) shape += ' ' + c.symbol;
    throw InputError("no rule matches " + shape);
  };
  Derivation d = parseNode(parseNode);
  if (pos != tokens.size()) throw InputError("trailing tokens after tree");
  validateDerivation(s, d);
  return d;
}

// ------------------------------------------------------------ unification

namespace {

struct WorkNode {
  std::string label;
  std::vector<DagEdge> out;
};

class Unifier {
 public:
  int add(std::string label) {
    nodes_.push_back({std::move(label), {}});
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }

  void addEdge(int from, std::string label, int to) { nodes_[static_cast<std::size_t>(from)].out.push_back({std::move(label), to}); }

  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }

  std::optional<int> resolve(int node, const std::vector<std::string>& attributes) {
    int n = find(node);
    for (const auto& a : attributes) {
      const auto& out = nodes_[static_cast<std::size_t>(n)].out;
      auto it = std::find_if(out.begin(), out.end(), [&](const DagEdge& e) { return e.label == a; });
      if (it == out.end()) return std::nullopt;
      n = find(it->child);
    }
    return n;
  }

  /// Empty string on success, else the failure reason.
  std::string unify(int a, int b) {
    std::vector<std::pair<int, int>> work{{a, b}};
    while (!work.empty()) {
      auto [x, y] = work.back();
      work.pop_back();
      x = find(x);
      y = find(y);
      if (x == y) continue;
      auto& nx = nodes_[static_cast<std::size_t>(x)];
      auto& ny = nodes_[static_cast<std::size_t>(y)];
      if (nx.label != ny.label) return "cannot unify '" + nx.label + "' with '" + ny.label + "'";
      parent_[static_cast<std::size_t>(y)] = x;
      for (auto& e : ny.out) {
        auto it = std::find_if(nx.out.begin(), nx.out.end(), [&](const DagEdge& f) { return f.label == e.label; });
        if (it == nx.out.end())
          nx.out.push_back(e);
        else
          work.emplace_back(it->child, e.child);
      }
      ny.out.clear();
    }
    return {};
  }

  /// Compacts representatives reachable from root into a canonical Dag.
  DeriveResult finish(int root) {
    std::vector<int> remap(nodes_.size(), -1);
    std::vector<Dag::Node> out;
    std::vector<int> stack{find(root)};
    remap[static_cast<std::size_t>(stack[0])] = 0;
    out.push_back({});
    while (!stack.empty()) {
      int n = stack.back();
      stack.pop_back();
      for (const auto& e : nodes_[static_cast<std::size_t>(n)].out) {
        int c = find(e.child);
        if (remap[static_cast<std::size_t>(c)] < 0) {
          remap[static_cast<std::size_t>(c)] = static_cast<int>(out.size());
          out.push_back({});
          stack.push_back(c);
        }
      }
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      int slot = remap[i];
      if (slot < 0) continue;
      auto& dst = out[static_cast<std::size_t>(slot)];
      dst.label = nodes_[i].label;
      for (const auto& e : nodes_[i].out) dst.out.push_back({e.label, remap[static_cast<std::size_t>(find(e.child))]});
    }
    try {
      return Dag::fromGraph(std::move(out), 0);
    } catch (const std::invalid_argument& e) {
      return UnificationFailure{e.what()};
    }
  }

 private:
  std::vector<WorkNode> nodes_;
  std::vector<int> parent_;
};

}  // namespace

DeriveResult deriveDag(const AvGrammar& g, const Derivation& d) {
  Unifier u;
  std::string failure;
  auto build = [&](auto&& self, const Derivation& n) -> int {
    const auto& r = g.rule(n.rule);
    const int self_node = u.add(r.lhs);
    std::vector<int> slots;
    std::size_t k = 0;
    for (const auto& item : r.rhs) {
      int child = item.isTerminal() ? u.add(item.symbol) : self(self, n.children[k++]);
      if (child < 0) return -1;
      u.addEdge(self_node, item.edgeLabel, child);
      slots.push_back(child);
    }
    for (const auto& eq : r.constraints) {
      auto a = u.resolve(slots[static_cast<std::size_t>(eq.left.slot - 1)], eq.left.attributes);
      auto b = u.resolve(slots[static_cast<std::size_t>(eq.right.slot - 1)], eq.right.attributes);
      if (!a || !b) {
        failure = "rule " + std::to_string(r.id) + ": path " + (a ? eq.right : eq.left).toString() + " does not exist";
        return -1;
      }
      if (auto why = u.unify(*a, *b); !why.empty()) {
        failure = "rule " + std::to_string(r.id) + ": " + why;
        return -1;
      }
    }
    return self_node;
  };
  validateDerivation(g.skeleton(), d);
  const int root = build(build, d);
  if (root < 0) return UnificationFailure{failure};
  return u.finish(root);
}

// ------------------------------------------------------------ enumeration

std::vector<Dag> Language::dags() const {
  std::vector<Dag> out;
  out.reserve(items.size());
  for (const auto& i : items) out.push_back(i.dag);
  return out;
}

std::optional<std::size_t> Language::find(const Dag& dag) const {
  if (auto it = index_.find(dag.key()); it != index_.end()) return it->second;
  return std::nullopt;
}

Language enumerateLanguage(const AvGrammar& g, std::size_t maxDepth) {
  if (maxDepth == 0) throw std::invalid_argument("maxDepth must be positive");
  constexpr std::size_t kMaxDerivations = 2'000'000;
  const auto& s = g.skeleton();
  Language lang;
  std::map<std::pair<std::string, std::size_t>, std::vector<Derivation>> memo;

  auto derivations = [&](auto&& self, const std::string& cat, std::size_t depth) -> const std::vector<Derivation>& {
    auto key = std::make_pair(cat, depth);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<Derivation> result;
    if (depth == 0) {
      lang.truncated = true;
      return memo.emplace(key, std::move(result)).first->second;
    }
    for (int id : s.rulesFor(cat)) {
      const auto& r = s.rule(id);
      std::vector<const std::vector<Derivation>*> options;
      bool empty = false;
      for (const auto& item : r.rhs) {
        if (item.isTerminal()) continue;
        options.push_back(&self(self, item.symbol, depth - 1));
        if (options.back()->empty()) empty = true;
      }
      if (empty) continue;
      // Odometer with the first child slowest gives lexicographic rule
      // sequences, since preorder sequences are prefix-free.
      std::vector<std::size_t> idx(options.size(), 0);
      while (true) {
        Derivation d{id, {}};
        for (std::size_t c = 0; c < options.size(); ++c) d.children.push_back((*options[c])[idx[c]]);
        result.push_back(std::move(d));
        if (result.size() > kMaxDerivations) throw std::length_error("language enumeration exceeds derivation limit");
        std::size_t c = options.size();
        while (c > 0 && ++idx[c - 1] == options[c - 1]->size()) idx[--c] = 0;
        if (c == 0) break;
      }
    }
    return memo.emplace(key, std::move(result)).first->second;
  };

  const auto& all = derivations(derivations, s.symbols.start, maxDepth);
  for (const auto& d : all) {
    auto result = deriveDag(g, d);
    if (auto* dag = std::get_if<Dag>(&result)) {
      if (auto it = lang.index_.find(dag->key()); it != lang.index_.end()) {
        lang.items[it->second].others.push_back(d);
        continue;
      }
      lang.index_.emplace(dag->key(), lang.items.size());
      lang.items.push_back({std::move(*dag), d, {}});
    } else {
      ++lang.failedDerivations;
    }
  }
  return lang;
}

std::vector<LanguageItem> parseDags(const AvGrammar& g, const std::vector<std::string>& sentence, std::size_t maxDepth) {
  auto lang = enumerateLanguage(g, maxDepth);
  std::vector<LanguageItem> parses;
  for (auto& item : lang.items)
    if (yield(g.skeleton(), item.derivation) == sentence) parses.push_back(std::move(item));
  return parses;
}

std::vector<Derivation> recoverDerivations(const AvGrammar& g, const Dag& dag) {
  std::vector<Derivation> found;
  if (dag.empty()) return found;
  const auto& s = g.skeleton();
  // All derivations whose tree shape fits below `node`.
  auto candidates = [&](auto&& self, int node) -> std::vector<Derivation> {
    std::vector<Derivation> out;
    const auto& n = dag.node(node);
    for (int id : s.rulesFor(n.label)) {
      const auto& r = s.rule(id);
      if (r.rhs.size() != n.out.size()) continue;
      std::vector<std::vector<Derivation>> options;
      bool ok = true;
      for (const auto& item : r.rhs) {
        int c = dag.child(node, item.edgeLabel);
        if (c < 0 || dag.node(c).label != item.symbol) {
          ok = false;
          break;
        }
        if (item.isTerminal()) {
          if (!dag.node(c).out.empty()) ok = false;
          continue;
        }
        options.push_back(self(self, c));
        if (options.back().empty()) ok = false;
        if (!ok) break;
      }
      if (!ok) continue;
      std::vector<std::size_t> idx(options.size(), 0);
      while (true) {
        Derivation d{id, {}};
        for (std::size_t k = 0; k < options.size(); ++k) d.children.push_back(options[k][idx[k]]);
        out.push_back(std::move(d));
        std::size_t k = options.size();
        while (k > 0 && ++idx[k - 1] == options[k - 1].size()) idx[--k] = 0;
        if (k == 0) break;
      }
    }
    return out;
  };
  if (dag.node(Dag::root()).label != s.symbols.start) return found;
  for (auto& d : candidates(candidates, Dag::root())) {
    auto result = deriveDag(g, d);
    if (const auto* got = std::get_if<Dag>(&result); got && *got == dag) found.push_back(std::move(d));
  }
  return found;
}

std::optional<Derivation> recoverDerivation(const AvGrammar& g, const Dag& dag) {
  auto all = recoverDerivations(g, dag);
  if (all.empty()) return std::nullopt;
  return std::move(all.front());
}

}  // namespace savg
