#pragma once

#include "savg/dag.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace savg {

struct SymbolTable {
  std::vector<std::string> nonterminals;  // in order of first appearance
  std::vector<std::string> terminals;
  std::string start;

  bool isNonterminal(std::string_view s) const;
  bool isTerminal(std::string_view s) const;
  /// Nonterminals followed by terminals.
  std::vector<std::string> labels() const;
};

struct RhsItem {
  enum class Kind { Nonterminal, Terminal };
  Kind kind = Kind::Nonterminal;
  std::string symbol;
  std::string edgeLabel;  // defaults to the 1-based position

  bool isTerminal() const { return kind == Kind::Terminal; }
};

/// slot.attr1.attr2...; slot is the 1-based rhs position.
struct FeaturePath {
  int slot = 1;
  std::vector<std::string> attributes;

  std::string toString() const;
  friend auto operator<=>(const FeaturePath&, const FeaturePath&) = default;
};

/// Two paths that must denote the same dag node. Stored with left <= right.
struct PathEquation {
  FeaturePath left;
  FeaturePath right;

  friend auto operator<=>(const PathEquation&, const PathEquation&) = default;
};

struct CfRule {
  int id = 0;
  std::string lhs;
  std::vector<RhsItem> rhs;

  /// Number of nonterminal items, i.e. children in a derivation.
  std::size_t arity() const;
};

struct AvRule {
  int id = 0;
  std::string lhs;
  std::vector<RhsItem> rhs;
  std::vector<PathEquation> constraints;  // sorted, deduplicated
};

/// The context-free backbone: rules with constraints stripped.
struct CfSkeleton {
  SymbolTable symbols;
  std::vector<CfRule> rules;  // rules[i].id == i + 1

  const CfRule& rule(int id) const { return rules.at(static_cast<std::size_t>(id - 1)); }
  /// Rule ids with the given lhs, ascending.
  std::vector<int> rulesFor(std::string_view lhs) const;
};

/// An attribute-value grammar: CF backbone rules plus re-entrancy
/// constraints. Immutable once built.
class AvGrammar {
 public:
  /// Validates ids (1..n contiguous), symbol disjointness, that every
  /// nonterminal has a rule, and that every constraint names an existing
  /// slot. Throws InputError.
  AvGrammar(SymbolTable symbols, std::vector<AvRule> rules);

  /// The skeleton read as a grammar without constraints.
  static AvGrammar fromSkeleton(const CfSkeleton& skeleton);

  const SymbolTable& symbols() const { return symbols_; }
  const std::vector<AvRule>& rules() const { return rules_; }
  const AvRule& rule(int id) const { return rules_.at(static_cast<std::size_t>(id - 1)); }
  std::size_t ruleCount() const { return rules_.size(); }
  const CfSkeleton& skeleton() const { return skeleton_; }

 private:
  SymbolTable symbols_;
  std::vector<AvRule> rules_;
  CfSkeleton skeleton_;
};

/// Line-based grammar text:
///   start S
///   rule 1: S -> A A | eq 1.1 = 2.1
///   rule 3: A -> 'a'
/// Quoted tokens are atoms; `lbl:X` gives an item an explicit edge label.
/// Further constraints follow as more `| eq ...` clauses.
AvGrammar parseGrammar(std::string_view text);
AvGrammar loadGrammar(const std::filesystem::path& path);
std::string formatGrammar(const AvGrammar& g);

CfSkeleton cfAnalogue(const AvGrammar& g);

/// A derivation tree. `children` has one entry per nonterminal rhs item of
/// `rule`, in rhs order; terminal items are implicit leaves.
struct Derivation {
  int rule = 0;
  std::vector<Derivation> children;

  friend bool operator==(const Derivation&, const Derivation&) = default;
};

/// Throws InputError when child counts or categories disagree with the
/// rules, or the root is not the start symbol.
void validateDerivation(const CfSkeleton& s, const Derivation& d);
std::vector<int> ruleSequence(const Derivation& d);  // preorder
std::size_t derivationDepth(const Derivation& d);
std::size_t internalNodes(const Derivation& d);
std::vector<std::string> yield(const CfSkeleton& s, const Derivation& d);
/// Bracketed tree, e.g. "(S (A a) (A a))".
std::string formatTree(const CfSkeleton& s, const Derivation& d);
/// Inverse of formatTree. A node matches the lowest-id rule whose lhs and
/// rhs symbol sequence agree with it. Throws InputError.
Derivation parseTree(const CfSkeleton& s, std::string_view text);

struct UnificationFailure {
  std::string reason;
};

using DeriveResult = std::variant<Dag, UnificationFailure>;

/// Builds the derivation tree as a graph, then merges the nodes equated by
/// each rule instance's constraints, innermost rule instances first.
/// Merging unifies recursively over shared edge labels; a label clash, a
/// missing path, or a resulting cycle is a UnificationFailure.
DeriveResult deriveDag(const AvGrammar& g, const Derivation& d);

struct LanguageItem {
  Dag dag;
  Derivation derivation;          // first in enumeration order
  std::vector<Derivation> others;  // further derivations of the same dag
};

struct Language {
  std::vector<LanguageItem> items;  // lexicographic by rule sequence
  bool truncated = false;           // some derivation was cut by maxDepth
  std::size_t failedDerivations = 0;

  std::vector<Dag> dags() const;
  /// Index of the dag with the given key, if present.
  std::optional<std::size_t> find(const Dag& dag) const;

 private:
  friend Language enumerateLanguage(const AvGrammar&, std::size_t);
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Every successful derivation with depth <= maxDepth (a rule with no
/// nonterminal children has depth 1), deduplicated by dag.
Language enumerateLanguage(const AvGrammar& g, std::size_t maxDepth);

/// The enumerated items whose terminal yield equals `sentence`.
std::vector<LanguageItem> parseDags(const AvGrammar& g, const std::vector<std::string>& sentence, std::size_t maxDepth);

/// Every derivation whose dag is `dag`, found by top-down rule matching, in
/// lexicographic order.
std::vector<Derivation> recoverDerivations(const AvGrammar& g, const Dag& dag);
std::optional<Derivation> recoverDerivation(const AvGrammar& g, const Dag& dag);

}  // namespace savg
