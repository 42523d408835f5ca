#pragma once

#include "savg/field.hpp"
#include "savg/grammar.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

/// Brute-force reference computations. Only the grammar and dag types are
/// shared with the estimators; every number here is recomputed by direct
/// summation (plain products and std::pow, no log-space tricks).
namespace savg::oracle {

struct Report {
  std::string quantity;
  double oracle = 0;
  double subject = 0;
  double absError = 0;
  double relError = 0;
  double tolerance = 0;
  bool pass = false;
};

Report compare(std::string quantity, double oracleValue, double subjectValue, double tolerance);

/// Embeddings by trying every injective assignment of dag nodes.
std::size_t embeddings(const Pattern& pattern, const Dag& dag);
int propertyValue(const Property& p, const Dag& dag);

/// prod theta over the derivation's rule uses.
double treeProduct(const std::vector<double>& theta, const Derivation& d);

/// (dag, q(x)) over the full enumeration. Throws std::runtime_error when the
/// enumeration is truncated.
std::vector<std::pair<Dag, double>> distribution(const FieldModel& m, std::size_t maxDepth = 10);

/// Z = sum_x F(x) p(x), with p(x) = 1 in uniform mode.
double normalizer(const FieldModel& m, std::size_t maxDepth = 10);

/// sum_x q(x) f(x); throws on truncation.
double exactExpectation(const FieldModel& m, const std::function<double(const Dag&)>& f, std::size_t maxDepth = 10);

/// D(p || q) by direct summation over dag keys; +inf when q misses p's support.
double kl(const std::vector<std::pair<Dag, double>>& p, const std::vector<std::pair<Dag, double>>& q);

/// ERF weights by counting rule uses per lhs.
std::vector<double> erfWeights(const CfSkeleton& s, const std::vector<std::pair<Derivation, long long>>& corpus);

/// Index of the most probable parse, ties to the smaller rule sequence.
std::size_t disambiguate(const std::vector<double>& theta, const std::vector<Derivation>& parses);

struct GridSpec {
  double lo = 1e-6;
  double hi = 1e6;
  std::size_t points = 2001;
};

/// Minimises D(p~ || q_{f,beta}) over a log-spaced grid, then refines by
/// golden section between the grid neighbours of the best point.
double gridSearchBestWeight(const FieldModel& field, const Property& candidate,
                            const std::vector<std::pair<Dag, double>>& pTilde, const GridSpec& grid = {},
                            std::size_t maxDepth = 10);

struct Kernel {
  std::vector<Dag> states;
  std::vector<double> q;
  std::vector<double> p;  // proposal
  std::vector<std::vector<double>> k;
  std::vector<double> stationary;  // by power iteration from p
  double maxBalanceViolation = 0;
};

/// The MH kernel with the unsimplified acceptance
/// min{1, q(y)p(x) / (q(x)p(y))}.
Kernel exhaustiveKernel(const FieldModel& m, std::size_t maxDepth = 10);

/// The full comparison table behind `oracle-check`.
std::vector<Report> runChecks();
std::string formatReports(const std::vector<Report>& reports);

}  // namespace savg::oracle
