// savg: command-line front end for the stochastic AV grammar toolkit.

#include "savg/errors.hpp"
#include "savg/field.hpp"
#include "savg/induction.hpp"
#include "savg/mcmc.hpp"
#include "savg/model_io.hpp"
#include "savg/oracle.hpp"
#include "savg/scfg.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace savg;
using nlohmann::json;

constexpr int kInputError = 2;
constexpr int kNotConverged = 3;
constexpr int kNoParse = 4;

struct Options {
  std::string grammar, corpus, model, weights, out, config, initial, semantics, trace, summary;
  std::uint64_t seed = 0x5eed;
  bool exact = false, sampled = false;
  std::size_t maxDepth = 10;
  std::optional<std::size_t> maxProperties, length, burnIn, thinning;
  std::vector<std::string> sentence;
};

std::string num(double v) { return formatDecimal(v); }

std::string dual(const std::optional<Rational>& exact, double v) {
  return exact ? formatRational(*exact) + " (" + num(v) + ")" : num(v);
}

void writeText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

AvGrammar grammarFrom(const Options& o) {
  if (o.grammar.empty()) throw InputError("--grammar is required");
  return loadGrammar(o.grammar);
}

/// --model, or a null field over --grammar (scfg when --weights is given).
FieldModel modelFrom(const Options& o) {
  if (!o.model.empty()) return loadModel(o.model);
  auto g = grammarFrom(o);
  if (!o.weights.empty()) {
    auto theta = loadWeights(g.skeleton(), o.weights);
    FieldModel m(std::move(g), InitialMode::Scfg, std::move(theta));
    m.setGrammarPath(o.grammar);
    return m;
  }
  FieldModel m(std::move(g), InitialMode::Uniform);
  m.setGrammarPath(o.grammar);
  return m;
}

Language languageFor(const AvGrammar& g, std::size_t maxDepth) {
  auto lang = enumerateLanguage(g, maxDepth);
  if (lang.truncated)
    throw InputError("L(G) is not finite to depth " + std::to_string(maxDepth) + "; raise --max-depth or use --sampled");
  return lang;
}

void applyChainJson(ChainConfig& c, const json& j) {
  c.burnIn = j.value("burnIn", c.burnIn);
  c.length = j.value("length", c.length);
  c.seed = j.value("seed", c.seed);
  c.proposalResampleBudget = j.value("proposalResampleBudget", c.proposalResampleBudget);
  c.thinning = j.value("thinning", c.thinning);
  c.depthCap = j.value("depthCap", c.depthCap);
}

InductionConfig inductionConfig(const Options& o) {
  InductionConfig c;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw InputError("cannot open config file '" + o.config + "'");
    json j;
    try {
      j = json::parse(in);
      c.maxProperties = j.value("maxProperties", c.maxProperties);
      c.scoreTolerance = j.value("scoreTolerance", c.scoreTolerance);
      c.weightTolerance = j.value("weightTolerance", c.weightTolerance);
      c.scalingTolerance = j.value("scalingTolerance", c.scalingTolerance);
      c.maxScalingIterations = j.value("maxScalingIterations", c.maxScalingIterations);
      c.sampledScalingTolerance = j.value("sampledScalingTolerance", c.sampledScalingTolerance);
      c.sampledMaxRounds = j.value("sampledMaxRounds", c.sampledMaxRounds);
      c.exactThreshold = j.value("exactThreshold", c.exactThreshold);
      c.maxDepth = j.value("maxDepth", c.maxDepth);
      c.weightFloor = j.value("weightFloor", c.weightFloor);
      c.maxPatternNodes = j.value("maxPatternNodes", c.maxPatternNodes);
      if (j.contains("semantics")) c.semantics = parseSemantics(j.at("semantics").get<std::string>());
      if (j.contains("mode")) {
        const auto mode = j.at("mode").get<std::string>();
        if (mode == "exact") c.mode = ExpectationMode::Exact;
        else if (mode == "sampled") c.mode = ExpectationMode::Sampled;
        else if (mode == "auto") c.mode = ExpectationMode::Auto;
        else throw InputError("config mode must be auto, exact or sampled");
      }
      if (j.contains("updateRule")) {
        const auto rule = j.at("updateRule").get<std::string>();
        if (rule == "multiplicative") c.updateRule = UpdateRule::Multiplicative;
        else if (rule == "replace") c.updateRule = UpdateRule::Replace;
        else throw InputError("config updateRule must be multiplicative or replace");
      }
      if (j.contains("sampler")) applyChainJson(c.sampler, j.at("sampler"));
    } catch (const json::exception& e) {
      throw InputError("bad config file: " + std::string(e.what()));
    }
  }
  c.sampler.seed = o.seed;
  c.maxDepth = o.maxDepth;
  if (o.maxProperties) c.maxProperties = *o.maxProperties;
  if (!o.semantics.empty()) c.semantics = parseSemantics(o.semantics);
  if (o.exact) c.mode = ExpectationMode::Exact;
  if (o.sampled) c.mode = ExpectationMode::Sampled;
  if (o.length) c.sampler.length = *o.length;
  if (o.burnIn) c.sampler.burnIn = *o.burnIn;
  if (o.thinning) c.sampler.thinning = *o.thinning;
  return c;
}

// ------------------------------------------------------------- commands

int cmdEstimateErf(const Options& o) {
  const auto g = grammarFrom(o);
  if (o.corpus.empty()) throw InputError("--corpus is required");
  const auto records = loadCorpus(o.corpus);
  const auto corpus = derivationCorpus(g.skeleton(), records);
  const auto erf = erfEstimate(g.skeleton(), corpus);
  std::cout << "seed\t" << o.seed << "\n";
  std::cout << formatWeights(erf);
  if (!o.out.empty()) writeText(o.out, formatWeights(erf));

  const auto pTilde = empiricalFromCorpus(g, records);
  // CF reading: q(x) is the product of rule weights, no renormalization.
  double dcf = 0;
  for (const auto& e : corpus.entries) {
    const double p = toDouble(corpus.probability(&e - corpus.entries.data()));
    dcf += p * (std::log(p) - logTreeProbability(erf, e.derivation));
  }
  std::cout << "divergence_cf\t" << num(dcf) << "\n";
  const auto field = [&] {
    FieldModel m(g, InitialMode::Uniform);
    auto props = ruleProperties(g);
    for (std::size_t i = 0; i < props.size(); ++i) m.addProperty(props[i], erf.theta()[i]);
    return m;
  }();
  const auto lang = languageFor(g, o.maxDepth);
  const auto n = normalizeExact(field, lang);
  std::cout << "z\t" << dual(n.exactZ, n.z) << "\n";
  std::cout << "divergence_normalized\t" << num(klDivergence(pTilde, n.q).value) << "\n";
  return 0;
}

int cmdInduce(const Options& o) {
  auto g = grammarFrom(o);
  if (o.corpus.empty()) throw InputError("--corpus is required");
  const auto records = loadCorpus(o.corpus);
  const auto pTilde = empiricalFromCorpus(g, records);
  const auto config = inductionConfig(o);
  const InitialMode mode = o.initial.empty() ? (o.sampled ? InitialMode::Scfg : InitialMode::Uniform)
                                             : parseInitialMode(o.initial);
  std::optional<CfModel> theta;
  if (!o.weights.empty())
    theta = loadWeights(g.skeleton(), o.weights);
  else if (mode == InitialMode::Scfg)
    theta = erfEstimate(g.skeleton(), derivationCorpus(g.skeleton(), records));
  FieldModel initial(std::move(g), mode, std::move(theta));
  initial.setGrammarPath(o.grammar);

  auto result = induceField(initial, pTilde, config);
  const auto traceText = formatTrace(result.trace);
  std::cout << "seed\t" << o.seed << "\n";
  std::cout << "mode\t" << (result.sampled ? "sampled" : "exact") << "\n";
  std::cout << "initial_divergence\t" << num(result.initialDivergence) << "\n";
  std::cout << traceText;
  std::cout << "properties\t" << result.field.size() << "\n";
  std::cout << "final_divergence\t"
            << num(result.trace.empty() ? result.initialDivergence : result.trace.back().divergence) << "\n";
  std::cout << "converged\t" << (result.converged ? "yes" : "no") << "\n";
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  if (!o.trace.empty()) writeText(o.trace, traceText);
  if (!o.out.empty()) saveModel(result.field, o.out);
  return result.converged ? 0 : kNotConverged;
}

int cmdSample(const Options& o) {
  const auto m = modelFrom(o);
  ChainConfig c;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw InputError("cannot open config file '" + o.config + "'");
    try {
      const auto j = json::parse(in);
      applyChainJson(c, j.contains("sampler") ? j.at("sampler") : j);
    } catch (const json::exception& e) {
      throw InputError("bad config file: " + std::string(e.what()));
    }
  }
  c.seed = o.seed;
  if (o.length) c.length = *o.length;
  if (o.burnIn) c.burnIn = *o.burnIn;
  if (o.thinning) c.thinning = *o.thinning;
  const auto s = runChain(m, c);

  std::vector<CorpusRecord> records;
  for (const auto& x : s.samples)
    records.push_back({static_cast<long long>(x.count), formatTree(m.grammar().skeleton(), x.derivation), 0});
  json summary = {{"seed", c.seed},
                  {"acceptanceRate", s.acceptanceRate()},
                  {"proposalFailures", s.proposalFailures},
                  {"proposals", s.proposals},
                  {"retained", s.retained},
                  {"expectations", s.estimates.means},
                  {"histograms", s.estimates.histograms},
                  {"config",
                   {{"burnIn", c.burnIn},
                    {"length", c.length},
                    {"thinning", c.thinning},
                    {"proposalResampleBudget", c.proposalResampleBudget},
                    {"depthCap", c.depthCap}}}};
  writeText(o.out, "# seed " + std::to_string(c.seed) + "\n" + formatCorpus(records));
  writeText(o.summary, summary.dump(2) + "\n");
  return 0;
}

int cmdDisambiguate(const Options& o) {
  const auto m = modelFrom(o);
  std::vector<std::string> words;
  for (const auto& s : o.sentence) {
    std::istringstream in(s);
    for (std::string w; in >> w;) words.push_back(w);
  }
  const auto parses = parseDags(m.grammar(), words, o.maxDepth);
  std::cout << "seed\t" << o.seed << "\n";
  if (parses.empty()) {
    std::cerr << "no parse for '";
    for (std::size_t i = 0; i < words.size(); ++i) std::cerr << (i ? " " : "") << words[i];
    std::cerr << "'\n";
    return kNoParse;
  }
  // Z is common to all parses, so F(x)p(x) ranks them.
  std::size_t best = 0;
  std::vector<double> score;
  for (const auto& p : parses) score.push_back(unnormalized(m, p));
  for (std::size_t i = 1; i < parses.size(); ++i)
    if (score[i] > score[best] * (1 + 1e-12) ||
        (std::abs(score[i] - score[best]) <= 1e-12 * score[best] &&
         ruleSequence(parses[i].derivation) < ruleSequence(parses[best].derivation)))
      best = i;
  for (std::size_t i = 0; i < parses.size(); ++i)
    std::cout << (i == best ? "best" : "parse") << "\t" << formatTree(m.grammar().skeleton(), parses[i].derivation)
              << "\t" << parses[i].dag.toString() << "\t" << num(score[i]) << "\n";
  return 0;
}

int cmdKl(const Options& o) {
  const auto m = modelFrom(o);
  if (o.corpus.empty()) throw InputError("--corpus is required");
  const auto pTilde = empiricalFromCorpus(m.grammar(), loadCorpus(o.corpus));
  std::cout << "seed\t" << o.seed << "\n";
  if (o.sampled) {
    ChainConfig c;
    c.seed = o.seed;
    if (o.length) c.length = *o.length;
    if (o.burnIn) c.burnIn = *o.burnIn;
    std::cout << "divergence\t" << num(sampledSnapshot(m, pTilde, c).divergence) << "\tsampled\n";
    return 0;
  }
  const auto n = normalizeExact(m, languageFor(m.grammar(), o.maxDepth));
  const auto kl = klDivergence(pTilde, n.q);
  std::cout << "z\t" << dual(n.exactZ, n.z) << "\n";
  if (!kl.finite()) {
    std::cout << "divergence\tinf\t" << kl.offending->toString() << "\n";
    return 0;
  }
  std::cout << "divergence\t" << num(kl.value) << "\texact\n";
  return 0;
}

int cmdEnumerate(const Options& o) {
  const auto m = modelFrom(o);
  const auto lang = enumerateLanguage(m.grammar(), o.maxDepth);
  std::cout << "seed\t" << o.seed << "\n";
  std::optional<NormalizedField> n;
  if (!lang.items.empty() && (!o.model.empty() || !o.weights.empty())) n = normalizeExact(m, lang);
  for (std::size_t i = 0; i < lang.items.size(); ++i) {
    const auto& item = lang.items[i];
    std::cout << formatTree(m.grammar().skeleton(), item.derivation) << "\t" << item.dag.toString();
    if (n) std::cout << "\t" << dual(n->exactProbs ? std::optional<Rational>((*n->exactProbs)[i]) : std::nullopt, n->q.probs()[i]);
    std::cout << "\n";
  }
  std::cout << "dags\t" << lang.items.size() << "\n";
  std::cout << "failed_derivations\t" << lang.failedDerivations << "\n";
  std::cout << "truncated\t" << (lang.truncated ? "yes" : "no") << "\n";
  if (n) std::cout << "z\t" << dual(n->exactZ, n->z) << "\n";
  return 0;
}

int cmdOracleCheck(const Options& o) {
  const auto reports = oracle::runChecks();
  std::cout << "# seed " << o.seed << "\n" << oracle::formatReports(reports);
  for (const auto& r : reports)
    if (!r.pass) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic attribute-value grammars: estimation, field induction, sampling"};
  app.require_subcommand(1);
  Options o;

  auto shared = [&](CLI::App* sub) {
    sub->add_option("--grammar", o.grammar, "grammar file");
    sub->add_option("--corpus", o.corpus, "corpus file");
    sub->add_option("--model", o.model, "model JSON");
    sub->add_option("--weights", o.weights, "rule weights file");
    sub->add_option("--out", o.out, "output path");
    sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
    auto* ex = sub->add_flag("--exact", o.exact, "exact enumeration");
    auto* sa = sub->add_flag("--sampled", o.sampled, "MCMC estimates");
    ex->excludes(sa);
    sub->add_option("--initial", o.initial, "initial distribution: uniform|scfg");
    sub->add_option("--semantics", o.semantics, "property counting: embeddings|presence");
    sub->add_option("--max-depth", o.maxDepth, "derivation depth bound")->capture_default_str();
    sub->add_option("--config", o.config, "JSON config file");
  };

  std::function<int()> run;
  auto add = [&](const char* name, const char* help, int (*fn)(const Options&)) {
    auto* sub = app.add_subcommand(name, help);
    shared(sub);
    sub->callback([&run, fn, &o] { run = [fn, &o] { return fn(o); }; });
    return sub;
  };
  add("estimate-erf", "ERF rule weights and their divergences", cmdEstimateErf);
  auto* induce = add("induce", "field induction", cmdInduce);
  induce->add_option("--trace", o.trace, "trace TSV output");
  induce->add_option("--max-properties", o.maxProperties, "property limit");
  induce->add_option("--length", o.length, "chain length (sampled mode)");
  induce->add_option("--burn-in", o.burnIn, "burn-in steps (sampled mode)");
  auto* sample = add("sample", "Metropolis-Hastings sampling", cmdSample);
  sample->add_option("--length", o.length, "steps after burn-in");
  sample->add_option("--burn-in", o.burnIn, "burn-in steps");
  sample->add_option("--thinning", o.thinning, "keep every k-th state");
  sample->add_option("--summary", o.summary, "summary JSON output");
  auto* dis = add("disambiguate", "most probable parse", cmdDisambiguate);
  dis->add_option("sentence", o.sentence, "terminal atoms")->required();
  auto* kl = add("kl", "divergence of a model from a corpus", cmdKl);
  kl->add_option("--length", o.length, "chain length (sampled mode)");
  kl->add_option("--burn-in", o.burnIn, "burn-in steps (sampled mode)");
  add("enumerate", "list L(G)", cmdEnumerate);
  add("oracle-check", "brute-force cross-checks (TSV)", cmdOracleCheck);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }
  try {
    return run();
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ProposalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
