#include "savg/errors.hpp"
#include "savg/fixtures.hpp"
#include "savg/induction.hpp"
#include "savg/mcmc.hpp"
#include "savg/model_io.hpp"
#include "savg/oracle.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace savg;

namespace {

std::vector<std::string> toStrings(const std::vector<Weight>& w) {
  std::vector<std::string> out;
  for (const auto& x : w) out.push_back(formatWeight(x));
  return out;
}

py::list languageRows(const FieldModel& m, std::size_t maxDepth) {
  const auto lang = enumerateLanguage(m.grammar(), maxDepth);
  const auto n = normalizeExact(m, lang);
  py::list rows;
  for (std::size_t i = 0; i < lang.items.size(); ++i)
    rows.append(py::dict(py::arg("tree") = formatTree(m.grammar().skeleton(), lang.items[i].derivation),
                         py::arg("dag") = lang.items[i].dag.toString(), py::arg("q") = n.q.probs()[i],
                         py::arg("exact") = n.exactProbs ? py::cast(formatRational((*n.exactProbs)[i])) : py::none()));
  return rows;
}

FieldModel nullField(const AvGrammar& g, const std::string& mode, const std::optional<std::string>& weights) {
  const auto initial = parseInitialMode(mode);
  if (initial == InitialMode::Scfg) {
    if (!weights) throw std::invalid_argument("scfg mode needs rule weights");
    return FieldModel(g, initial, parseWeights(g.skeleton(), *weights));
  }
  return FieldModel(g, initial);
}

}  // namespace

PYBIND11_MODULE(_savg, m) {
  m.doc() = "Stochastic attribute-value grammars";
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  py::class_<AvGrammar>(m, "Grammar")
      .def(py::init([](const std::string& text) { return parseGrammar(text); }), py::arg("text"))
      .def_static("load", [](const std::string& path) { return loadGrammar(path); })
      .def("__str__", [](const AvGrammar& g) { return formatGrammar(g); })
      .def_property_readonly("rule_count", &AvGrammar::ruleCount)
      .def(
          "enumerate",
          [](const AvGrammar& g, std::size_t maxDepth) {
            const auto lang = enumerateLanguage(g, maxDepth);
            py::list rows;
            for (const auto& item : lang.items)
              rows.append(py::make_tuple(formatTree(g.skeleton(), item.derivation), item.dag.toString()));
            return rows;
          },
          py::arg("max_depth") = 10)
      .def(
          "parses",
          [](const AvGrammar& g, const std::vector<std::string>& words, std::size_t maxDepth) {
            std::vector<std::string> out;
            for (const auto& p : parseDags(g, words, maxDepth)) out.push_back(formatTree(g.skeleton(), p.derivation));
            return out;
          },
          py::arg("words"), py::arg("max_depth") = 10);

  py::class_<FieldModel>(m, "Field")
      .def(py::init(&nullField), py::arg("grammar"), py::arg("initial") = "uniform", py::arg("weights") = py::none())
      .def_static("load", [](const std::string& path) { return loadModel(path); })
      .def_static("parse", [](const std::string& text) { return parseModel(text); })
      .def("to_json", [](const FieldModel& f) { return formatModel(f); })
      .def("save", [](const FieldModel& f, const std::string& path) { saveModel(f, path); })
      .def_property_readonly("grammar", &FieldModel::grammar)
      .def_property_readonly("properties", [](const FieldModel& f) {
        std::vector<std::string> out;
        for (const auto& p : f.properties()) out.push_back(p.toString());
        return out;
      })
      .def_property_readonly("beta", [](const FieldModel& f) {
        std::vector<double> out;
        for (const auto& b : f.beta()) out.push_back(b.value);
        return out;
      })
      .def(
          "add_property",
          [](FieldModel& f, const std::vector<std::string>& labels, const std::vector<std::tuple<int, std::string, int>>& edges,
             double beta, const std::string& semantics) {
            std::vector<Pattern::Edge> e;
            for (const auto& [from, label, to] : edges) e.push_back({from, label, to});
            f.addProperty({Pattern(labels, e), parseSemantics(semantics)}, Weight(beta));
          },
          py::arg("labels"), py::arg("edges") = std::vector<std::tuple<int, std::string, int>>{}, py::arg("beta") = 1.0,
          py::arg("semantics") = "embeddings")
      .def(
          "distribution", [](const FieldModel& f, std::size_t maxDepth) { return languageRows(f, maxDepth); },
          py::arg("max_depth") = 10)
      .def(
          "z",
          [](const FieldModel& f, std::size_t maxDepth) {
            return normalizeExact(f, enumerateLanguage(f.grammar(), maxDepth)).z;
          },
          py::arg("max_depth") = 10)
      .def(
          "kl",
          [](const FieldModel& f, const std::string& corpus, std::size_t maxDepth) {
            const auto pTilde = empiricalFromCorpus(f.grammar(), parseCorpus(corpus));
            return klDivergence(pTilde, normalizeExact(f, enumerateLanguage(f.grammar(), maxDepth)).q).value;
          },
          py::arg("corpus"), py::arg("max_depth") = 10)
      .def(
          "sample",
          [](const FieldModel& f, std::size_t length, std::size_t burnIn, std::uint64_t seed, std::size_t thinning) {
            ChainConfig c;
            c.length = length;
            c.burnIn = burnIn;
            c.seed = seed;
            c.thinning = thinning;
            ChainSummary s;
            {
              py::gil_scoped_release release;
              s = runChain(f, c);
            }
            py::dict counts;
            for (const auto& x : s.samples) counts[py::str(x.dag.toString())] = x.count;
            return py::dict(py::arg("counts") = counts, py::arg("acceptance_rate") = s.acceptanceRate(),
                            py::arg("proposal_failures") = s.proposalFailures, py::arg("retained") = s.retained,
                            py::arg("expectations") = s.estimates.means, py::arg("histograms") = s.estimates.histograms,
                            py::arg("seed") = seed);
          },
          py::arg("length") = 200000, py::arg("burn_in") = 5000, py::arg("seed") = 0x5eed, py::arg("thinning") = 1);

  m.def(
      "erf_estimate",
      [](const AvGrammar& g, const std::string& corpus) {
        return toStrings(erfEstimate(g.skeleton(), derivationCorpus(g.skeleton(), parseCorpus(corpus))).theta());
      },
      py::arg("grammar"), py::arg("corpus"));

  m.def(
      "induce",
      [](const FieldModel& initial, const std::string& corpus, const std::string& semantics, std::size_t maxProperties,
         bool sampled, std::uint64_t seed) {
        InductionConfig c;
        c.semantics = parseSemantics(semantics);
        c.maxProperties = maxProperties;
        c.mode = sampled ? ExpectationMode::Sampled : ExpectationMode::Auto;
        c.sampler.seed = seed;
        const auto pTilde = empiricalFromCorpus(initial.grammar(), parseCorpus(corpus));
        std::optional<InductionResult> r;
        {
          py::gil_scoped_release release;
          r = induceField(initial, pTilde, c);
        }
        py::list trace;
        for (const auto& t : r->trace)
          trace.append(py::dict(py::arg("step") = t.step, py::arg("pattern") = t.pattern, py::arg("beta") = t.beta,
                                py::arg("divergence") = t.divergence, py::arg("sampled") = t.sampled));
        return py::dict(py::arg("field") = r->field, py::arg("trace") = trace,
                        py::arg("initial_divergence") = r->initialDivergence, py::arg("converged") = r->converged,
                        py::arg("warnings") = r->warnings);
      },
      py::arg("initial"), py::arg("corpus"), py::arg("semantics") = "presence", py::arg("max_properties") = 8,
      py::arg("sampled") = false, py::arg("seed") = 0x5eed);

  m.def("oracle_check", [] {
    py::list rows;
    for (const auto& r : oracle::runChecks())
      rows.append(py::dict(py::arg("quantity") = r.quantity, py::arg("oracle") = r.oracle, py::arg("subject") = r.subject,
                           py::arg("abs_error") = r.absError, py::arg("tolerance") = r.tolerance, py::arg("pass") = r.pass));
    return rows;
  });

  auto fx = m.def_submodule("fixtures", "Desk-scale grammars and corpora");
  fx.attr("G1") = std::string(fixtures::kG1);
  fx.attr("G2") = std::string(fixtures::kG2);
  fx.attr("SKEWED_CORPUS") = std::string(fixtures::kSkewedCorpus);
  fx.attr("UNIFORM_CORPUS") = std::string(fixtures::kUniformCorpus);
  fx.attr("M1_WEIGHTS") = std::string(fixtures::kM1Weights);
}
