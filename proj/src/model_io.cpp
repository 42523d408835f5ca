#include "savg/model_io.hpp"

#include "savg/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace savg {

namespace {

using nlohmann::json;

// nlohmann prints the shortest round-trip form; the model format pins 17
// significant digits.
void emit(const json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + json(it.key()).dump() + ": ";
        emit(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          emit(j[i], out, indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        emit(j[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

json weightsJson(const std::vector<Weight>& w, bool exactOnly) {
  json a = json::array();
  for (const auto& x : w) {
    if (!exactOnly)
      a.push_back(x.value);
    else if (x.exact)
      a.push_back(x.exact->str());
    else
      a.push_back(nullptr);
  }
  return a;
}

std::vector<Weight> readWeights(const json& doc, const char* key, const char* exactKey) {
  std::vector<Weight> out;
  const auto& values = doc.at(key);
  const json* exact = doc.contains(exactKey) ? &doc.at(exactKey) : nullptr;
  if (exact && exact->size() != values.size()) throw InputError(std::string(exactKey) + " length differs from " + key);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (exact && !(*exact)[i].is_null()) {
      out.push_back(parseWeight((*exact)[i].get<std::string>()));
      continue;
    }
    out.emplace_back(values[i].get<double>());
  }
  return out;
}

std::string readFile(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw InputError(std::string("cannot open ") + what + " '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string formatModel(const FieldModel& m) {
  json doc = json::object();
  doc["grammar"] = m.grammarPath();
  doc["grammarText"] = formatGrammar(m.grammar());
  doc["initialMode"] = std::string(toString(m.mode()));
  if (m.theta()) {
    doc["theta"] = weightsJson(m.theta()->theta(), false);
    doc["thetaExact"] = weightsJson(m.theta()->theta(), true);
  }
  json props = json::array();
  for (const auto& p : m.properties()) {
    json edges = json::array();
    for (const auto& e : p.pattern.edges()) edges.push_back(json::array({e.from, e.label, e.to}));
    props.push_back({{"nodes", p.pattern.labels()}, {"edges", edges}, {"semantics", std::string(toString(p.semantics))}});
  }
  doc["properties"] = props;
  doc["beta"] = weightsJson(m.beta(), false);
  doc["betaExact"] = weightsJson(m.beta(), true);
  if (auto z = m.zCache()) {
    json cache = {{"z", z->z}, {"languageSize", z->languageSize}};
    if (z->exactZ) cache["exactZ"] = z->exactZ->str();
    doc["zCache"] = cache;
  }
  std::string out;
  emit(doc, out, 0);
  return out + "\n";
}

FieldModel parseModel(std::string_view text, const std::filesystem::path& baseDir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    const std::string path = doc.value("grammar", std::string());
    std::string grammarText;
    if (doc.contains("grammarText"))
      grammarText = doc.at("grammarText").get<std::string>();
    else if (!path.empty())
      grammarText = readFile(std::filesystem::path(path).is_absolute() ? std::filesystem::path(path) : baseDir / path, "grammar file");
    else
      throw InputError("model names no grammar");
    AvGrammar g = parseGrammar(grammarText);
    const InitialMode mode = parseInitialMode(doc.value("initialMode", std::string("uniform")));
    std::optional<CfModel> theta;
    if (doc.contains("theta")) theta.emplace(g.skeleton(), readWeights(doc, "theta", "thetaExact"));
    FieldModel m(std::move(g), mode, std::move(theta));
    m.setGrammarPath(path);
    const auto beta = doc.contains("beta") ? readWeights(doc, "beta", "betaExact") : std::vector<Weight>{};
    const auto& props = doc.value("properties", json::array());
    if (beta.size() != props.size()) throw InputError("model has " + std::to_string(props.size()) +
                                                      " properties but " + std::to_string(beta.size()) + " weights");
    for (std::size_t i = 0; i < props.size(); ++i) {
      const auto& p = props[i];
      std::vector<Pattern::Edge> edges;
      for (const auto& e : p.value("edges", json::array()))
        edges.push_back({e.at(0).get<int>(), e.at(1).get<std::string>(), e.at(2).get<int>()});
      Pattern pattern(p.at("nodes").get<std::vector<std::string>>(), std::move(edges));
      m.addProperty({std::move(pattern), parseSemantics(p.value("semantics", std::string("embeddings")))}, beta[i]);
    }
    if (doc.contains("zCache")) {
      const auto& c = doc.at("zCache");
      FieldModel::ZCache cache{c.at("z").get<double>(), std::nullopt, c.value("languageSize", std::size_t{0}), 0};
      if (c.contains("exactZ")) cache.exactZ = Rational(c.at("exactZ").get<std::string>());
      m.storeZ(std::move(cache));
    }
    return m;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  }
}

FieldModel loadModel(const std::filesystem::path& path) {
  return parseModel(readFile(path, "model file"), path.parent_path());
}

void saveModel(const FieldModel& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write model file '" + path.string() + "'");
  out << formatModel(m);
}

}  // namespace savg
