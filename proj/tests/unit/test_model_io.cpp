#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "savg/errors.hpp"
#include "savg/fixtures.hpp"
#include "savg/model_io.hpp"

#include <cmath>
#include <filesystem>

using namespace savg;

TEST_CASE("model JSON round-trips exactly") {
  auto f = fixtures::twoPropertyField(InitialMode::Scfg);
  f.addProperty({Pattern({"A", "A", "a"}, {{0, "1", 2}, {1, "1", 2}}), Semantics::Presence}, Weight(0.123456789012345678));
  normalizeAndCache(f, enumerateLanguage(f.grammar(), 10));
  const auto text = formatModel(f);
  const auto g = parseModel(text);
  CHECK(formatModel(g) == text);
  REQUIRE(g.size() == 3);
  CHECK((g.mode() == InitialMode::Scfg));
  CHECK(g.properties()[2] == f.properties()[2]);
  for (std::size_t i = 0; i < 3; ++i) CHECK(g.beta()[i].value == f.beta()[i].value);
  CHECK(*g.beta()[1].exact == Rational(3, 2));
  CHECK(g.theta()->weight(1).exact == f.theta()->weight(1).exact);
}

TEST_CASE("model files on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "savg_model_io";
  std::filesystem::create_directories(dir);
  const auto path = dir / "m.json";
  const auto f = fixtures::twoPropertyField();
  saveModel(f, path);
  const auto g = loadModel(path);
  CHECK(formatModel(g) == formatModel(f));
  CHECK_THROWS_AS(loadModel(dir / "missing.json"), InputError);
}

TEST_CASE("malformed models are input errors") {
  CHECK_THROWS_AS(parseModel("{"), InputError);
  CHECK_THROWS_AS(parseModel("[]"), InputError);
  CHECK_THROWS_AS(parseModel(R"({"initialMode": "uniform", "properties": [], "beta": []})"), InputError);
  const auto good = formatModel(fixtures::twoPropertyField());
  auto bad = good;
  bad.replace(bad.find("\"embeddings\""), 12, "\"sometimes\"");
  CHECK_THROWS_AS(parseModel(bad), InputError);
}
