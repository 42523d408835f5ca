#pragma once

#include "savg/field.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace savg {

/// Model file (JSON):
///   {"grammar": path, "grammarText": "...", "initialMode": "uniform"|"scfg",
///    "theta": [..], "thetaExact": ["2/3", null, ..],
///    "properties": [{"nodes": [..], "edges": [[from, label, to]], "semantics": ".."}],
///    "beta": [..], "betaExact": [..], "zCache": {"z": .., "languageSize": ..}}
/// Reals are written with 17 significant digits. When loading, the embedded
/// grammar text wins over the path; a relative path is taken from
/// `baseDir`.
std::string formatModel(const FieldModel& m);
FieldModel parseModel(std::string_view text, const std::filesystem::path& baseDir = {});

FieldModel loadModel(const std::filesystem::path& path);
void saveModel(const FieldModel& m, const std::filesystem::path& path);

}  // namespace savg
