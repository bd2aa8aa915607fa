#pragma once

#include "tdesign/designs.hpp"

#include <json.hpp>

#include <string>

namespace tdesign::designs {

/// Design file layout:
///   {"d": int, "t": int, "kind": "explicit", "elements": [matrix, ...]}
///   {"d": int, "t": int, "kind": "product", "layers": [{"fixed": matrix} | {"ensemble": design}, ...]}
///   {"d": int, "t": int, "kind": "direct_sum", "blocks": [design, design]}
/// A matrix is a flat row-major list of [re, im] pairs. Doubles are written
/// with 17 significant digits, so a write/read cycle is bit-exact.
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j, int d);

nlohmann::json ensemble_to_json(const UnitaryEnsemble& e, int t);
UnitaryEnsemble ensemble_from_json(const nlohmann::json& j);

void save_design(const std::string& path, const UnitaryEnsemble& e, int t);

struct LoadedDesign {
  UnitaryEnsemble ensemble;
  int t;
};

LoadedDesign load_design(const std::string& path);

}  // namespace tdesign::designs
