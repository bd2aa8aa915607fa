#pragma once

#include "tdesign/channels.hpp"

#include <json.hpp>

#include <string>

namespace tdesign::channels {

/// Noise configuration:
///   {"model": "noise1" | "noise2", "p": x, "q": x}
///   {"model": "lindblad", "t1": us, "t2": us, "delay": us, "chi": rad/us, "include_zz": bool}
///   {"model": "kraus", "ops": [matrix, ...]}          (matrix as in design files)
///   {"model": "identity", "qubits": n}
///   {"model": "x_rotation", "theta": x}
///   {"model": "depolarizing", "p": x, "qubits": n}
PTM noise_from_json(const nlohmann::json& j);
PTM load_noise(const std::string& path);

nlohmann::json metrics_to_json(const MetricSet& m);

/// Row-major CSV, 17 significant digits.
void write_ptm_csv(const std::string& path, const PTM& l);
PTM read_ptm_csv(const std::string& path);

}  // namespace tdesign::channels
