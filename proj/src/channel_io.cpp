#include "tdesign/channel_io.hpp"

#include "tdesign/design_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace tdesign::channels {

using nlohmann::json;

namespace {

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw DomainError(std::string("noise config: missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

}  // namespace

PTM noise_from_json(const json& j) {
  if (!j.is_object() || !j.contains("model")) throw DomainError("noise config: missing 'model'");
  const auto model = j.at("model").get<std::string>();
  if (model == "noise1") return noise1_model(number(j, "p"), number(j, "q"));
  if (model == "noise2") return noise2_model(number(j, "p"), number(j, "q"));
  if (model == "lindblad") {
    const double chi = j.contains("chi") ? number(j, "chi") : 2.0 * std::numbers::pi * -0.760;
    return lindblad_ptm(number(j, "t1"), number(j, "t2"), chi, number(j, "delay"), j.value("include_zz", false));
  }
  if (model == "kraus") {
    if (!j.contains("ops") || !j.at("ops").is_array() || j.at("ops").empty())
      throw DomainError("noise config: kraus model needs a nonempty 'ops' list");
    const auto n = j.at("ops")[0].size();
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    KrausChannel k;
    for (const auto& m : j.at("ops")) k.kraus_ops.push_back(designs::matrix_from_json(m, d));
    return ptm_from_kraus(k);
  }
  if (model == "identity") return identity_ptm(j.value("qubits", 1));
  if (model == "x_rotation") return x_rotation_ptm(number(j, "theta"));
  if (model == "depolarizing") return depolarizing_ptm(number(j, "p"), j.value("qubits", 1));
  throw DomainError("noise config: unknown model '" + model + "'");
}

PTM load_noise(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    json j;
    in >> j;
    return noise_from_json(j);
  } catch (const json::exception& ex) {
    throw DomainError("noise config " + path + ": " + ex.what());
  }
}

json metrics_to_json(const MetricSet& m) {
  return {{"f", m.f}, {"F", m.F}, {"u", m.u}, {"h", m.h}, {"H", m.H}, {"H_direct", m.H_direct},
          {"alpha_norm_sq", m.alpha_norm_sq}};
}

void write_ptm_csv(const std::string& path, const PTM& l) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < l.matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < l.matrix.cols(); ++j) out << (j ? "," : "") << l.matrix(i, j);
    out << '\n';
  }
}

PTM read_ptm_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<int>(rows.size());
  int q = 0;
  while ((1 << (2 * q)) < n) ++q;
  if (q == 0 || (1 << (2 * q)) != n) throw DimensionError("PTM csv: row count must be 4^q");
  PTM l{q, RealMatrix(n, n)};
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n) throw DimensionError("PTM csv: ragged rows");
    for (int j = 0; j < n; ++j) l.matrix(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return l;
}

}  // namespace tdesign::channels
