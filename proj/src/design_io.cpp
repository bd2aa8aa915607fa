#include "tdesign/design_io.hpp"

#include <fstream>

namespace tdesign::designs {

using nlohmann::json;

json matrix_to_json(const ComplexMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back({m(i, j).real(), m(i, j).imag()});
  return out;
}

ComplexMatrix matrix_from_json(const json& j, int d) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(d))
    throw DimensionError("design file: matrix must have d*d entries");
  ComplexMatrix m(d, d);
  std::size_t k = 0;
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c, ++k) {
      const auto& e = j[k];
      if (!e.is_array() || e.size() != 2) throw DomainError("design file: entries must be [re, im] pairs");
      m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  return m;
}

json ensemble_to_json(const UnitaryEnsemble& e, int t) {
  json out;
  out["d"] = e.d();
  out["t"] = t;
  out["kind"] = kind_name(e.kind());
  switch (e.kind()) {
    case UnitaryEnsemble::Kind::Explicit: {
      json els = json::array();
      for (const auto& u : e.elements()) els.push_back(matrix_to_json(u));
      out["elements"] = std::move(els);
      break;
    }
    case UnitaryEnsemble::Kind::Product: {
      json layers = json::array();
      for (const auto& layer : e.layers()) {
        if (const auto* m = std::get_if<ComplexMatrix>(&layer)) layers.push_back({{"fixed", matrix_to_json(*m)}});
        else layers.push_back({{"ensemble", ensemble_to_json(*std::get<EnsemblePtr>(layer), t)}});
      }
      out["layers"] = std::move(layers);
      break;
    }
    case UnitaryEnsemble::Kind::DirectSum:
      out["blocks"] = json::array({ensemble_to_json(*e.first(), t), ensemble_to_json(*e.second(), t)});
      break;
  }
  return out;
}

UnitaryEnsemble ensemble_from_json(const json& j) {
  if (!j.is_object() || !j.contains("d") || !j.contains("kind")) throw DomainError("design file: missing d or kind");
  const int d = j.at("d").get<int>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "explicit") {
    std::vector<ComplexMatrix> els;
    for (const auto& m : j.at("elements")) els.push_back(matrix_from_json(m, d));
    return UnitaryEnsemble::make_explicit(d, std::move(els));
  }
  if (kind == "product") {
    std::vector<Layer> layers;
    for (const auto& l : j.at("layers")) {
      if (l.contains("fixed")) layers.emplace_back(matrix_from_json(l.at("fixed"), d));
      else if (l.contains("ensemble"))
        layers.emplace_back(std::make_shared<const UnitaryEnsemble>(ensemble_from_json(l.at("ensemble"))));
      else throw DomainError("design file: layer needs 'fixed' or 'ensemble'");
    }
    return UnitaryEnsemble::make_product(d, std::move(layers));
  }
  if (kind == "direct_sum") {
    const auto& b = j.at("blocks");
    if (!b.is_array() || b.size() != 2) throw DomainError("design file: direct_sum needs two blocks");
    auto sum = UnitaryEnsemble::make_direct_sum(std::make_shared<const UnitaryEnsemble>(ensemble_from_json(b[0])),
                                                std::make_shared<const UnitaryEnsemble>(ensemble_from_json(b[1])));
    if (sum.d() != d) throw DimensionError("design file: block dimensions do not add up to d");
    return sum;
  }
  throw DomainError("design file: unknown kind '" + kind + "'");
}

void save_design(const std::string& path, const UnitaryEnsemble& e, int t) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << ensemble_to_json(e, t).dump() << '\n';
  if (!out) throw Error("failed writing " + path);
}

LoadedDesign load_design(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw DomainError("design file " + path + ": " + ex.what());
  }
  try {
    return {ensemble_from_json(j), j.value("t", 0)};
  } catch (const json::exception& ex) {
    throw DomainError("design file " + path + ": " + ex.what());
  }
}

}  // namespace tdesign::designs
