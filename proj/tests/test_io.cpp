#include "tdesign/channel_io.hpp"
#include "tdesign/design_io.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace tdesign;
using nlohmann::json;

namespace {

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "tdesign_test_io";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

bool bit_equal(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a.data()[i] != b.data()[i]) return false;
  return true;
}

void check_same_ensemble(const designs::UnitaryEnsemble& a, const designs::UnitaryEnsemble& b) {
  REQUIRE(a.kind() == b.kind());
  REQUIRE(a.d() == b.d());
  using K = designs::UnitaryEnsemble::Kind;
  if (a.kind() == K::Explicit) {
    REQUIRE(a.elements().size() == b.elements().size());
    for (std::size_t i = 0; i < a.elements().size(); ++i) CHECK(bit_equal(a.elements()[i], b.elements()[i]));
  } else if (a.kind() == K::Product) {
    REQUIRE(a.layers().size() == b.layers().size());
    for (std::size_t i = 0; i < a.layers().size(); ++i) {
      REQUIRE(a.layers()[i].index() == b.layers()[i].index());
      if (a.layers()[i].index() == 0)
        CHECK(bit_equal(std::get<0>(a.layers()[i]), std::get<0>(b.layers()[i])));
      else
        check_same_ensemble(*std::get<1>(a.layers()[i]), *std::get<1>(b.layers()[i]));
    }
  } else {
    check_same_ensemble(*a.first(), *b.first());
    check_same_ensemble(*a.second(), *b.second());
  }
}

}  // namespace

TEST_CASE("design files round-trip bit-exactly") {
  const auto path = temp_path("design.json");
  for (const auto& e : {designs::icosahedral_group(), designs::interleaved_4design(), designs::w1(3),
                        designs::build_qudit_design(3, 2)}) {
    designs::save_design(path, e, 2);
    const auto loaded = designs::load_design(path);
    CHECK(loaded.t == 2);
    check_same_ensemble(e, loaded.ensemble);
  }
  std::mt19937_64 rng(1);
  const auto a = std::make_shared<const designs::UnitaryEnsemble>(designs::w1(2));
  const auto sum = designs::direct_sum_ensemble(*a, designs::UnitaryEnsemble::make_explicit(1, {haar_unitary(1, rng)}));
  designs::save_design(path, sum, 1);
  check_same_ensemble(sum, designs::load_design(path).ensemble);
}

TEST_CASE("malformed design files are rejected") {
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  json good = designs::ensemble_to_json(designs::UnitaryEnsemble::make_explicit(2, {id}), 1);
  CHECK_NOTHROW(designs::ensemble_from_json(good));
  json bad = good;
  bad["kind"] = "sphere";
  CHECK_THROWS_AS(designs::ensemble_from_json(bad), Error);
  bad = good;
  bad["elements"][0].erase(0);
  CHECK_THROWS_AS(designs::ensemble_from_json(bad), Error);
  bad = good;
  bad["elements"][0][1] = json::array({0.5, 0.0});
  CHECK_THROWS_AS(designs::ensemble_from_json(bad), Error);  // not unitary
  CHECK_THROWS_AS(designs::load_design(temp_path("missing.json")), Error);
  std::ofstream(temp_path("garbage.json")) << "{ not json";
  CHECK_THROWS_AS(designs::load_design(temp_path("garbage.json")), Error);
}

TEST_CASE("noise configurations") {
  const auto n1 = channels::noise_from_json({{"model", "noise1"}, {"p", 0.02}, {"q", 0.98}});
  CHECK((n1.matrix - channels::noise1_model(0.02, 0.98).matrix).norm() == 0.0);
  const auto n2 = channels::noise_from_json({{"model", "noise2"}, {"p", 0.01}, {"q", 0.5}});
  CHECK(n2.q == 2);
  const auto lb = channels::noise_from_json(
      {{"model", "lindblad"}, {"t1", 2.0}, {"t2", 1.5}, {"delay", 0.2}, {"chi", 1.3}, {"include_zz", false}});
  CHECK((lb.matrix - channels::lindblad_ptm(2.0, 1.5, 1.3, 0.2, false).matrix).norm() == 0.0);
  CHECK(channels::noise_from_json({{"model", "identity"}, {"qubits", 2}}).matrix.isIdentity());
  const auto dep = channels::noise_from_json({{"model", "depolarizing"}, {"p", 0.1}, {"qubits", 1}});
  CHECK(std::abs(dep.matrix(1, 1) - (1.0 - 0.4 / 3.0)) < 1e-15);

  const double g = 0.3;
  ComplexMatrix k0 = ComplexMatrix::Zero(2, 2), k1 = ComplexMatrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - g);
  k1(0, 1) = std::sqrt(g);
  const json kraus = {{"model", "kraus"}, {"ops", {designs::matrix_to_json(k0), designs::matrix_to_json(k1)}}};
  const auto ad = channels::noise_from_json(kraus);
  CHECK((ad.matrix - channels::ptm_from_kraus({{k0, k1}}).matrix).norm() < 1e-15);

  CHECK_THROWS_AS(channels::noise_from_json({{"model", "noise1"}, {"p", 1.5}, {"q", 0.0}}), Error);
  CHECK_THROWS_AS(channels::noise_from_json({{"model", "noise7"}}), Error);
  CHECK_THROWS_AS(channels::noise_from_json({{"model", "noise1"}, {"p", 0.1}}), Error);
  const json not_tp = {{"model", "kraus"}, {"ops", {designs::matrix_to_json(k0)}}};
  CHECK_THROWS_AS(channels::noise_from_json(not_tp), Error);
}

TEST_CASE("PTM CSV round-trip") {
  const auto path = temp_path("ptm.csv");
  for (const auto& l : {channels::noise1_model(0.02, 0.98), channels::noise2_model(0.01, 0.95),
                        channels::lindblad_ptm(2.0, 1.5, 1.3, 0.2, true)}) {
    channels::write_ptm_csv(path, l);
    const auto r = channels::read_ptm_csv(path);
    CHECK(r.q == l.q);
    CHECK(r.matrix == l.matrix);
  }
  std::ofstream(temp_path("ragged.csv")) << "1,0,0\n0,1\n";
  CHECK_THROWS_AS(channels::read_ptm_csv(temp_path("ragged.csv")), Error);
  std::ofstream(temp_path("three.csv")) << "1,0,0\n0,1,0\n0,0,1\n";
  CHECK_THROWS_AS(channels::read_ptm_csv(temp_path("three.csv")), Error);
}

TEST_CASE("metrics serialise every field") {
  const auto j = channels::metrics_to_json(channels::metrics(channels::noise1_model(0.02, 0.98)));
  for (const char* key : {"f", "F", "u", "h", "H", "H_direct", "alpha_norm_sq"}) CHECK(j.contains(key));
}
