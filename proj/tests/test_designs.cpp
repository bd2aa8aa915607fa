#include "tdesign/designs.hpp"

#include "tdesign/haar.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tdesign;
using namespace tdesign::designs;

namespace {

double max_residual(const DesignReport& r) {
  double m = 0.0;
  for (const auto& x : r.residuals) m = std::max(m, x.residual);
  return m;
}

VerifyOptions weak() {
  VerifyOptions o;
  o.strong = false;
  return o;
}

}  // namespace

TEST_CASE("W1 is a strong design on U(1)") {
  for (int t = 1; t <= 6; ++t) {
    const auto e = w1(t);
    CHECK(e.elements().size() == static_cast<std::size_t>(t + 1));
    const auto r = verify_strong_design(e, t);
    CHECK(r.pass);
    CHECK(max_residual(r) < 1e-14);
  }
  // t + 1 phases cannot cancel the (t + 1)-th moment.
  CHECK_FALSE(verify_strong_design(w1(2), 3).pass);
}

TEST_CASE("qudit design for d = 2, t = 2") {
  const auto e = build_qudit_design(2, 2);
  REQUIRE(e.kind() == UnitaryEnsemble::Kind::Explicit);
  CHECK(e.elements().size() == 729);
  const auto r = verify_strong_design(e, 2);
  CHECK(r.pass);
  CHECK(max_residual(r) < 1e-10);
  REQUIRE(r.frame_potential);
  CHECK(std::abs(*r.frame_potential - 2.0) < 1e-9);
  for (std::size_t i = 0; i < e.elements().size(); i += 97) CHECK(is_unitary(e.elements()[i]));
}

TEST_CASE("large qudit designs stay as product samplers") {
  const auto e = build_qudit_design(3, 2);
  CHECK(e.kind() != UnitaryEnsemble::Kind::Explicit);
  CHECK(e.projected_size() > 1e9);
  std::mt19937_64 rng(3);
  CHECK(is_unitary(e.sample(rng)));
}

TEST_CASE("binary icosahedral group") {
  const auto e = icosahedral_group();
  CHECK(e.elements().size() == 60);
  const double haar[] = {1, 2, 5, 14, 42};
  for (int t = 1; t <= 5; ++t) {
    const auto r = verify_strong_design(e, t, weak());
    CAPTURE(t);
    CHECK(r.pass);
    REQUIRE(r.frame_potential);
    CHECK(std::abs(*r.frame_potential - haar[t - 1]) < 1e-9);
  }
  const auto r6 = verify_strong_design(e, 6, weak());
  CHECK_FALSE(r6.pass);
  CHECK(*r6.frame_potential > haar::haar_frame_potential_rsk(2, 6) + 0.5);
}

TEST_CASE("Clifford groups") {
  const auto c1 = clifford_group(1);
  CHECK(c1.elements().size() == 24);
  CHECK(verify_strong_design(c1, 2, weak()).pass);
  CHECK(verify_strong_design(c1, 3, weak()).pass);
  const auto r4 = verify_strong_design(c1, 4, weak());
  CHECK_FALSE(r4.pass);
  CHECK(std::abs(*r4.frame_potential - 15.0) < 1e-9);
  CHECK(clifford_group(2).elements().size() == 11520);
}

TEST_CASE("group closure modulo phase") {
  const auto paulis = group_closure({pauli_x(), pauli_z()}, 100);
  CHECK(paulis.size() == 4);
  CHECK_THROWS_AS(group_closure({pauli_x(), pauli_z()}, 3), Error);
  const ComplexMatrix u = cplx(0.0, 1.0) * pauli_y();
  const ComplexMatrix c = canonical_phase(u);
  CHECK(c(0, 1).imag() == doctest::Approx(0.0));
  CHECK(c(0, 1).real() > 0.0);
  CHECK(dedup_phase({pauli_x(), -pauli_x(), pauli_z()}).size() == 2);
}

TEST_CASE("direct sums and rotations are unitary") {
  const auto a = std::make_shared<const UnitaryEnsemble>(w1(2));
  const auto b = std::make_shared<const UnitaryEnsemble>(clifford_group(1));
  const auto s = UnitaryEnsemble::make_direct_sum(a, b);
  CHECK(s.d() == 3);
  CHECK(s.projected_size() == doctest::Approx(72.0));
  std::mt19937_64 rng(1);
  const ComplexMatrix x = s.sample(rng);
  CHECK(is_unitary(x));
  CHECK(std::abs(x(0, 1)) == 0.0);
  CHECK(is_unitary(rotation_unitary({0.3, 1.1}, 2, 5)));
  CHECK(is_unitary(uc_unitary()));
}

TEST_CASE("Monte Carlo verification of a product sampler") {
  // Two independent Clifford layers: still a 3-design, so the second moment passes.
  const auto c = std::make_shared<const UnitaryEnsemble>(clifford_group(1));
  const auto p = UnitaryEnsemble::make_product(2, {c, c});
  VerifyOptions o = weak();
  o.mc_samples = 20000;
  o.seed = 4;
  const auto r = verify_strong_design(p, 2, o);
  CHECK(r.pass);
  REQUIRE_FALSE(r.residuals.empty());
  CHECK(r.residuals.back().method == "monte-carlo");
}
