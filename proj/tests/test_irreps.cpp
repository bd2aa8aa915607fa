#include "tdesign/irreps.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

using namespace tdesign;
using namespace tdesign::irreps;
using channels::PTM;

namespace {

const IrrepProjectorSet& set1() {
  static const auto s = projectors_1q();
  return s;
}

const IrrepProjectorSet& set2() {
  static const auto s = projectors_2q();
  return s;
}

RealVector e2(int n, int a, int b) {
  RealVector v = RealVector::Zero(n * n);
  v(a * n + b) = 1.0;
  return v;
}

void check_projector_algebra(const IrrepProjectorSet& s) {
  for (const auto& a : s.projectors) {
    CHECK((a.matrix * a.matrix - a.matrix).norm() < 1e-10);
    CHECK((a.matrix - a.matrix.transpose()).norm() < 1e-10);
    CHECK(std::abs(a.matrix.trace() - a.dim) < 1e-10);
    for (const auto& b : s.projectors)
      if (a.label != b.label) CHECK((a.matrix * b.matrix).norm() < 1e-10);
  }
}

void check_invariance(const IrrepProjectorSet& s, std::uint64_t seed, int draws) {
  std::mt19937_64 rng(seed);
  const int d = 1 << s.q;
  for (int i = 0; i < draws; ++i) {
    const RealMatrix l = channels::unitary_ptm(haar_unitary(d, rng)).matrix;
    const RealMatrix ll = kron(l, l);
    for (const auto& p : s.projectors) CHECK((ll * p.matrix * ll.transpose() - p.matrix).norm() < 1e-10);
  }
}

// Closed forms for the two noise families.
struct Closed {
  double u, c1, c2, c3;
};

Closed noise2_closed(double p, double q) {
  return {1.0 - 32.0 / 15.0 * p * (1 - p) * (1 - q * q), 1.0 - 4.0 / 105.0 * p * (56 - 31 * p + 14 * (1 - p) * q * q),
          1.0 - 4.0 / 15.0 * p * (8 - 5 * p - 2 * (1 - p) * q * q), 1.0 - 16.0 / 15.0 * p * (2 - p - (1 - p) * q * q)};
}

}  // namespace

TEST_CASE("one-qubit projectors") {
  const auto& s = set1();
  REQUIRE(s.projectors.size() == 2);
  CHECK(s.at(IrrepLabel::Zero).dim == 1);
  CHECK(s.at(IrrepLabel::I).dim == 5);
  check_projector_algebra(s);
  check_invariance(s, 1, 20);
  // Z = sqrt 2 sigma_3.
  const RealVector zz = 2.0 * e2(4, 3, 3);
  CHECK(std::abs(zz.dot(s.at(IrrepLabel::Zero).matrix * zz) - 4.0 / 3.0) < 1e-12);
  // Together they fill the traceless symmetric sector.
  const RealMatrix b = traceless_symmetric_basis(1);
  CHECK((s.sum() - b * b.transpose()).norm() < 1e-12);
}

TEST_CASE("two-qubit projectors") {
  const auto& s = set2();
  REQUIRE(s.projectors.size() == 4);
  CHECK(s.at(IrrepLabel::Zero).dim == 1);
  CHECK(s.at(IrrepLabel::I).dim == 84);
  CHECK(s.at(IrrepLabel::II).dim == 20);
  CHECK(s.at(IrrepLabel::III).dim == 15);
  check_projector_algebra(s);
  check_invariance(s, 2, 20);

  SUBCASE("the trivial component is spanned by sum_n sigma_n (x) sigma_n") {
    RealVector v = RealVector::Zero(256);
    for (int n = 1; n < 16; ++n) v += e2(16, n, n);
    v.normalize();
    CHECK((s.at(IrrepLabel::Zero).matrix - v * v.transpose()).norm() < 1e-10);
  }
  SUBCASE("sum identity through the swap operator") {
    const int n = 16;
    RealMatrix swap = RealMatrix::Zero(n * n, n * n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) swap(b * n + a, a * n + b) = 1.0;
    RealMatrix rhs = 0.5 * (RealMatrix::Identity(n * n, n * n) + swap) - s.at(IrrepLabel::Zero).matrix;
    const RealVector e00 = e2(n, 0, 0);
    rhs -= e00 * e00.transpose();
    for (int k = 1; k < n; ++k) {
      const RealVector s0n = (e2(n, 0, k) + e2(n, k, 0)) / std::sqrt(2.0);
      rhs -= s0n * s0n.transpose();
    }
    const RealMatrix lhs = s.at(IrrepLabel::I).matrix + s.at(IrrepLabel::II).matrix + s.at(IrrepLabel::III).matrix;
    CHECK((lhs - rhs).norm() < 1e-10);
  }
  SUBCASE("independent draws give the same projectors") {
    const auto other = projectors_2q(987654321);
    for (const auto& p : s.projectors) CHECK((other.at(p.label).matrix - p.matrix).norm() < 1e-9);
  }
}

TEST_CASE("ideal coefficient table") {
  const PTM id = channels::identity_ptm(2);
  auto check = [&](const ComplexMatrix& delta, const ComplexMatrix& o, std::array<double, 4> expected) {
    const auto a = coefficients(delta, o, id, set2());
    const IrrepLabel labels[] = {IrrepLabel::Zero, IrrepLabel::I, IrrepLabel::II, IrrepLabel::III};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(a.at(labels[i]) - expected[static_cast<std::size_t>(i)]) < 1e-12);
  };
  const ComplexMatrix zz = kron(pauli_z(), pauli_z());
  ComplexMatrix p00 = testing::basis_projector(4, 0);
  ComplexMatrix rm = p00 - testing::basis_projector(4, 3);
  check(zz, p00, {1.0 / 5.0, 4.0 / 5.0, 0.0, 0.0});
  check(zz, zz, {16.0 / 15.0, 48.0 / 5.0, 16.0 / 3.0, 0.0});
  check(rm, rm, {4.0 / 15.0, 41.0 / 15.0, 1.0 / 3.0, 2.0 / 3.0});

  const auto a1 = coefficients(pauli_z(), testing::basis_projector(2, 0), channels::identity_ptm(1), set1());
  CHECK(std::abs(a1.at(IrrepLabel::Zero) - 1.0 / 3.0) < 1e-12);
  CHECK_THROWS_AS(coefficients(p00, p00, id, set2()), DomainError);
}

TEST_CASE("adjoint and forward measured maps differ only for non-self-adjoint noise") {
  const ComplexMatrix z = pauli_z(), p0 = testing::basis_projector(2, 0);
  const PTM pauli = channels::noise1_model(0.05, 0.0);
  const auto a = coefficients(z, p0, pauli, set1(), MeasuredMap::Adjoint);
  const auto b = coefficients(z, p0, pauli, set1(), MeasuredMap::Forward);
  CHECK((a.values - b.values).norm() < 1e-14);
  const PTM amp = channels::lindblad_ptm(20.0, 15.0, 0.0, 2.0, false);
  const auto c = coefficients(z, p0, amp, set1(), MeasuredMap::Adjoint);
  const auto e = coefficients(z, p0, amp, set1(), MeasuredMap::Forward);
  CHECK((c.values - e.values).norm() > 1e-4);
}

TEST_CASE("decay rates against closed forms") {
  for (double p : {0.01, 0.02, 0.1, 0.2, 0.4})
    for (double q : {0.0, 0.5, 0.95, 1.0}) {
      CAPTURE(p);
      CAPTURE(q);
      const auto c2 = decay_rates(channels::noise2_model(p, q), set2());
      const auto ex = noise2_closed(p, q);
      CHECK(std::abs(c2.at(IrrepLabel::Zero) - ex.u) < 1e-12);
      CHECK(std::abs(c2.at(IrrepLabel::I) - ex.c1) < 1e-12);
      CHECK(std::abs(c2.at(IrrepLabel::II) - ex.c2) < 1e-12);
      CHECK(std::abs(c2.at(IrrepLabel::III) - ex.c3) < 1e-12);

      const auto c1 = decay_rates(channels::noise1_model(p, q), set1());
      const double f = 1.0 - 4.0 / 3.0 * p, u = 1.0 - 8.0 / 3.0 * p * (1 - p) * (1 - q * q),
                   h = 1.0 - 8.0 / 3.0 * p * (1 - p) * (1 + q * q);
      CHECK(std::abs(c1.at(IrrepLabel::Zero) - u) < 1e-12);
      CHECK(std::abs(c1.at(IrrepLabel::I) - (0.9 * f * f - 0.2 * u + 0.3 * h)) < 1e-12);
    }
  // Rates can be negative: a quarter X rotation has C_I = -1/5 (spin-2 character at pi/2).
  const auto quarter = decay_rates(channels::x_rotation_ptm(std::numbers::pi / 2.0), set1());
  CHECK(std::abs(quarter.at(IrrepLabel::I) + 0.2) < 1e-12);
  const auto ones = decay_rates(channels::identity_ptm(2), set2());
  CHECK((ones.values - RealVector::Ones(4)).norm() < 1e-12);
}

TEST_CASE("rate identities for random channels") {
  for (int seed = 0; seed < 100; ++seed) {
    CAPTURE(seed);
    for (int q : {1, 2}) {
      const int d = 1 << q;
      const PTM l = channels::ptm_from_kraus(channels::random_cptp(d, 1 + seed % (q == 1 ? 4 : 5), static_cast<std::uint64_t>(seed)));
      const auto m = channels::metrics(l);
      const auto& s = q == 1 ? set1() : set2();
      const auto c = decay_rates(l, s);
      CHECK(std::abs(c.at(IrrepLabel::Zero) - m.u) < 1e-12);
      double sum = 0.0;
      for (const auto& p : s.projectors)
        if (p.label != IrrepLabel::Zero) sum += p.dim * c.at(p.label);
      const double n = d * d - 1.0;
      CHECK(std::abs(sum - (n * n / 2.0 * m.f * m.f - m.u + n / 2.0 * m.h)) < 1e-12);
      if (q == 1) CHECK(std::abs(c.at(IrrepLabel::I) - (0.9 * m.f * m.f - 0.2 * m.u + 0.3 * m.h)) < 1e-12);
      for (Eigen::Index i = 0; i < c.values.size(); ++i) CHECK(std::abs(c.values(i)) <= 1.0 + 1e-12);
    }
  }
}
