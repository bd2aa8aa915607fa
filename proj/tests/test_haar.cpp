#include "tdesign/haar.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tdesign;
using namespace tdesign::haar;

namespace {

// PTM of U in the normalized Pauli basis, computed entrywise.
RealMatrix ptm_of(const ComplexMatrix& u) {
  const int q = qubits_for_dim(static_cast<int>(u.rows()));
  const auto b = pauli_basis(q);
  RealMatrix l(b.size(), b.size());
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (b[i] * u * b[j] * u.adjoint()).trace().real();
  return l;
}

}  // namespace

TEST_CASE("permutation algebra") {
  const auto perms = all_permutations(3);
  CHECK(perms.size() == 6);
  for (const auto& p : perms) {
    CHECK(compose(p, inverse(p)) == Permutation{0, 1, 2});
    CHECK(cycle_count(p) == cycle_count(inverse(p)));
  }
  CHECK(cycle_count({0, 1, 2, 3}) == 4);
  CHECK(cycle_count({1, 2, 3, 0}) == 1);
}

TEST_CASE("permutation Gram entries are d^cycles") {
  const RealMatrix g = permutation_gram(3, 3);
  const auto perms = all_permutations(3);
  for (std::size_t a = 0; a < perms.size(); ++a)
    for (std::size_t b = 0; b < perms.size(); ++b) {
      const ComplexMatrix pa = perm_operator(perms[a], 3), pb = perm_operator(perms[b], 3);
      CHECK(std::abs(g(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) - (pa.adjoint() * pb).trace().real()) <
            1e-9);
    }
}

TEST_CASE("frame potential: Gram rank equals the Robinson-Schensted count") {
  for (int d = 2; d <= 4; ++d)
    for (int t = 1; t <= 4; ++t) {
      const auto m = haar_moment_projector(d, t);
      CAPTURE(d);
      CAPTURE(t);
      CHECK(m.rank() == haar_frame_potential_rsk(d, t));
      CHECK(haar_frame_potential(d, t) == haar_frame_potential_rsk(d, t));
      CHECK(std::abs(m.trace() - m.rank()) < 1e-9);
      CHECK(m.hermiticity_residual() < 1e-10);
      CHECK(m.idempotence_residual() < 1e-10);
    }
  CHECK(haar_frame_potential(2, 4) == 14);
  CHECK(haar_frame_potential(4, 4) == 24);
  // t! once d >= t.
  CHECK(haar_frame_potential_rsk(6, 5) == 120);
  // Catalan numbers for d = 2.
  CHECK(haar_frame_potential_rsk(2, 6) == 132);
}

TEST_CASE("t = 1 moment is the normalized maximally entangled projector") {
  const auto m = haar_moment_projector(3, 1);
  const ComplexVector omega = vec(ComplexMatrix::Identity(3, 3));
  CHECK((m.matrix() - omega * omega.adjoint() / 3.0).norm() < 1e-12);
}

TEST_CASE("moment projector agrees with a Haar sample average") {
  std::mt19937_64 rng(7);
  const int n = 4000;
  const auto m = haar_moment_projector(2, 2).matrix();
  ComplexMatrix avg = ComplexMatrix::Zero(m.rows(), m.cols());
  for (int i = 0; i < n; ++i) {
    const ComplexMatrix u = haar_unitary(2, rng);
    const ComplexMatrix uu = kron(u, u);
    avg += kron(uu, ComplexMatrix(uu.conjugate()));
  }
  avg /= static_cast<double>(n);
  // Entries are bounded by 1, so the sample error per entry is at most 1/sqrt(n).
  CHECK((avg - m).cwiseAbs().maxCoeff() < 6.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("Monte Carlo frame potential brackets the exact value") {
  const auto e = haar_frame_potential_mc(2, 2, 200000, 3);
  CHECK(std::abs(e.value - 2.0) < 5.0 * e.std_error);
}

TEST_CASE("two-copy PTM twirl is the invariant projection") {
  std::mt19937_64 rng(11);
  const int n = 16;
  RealMatrix x(n * n, n * n);
  std::normal_distribution<double> g;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = g(rng);
  const RealMatrix tw = haar_twirl_ptm2(x, 4);

  SUBCASE("fixed by every conjugation") {
    for (int k = 0; k < 3; ++k) {
      const RealMatrix l = ptm_of(haar_unitary(4, rng));
      const RealMatrix ll = kron(l, l);
      CHECK((ll * tw * ll.transpose() - tw).norm() < 1e-9 * tw.norm());
    }
  }
  SUBCASE("idempotent, trace preserving, symmetry preserving") {
    CHECK((haar_twirl_ptm2(tw, 4) - tw).norm() < 1e-9 * tw.norm());
    CHECK(std::abs(tw.trace() - x.trace()) < 1e-9 * x.norm());
    const RealMatrix sym = 0.5 * (x + x.transpose());
    const RealMatrix ts = haar_twirl_ptm2(sym, 4);
    CHECK((ts - ts.transpose()).norm() < 1e-9 * ts.norm());
  }
  SUBCASE("the identity is invariant") {
    const RealMatrix id = RealMatrix::Identity(n * n, n * n);
    CHECK((haar_twirl_ptm2(id, 4) - id).norm() < 1e-9);
  }
}

TEST_CASE("one-qubit twirl matches a sample average") {
  std::mt19937_64 rng(13);
  RealMatrix x = RealMatrix::Zero(16, 16);
  std::normal_distribution<double> g;
  for (Eigen::Index i = 0; i < 16; ++i)
    for (Eigen::Index j = 0; j < 16; ++j) x(i, j) = g(rng);
  const RealMatrix tw = haar_twirl_ptm2(x, 2);
  const int n = 20000;
  RealMatrix avg = RealMatrix::Zero(16, 16);
  for (int i = 0; i < n; ++i) {
    const RealMatrix l = ptm_of(haar_unitary(2, rng));
    const RealMatrix ll = kron(l, l);
    avg += ll * x * ll.transpose();
  }
  avg /= static_cast<double>(n);
  CHECK((avg - tw).cwiseAbs().maxCoeff() < 6.0 * x.norm() / std::sqrt(static_cast<double>(n)));
}
