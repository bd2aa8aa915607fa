#include "tdesign/zonal.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace tdesign;
using namespace tdesign::zonal;

namespace {

// Legendre polynomial by Bonnet's recurrence.
double legendre(int k, double y) {
  double p0 = 1.0, p1 = y;
  if (k == 0) return p0;
  for (int n = 1; n < k; ++n) {
    const double p2 = ((2.0 * n + 1.0) * y * p1 - n * p0) / (n + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// Composite Simpson integral of f against the Haar density of |U_00|^2 on U(d),
// (d-1)(1-x)^(d-2) on [0, 1].
template <class F>
double haar_average(F&& f, int d) {
  const int n = 4000;
  const double h = 1.0 / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * f(x) * (d - 1) * std::pow(1.0 - x, d - 2);
  }
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("d = 2 zonal polynomials are shifted Legendre polynomials") {
  for (int k = 0; k <= 6; ++k) {
    const ZonalPolynomial z(k, 2);
    for (double x : {0.0, 0.13, 0.5, 0.77, 1.0}) CHECK(std::abs(z(x) - legendre(k, 2.0 * x - 1.0)) < 1e-12);
  }
}

TEST_CASE("normalisation, monomial form and orthogonality") {
  for (int d : {2, 3, 4, 8})
    for (int k = 1; k <= 5; ++k) {
      const ZonalPolynomial z(k, d);
      CAPTURE(d);
      CAPTURE(k);
      CHECK(std::abs(z(1.0) - 1.0) < 1e-12);
      double mono = 0.0;
      for (Eigen::Index j = 0; j < z.coefficients().size(); ++j) mono += z.coefficients()(j) * std::pow(0.37, j);
      CHECK(std::abs(mono - z(0.37)) < 1e-10);
      CHECK(std::abs(haar_average([&](double x) { return z(x); }, d)) < 1e-9);
      const ZonalPolynomial lower(k - 1, d);
      CHECK(std::abs(haar_average([&](double x) { return z(x) * lower(x); }, d)) < 1e-9);
    }
}

TEST_CASE("roots") {
  CHECK(std::abs(ZonalPolynomial(1, 2).roots().at(0) - 0.5) < 1e-12);
  const auto r2 = ZonalPolynomial(2, 2).roots();
  REQUIRE(r2.size() == 2);
  CHECK(std::abs(r2[0] - (3.0 - std::sqrt(3.0)) / 6.0) < 1e-12);
  CHECK(std::abs(r2[1] - (3.0 + std::sqrt(3.0)) / 6.0) < 1e-12);
  CHECK(std::abs(ZonalPolynomial(1, 3).roots().at(0) - 1.0 / 3.0) < 1e-12);
  for (int k = 1; k <= 8; ++k) {
    const ZonalPolynomial z(k, 4);
    const auto r = z.roots();
    REQUIRE(r.size() == static_cast<std::size_t>(k));
    for (double x : r) {
      CHECK(x > 0.0);
      CHECK(x < 1.0);
      CHECK(std::abs(z(x)) < 1e-10);
    }
  }
}

TEST_CASE("angles come from the largest root") {
  const auto sol = find_angles({{2}, 1, 2});
  REQUIRE(sol.thetas.size() == 1);
  CHECK(std::abs(std::cos(sol.thetas[0]) - std::sqrt((3.0 + std::sqrt(3.0)) / 6.0)) < 1e-12);
  CHECK_THROWS_AS(find_angles({{1, 1}, 2, 4}), DomainError);
}

TEST_CASE("label enumeration") {
  CHECK(enumerate_sph_labels(1, 2, 3).size() == 3);
  const auto l = enumerate_sph_labels(2, 4, 2);
  REQUIRE(l.size() == 3);
  CHECK(l[0].positive_part == std::vector<int>{1});
  CHECK(l[1].positive_part == std::vector<int>{2});
  CHECK(l[2].positive_part == std::vector<int>{1, 1});
  CHECK(partition_count(5) == 7);
  CHECK(partition_count(10) == 42);
}

TEST_CASE("Monte Carlo zonal function agrees with the Jacobi form") {
  std::mt19937_64 rng(5);
  for (int d : {2, 3}) {
    const ComplexMatrix u = haar_unitary(d, rng);
    const double x = std::norm(u(0, 0));
    for (int k = 1; k <= 2; ++k) {
      const auto e = zonal_value_mc({{k}, 1, d}, u, 200000, 17);
      CAPTURE(d);
      CAPTURE(k);
      CHECK(std::abs(e.value - ZonalPolynomial(k, d)(x)) < 5.0 * e.std_error + 1e-3);
    }
  }
}
