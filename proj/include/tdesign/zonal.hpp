#pragma once

#include "tdesign/numerics.hpp"

#include <cstdint>
#include <vector>

namespace tdesign::zonal {

/// Spherical label lambda = (mu, 0, ..., 0, -reverse(mu)) of U(d) relative to
/// K = U(d1) x U(d - d1). Only the positive part mu is stored.
struct SphericalLabel {
  std::vector<int> positive_part;
  int d1 = 1;
  int d = 2;

  int size() const;  // sum of parts
  bool operator==(const SphericalLabel&) const = default;
};

/// Nonzero labels with length <= d1 and sum of parts <= t, ordered by sum
/// and then descending lexicographically.
std::vector<SphericalLabel> enumerate_sph_labels(int d1, int d, int t);

/// Rank-one zonal polynomial in x = cos^2(theta): the Jacobi polynomial
/// P_k^{(d-2, 0)}(2x - 1), normalised so that Z(1) = 1.
class ZonalPolynomial {
 public:
  ZonalPolynomial(int k, int d);

  int k() const { return k_; }
  int d() const { return d_; }
  /// Monomial coefficients c_j of x^j, j = 0..k.
  const RealVector& coefficients() const { return coeffs_; }

  /// Evaluated by the three-term recurrence, not from the monomial form.
  double operator()(double x) const;
  /// All k roots in (0, 1), ascending.
  std::vector<double> roots() const;

 private:
  int k_;
  int d_;
  RealVector coeffs_;
};

ZonalPolynomial zonal_poly_rank1(int k, int d);

struct AngleSolution {
  SphericalLabel label;
  std::vector<double> thetas;  // in [0, pi/2]
};

/// theta = arccos(sqrt(x*)) with x* the largest root. Throws DomainError
/// for d1 > 1.
AngleSolution find_angles(const SphericalLabel& label);

/// Monte Carlo zonal function of a rank-one label evaluated at u.
///
/// A bi-K-invariant function on U(d) depends on u only through x = |u_00|^2.
/// The zonal functions are the Haar-orthogonal family of such functions with
/// Z_k of degree k in x and Z_k(identity) = 1. Here the Haar moments E[x^j]
/// are estimated by sampling, the family is orthogonalised against them, and
/// the result is evaluated at x(u). The standard error comes from a
/// delete-one-batch jackknife over 20 batches.
Estimate zonal_value_mc(const SphericalLabel& label, const ComplexMatrix& u, std::int64_t samples,
                        std::uint64_t seed);

/// exp(pi * sqrt(2t/3) * (N - 1)).
double gate_count_estimate(int n_qubits, int t);

/// Number of integer partitions of n, by Euler's pentagonal recurrence.
std::int64_t partition_count(int n);

}  // namespace tdesign::zonal
