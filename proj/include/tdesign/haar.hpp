#pragma once

// Exact Haar-moment oracle built from permutation operators and Gram
// pseudoinverses. No Weingarten tables are used anywhere.

#include "tdesign/numerics.hpp"

#include <cstdint>
#include <vector>

namespace tdesign::haar {

/// A permutation of {0, ..., t-1}; perm[k] is the image of k.
using Permutation = std::vector<int>;

std::vector<Permutation> all_permutations(int t);
int cycle_count(const Permutation& p);
Permutation inverse(const Permutation& p);
Permutation compose(const Permutation& a, const Permutation& b);  // (a*b)(k) = a(b(k))

/// Operator on (C^d)^{(x)t} moving tensor factor k to position sigma(k).
ComplexMatrix perm_operator(const Permutation& sigma, int d);

/// Gram matrix G_{st} = tr(P_s^dag P_t) = d^{c(s^-1 t)} over all of S_t.
RealMatrix permutation_gram(int d, int t);

inline constexpr std::int64_t kDefaultMomentCap = std::int64_t{1} << 20;

/// E_Haar[U^{(x)t} (x) conj(U)^{(x)t}] on (C^d)^{(x)2t}, first t factors
/// carrying U and the last t carrying conj(U). In this layout the operator is
/// the orthogonal projector onto span{vec(P_sigma)} with row-major vec.
/// The conjugation representation U (x) conj(U) (x) U (x) conj(U) used by the
/// Pauli-transfer side is the same object after the factor permutation
/// (0, t, 1, t+1, ...).
///
/// Stored in factored form M = B C B^dag with B the t! columns vec(P_sigma)
/// and C = G^+, so d^(2t) up to the cap stays tractable.
class MomentOperator {
 public:
  MomentOperator(int d, int t, ComplexMatrix basis, RealMatrix coeffs, RealMatrix gram, int rank);

  int d() const { return d_; }
  int t() const { return t_; }
  std::int64_t dim() const { return basis_.rows(); }
  int rank() const { return rank_; }

  /// tr(M); equals rank() for an exact projector.
  double trace() const;
  ComplexVector apply(const ComplexVector& v) const;
  /// Dense matrix; throws DimensionError above max_dim.
  ComplexMatrix matrix(std::int64_t max_dim = 4096) const;

  double hermiticity_residual() const;   // ||M - M^dag||_F
  double idempotence_residual() const;   // ||M^2 - M||_F

  const ComplexMatrix& basis() const { return basis_; }
  const RealMatrix& coeffs() const { return coeffs_; }

 private:
  double frobenius_of(const RealMatrix& x) const;  // ||B X B^dag||_F

  int d_;
  int t_;
  ComplexMatrix basis_;
  RealMatrix coeffs_;
  RealMatrix gram_;
  int rank_;
};

MomentOperator haar_moment_projector(int d, int t, std::int64_t cap = kDefaultMomentCap);

/// E_{U,V ~ Haar} |tr(U^dag V)|^{2t}; the rank of the permutation Gram.
std::int64_t haar_frame_potential(int d, int t);

/// The same quantity from the Robinson-Schensted count
/// sum_{lambda |- t, l(lambda) <= d} (f^lambda)^2. Used above the Gram range
/// and as an independent cross-check.
std::int64_t haar_frame_potential_rsk(int d, int t);

/// E_Haar[L_U^{(x)2} X L_U^{dag(x)2}] for X on the two-copy Pauli space of a
/// d-level system (X is (d^2)^2 x (d^2)^2, indices (n1, n2) row-major).
RealMatrix haar_twirl_ptm2(const RealMatrix& x, int d);

/// Monte Carlo estimate of E|tr U|^{2t} over Haar U in U(d).
Estimate haar_frame_potential_mc(int d, int t, std::int64_t samples, std::uint64_t seed);

}  // namespace tdesign::haar
