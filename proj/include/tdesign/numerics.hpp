#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tdesign {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Raised when a precondition on the numerical content of an input fails
/// (non-Hermitian, non-unitary, not trace preserving, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kRankTol = 1e-10;

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
RealMatrix kron(const RealMatrix& a, const RealMatrix& b);

/// Kronecker product of a list of factors, left to right.
ComplexMatrix kron_all(const std::vector<ComplexMatrix>& factors);

/// Matrix exponential (scaling and squaring with a degree-13 Pade approximant).
ComplexMatrix matexp(const ComplexMatrix& a);
RealMatrix matexp(const RealMatrix& a);

struct HermitianEigen {
  RealVector eigenvalues;       // ascending
  ComplexMatrix eigenvectors;   // columns, unitary
};

HermitianEigen eig_hermitian(const ComplexMatrix& a, double herm_tol = 1e-10);

struct SymmetricEigen {
  RealVector eigenvalues;
  RealMatrix eigenvectors;
};

SymmetricEigen eig_symmetric(const RealMatrix& a, double sym_tol = 1e-10);

struct PseudoInverse {
  RealMatrix pinv;
  int rank = 0;
};

/// Moore-Penrose pseudoinverse of a symmetric positive semidefinite matrix.
/// Singular values at or below rank_tol * sigma_max count as zero.
PseudoInverse pinv_psd(const RealMatrix& g, double rank_tol = kRankTol);

/// Monte Carlo value with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

bool is_unitary(const ComplexMatrix& u, double tol = kUnitaryTol);
bool is_hermitian(const ComplexMatrix& a, double tol = 1e-10);
bool all_finite(const ComplexMatrix& a);

ComplexMatrix dagger(const ComplexMatrix& a);

/// Haar-random unitary via QR of a complex Ginibre matrix with phase fix.
template <class Rng>
ComplexMatrix haar_unitary(int d, Rng& rng);

ComplexMatrix pauli_i();
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

/// Trace-orthonormal Pauli basis on q qubits: sigma_n = P_n / sqrt(2^q),
/// single-qubit order (I, X, Y, Z), multi-qubit index n = n_1 4^{q-1} + ... + n_q.
std::vector<ComplexMatrix> pauli_basis(int q);

/// Columns are vec(sigma_n) in row-major vec convention vec(A)_{i d + k} = A_ik.
ComplexMatrix pauli_vec_matrix(int q);

/// Row-major vectorisation and its inverse.
ComplexVector vec(const ComplexMatrix& a);
ComplexMatrix unvec(const ComplexVector& v, int d);

int qubits_for_dim(int d);  // throws unless d is a power of two

/// Fixed-order chunked reduction: [0, n) is split into chunks of
/// `chunk` items; each chunk is reduced sequentially and the per-chunk
/// partials are combined in index order. The result depends only on
/// (n, chunk), never on thread count.
inline constexpr std::size_t kReductionChunk = 4096;

template <class T, class Body>
T chunked_sum(std::size_t n, T zero, Body&& body, std::size_t chunk = kReductionChunk);

}  // namespace tdesign

#include "tdesign/numerics_inl.hpp"
