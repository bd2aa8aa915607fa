#include "tdesign/numerics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace tdesign {

namespace {

template <class M>
M kron_impl(const M& a, const M& b) {
  M out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

template <class M>
void require_square(const M& a, const char* what) {
  if (a.rows() != a.cols())
    throw DimensionError(std::string(what) + ": matrix must be square, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

}  // namespace

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) { return kron_impl(a, b); }
RealMatrix kron(const RealMatrix& a, const RealMatrix& b) { return kron_impl(a, b); }

ComplexMatrix kron_all(const std::vector<ComplexMatrix>& factors) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

ComplexMatrix matexp(const ComplexMatrix& a) {
  require_square(a, "matexp");
  if (a.rows() == 0) return a;
  return a.exp();
}

RealMatrix matexp(const RealMatrix& a) {
  require_square(a, "matexp");
  if (a.rows() == 0) return a;
  return a.exp();
}

HermitianEigen eig_hermitian(const ComplexMatrix& a, double herm_tol) {
  require_square(a, "eig_hermitian");
  if (!is_hermitian(a, herm_tol)) throw DomainError("eig_hermitian: input is not Hermitian");
  const ComplexMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
  if (es.info() != Eigen::Success) throw Error("eig_hermitian: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

SymmetricEigen eig_symmetric(const RealMatrix& a, double sym_tol) {
  require_square(a, "eig_symmetric");
  if ((a - a.transpose()).norm() >= sym_tol) throw DomainError("eig_symmetric: input is not symmetric");
  const RealMatrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym);
  if (es.info() != Eigen::Success) throw Error("eig_symmetric: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

PseudoInverse pinv_psd(const RealMatrix& g, double rank_tol) {
  require_square(g, "pinv_psd");
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if ((g - g.transpose()).norm() > 1e-12 * scale * g.rows())
    throw DomainError("pinv_psd: input is not symmetric");
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (g + g.transpose()));
  const RealVector& w = es.eigenvalues();
  const double sigma_max = w.cwiseAbs().maxCoeff();
  const double cut = rank_tol * sigma_max;
  RealVector inv = RealVector::Zero(w.size());
  int rank = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) > cut) {
      inv(i) = 1.0 / w(i);
      ++rank;
    }
  }
  const RealMatrix& v = es.eigenvectors();
  return {v * inv.asDiagonal() * v.transpose(), rank};
}

bool is_unitary(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).norm() < tol;
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() < tol;
}

bool all_finite(const ComplexMatrix& a) { return a.allFinite(); }

ComplexMatrix dagger(const ComplexMatrix& a) { return a.adjoint(); }

ComplexMatrix pauli_i() { return ComplexMatrix::Identity(2, 2); }

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

std::vector<ComplexMatrix> pauli_basis(int q) {
  if (q < 1) throw DimensionError("pauli_basis: need at least one qubit");
  const std::vector<ComplexMatrix> single{pauli_i(), pauli_x(), pauli_y(), pauli_z()};
  std::vector<ComplexMatrix> out{ComplexMatrix::Identity(1, 1)};
  for (int k = 0; k < q; ++k) {
    std::vector<ComplexMatrix> next;
    next.reserve(out.size() * 4);
    for (const auto& a : out)
      for (const auto& p : single) next.push_back(kron(a, p));
    out = std::move(next);
  }
  const double norm = std::sqrt(static_cast<double>(1 << q));
  for (auto& m : out) m /= norm;
  return out;
}

ComplexMatrix pauli_vec_matrix(int q) {
  const auto basis = pauli_basis(q);
  const int d2 = static_cast<int>(basis.size());
  ComplexMatrix p(d2, d2);
  for (int n = 0; n < d2; ++n) p.col(n) = vec(basis[static_cast<std::size_t>(n)]);
  return p;
}

ComplexVector vec(const ComplexMatrix& a) {
  ComplexVector v(a.rows() * a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k) v(i * a.cols() + k) = a(i, k);
  return v;
}

ComplexMatrix unvec(const ComplexVector& v, int d) {
  if (v.size() != static_cast<Eigen::Index>(d) * d) throw DimensionError("unvec: size mismatch");
  ComplexMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) a(i, k) = v(i * d + k);
  return a;
}

int qubits_for_dim(int d) {
  int q = 0;
  int x = 1;
  while (x < d) {
    x *= 2;
    ++q;
  }
  if (x != d || q == 0) throw DimensionError("dimension " + std::to_string(d) + " is not 2^q with q >= 1");
  return q;
}

}  // namespace tdesign
