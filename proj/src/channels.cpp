#include "tdesign/channels.hpp"

#include <cmath>
#include <random>

namespace tdesign::channels {

RealVector PTM::alpha() const { return matrix.col(0).tail(dim() - 1); }

RealMatrix PTM::unital_block() const { return matrix.bottomRightCorner(dim() - 1, dim() - 1); }

double PTM::tp_residual() const {
  RealVector e0 = RealVector::Zero(dim());
  e0(0) = 1.0;
  return (matrix.row(0).transpose() - e0).norm();
}

int KrausChannel::d() const {
  if (kraus_ops.empty()) throw DomainError("Kraus channel has no operators");
  return static_cast<int>(kraus_ops.front().rows());
}

double KrausChannel::completeness_residual() const {
  const int n = d();
  ComplexMatrix s = ComplexMatrix::Zero(n, n);
  for (const auto& k : kraus_ops) {
    if (k.rows() != n || k.cols() != n) throw DimensionError("Kraus operators must all be d x d");
    s += k.adjoint() * k;
  }
  return (s - ComplexMatrix::Identity(n, n)).norm();
}

ComplexVector pauli_coords(const ComplexMatrix& a) {
  const int q = qubits_for_dim(static_cast<int>(a.rows()));
  if (a.rows() != a.cols()) throw DimensionError("pauli_coords: square matrix required");
  // tr(sigma_n A) = sum_ik conj(sigma_n)_ik A_ik for Hermitian sigma_n.
  const ComplexMatrix p = pauli_vec_matrix(q);
  return p.adjoint() * vec(a);
}

ComplexMatrix from_pauli_coords(const ComplexVector& c, int q) {
  const ComplexMatrix p = pauli_vec_matrix(q);
  if (c.size() != p.cols()) throw DimensionError("from_pauli_coords: size mismatch");
  return unvec(p * c, 1 << q);
}

PTM ptm_from_kraus(const KrausChannel& k) {
  const double res = k.completeness_residual();
  if (res > 1e-10) throw DomainError("ptm_from_kraus: Kraus operators are not trace preserving (residual " +
                                     std::to_string(res) + ")");
  const int d = k.d();
  const int q = qubits_for_dim(d);
  const auto basis = pauli_basis(q);
  const int n = d * d;
  PTM l{q, RealMatrix::Zero(n, n)};
  for (int m = 0; m < n; ++m) {
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (const auto& op : k.kraus_ops) out += op * basis[static_cast<std::size_t>(m)] * op.adjoint();
    for (int r = 0; r < n; ++r) l.matrix(r, m) = (basis[static_cast<std::size_t>(r)] * out).trace().real();
  }
  return l;
}

PTM unitary_ptm(const ComplexMatrix& u) {
  if (!is_unitary(u)) throw DomainError("unitary_ptm: matrix is not unitary");
  return ptm_from_kraus(KrausChannel{std::vector<ComplexMatrix>{u}});
}

PTM identity_ptm(int q) { return {q, RealMatrix::Identity(1 << (2 * q), 1 << (2 * q))}; }

PTM adjoint_ptm(const PTM& l) { return {l.q, l.matrix.transpose()}; }

PTM compose(const PTM& outer, const PTM& inner) {
  if (outer.q != inner.q) throw DimensionError("compose: qubit counts differ");
  return {outer.q, outer.matrix * inner.matrix};
}

PTM tensor(const PTM& a, const PTM& b) { return {a.q + b.q, kron(a.matrix, b.matrix)}; }

ComplexMatrix apply_ptm(const PTM& l, const ComplexMatrix& a) {
  if (a.rows() != l.d()) throw DimensionError("apply: operator dimension does not match PTM");
  return from_pauli_coords(l.matrix.cast<cplx>() * pauli_coords(a), l.q);
}

ComplexMatrix apply_kraus(const KrausChannel& k, const ComplexMatrix& a) {
  ComplexMatrix out = ComplexMatrix::Zero(a.rows(), a.cols());
  for (const auto& op : k.kraus_ops) out += op * a * op.adjoint();
  return out;
}

ComplexMatrix choi_matrix(const PTM& l) {
  const int d = l.d();
  ComplexMatrix j = ComplexMatrix::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      ComplexMatrix e = ComplexMatrix::Zero(d, d);
      e(a, b) = 1.0;
      j.block(a * d, b * d, d, d) = apply_ptm(l, e);
    }
  return j;
}

double min_choi_eigenvalue(const PTM& l) {
  return eig_hermitian(choi_matrix(l), 1e-8).eigenvalues.minCoeff();
}

MetricSet metrics(const PTM& l) {
  if (l.tp_residual() > 1e-10) throw DomainError("metrics: map is not trace preserving");
  const double d = l.d();
  const double n = d * d - 1.0;
  const RealMatrix lt = l.unital_block();
  MetricSet m;
  m.f = lt.trace() / n;
  m.u = (lt.transpose() * lt).trace() / n;
  m.h = (lt * lt).trace() / n;
  m.F = ((d - 1.0) * m.f + 1.0) / d;
  m.alpha_norm_sq = l.alpha().squaredNorm();
  m.H = 1.0 - (n / (d * d)) * (m.u - m.h) - ((d + 1.0) / (2.0 * d * d)) * m.alpha_norm_sq;
  m.H_direct = self_adjointness_direct(l);
  return m;
}

double self_adjointness_direct(const PTM& l) {
  // D = E - E^dag; int ||D(phi)||^2 = sum_nm (L_D^T L_D)_nm int c_n c_m with
  // int c_n c_m = (d delta_n0 delta_m0 + delta_nm)/(d(d+1)).
  const double d = l.d();
  const RealMatrix ld = l.matrix - l.matrix.transpose();
  const RealMatrix g = ld.transpose() * ld;
  const double integral = (d * g(0, 0) + g.trace()) / (d * (d + 1.0));
  return 1.0 - (d + 1.0) / (2.0 * d) * integral;
}

double h_from_kraus(const KrausChannel& k) {
  const double d = k.d();
  double s = 0.0;
  for (const auto& a : k.kraus_ops)
    for (const auto& b : k.kraus_ops) s += std::norm((a * b).trace());
  return (s - 1.0) / (d * d - 1.0);
}

PTM noise1_model(double p, double q) {
  if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0) throw DomainError("noise1_model: p and q must lie in [0, 1]");
  const double theta = std::asin(std::sqrt(p));
  const ComplexMatrix x = pauli_x();
  const ComplexMatrix u = std::cos(theta) * pauli_i() + cplx(0.0, std::sin(theta)) * x;
  return ptm_from_kraus(KrausChannel{std::vector<ComplexMatrix>{std::sqrt(q) * u, std::sqrt((1.0 - q) * (1.0 - p)) * pauli_i(),
                          std::sqrt((1.0 - q) * p) * x}});
}

PTM noise2_model(double p, double q) {
  if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0) throw DomainError("noise2_model: p and q must lie in [0, 1]");
  const double theta = std::asin(std::sqrt(p));
  const ComplexMatrix xx = kron(pauli_x(), pauli_x());
  const ComplexMatrix id = ComplexMatrix::Identity(4, 4);
  const ComplexMatrix u = std::cos(theta) * id + cplx(0.0, std::sin(theta)) * xx;
  return ptm_from_kraus(KrausChannel{std::vector<ComplexMatrix>{std::sqrt(q) * u, std::sqrt((1.0 - q) * (1.0 - p)) * id, std::sqrt((1.0 - q) * p) * xx}});
}

PTM x_rotation_ptm(double theta) {
  return unitary_ptm(std::cos(theta / 2.0) * pauli_i() + cplx(0.0, std::sin(theta / 2.0)) * pauli_x());
}

PTM depolarizing_ptm(double p, int q) {
  if (p < 0.0 || p > 1.0) throw DomainError("depolarizing_ptm: p must lie in [0, 1]");
  const auto basis = pauli_basis(q);
  const double scale = std::sqrt(static_cast<double>(1 << q));
  const double n = static_cast<double>(basis.size()) - 1.0;
  KrausChannel k;
  for (std::size_t i = 0; i < basis.size(); ++i)
    k.kraus_ops.push_back(std::sqrt(i == 0 ? 1.0 - p : p / n) * scale * basis[i]);
  return ptm_from_kraus(k);
}

RealMatrix lindblad_generator(double t1, double t2, double chi, bool include_zz) {
  if (!(t1 > 0.0) || !(t2 > 0.0)) throw DomainError("lindblad: T1 and T2 must be positive");
  const double rate_phi = 1.0 / t2 - 1.0 / (2.0 * t1);
  if (rate_phi < 0.0) throw DomainError("lindblad: T2 > 2 T1 is unphysical");
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 1) = 1.0;
  std::vector<ComplexMatrix> jumps{a / std::sqrt(t1)};
  if (rate_phi > 0.0) jumps.push_back(pauli_z() * std::sqrt(rate_phi / 2.0));
  const ComplexMatrix ham = include_zz ? ComplexMatrix(0.5 * chi * pauli_z()) : ComplexMatrix::Zero(2, 2);
  const auto basis = pauli_basis(1);
  RealMatrix gen(4, 4);
  for (int m = 0; m < 4; ++m) {
    const ComplexMatrix& s = basis[static_cast<std::size_t>(m)];
    ComplexMatrix out = cplx(0.0, -1.0) * (ham * s - s * ham);
    for (const auto& l : jumps) {
      const ComplexMatrix ldl = l.adjoint() * l;
      out += l * s * l.adjoint() - 0.5 * (ldl * s + s * ldl);
    }
    for (int n = 0; n < 4; ++n) gen(n, m) = (basis[static_cast<std::size_t>(n)] * out).trace().real();
  }
  return gen;
}

PTM lindblad_ptm(double t1, double t2, double chi, double delay, bool include_zz) {
  if (delay < 0.0) throw DomainError("lindblad: delay must be nonnegative");
  return {1, matexp(RealMatrix(delay * lindblad_generator(t1, t2, chi, include_zz)))};
}

KrausChannel random_cptp(int d, int kraus_rank, std::uint64_t seed) {
  if (kraus_rank < 1 || kraus_rank > d * d) throw DomainError("random_cptp: rank must lie in [1, d^2]");
  std::mt19937_64 rng(seed);
  const ComplexMatrix u = haar_unitary(d * kraus_rank, rng);
  KrausChannel k;
  for (int i = 0; i < kraus_rank; ++i) k.kraus_ops.push_back(u.block(i * d, 0, d, d));
  return k;
}

}  // namespace tdesign::channels
