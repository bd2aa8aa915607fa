#pragma once

#include "tdesign/numerics.hpp"

#include <cstdint>
#include <vector>

namespace tdesign::channels {

/// Pauli transfer matrix L_nm = tr[sigma_n E(sigma_m)] in the trace-orthonormal
/// Pauli basis of q qubits. For a trace-preserving map the first row is
/// (1, 0, ..., 0); the first column below it is the non-unital part alpha and
/// the lower-right block is the unital part.
struct PTM {
  int q = 1;
  RealMatrix matrix;

  int d() const { return 1 << q; }
  int dim() const { return 1 << (2 * q); }
  RealVector alpha() const;
  RealMatrix unital_block() const;
  double tp_residual() const;  // ||first row - e_0||
};

struct KrausChannel {
  std::vector<ComplexMatrix> kraus_ops;

  int d() const;
  double completeness_residual() const;  // ||sum K^dag K - I||_F
};

struct MetricSet {
  double f = 0.0;              // fidelity parameter
  double F = 0.0;              // average gate fidelity
  double u = 0.0;              // unitarity
  double h = 0.0;              // self-adjointness parameter
  double H = 0.0;              // self-adjointness through the (u, h, |alpha|^2) identity
  double H_direct = 0.0;       // self-adjointness from its state-average definition
  double alpha_norm_sq = 0.0;  // |alpha|^2
};

inline constexpr double kTpTol = 1e-12;

PTM ptm_from_kraus(const KrausChannel& k);
PTM unitary_ptm(const ComplexMatrix& u);
PTM identity_ptm(int q);
PTM adjoint_ptm(const PTM& l);
PTM compose(const PTM& outer, const PTM& inner);  // outer o inner
PTM tensor(const PTM& a, const PTM& b);

/// Pauli coordinates c_n = tr[sigma_n A] and the inverse map.
ComplexVector pauli_coords(const ComplexMatrix& a);
ComplexMatrix from_pauli_coords(const ComplexVector& c, int q);

/// E(A) for an arbitrary operator A, through the PTM.
ComplexMatrix apply_ptm(const PTM& l, const ComplexMatrix& a);
ComplexMatrix apply_kraus(const KrausChannel& k, const ComplexMatrix& a);

/// Choi matrix sum_ij |i><j| (x) E(|i><j|) and its smallest eigenvalue.
ComplexMatrix choi_matrix(const PTM& l);
double min_choi_eigenvalue(const PTM& l);

/// f = tr L~/(d^2-1), u = tr L~^T L~/(d^2-1), h = tr L~^2/(d^2-1),
/// F = ((d-1) f + 1)/d, H = 1 - (d^2-1)/d^2 (u - h) - (d+1)/(2 d^2) |alpha|^2.
/// H_direct = H - |alpha|^2/(2 d^2); the two agree exactly for unital maps.
/// Throws DomainError unless the map is trace preserving.
MetricSet metrics(const PTM& l);

/// H from its defining state average 1 - (d+1)/(2d) int ||E(phi) - E^dag(phi)||_2^2,
/// with the Haar state integral done by the swap-operator expansion
/// int phi (x) phi = (I + F)/(d(d+1)).
double self_adjointness_direct(const PTM& l);

/// h = (sum_ij |tr K_i K_j|^2 - 1)/(d^2 - 1).
double h_from_kraus(const KrausChannel& k);

/// q * (rho -> e^{i theta X} rho e^{-i theta X}) + (1-q) * bit flip with probability p; sin^2 theta = p.
PTM noise1_model(double p, double q);
/// Two-qubit analogue with XX in place of X.
PTM noise2_model(double p, double q);

/// Rotation error rho -> e^{i theta X/2} rho e^{-i theta X/2}.
PTM x_rotation_ptm(double theta);
/// I with probability 1-p, each non-identity Pauli with probability p/(4^q - 1).
PTM depolarizing_ptm(double p, int q = 1);

/// Single-qubit relaxation over `delay` (times in microseconds, chi in rad/us):
/// d rho/dt = -i[(chi/2) Z, rho] + sum_k L_k rho L_k^dag - {L_k^dag L_k, rho}/2
/// with L_1 = |0><1|/sqrt(T1), L_2 = Z/sqrt(2 T_phi), 1/T_phi = 1/T2 - 1/(2 T1).
/// The coherent term is present only when include_zz is set.
PTM lindblad_ptm(double t1, double t2, double chi, double delay, bool include_zz);

/// Generator of the above in the Pauli basis (before exponentiation).
RealMatrix lindblad_generator(double t1, double t2, double chi, bool include_zz);

/// Kraus operators of a Haar-random isometry C^d -> C^d (x) C^rank.
KrausChannel random_cptp(int d, int kraus_rank, std::uint64_t seed);

}  // namespace tdesign::channels
