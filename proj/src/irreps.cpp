#include "tdesign/irreps.hpp"

#include "tdesign/haar.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace tdesign::irreps {

namespace {

constexpr double kClusterTol = 1e-8;

int pauli_dim(int q) { return 1 << (2 * q); }

RealVector unit(int n, int i) {
  RealVector e = RealVector::Zero(n);
  e(i) = 1.0;
  return e;
}

// Orthonormalise the columns of v (modified Gram-Schmidt) and return V V^T.
RealMatrix span_projector(const std::vector<RealVector>& vs) {
  std::vector<RealVector> basis;
  for (RealVector v : vs) {
    for (const auto& b : basis) v -= b.dot(v) * b;
    const double norm = v.norm();
    if (norm > 1e-12) basis.push_back(v / norm);
  }
  const auto n = vs.front().size();
  RealMatrix p = RealMatrix::Zero(n, n);
  for (const auto& b : basis) p += b * b.transpose();
  return p;
}

IrrepLabel label_for_dim(int dim) {
  switch (dim) {
    case 1: return IrrepLabel::Zero;
    case 84: return IrrepLabel::I;
    case 20: return IrrepLabel::II;
    case 15: return IrrepLabel::III;
    default: throw DomainError("projectors_2q: unexpected eigenspace dimension " + std::to_string(dim));
  }
}

void check_match(const channels::PTM& l, const IrrepProjectorSet& p) {
  if (l.q != p.q) throw DimensionError("irreps: PTM and projector set have different qubit counts");
}

}  // namespace

std::string_view label_name(IrrepLabel l) {
  switch (l) {
    case IrrepLabel::Zero: return "0";
    case IrrepLabel::I: return "I";
    case IrrepLabel::II: return "II";
    case IrrepLabel::III: return "III";
  }
  return "?";
}

const Projector& IrrepProjectorSet::at(IrrepLabel l) const {
  for (const auto& p : projectors)
    if (p.label == l) return p;
  throw DomainError("projector set has no component " + std::string(label_name(l)));
}

RealMatrix IrrepProjectorSet::sum() const {
  const int n = pauli_dim(q) * pauli_dim(q);
  RealMatrix s = RealMatrix::Zero(n, n);
  for (const auto& p : projectors) s += p.matrix;
  return s;
}

double LabeledValues::at(IrrepLabel l) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == l) return values(static_cast<Eigen::Index>(i));
  throw DomainError("no value for component " + std::string(label_name(l)));
}

RealMatrix traceless_symmetric_basis(int q) {
  const int n = pauli_dim(q);
  const int k = (n - 1) * n / 2;
  RealMatrix b = RealMatrix::Zero(n * n, k);
  int col = 0;
  for (int a = 1; a < n; ++a) {
    b(a * n + a, col++) = 1.0;
    for (int c = a + 1; c < n; ++c) {
      b(a * n + c, col) = M_SQRT1_2;
      b(c * n + a, col) = M_SQRT1_2;
      ++col;
    }
  }
  return b;
}

IrrepProjectorSet projectors_1q() {
  constexpr int n = 4;
  auto e = [](int a, int b) { return unit(n * n, a * n + b); };
  auto s = [&](int a, int b) -> RealVector { return (e(a, b) + e(b, a)) * M_SQRT1_2; };

  IrrepProjectorSet set{1, {}};
  set.projectors.push_back({IrrepLabel::Zero, span_projector({e(1, 1) + e(2, 2) + e(3, 3)}), 1});
  set.projectors.push_back({IrrepLabel::I,
                            span_projector({s(1, 2), s(1, 3), s(2, 3), e(1, 1) - 2.0 * e(2, 2) + e(3, 3),
                                            e(1, 1) - e(3, 3)}),
                            5});
  return set;
}

IrrepProjectorSet projectors_2q(std::uint64_t seed, int max_attempts) {
  const RealMatrix b = traceless_symmetric_basis(2);
  const auto k = b.cols();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    RealMatrix x(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) x(i, j) = x(j, i) = gauss(rng);
    const RealMatrix full = b * x * b.transpose();
    RealMatrix tw = b.transpose() * haar::haar_twirl_ptm2(full, 4) * b;
    tw = 0.5 * (tw + tw.transpose()).eval();
    const auto eig = eig_symmetric(tw, 1e-8);

    // Eigenvalues are ascending; split at gaps above the tolerance.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;
    Eigen::Index start = 0;
    for (Eigen::Index i = 1; i <= k; ++i)
      if (i == k || eig.eigenvalues(i) - eig.eigenvalues(i - 1) > kClusterTol) {
        clusters.emplace_back(start, i - start);
        start = i;
      }

    std::map<int, int> seen;
    for (const auto& c : clusters) ++seen[static_cast<int>(c.second)];
    const std::map<int, int> expected{{1, 1}, {15, 1}, {20, 1}, {84, 1}};
    if (seen != expected) continue;

    IrrepProjectorSet set{2, {}};
    for (const auto& [first, size] : clusters) {
      const RealMatrix v = b * eig.eigenvectors.middleCols(first, size);
      set.projectors.push_back({label_for_dim(static_cast<int>(size)), v * v.transpose(), static_cast<int>(size)});
    }
    std::sort(set.projectors.begin(), set.projectors.end(),
              [](const Projector& l, const Projector& r) { return l.label < r.label; });
    return set;
  }
  throw DomainError("projectors_2q: eigenvalue clustering stayed ambiguous after " + std::to_string(max_attempts) +
                    " draws");
}

IrrepProjectorSet projectors_for(int q) {
  if (q == 1) return projectors_1q();
  if (q == 2) return projectors_2q();
  throw DimensionError("irrep projectors exist only for one and two qubits");
}

LabeledValues decay_rates(const channels::PTM& l, const IrrepProjectorSet& p) {
  check_match(l, p);
  const RealMatrix ll = kron(l.matrix, l.matrix);
  LabeledValues out{{}, RealVector(static_cast<Eigen::Index>(p.projectors.size()))};
  for (std::size_t i = 0; i < p.projectors.size(); ++i) {
    const auto& pr = p.projectors[i];
    out.labels.push_back(pr.label);
    // tr(P L) = sum_ij P_ij L_ji
    out.values(static_cast<Eigen::Index>(i)) = pr.matrix.cwiseProduct(ll.transpose()).sum() / pr.dim;
  }
  return out;
}

RealVector hermitian_coords(const ComplexMatrix& a) {
  if (!is_hermitian(a)) throw DomainError("expected a Hermitian operator");
  return channels::pauli_coords(a).real();
}

LabeledValues coefficients(const ComplexMatrix& o_ini, const ComplexMatrix& o_meas, const channels::PTM& l,
                           const IrrepProjectorSet& p, MeasuredMap map) {
  check_match(l, p);
  if (o_ini.rows() != l.d() || o_meas.rows() != l.d()) throw DimensionError("coefficients: operator dimension mismatch");
  const RealVector ci = hermitian_coords(o_ini);
  if (std::abs(ci(0)) > 1e-10 * std::max(1.0, ci.norm())) throw DomainError("coefficients: O_ini must be traceless");
  const RealVector cm0 = hermitian_coords(o_meas);
  const RealVector cm = map == MeasuredMap::Adjoint ? RealVector(l.matrix.transpose() * cm0) : RealVector(l.matrix * cm0);
  const RealVector left = kron(RealMatrix(cm), RealMatrix(cm));
  const RealVector right = kron(RealMatrix(ci), RealMatrix(ci));
  LabeledValues out{{}, RealVector(static_cast<Eigen::Index>(p.projectors.size()))};
  for (std::size_t i = 0; i < p.projectors.size(); ++i) {
    out.labels.push_back(p.projectors[i].label);
    out.values(static_cast<Eigen::Index>(i)) = left.dot(p.projectors[i].matrix * right);
  }
  return out;
}

}  // namespace tdesign::irreps
