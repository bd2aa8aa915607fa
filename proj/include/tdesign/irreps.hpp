#pragma once

#include "tdesign/channels.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace tdesign::irreps {

/// Irreducible components of the Clifford/Haar action on the two-copy
/// traceless symmetric sector. III is the adjoint representation.
enum class IrrepLabel { Zero, I, II, III };

std::string_view label_name(IrrepLabel l);

struct Projector {
  IrrepLabel label;
  RealMatrix matrix;  // on the (4^q)^2-dim two-copy Pauli space, index n1 4^q + n2
  int dim = 0;
};

struct IrrepProjectorSet {
  int q = 1;
  std::vector<Projector> projectors;

  const Projector& at(IrrepLabel l) const;  // throws DomainError if absent
  RealMatrix sum() const;
};

struct LabeledValues {
  std::vector<IrrepLabel> labels;
  RealVector values;

  double at(IrrepLabel l) const;
};

/// Orthonormal basis (columns) of the symmetric subspace of K~ (x) K~, where K~
/// is the traceless part of the Pauli space: e_nn and (e_nm + e_mn)/sqrt 2 for
/// 1 <= n < m < 4^q. 6 columns at q = 1, 120 at q = 2.
RealMatrix traceless_symmetric_basis(int q);

/// Dimensions {1, 5}.
IrrepProjectorSet projectors_1q();

/// Dimensions {1, 84, 20, 15}. Built by twirling a random symmetric operator on
/// the traceless symmetric sector and grouping its eigenspaces; a draw whose
/// spectrum does not split into exactly those dimensions is retried with the
/// next seed, up to `max_attempts` draws.
IrrepProjectorSet projectors_2q(std::uint64_t seed = 20240521, int max_attempts = 5);

IrrepProjectorSet projectors_for(int q);

/// C_lambda = tr[Pi_lambda L^{(x)2}] / dim(lambda).
LabeledValues decay_rates(const channels::PTM& l, const IrrepProjectorSet& p);

/// Which operator the measured observable becomes on the two-copy side.
/// Adjoint (E^dag(O), the Heisenberg-picture form) is what a sequence with a
/// noisy final step actually measures; Forward (E(O)) is kept for comparison.
enum class MeasuredMap { Adjoint, Forward };

/// A_lambda = <<M^{(x)2}| Pi_lambda |O_ini^{(x)2}>> with M the image of O_meas
/// under `map`. Requires Hermitian operators and traceless O_ini.
LabeledValues coefficients(const ComplexMatrix& o_ini, const ComplexMatrix& o_meas, const channels::PTM& l,
                           const IrrepProjectorSet& p, MeasuredMap map = MeasuredMap::Adjoint);

/// Real Pauli coordinates of a Hermitian operator.
RealVector hermitian_coords(const ComplexMatrix& a);

}  // namespace tdesign::irreps
