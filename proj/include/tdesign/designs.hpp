#pragma once

#include "tdesign/numerics.hpp"
#include "tdesign/zonal.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace tdesign::designs {

class UnitaryEnsemble;
using EnsemblePtr = std::shared_ptr<const UnitaryEnsemble>;

/// One factor of a product ensemble: a fixed unitary or an independently
/// sampled sub-ensemble.
using Layer = std::variant<ComplexMatrix, EnsemblePtr>;

/// Finite, uniformly weighted multiset of d x d unitaries.
///
/// explicit:   the elements are stored.
/// product:    U = L_0 L_1 ... L_{n-1}, each ensemble layer drawn independently.
/// direct_sum: U = A (+) B with A and B drawn independently.
///
/// Explicit sets are kept as multisets. Only projective groups are reduced
/// modulo global phase (see dedup_phase), since the mixed moments with r != s
/// depend on the phases.
class UnitaryEnsemble {
 public:
  enum class Kind { Explicit, Product, DirectSum };

  static UnitaryEnsemble make_explicit(int d, std::vector<ComplexMatrix> elements);
  static UnitaryEnsemble make_product(int d, std::vector<Layer> layers);
  static UnitaryEnsemble make_direct_sum(EnsemblePtr a, EnsemblePtr b);

  int d() const { return d_; }
  Kind kind() const { return kind_; }
  const std::vector<ComplexMatrix>& elements() const;  // Explicit only
  const std::vector<Layer>& layers() const;            // Product only
  const EnsemblePtr& first() const;                    // DirectSum only
  const EnsemblePtr& second() const;                   // DirectSum only

  /// Number of elements of the fully expanded multiset (as a double, since
  /// product sizes overflow 64 bits quickly).
  double projected_size() const;

  /// Uniform draw from the multiset.
  ComplexMatrix sample(std::mt19937_64& rng) const;

  /// Fully multiplied-out explicit ensemble. Throws DimensionError when the
  /// projected size exceeds cap.
  UnitaryEnsemble expand(std::int64_t cap = kDefaultExplicitCap) const;

  static constexpr std::int64_t kDefaultExplicitCap = 10'000'000;

 private:
  UnitaryEnsemble() = default;

  int d_ = 0;
  Kind kind_ = Kind::Explicit;
  std::vector<ComplexMatrix> elements_;
  std::vector<Layer> layers_;
  EnsemblePtr a_, b_;
};

const char* kind_name(UnitaryEnsemble::Kind kind);

/// Global phase making the first entry with modulus above 1e-6 (row-major) real positive.
ComplexMatrix canonical_phase(const ComplexMatrix& u);

/// Removes elements equal up to global phase, keeping first occurrences in
/// canonical phase.
std::vector<ComplexMatrix> dedup_phase(const std::vector<ComplexMatrix>& elements);

/// Closure of the generated group modulo global phase; throws Error when it
/// exceeds max_elements.
std::vector<ComplexMatrix> group_closure(const std::vector<ComplexMatrix>& generators, std::size_t max_elements);

/// {1, w, ..., w^t} with w = exp(2 pi i / (t + 1)).
UnitaryEnsemble w1(int t);

UnitaryEnsemble direct_sum_ensemble(const UnitaryEnsemble& a, const UnitaryEnsemble& b);

/// [[C, iS, 0], [iS, C, 0], [0, 0, I]] with C = diag(cos theta), S = diag(sin theta).
ComplexMatrix rotation_unitary(const std::vector<double>& thetas, int d1, int d);

/// Strong t-design on U(d): W_d = W_{1+(d-1)} prod_k (R_k W_{1+(d-1)}), k = 1..t,
/// with W_{1+(d-1)} = W_1 (+) W_{d-1}. Expanded when the projected size fits
/// the cap, otherwise returned as a product sampler.
UnitaryEnsemble build_qudit_design(int d, int t, std::int64_t cap = UnitaryEnsemble::kDefaultExplicitCap);

/// Angles theta_lambda (length D) for each spherical label mu of one level.
using AngleTable = std::map<std::vector<int>, std::vector<double>>;

struct CircuitLayer {
  enum class Kind { ControlledDesign, ControlledXRotation };
  Kind kind;
  std::vector<int> label;       // rotation layers only
  std::vector<double> thetas;   // rotation layers only
};

/// Layered strong t-design on N + 1 qubits: controlled copies of an N-qubit
/// design interleaved with controlled X rotations. The single-qubit base case
/// has no layers and stands for build_qudit_design(2, t).
struct CircuitDescriptor {
  int n_qubits = 1;
  int t = 1;
  std::vector<CircuitLayer> layers;
  std::shared_ptr<const CircuitDescriptor> inner;  // the N-qubit design, null at the base

  std::size_t rotation_count() const;
  std::size_t design_layer_count() const;
};

/// tables[k] holds the angles for the level with k + 2 qubits, for every
/// label of Lambda_sph(2^(k+1), 2^(k+2), t). Throws DomainError on a missing entry.
CircuitDescriptor build_qubit_circuit_descriptor(int n_plus_1, int t, const std::vector<AngleTable>& tables);

/// Product sampler realising the descriptor.
UnitaryEnsemble descriptor_ensemble(const CircuitDescriptor& desc);

/// Binary icosahedral group modulo phase (60 elements).
UnitaryEnsemble icosahedral_group();

/// One- or two-qubit Clifford group modulo phase (24 or 11520 elements).
UnitaryEnsemble clifford_group(int q);

/// The fixed two-qubit unitary interleaved between two Clifford layers.
ComplexMatrix uc_unitary();

/// C(4) U_c C(4) as a product sampler.
UnitaryEnsemble interleaved_4design();

struct MomentResidual {
  int r = 0;
  int s = 0;
  double residual = 0.0;
  double std_error = 0.0;        // Monte Carlo path only
  std::string method;            // "dense", "frame-potential" or "monte-carlo"
};

struct DesignReport {
  int t_checked = 0;
  bool strong = true;
  std::vector<MomentResidual> residuals;
  std::optional<double> frame_potential;   // exact-pairs value at t, when computed
  double haar_frame_potential = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  double tol = 1e-10;
  bool strong = true;                       // check all r, s <= t, otherwise r = s = t only
  std::optional<std::int64_t> mc_samples;   // required for non-explicit ensembles
  std::uint64_t seed = 1;
  std::int64_t dense_limit = 1024;          // max d^(r+s) for the dense moment path
  bool compute_frame_potential = true;
};

/// Compares ensemble moments E[U^(x)r (x) conj(U)^(x)s] against Haar:
/// zero for r != s and the permutation projector for r = s.
DesignReport verify_strong_design(const UnitaryEnsemble& e, int t, const VerifyOptions& opts = {});

enum class FrameMode { ExactPairs, InterleavedReduced, MonteCarlo };

struct FramePotentialOptions {
  FrameMode mode = FrameMode::ExactPairs;
  std::int64_t mc_samples = 100000;
  std::uint64_t seed = 1;
};

/// (1/N^2) sum |tr(U^dag V)|^(2t). InterleavedReduced requires a product
/// ensemble of the form C . U_c . C with identical explicit outer layers.
Estimate frame_potential(const UnitaryEnsemble& e, int t, const FramePotentialOptions& opts = {});

/// Reduced pair sum (1/|C|^2) sum_{C,C'} |tr(U_c^dag C U_c C')|^(2t).
double interleaved_frame_potential(const std::vector<ComplexMatrix>& group, const ComplexMatrix& uc, int t);

}  // namespace tdesign::designs
