#pragma once

#include "tdesign/channels.hpp"
#include "tdesign/designs.hpp"
#include "tdesign/fit.hpp"
#include "tdesign/irreps.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace tdesign::rb {

using fit::CurvePoint;
using fit::DecayCurve;
using fit::FitResult;

/// State preparation flips each qubit with probability eta_prep; readout
/// reports 1 for a 0 with probability eta_meas_01 and 0 for a 1 with
/// probability eta_meas_10, independently per qubit.
struct SPAMModel {
  double eta_prep = 0.0;
  double eta_meas_01 = 0.0;
  double eta_meas_10 = 0.0;

  void validate() const;
  bool has_readout_error() const { return eta_meas_01 != 0.0 || eta_meas_10 != 0.0; }
};

struct RBConfig {
  designs::EnsemblePtr design;
  channels::PTM noise;
  int t_order = 1;
  std::vector<int> sequence_lengths;
  long n_sequences = 100;
  long n_shots = 0;  // 0: exact expectation per sequence
  std::uint64_t seed = 1;
  // O_ini is a density matrix, or a traceless Hermitian Delta = s (rho - rho')
  // realised as the difference of two prepared states.
  ComplexMatrix o_ini;
  ComplexMatrix o_meas;
  std::optional<SPAMModel> spam;
  int certified_t = 0;  // design strength established by the caller
  bool waive_certification = false;

  void validate() const;  // throws DomainError / DimensionError
};

/// A sampled sequence: the m design elements and the inverse of their product.
struct Sequence {
  std::vector<ComplexMatrix> gates;
  ComplexMatrix inverse;
};

Sequence sample_sequence(const designs::UnitaryEnsemble& design, int m, std::mt19937_64& rng);

/// Generator for sequence `index` at length m: independent of scheduling.
std::mt19937_64 sequence_rng(std::uint64_t seed, int m, long index);

/// Effective operators after SPAM: the prepared O_ini and the observable that
/// the noisy readout actually measures. Without SPAM these are the inputs.
ComplexMatrix prepared_o_ini(const RBConfig& c);
ComplexMatrix measured_o_meas(const RBConfig& c);

/// One sequence: G_{m+1} ... G_1 with G_i = E o U_i and U_{m+1} the inverse,
/// returning the (shot-sampled when n_shots > 0) value of O_meas on the
/// evolved O_ini.
double run_sequence(const RBConfig& c, int m, std::mt19937_64& rng);

/// For each m, the mean over sequences of run_sequence^t with a
/// leave-one-sequence-out jackknife standard error.
DecayCurve v_t_monte_carlo(const RBConfig& c);

/// Jackknife standard error of the mean of `values`.
double jackknife_std_error(const std::vector<double>& values);

/// sum_lambda A_lambda C_lambda^m. Requires traceless O_ini and TP noise.
DecayCurve v2_exact(const channels::PTM& noise, const ComplexMatrix& o_ini, const ComplexMatrix& o_meas,
                    const std::vector<int>& m_list, const irreps::IrrepProjectorSet& p,
                    irreps::MeasuredMap map = irreps::MeasuredMap::Adjoint);

/// A_0 + A_1 f^m with A_0 the identity-component overlap.
DecayCurve v1_exact(const channels::PTM& noise, const ComplexMatrix& o_ini, const ComplexMatrix& o_meas,
                    const std::vector<int>& m_list, irreps::MeasuredMap map = irreps::MeasuredMap::Adjoint);

/// <<M| (L_av + epsilon P)^m |O_ini>> with L_av the twirled noise and P a
/// perturbation superoperator on the Pauli space.
DecayCurve v1_approx_design(const channels::PTM& noise, const ComplexMatrix& o_ini, const ComplexMatrix& o_meas,
                            const std::vector<int>& m_list, const RealMatrix& perturbation, double epsilon,
                            irreps::MeasuredMap map = irreps::MeasuredMap::Adjoint);

struct MetricEstimate {
  channels::MetricSet value;
  channels::MetricSet std_error;  // first-order propagation of the fit covariances
  std::vector<FitResult> fits;
  std::vector<std::string> flags;
};

struct RateEstimate {
  irreps::LabeledValues value;
  RealVector std_error;
};

/// f from the t=1 curve; (u, c2) from the t=2 curve with the larger rate
/// taken as u; h = (10/3)(c2 - (9/10) f^2 + u/5). |alpha|^2 defaults to 0
/// (flagged "alpha_assumed_zero").
MetricEstimate estimate_metrics_1q(const DecayCurve& v1, const DecayCurve& v2,
                                   std::optional<double> alpha_norm_sq = std::nullopt, const fit::FitOptions& opts = {});

/// Curves for the three operator settings (ZZ, |00><00|), (ZZ, ZZ),
/// (rho_-, rho_-) plus the t=1 curve for f.
struct TwoQubitCurves {
  DecayCurve v1;
  DecayCurve zz_00;
  DecayCurve zz_zz;
  DecayCurve rm_rm;
};

struct TwoQubitEstimate {
  MetricEstimate metrics;
  RateEstimate rates;  // labels 0 (= u), I, II, III
};

/// Step-by-step fit: (u, C_I) from the first curve, C_II with those pinned, C_III
/// with three pinned. Of the first pair the rate nearer u_external is u; without
/// it the larger one is (flagged "u_assigned_by_order").
TwoQubitEstimate estimate_metrics_2q(const TwoQubitCurves& curves, std::optional<double> u_external = std::nullopt,
                                     std::optional<double> alpha_norm_sq = std::nullopt,
                                     const fit::FitOptions& opts = {});

/// Operators of the two-qubit settings.
ComplexMatrix op_zz();
ComplexMatrix op_p00();
ComplexMatrix op_rho_minus();

}  // namespace tdesign::rb
