#pragma once

#include "tdesign/numerics.hpp"

#include <string>
#include <vector>

namespace tdesign::fit {

struct CurvePoint {
  int m = 0;
  double value = 0.0;
  double std_error = 0.0;
  long n_sequences = 0;
  long n_shots = 0;  // 0: exact expectation values
};

/// Points with strictly increasing m and nonnegative std_error.
struct DecayCurve {
  std::vector<CurvePoint> points;

  void validate() const;  // throws DomainError
  std::vector<int> lengths() const;
};

/// Model V(m) = sum_j a_j r_j^m. The rates are `known_rates` (pinned, in the
/// order given) followed by the free rates in descending order; amplitudes are
/// aligned with them.
struct FitResult {
  RealVector amplitudes;
  RealVector rates;
  std::vector<bool> pinned;
  double residual_norm = 0.0;  // sqrt of the weighted residual sum of squares
  RealMatrix covariance;       // over (amplitudes, free rates)
  int evaluations = 0;
  std::vector<std::string> flags;

  bool flagged() const { return !flags.empty(); }
  double rate_std_error(int i) const;  // 0 for pinned rates
};

struct FitOptions {
  int starts = 10;
  int max_evaluations = 10000;
  bool subtract_and_refit = true;
  double min_rate_gap = 1e-4;  // closer rates are flagged ill-conditioned
};

/// Weighted variable-projection fit: amplitudes by linear least squares for each
/// trial rate vector, free rates by bounded Nelder-Mead over [0, 1] from a
/// fixed multi-start grid, then a joint Levenberg-Marquardt polish. Weights are
/// 1/std_error^2 when every point carries an error bar, uniform otherwise.
/// With two free rates the faster component is subtracted and the slower one
/// refitted before the final polish. Requires at least 2 n_free + n_known + 1 points.
FitResult fit_exponentials(const DecayCurve& curve, int n_free, const std::vector<double>& known_rates = {},
                           const FitOptions& opts = {});

/// Model value at m.
double evaluate(const FitResult& r, int m);

}  // namespace tdesign::fit
