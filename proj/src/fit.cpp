#include "tdesign/fit.hpp"

#include <unsupported/Eigen/NonLinearOptimization>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace tdesign::fit {

void DecayCurve::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].std_error < 0.0 || !std::isfinite(points[i].std_error))
      throw DomainError("decay curve: std_error must be finite and nonnegative");
    if (!std::isfinite(points[i].value)) throw DomainError("decay curve: non-finite value");
    if (i > 0 && points[i].m <= points[i - 1].m) throw DomainError("decay curve: m must be strictly increasing");
  }
}

std::vector<int> DecayCurve::lengths() const {
  std::vector<int> out;
  for (const auto& p : points) out.push_back(p.m);
  return out;
}

double FitResult::rate_std_error(int i) const {
  if (pinned[static_cast<std::size_t>(i)]) return 0.0;
  const auto n_amp = amplitudes.size();
  int free_index = 0;
  for (int k = 0; k < i; ++k)
    if (!pinned[static_cast<std::size_t>(k)]) ++free_index;
  const auto idx = n_amp + free_index;
  if (covariance.rows() <= idx) return 0.0;
  return std::sqrt(std::max(0.0, covariance(idx, idx)));
}

double evaluate(const FitResult& r, int m) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < r.rates.size(); ++j) s += r.amplitudes(j) * std::pow(r.rates(j), m);
  return s;
}

namespace {

struct Problem {
  RealVector m;
  RealVector y;
  RealVector sqrt_w;
  RealVector known;

  Eigen::Index size() const { return y.size(); }

  RealMatrix design(const RealVector& rates) const {
    RealMatrix phi(size(), rates.size());
    for (Eigen::Index i = 0; i < size(); ++i)
      for (Eigen::Index j = 0; j < rates.size(); ++j) phi(i, j) = std::pow(rates(j), m(i));
    return phi;
  }

  RealVector all_rates(const RealVector& free) const {
    RealVector r(known.size() + free.size());
    r << known, free;
    return r;
  }

  // Optimal amplitudes and the weighted residual sum of squares.
  std::pair<RealVector, double> project(const RealVector& rates) const {
    const RealMatrix a = sqrt_w.asDiagonal() * design(rates);
    const RealVector b = sqrt_w.cwiseProduct(y);
    const RealVector amp = a.completeOrthogonalDecomposition().solve(b);
    return {amp, (a * amp - b).squaredNorm()};
  }
};

// Variable-projection objective over the free rates. Points outside [0,1]
// are evaluated at their projection plus a quadratic penalty.
struct Objective {
  const Problem& p;
  int evaluations = 0;

  double operator()(const RealVector& x) {
    ++evaluations;
    const RealVector c = x.cwiseMax(0.0).cwiseMin(1.0);
    const double penalty = (x - c).squaredNorm();
    const double rss = p.project(p.all_rates(c)).second;
    return rss * (1.0 + 1e6 * penalty) + 1e6 * penalty;
  }
};

struct NelderMeadResult {
  RealVector x;
  double value;
  bool converged;
};

NelderMeadResult nelder_mead(Objective& f, const RealVector& x0, double step, int budget) {
  const auto n = x0.size();
  std::vector<RealVector> simplex{x0};
  for (Eigen::Index i = 0; i < n; ++i) {
    RealVector v = x0;
    v(i) += (v(i) + step <= 1.0) ? step : -step;
    simplex.push_back(v);
  }
  std::vector<double> vals;
  for (const auto& v : simplex) vals.push_back(f(v));
  const int start = f.evaluations;

  std::vector<std::size_t> order(simplex.size());
  while (f.evaluations - start < budget) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];
    double spread = 0.0;
    for (const auto& v : simplex) spread = std::max(spread, (v - simplex[best]).cwiseAbs().maxCoeff());
    if (spread < 1e-13 || std::abs(vals[worst] - vals[best]) <= 1e-16 * std::abs(vals[best]) + 1e-300)
      return {simplex[best], vals[best], true};

    RealVector centroid = RealVector::Zero(n);
    for (std::size_t i = 0; i < simplex.size(); ++i)
      if (i != worst) centroid += simplex[i];
    centroid /= static_cast<double>(n);

    const RealVector xr = centroid + (centroid - simplex[worst]);
    const double fr = f(xr);
    if (fr < vals[best]) {
      const RealVector xe = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = f(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        vals[worst] = fe;
      } else {
        simplex[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      simplex[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const RealVector xc = outside ? RealVector(centroid + 0.5 * (xr - centroid))
                                  : RealVector(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = f(xc);
    if (fc < (outside ? fr : vals[worst])) {
      simplex[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      vals[i] = f(simplex[i]);
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  return {simplex[static_cast<std::size_t>(it - vals.begin())], *it, false};
}

// Joint residuals over (amplitudes, free rates) for the LM polish.
struct JointFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const Problem& p;
  Eigen::Index n_amp;

  int inputs() const { return static_cast<int>(n_amp + (n_amp - p.known.size())); }
  int values() const { return static_cast<int>(p.size()); }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
    const RealVector rates = p.all_rates(x.tail(n_amp - p.known.size()));
    fvec = p.sqrt_w.cwiseProduct(p.design(rates) * x.head(n_amp) - p.y);
    return 0;
  }

  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
    const auto n_known = p.known.size();
    const RealVector rates = p.all_rates(x.tail(n_amp - n_known));
    jac.resize(p.size(), inputs());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double m = p.m(i);
      for (Eigen::Index j = 0; j < n_amp; ++j) jac(i, j) = std::pow(rates(j), m);
      for (Eigen::Index j = n_known; j < n_amp; ++j)
        jac(i, n_amp + j - n_known) = m > 0.0 ? x(j) * m * std::pow(rates(j), m - 1.0) : 0.0;
      jac.row(i) *= p.sqrt_w(i);
    }
    return 0;
  }
};

struct Candidate {
  RealVector free;  // free rates
  RealVector amp;
  double rss = std::numeric_limits<double>::infinity();
};

Candidate polish(const Problem& p, const Candidate& c) {
  const auto n_amp = c.amp.size();
  JointFunctor fn{p, n_amp};
  Eigen::VectorXd x(n_amp + c.free.size());
  x << c.amp, c.free;
  Eigen::LevenbergMarquardt<JointFunctor> lm(fn);
  lm.parameters.xtol = 1e-15;
  lm.parameters.ftol = 1e-15;
  lm.parameters.maxfev = 2000;
  lm.minimize(x);
  Candidate out{x.tail(c.free.size()), x.head(n_amp), 0.0};
  if (!x.allFinite() || (out.free.array() < 0.0).any() || (out.free.array() > 1.0).any()) return c;
  Eigen::VectorXd r;
  fn(x, r);
  out.rss = r.squaredNorm();
  return out.rss <= c.rss ? out : c;
}

std::vector<RealVector> start_grid(const Problem& p, int n_free, int count) {
  // Effective single rate from the end points.
  double r_eff = 0.9;
  const auto n = p.size();
  if (p.y(0) > 0.0 && p.y(n - 1) > 0.0 && p.m(n - 1) > p.m(0))
    r_eff = std::pow(p.y(n - 1) / p.y(0), 1.0 / (p.m(n - 1) - p.m(0)));
  r_eff = std::clamp(r_eff, 0.05, 1.0 - 1e-6);
  const double gap = 1.0 - r_eff;
  auto at = [&](double s) { return std::clamp(1.0 - gap * s, 0.0, 1.0 - 1e-9); };

  static constexpr std::array<double, 10> singles{1.0, 0.5, 2.0, 0.2, 5.0, 0.1, 10.0, 0.05, 20.0, 0.01};
  static constexpr std::array<std::pair<double, double>, 10> pairs{
      {{0.5, 2.0}, {0.2, 2.0}, {0.1, 1.0}, {0.5, 5.0}, {0.1, 10.0}, {0.3, 3.0}, {1.0, 10.0},
       {0.05, 0.5}, {0.2, 20.0}, {0.8, 1.5}}};
  std::vector<RealVector> out;
  for (int k = 0; k < count; ++k) {
    RealVector v(n_free);
    if (n_free == 1) {
      v(0) = at(singles[static_cast<std::size_t>(k) % singles.size()]);
    } else {
      const auto& [a, b] = pairs[static_cast<std::size_t>(k) % pairs.size()];
      v(0) = at(a);
      v(1) = at(b);
      for (Eigen::Index j = 2; j < n_free; ++j) v(j) = at(a * static_cast<double>(j + 1));
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

FitResult fit_exponentials(const DecayCurve& curve, int n_free, const std::vector<double>& known_rates,
                           const FitOptions& opts) {
  curve.validate();
  if (n_free < 1 || n_free > 3) throw DomainError("fit_exponentials: between 1 and 3 free rates supported");
  const auto n_known = static_cast<Eigen::Index>(known_rates.size());
  const auto n_points = static_cast<Eigen::Index>(curve.points.size());
  if (n_points < 2 * n_free + n_known + 1) throw DomainError("fit_exponentials: too few points for the model");
  for (double r : known_rates)
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("fit_exponentials: pinned rates must lie in [0, 1]");

  Problem p;
  p.m.resize(n_points);
  p.y.resize(n_points);
  p.sqrt_w.resize(n_points);
  p.known = Eigen::Map<const RealVector>(known_rates.data(), n_known);
  const bool weighted = std::all_of(curve.points.begin(), curve.points.end(),
                                    [](const CurvePoint& c) { return c.std_error > 0.0; });
  for (Eigen::Index i = 0; i < n_points; ++i) {
    const auto& pt = curve.points[static_cast<std::size_t>(i)];
    p.m(i) = pt.m;
    p.y(i) = pt.value;
    p.sqrt_w(i) = weighted ? 1.0 / pt.std_error : 1.0;
  }

  FitResult result;
  Objective obj{p};
  bool converged = true;
  Candidate best;
  const int budget = std::max(1, opts.max_evaluations / std::max(1, opts.starts));
  for (const auto& x0 : start_grid(p, n_free, opts.starts)) {
    const double step = std::max(1e-4, 0.5 * (1.0 - x0.maxCoeff()));
    const auto nm = nelder_mead(obj, x0, step, budget);
    converged = converged && nm.converged;
    if (nm.value < best.rss) {
      const RealVector c = nm.x.cwiseMax(0.0).cwiseMin(1.0);
      const auto [amp, rss] = p.project(p.all_rates(c));
      best = {c, amp, rss};
    }
  }
  best = polish(p, best);

  if (opts.subtract_and_refit && n_free == 2 && n_known == 0) {
    // Remove the faster component and refit the slower one alone.
    const Eigen::Index fast = best.free(0) < best.free(1) ? 0 : 1;
    Problem residual = p;
    for (Eigen::Index i = 0; i < n_points; ++i) residual.y(i) -= best.amp(fast) * std::pow(best.free(fast), p.m(i));
    Objective obj1{residual};
    RealVector x0(1);
    x0(0) = best.free(1 - fast);
    const auto nm = nelder_mead(obj1, x0, std::max(1e-4, 0.5 * (1.0 - x0(0))), budget);
    obj.evaluations += obj1.evaluations;
    Candidate refit;
    refit.free.resize(2);
    refit.free(fast) = best.free(fast);
    refit.free(1 - fast) = std::clamp(nm.x(0), 0.0, 1.0);
    std::tie(refit.amp, refit.rss) = p.project(p.all_rates(refit.free));
    refit = polish(p, refit);
    if (refit.rss < best.rss) best = refit;
  }

  // Order free rates descending.
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n_free));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return best.free(a) > best.free(b); });
  RealVector free_sorted(n_free), amp_sorted(n_known + n_free);
  amp_sorted.head(n_known) = best.amp.head(n_known);
  for (int k = 0; k < n_free; ++k) {
    free_sorted(k) = best.free(idx[static_cast<std::size_t>(k)]);
    amp_sorted(n_known + k) = best.amp(n_known + idx[static_cast<std::size_t>(k)]);
  }
  result.rates = p.all_rates(free_sorted);
  result.amplitudes = amp_sorted;
  result.pinned.assign(static_cast<std::size_t>(n_known), true);
  result.pinned.resize(static_cast<std::size_t>(n_known + n_free), false);
  result.residual_norm = std::sqrt(best.rss);
  result.evaluations = obj.evaluations;

  // Covariance from the weighted Jacobian; rescaled by the reduced chi^2 when
  // no error bars were supplied.
  JointFunctor fn{p, n_known + n_free};
  Eigen::VectorXd x(n_known + 2 * n_free);
  x << amp_sorted, free_sorted;
  Eigen::MatrixXd jac;
  fn.df(x, jac);
  const RealMatrix jtj = jac.transpose() * jac;
  result.covariance = jtj.completeOrthogonalDecomposition().pseudoInverse();
  const auto dof = n_points - x.size();
  if (!weighted && dof > 0) result.covariance *= best.rss / static_cast<double>(dof);

  if (!converged) result.flags.emplace_back("not_converged");
  for (Eigen::Index i = 0; i < result.rates.size(); ++i) {
    if (result.pinned[static_cast<std::size_t>(i)]) continue;
    if (result.rates(i) <= 1e-9 || result.rates(i) >= 1.0 - 1e-12) result.flags.emplace_back("rate_at_bound");
  }
  for (Eigen::Index i = 0; i < result.rates.size(); ++i)
    for (Eigen::Index j = i + 1; j < result.rates.size(); ++j)
      if (std::abs(result.rates(i) - result.rates(j)) < opts.min_rate_gap) {
        result.flags.emplace_back("ill_conditioned");
        i = j = result.rates.size();
      }
  return result;
}

}  // namespace tdesign::fit
