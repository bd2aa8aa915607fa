#include "tdesign/rb.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace tdesign::rb {

using channels::PTM;
using irreps::IrrepLabel;

void SPAMModel::validate() const {
  for (double e : {eta_prep, eta_meas_01, eta_meas_10})
    if (!(e >= 0.0 && e <= 1.0)) throw DomainError("SPAM probabilities must lie in [0, 1]");
}

namespace {

ComplexMatrix bit_flip_all(const ComplexMatrix& a, double eta) {
  const int q = qubits_for_dim(static_cast<int>(a.rows()));
  ComplexMatrix out = a;
  for (int k = 0; k < q; ++k) {
    std::vector<ComplexMatrix> f(static_cast<std::size_t>(q), pauli_i());
    f[static_cast<std::size_t>(k)] = pauli_x();
    const ComplexMatrix x = kron_all(f);
    out = (1.0 - eta) * out + eta * x * out * x;
  }
  return out;
}

// Probability of reporting x' given computational outcome x.
double confusion(const SPAMModel& s, int q, int reported, int actual) {
  double p = 1.0;
  for (int k = 0; k < q; ++k) {
    const int a = (actual >> k) & 1, r = (reported >> k) & 1;
    const double flip = a == 0 ? s.eta_meas_01 : s.eta_meas_10;
    p *= a == r ? 1.0 - flip : flip;
  }
  return p;
}

bool is_diagonal(const ComplexMatrix& a, double tol = 1e-12) {
  return (a - ComplexMatrix(a.diagonal().asDiagonal())).norm() <= tol;
}

struct WeightedState {
  double weight;
  ComplexMatrix rho;
};

// Split O_ini into prepared states: rho itself, or s (rho - rho') for traceless input.
std::vector<WeightedState> split_states(const ComplexMatrix& o_ini) {
  if (!is_hermitian(o_ini)) throw DomainError("O_ini must be Hermitian");
  const double tr = o_ini.trace().real();
  const auto eig = eig_hermitian(o_ini);
  if (std::abs(tr) <= 1e-10) {
    const auto n = eig.eigenvalues.size();
    ComplexMatrix pos = ComplexMatrix::Zero(n, n), neg = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double l = eig.eigenvalues(k);
      const ComplexMatrix proj = eig.eigenvectors.col(k) * eig.eigenvectors.col(k).adjoint();
      (l > 0.0 ? pos : neg) += std::abs(l) * proj;
    }
    const double s = pos.trace().real();
    if (s <= 1e-14) throw DomainError("O_ini must be nonzero");
    return {{s, pos / s}, {-s, neg / s}};
  }
  if (std::abs(tr - 1.0) > 1e-10 || eig.eigenvalues.minCoeff() < -1e-10)
    throw DomainError("O_ini must be a density matrix or traceless");
  return {{1.0, o_ini}};
}

// Outcome values and the Born-rule readout for one evolved state.
class Readout {
 public:
  Readout(const ComplexMatrix& o_meas, const std::optional<SPAMModel>& spam) {
    const auto n = o_meas.rows();
    if (spam && spam->has_readout_error()) {
      if (!is_diagonal(o_meas)) throw DomainError("readout error needs a computational-basis-diagonal O_meas");
      computational_ = true;
      spam_ = *spam;
      q_ = qubits_for_dim(static_cast<int>(n));
      values_ = o_meas.diagonal().real();
    } else {
      const auto eig = eig_hermitian(o_meas);
      values_ = eig.eigenvalues;
      basis_ = eig.eigenvectors;
    }
  }

  RealVector probabilities(const ComplexMatrix& rho) const {
    const auto n = values_.size();
    RealVector p(n);
    if (computational_) {
      const RealVector born = rho.diagonal().real().cwiseMax(0.0);
      for (Eigen::Index r = 0; r < n; ++r) {
        double s = 0.0;
        for (Eigen::Index a = 0; a < n; ++a)
          s += confusion(spam_, q_, static_cast<int>(r), static_cast<int>(a)) * born(a);
        p(r) = s;
      }
    } else {
      for (Eigen::Index k = 0; k < n; ++k)
        p(k) = std::max(0.0, (basis_.col(k).adjoint() * rho * basis_.col(k))(0, 0).real());
    }
    return p / p.sum();
  }

  double exact(const ComplexMatrix& rho) const { return probabilities(rho).dot(values_); }

  double sampled(const ComplexMatrix& rho, long shots, std::mt19937_64& rng) const {
    const RealVector p = probabilities(rho);
    // Multinomial draw as a chain of conditional binomials.
    long remaining = shots;
    double mass = 1.0, total = 0.0;
    for (Eigen::Index k = 0; k < p.size() && remaining > 0; ++k) {
      long count = remaining;
      if (k + 1 < p.size()) {
        const double prob = mass > 0.0 ? std::clamp(p(k) / mass, 0.0, 1.0) : 0.0;
        count = std::binomial_distribution<long>(remaining, prob)(rng);
      }
      total += static_cast<double>(count) * values_(k);
      remaining -= count;
      mass -= p(k);
    }
    return total / static_cast<double>(shots);
  }

 private:
  bool computational_ = false;
  SPAMModel spam_;
  int q_ = 0;
  RealVector values_;
  ComplexMatrix basis_;
};

// Immutable per-config data shared by all sequences.
struct Engine {
  const RBConfig& c;
  ComplexMatrix noise_vec;  // noise superoperator on row-major vec(rho)
  std::vector<WeightedState> states;
  Readout readout;

  explicit Engine(const RBConfig& cfg)
      : c(cfg), readout(cfg.o_meas, cfg.spam) {
    cfg.validate();
    const ComplexMatrix p = pauli_vec_matrix(cfg.noise.q);
    noise_vec = p * cfg.noise.matrix.cast<cplx>() * p.adjoint();
    states = split_states(cfg.o_ini);
    if (cfg.spam)
      for (auto& s : states) s.rho = bit_flip_all(s.rho, cfg.spam->eta_prep);
  }

  ComplexMatrix noisy(const ComplexMatrix& u, const ComplexMatrix& rho) const {
    return unvec(noise_vec * vec(u * rho * u.adjoint()), static_cast<int>(rho.rows()));
  }

  double run(int m, std::mt19937_64& rng) const {
    const Sequence seq = sample_sequence(*c.design, m, rng);
    double value = 0.0;
    for (const auto& s : states) {
      ComplexMatrix rho = s.rho;
      for (const auto& u : seq.gates) rho = noisy(u, rho);
      rho = noisy(seq.inverse, rho);
      value += s.weight * (c.n_shots > 0 ? readout.sampled(rho, c.n_shots, rng) : readout.exact(rho));
    }
    return value;
  }
};

RealVector meas_coords(const PTM& l, const ComplexMatrix& o_meas, irreps::MeasuredMap map) {
  const RealVector c = irreps::hermitian_coords(o_meas);
  return map == irreps::MeasuredMap::Adjoint ? RealVector(l.matrix.transpose() * c) : RealVector(l.matrix * c);
}

DecayCurve exact_curve(const std::vector<int>& m_list, const std::function<double(int)>& v) {
  DecayCurve out;
  for (int m : m_list) out.points.push_back({m, v(m), 0.0, 0, 0});
  out.validate();
  return out;
}

void require_tp(const PTM& l) {
  if (l.tp_residual() > channels::kTpTol * 1e2) throw DomainError("noise must be trace preserving");
}

}  // namespace

void RBConfig::validate() const {
  if (!design) throw DomainError("RB config: no design");
  if (design->d() != noise.d()) throw DimensionError("RB config: design and noise dimensions differ");
  if (o_ini.rows() != noise.d() || o_meas.rows() != noise.d())
    throw DimensionError("RB config: operator dimensions differ from the noise");
  if (t_order < 1) throw DomainError("RB config: t_order must be positive");
  if (!waive_certification && certified_t < 2 * t_order)
    throw DomainError("RB config: design must be certified at 2 t_order (or the check waived)");
  if (t_order == 2 && std::abs(o_ini.trace()) > 1e-10) throw DomainError("RB config: O_ini must be traceless for t = 2");
  if (!is_hermitian(o_meas)) throw DomainError("RB config: O_meas must be Hermitian");
  if (n_sequences < 2) throw DomainError("RB config: need at least two sequences");
  if (n_shots < 0) throw DomainError("RB config: n_shots must be nonnegative");
  for (std::size_t i = 0; i < sequence_lengths.size(); ++i) {
    if (sequence_lengths[i] < 1) throw DomainError("RB config: sequence lengths must be positive");
    if (i > 0 && sequence_lengths[i] <= sequence_lengths[i - 1])
      throw DomainError("RB config: sequence lengths must be strictly increasing");
  }
  if (spam) spam->validate();
}

Sequence sample_sequence(const designs::UnitaryEnsemble& design, int m, std::mt19937_64& rng) {
  if (m < 1) throw DomainError("sequence length must be positive");
  Sequence s;
  ComplexMatrix product = ComplexMatrix::Identity(design.d(), design.d());
  for (int k = 0; k < m; ++k) {
    s.gates.push_back(design.sample(rng));
    product = s.gates.back() * product;
  }
  s.inverse = product.adjoint();
  return s;
}

std::mt19937_64 sequence_rng(std::uint64_t seed, int m, long index) {
  const auto idx = static_cast<std::uint64_t>(index);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(idx),
                    static_cast<std::uint32_t>(idx >> 32)};
  return std::mt19937_64(seq);
}

ComplexMatrix prepared_o_ini(const RBConfig& c) {
  if (!c.spam) return c.o_ini;
  ComplexMatrix out = ComplexMatrix::Zero(c.o_ini.rows(), c.o_ini.cols());
  for (const auto& s : split_states(c.o_ini)) out += s.weight * bit_flip_all(s.rho, c.spam->eta_prep);
  return out;
}

ComplexMatrix measured_o_meas(const RBConfig& c) {
  if (!c.spam || !c.spam->has_readout_error()) return c.o_meas;
  if (!is_diagonal(c.o_meas)) throw DomainError("readout error needs a computational-basis-diagonal O_meas");
  const auto n = c.o_meas.rows();
  const int q = qubits_for_dim(static_cast<int>(n));
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index r = 0; r < n; ++r)
      out(a, a) += confusion(*c.spam, q, static_cast<int>(r), static_cast<int>(a)) * c.o_meas(r, r);
  return out;
}

double run_sequence(const RBConfig& c, int m, std::mt19937_64& rng) { return Engine(c).run(m, rng); }

double jackknife_std_error(const std::vector<double>& values) {
  const auto n = static_cast<double>(values.size());
  if (values.size() < 2) return 0.0;
  double total = 0.0;
  for (double v : values) total += v;
  const double mean = total / n;
  double ss = 0.0;
  for (double v : values) {
    const double loo = (total - v) / (n - 1.0);
    ss += (loo - mean) * (loo - mean);
  }
  return std::sqrt((n - 1.0) / n * ss);
}

DecayCurve v_t_monte_carlo(const RBConfig& c) {
  const Engine engine(c);
  DecayCurve out;
  std::vector<double> y(static_cast<std::size_t>(c.n_sequences));
  for (int m : c.sequence_lengths) {
#ifdef TDESIGN_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (long i = 0; i < c.n_sequences; ++i) {
      auto rng = sequence_rng(c.seed, m, i);
      y[static_cast<std::size_t>(i)] = std::pow(engine.run(m, rng), c.t_order);
    }
    double sum = 0.0;
    for (double v : y) sum += v;
    out.points.push_back({m, sum / static_cast<double>(y.size()), jackknife_std_error(y), c.n_sequences, c.n_shots});
  }
  return out;
}

DecayCurve v2_exact(const PTM& noise, const ComplexMatrix& o_ini, const ComplexMatrix& o_meas,
                    const std::vector<int>& m_list, const irreps::IrrepProjectorSet& p, irreps::MeasuredMap map) {
  require_tp(noise);
  const auto a = irreps::coefficients(o_ini, o_meas, noise, p, map);
  const auto c = irreps::decay_rates(noise, p);
  return exact_curve(m_list, [&](int m) {
    double v = 0.0;
    for (Eigen::Index k = 0; k < a.values.size(); ++k) v += a.values(k) * std::pow(c.values(k), m);
    return v;
  });
}

DecayCurve v1_exact(const PTM& noise, const ComplexMatrix& o_ini, const ComplexMatrix& o_meas,
                    const std::vector<int>& m_list, irreps::MeasuredMap map) {
  require_tp(noise);
  const RealVector ci = irreps::hermitian_coords(o_ini);
  const RealVector cm = meas_coords(noise, o_meas, map);
  const double a0 = ci(0) * cm(0);
  const double a1 = ci.tail(ci.size() - 1).dot(cm.tail(cm.size() - 1));
  const double f = channels::metrics(noise).f;
  return exact_curve(m_list, [&](int m) { return a0 + a1 * std::pow(f, m); });
}

DecayCurve v1_approx_design(const PTM& noise, const ComplexMatrix& o_ini, const ComplexMatrix& o_meas,
                            const std::vector<int>& m_list, const RealMatrix& perturbation, double epsilon,
                            irreps::MeasuredMap map) {
  require_tp(noise);
  const int n = noise.dim();
  if (perturbation.rows() != n || perturbation.cols() != n) throw DimensionError("perturbation must be d^2 x d^2");
  RealMatrix lav = RealMatrix::Identity(n, n) * channels::metrics(noise).f;
  lav(0, 0) = 1.0;
  const RealMatrix step = lav + epsilon * perturbation;
  const RealVector cm = meas_coords(noise, o_meas, map);
  RealVector state = irreps::hermitian_coords(o_ini);
  DecayCurve out;
  int at = 0;
  for (int m : m_list) {
    for (; at < m; ++at) state = step * state;
    out.points.push_back({m, cm.dot(state), 0.0, 0, 0});
  }
  out.validate();
  return out;
}

namespace {

double rate_var(const FitResult& f, int i) {
  const double s = f.rate_std_error(i);
  return s * s;
}

void append_flags(MetricEstimate& e, const FitResult& f, const std::string& tag) {
  for (const auto& flag : f.flags) e.flags.push_back(tag + ":" + flag);
}

// Fills F, H, H_direct and their errors from (f, u, h) and a gradient-based
// covariance over (f, u, h).
void finish_metrics(MetricEstimate& e, double d, const Eigen::Matrix3d& cov_fuh, std::optional<double> alpha_norm_sq) {
  auto& v = e.value;
  const double n = d * d - 1.0;
  const double a2 = alpha_norm_sq.value_or(0.0);
  if (!alpha_norm_sq) e.flags.emplace_back("alpha_assumed_zero");
  v.alpha_norm_sq = a2;
  v.F = ((d - 1.0) * v.f + 1.0) / d;
  v.H = 1.0 - (n / (d * d)) * (v.u - v.h) - ((d + 1.0) / (2.0 * d * d)) * a2;
  v.H_direct = v.H - a2 / (2.0 * d * d);
  auto& s = e.std_error;
  s.f = std::sqrt(cov_fuh(0, 0));
  s.u = std::sqrt(cov_fuh(1, 1));
  s.h = std::sqrt(cov_fuh(2, 2));
  s.F = (d - 1.0) / d * s.f;
  const Eigen::Vector3d g_h(0.0, -n / (d * d), n / (d * d));
  s.H = s.H_direct = std::sqrt(std::max(0.0, g_h.dot(cov_fuh * g_h)));
}

}  // namespace

MetricEstimate estimate_metrics_1q(const DecayCurve& v1, const DecayCurve& v2, std::optional<double> alpha_norm_sq,
                                   const fit::FitOptions& opts) {
  MetricEstimate e;
  const auto f1 = fit::fit_exponentials(v1, 1, {}, opts);
  const auto f2 = fit::fit_exponentials(v2, 2, {}, opts);
  append_flags(e, f1, "v1");
  append_flags(e, f2, "v2");
  const double f = f1.rates(0);
  const double u = f2.rates(0), c2 = f2.rates(1);  // descending order
  auto& v = e.value;
  v.f = f;
  v.u = u;
  v.h = (10.0 / 3.0) * (c2 - 0.9 * f * f + 0.2 * u);

  // Covariance of (f, u, c2): f independent of the v2 fit.
  Eigen::Matrix3d cov_fuc = Eigen::Matrix3d::Zero();
  cov_fuc(0, 0) = rate_var(f1, 0);
  const auto base = f2.amplitudes.size();
  if (f2.covariance.rows() >= base + 2) cov_fuc.bottomRightCorner<2, 2>() = f2.covariance.block(base, base, 2, 2);
  Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();  // d(f, u, h)/d(f, u, c2)
  jac(0, 0) = 1.0;
  jac(1, 1) = 1.0;
  jac.row(2) << (10.0 / 3.0) * (-1.8 * f), (10.0 / 3.0) * 0.2, 10.0 / 3.0;
  finish_metrics(e, 2.0, jac * cov_fuc * jac.transpose(), alpha_norm_sq);
  e.fits = {f1, f2};
  return e;
}

TwoQubitEstimate estimate_metrics_2q(const TwoQubitCurves& curves, std::optional<double> u_external,
                                     std::optional<double> alpha_norm_sq, const fit::FitOptions& opts) {
  TwoQubitEstimate out;
  auto& e = out.metrics;
  const auto fv1 = fit::fit_exponentials(curves.v1, 1, {}, opts);
  const auto fc1 = fit::fit_exponentials(curves.zz_00, 2, {}, opts);
  append_flags(e, fv1, "v1");
  append_flags(e, fc1, "zz_00");

  int iu = 0;
  if (u_external) {
    iu = std::abs(fc1.rates(0) - *u_external) <= std::abs(fc1.rates(1) - *u_external) ? 0 : 1;
  } else {
    e.flags.emplace_back("u_assigned_by_order");
  }
  const double u = fc1.rates(iu), c_i = fc1.rates(1 - iu);
  const auto fc2 = fit::fit_exponentials(curves.zz_zz, 1, {u, c_i}, opts);
  append_flags(e, fc2, "zz_zz");
  const double c_ii = fc2.rates(2);
  const auto fc3 = fit::fit_exponentials(curves.rm_rm, 1, {u, c_i, c_ii}, opts);
  append_flags(e, fc3, "rm_rm");
  const double c_iii = fc3.rates(3);

  out.rates.value = {{IrrepLabel::Zero, IrrepLabel::I, IrrepLabel::II, IrrepLabel::III},
                     (RealVector(4) << u, c_i, c_ii, c_iii).finished()};
  out.rates.std_error = (RealVector(4) << fc1.rate_std_error(iu), fc1.rate_std_error(1 - iu), fc2.rate_std_error(2),
                         fc3.rate_std_error(3))
                            .finished();

  // 84 C_I + 20 C_II + 15 C_III = (225/2) f^2 - u + (15/2) h at d = 4.
  const double d = 4.0, n = d * d - 1.0;
  const double f = fv1.rates(0);
  const double sum = 84.0 * c_i + 20.0 * c_ii + 15.0 * c_iii;
  auto& v = e.value;
  v.f = f;
  v.u = u;
  v.h = (2.0 / n) * (sum + u - 0.5 * n * n * f * f);

  // Stage errors treated as independent.
  const RealVector se = out.rates.std_error;
  const double var_f = rate_var(fv1, 0);
  const double dh_df = -(2.0 / n) * n * n * f;
  const double dh_du = 2.0 / n;
  const double var_sum = std::pow(84.0 * se(1), 2) + std::pow(20.0 * se(2), 2) + std::pow(15.0 * se(3), 2);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  cov(0, 0) = var_f;
  cov(1, 1) = se(0) * se(0);
  cov(2, 2) = dh_df * dh_df * var_f + dh_du * dh_du * se(0) * se(0) + std::pow(2.0 / n, 2) * var_sum;
  cov(0, 2) = cov(2, 0) = dh_df * var_f;
  cov(1, 2) = cov(2, 1) = dh_du * se(0) * se(0);
  finish_metrics(e, d, cov, alpha_norm_sq);
  e.fits = {fv1, fc1, fc2, fc3};
  return out;
}

ComplexMatrix op_zz() { return kron(pauli_z(), pauli_z()); }

ComplexMatrix op_p00() {
  ComplexMatrix p = ComplexMatrix::Zero(4, 4);
  p(0, 0) = 1.0;
  return p;
}

ComplexMatrix op_rho_minus() {
  ComplexMatrix p = ComplexMatrix::Zero(4, 4);
  p(0, 0) = 1.0;
  p(3, 3) = -1.0;
  return p;
}

}  // namespace tdesign::rb
