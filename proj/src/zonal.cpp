#include "tdesign/zonal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace tdesign::zonal {

int SphericalLabel::size() const {
  int s = 0;
  for (int p : positive_part) s += p;
  return s;
}

namespace {

void partitions_of(int n, int max_part, int max_len, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  if (static_cast<int>(cur.size()) == max_len) return;
  for (int p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    partitions_of(n - p, p, max_len, cur, out);
    cur.pop_back();
  }
}

// Jacobi P_n^{(a, 0)}(y) for n = 0..k by the three-term recurrence.
template <class T, class MulY>
std::vector<T> jacobi_sequence(int k, int a, T one, MulY mul_y) {
  std::vector<T> p;
  p.push_back(one);
  if (k == 0) return p;
  // P_1 = (a + 1) + (a + 2)(y - 1)/2 = (a/2) + (a + 2)/2 * y
  p.push_back(one * (0.5 * a) + mul_y(one) * (0.5 * (a + 2)));
  for (int n = 2; n <= k; ++n) {
    const double c1 = 2.0 * n * (n + a) * (2.0 * n + a - 2);
    const double c2 = (2.0 * n + a - 1) * (2.0 * n + a) * (2.0 * n + a - 2);
    const double c3 = (2.0 * n + a - 1) * a * a;
    const double c4 = 2.0 * (n + a - 1) * (n - 1) * (2.0 * n + a);
    const T& pm1 = p[static_cast<std::size_t>(n - 1)];
    const T& pm2 = p[static_cast<std::size_t>(n - 2)];
    p.push_back((mul_y(pm1) * c2 + pm1 * c3 - pm2 * c4) * (1.0 / c1));
  }
  return p;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::vector<SphericalLabel> enumerate_sph_labels(int d1, int d, int t) {
  if (d1 < 1 || 2 * d1 > d) throw DomainError("enumerate_sph_labels: need 1 <= d1 <= d/2");
  std::vector<SphericalLabel> out;
  for (int s = 1; s <= t; ++s) {
    std::vector<std::vector<int>> parts;
    std::vector<int> cur;
    partitions_of(s, s, d1, cur, parts);
    for (auto& p : parts) out.push_back({std::move(p), d1, d});
  }
  return out;
}

ZonalPolynomial::ZonalPolynomial(int k, int d) : k_(k), d_(d) {
  if (k < 0 || d < 2) throw DomainError("zonal polynomial: need k >= 0 and d >= 2");
  // Monomial form: substitute y = 2x - 1 into the recurrence on coefficient vectors.
  const auto mul_y = [](const RealVector& c) {
    RealVector out = RealVector::Zero(c.size() + 1);
    out.tail(c.size()) += 2.0 * c;
    out.head(c.size()) -= c;
    return out;
  };
  const auto pad = [](const RealVector& c, Eigen::Index n) {
    RealVector out = RealVector::Zero(n);
    out.head(c.size()) = c;
    return out;
  };
  std::vector<RealVector> p{RealVector::Ones(1)};
  const int a = d - 2;
  p.push_back(pad(RealVector::Constant(1, 0.5 * a), 2) + mul_y(RealVector::Ones(1)) * (0.5 * (a + 2)));
  for (int n = 2; n <= k; ++n) {
    const double c1 = 2.0 * n * (n + a) * (2.0 * n + a - 2);
    const double c2 = (2.0 * n + a - 1) * (2.0 * n + a) * (2.0 * n + a - 2);
    const double c3 = (2.0 * n + a - 1) * a * a;
    const double c4 = 2.0 * (n + a - 1) * (n - 1) * (2.0 * n + a);
    const RealVector& pm1 = p[static_cast<std::size_t>(n - 1)];
    const RealVector& pm2 = p[static_cast<std::size_t>(n - 2)];
    p.push_back((mul_y(pm1) * c2 + pad(pm1, n + 1) * c3 - pad(pm2, n + 1) * c4) / c1);
  }
  coeffs_ = p[static_cast<std::size_t>(k)] / binomial(k + a, k);
}

double ZonalPolynomial::operator()(double x) const {
  const double y = 2.0 * x - 1.0;
  const int a = d_ - 2;
  const auto seq = jacobi_sequence<double>(k_, a, 1.0, [y](double v) { return v * y; });
  return seq.back() / binomial(k_ + a, k_);
}

std::vector<double> ZonalPolynomial::roots() const {
  if (k_ == 0) return {};
  // Sample for sign changes, refining the grid until all k simple roots are bracketed.
  for (int grid = 10 * k_; grid <= (1 << 20); grid *= 2) {
    std::vector<std::pair<double, double>> brackets;
    double x_prev = 0.0;
    double f_prev = (*this)(0.0);
    for (int i = 1; i < grid; ++i) {
      const double x = static_cast<double>(i) / grid;
      const double f = (*this)(x);
      if (f == 0.0) {
        brackets.emplace_back(x, x);  // exact grid hit; the next sample restarts the scan
      } else if (f_prev != 0.0 && (f_prev < 0.0) != (f < 0.0)) {
        brackets.emplace_back(x_prev, x);
      }
      x_prev = x;
      f_prev = f;
    }
    if (f_prev != 0.0 && (f_prev < 0.0) != ((*this)(1.0) < 0.0)) brackets.emplace_back(x_prev, 1.0);
    if (static_cast<int>(brackets.size()) != k_) continue;
    std::vector<double> out;
    for (auto [lo, hi] : brackets) {
      double flo = (*this)(lo);
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = (*this)(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      const double r = std::abs((*this)(lo)) <= std::abs((*this)(hi)) ? lo : hi;
      out.push_back(r);
    }
    return out;
  }
  throw Error("zonal polynomial: failed to bracket all roots");
}

ZonalPolynomial zonal_poly_rank1(int k, int d) { return ZonalPolynomial(k, d); }

AngleSolution find_angles(const SphericalLabel& label) {
  if (label.d1 != 1 || label.positive_part.size() != 1)
    throw DomainError("find_angles: only rank-one labels (d1 = 1) are supported");
  const ZonalPolynomial z(label.positive_part[0], label.d);
  const double x_star = z.roots().back();
  if (std::abs(z(x_star)) >= 1e-12) throw Error("find_angles: root refinement did not converge");
  return {label, {std::acos(std::sqrt(x_star))}};
}

Estimate zonal_value_mc(const SphericalLabel& label, const ComplexMatrix& u, std::int64_t samples,
                        std::uint64_t seed) {
  if (label.d1 != 1 || label.positive_part.size() != 1)
    throw DomainError("zonal_value_mc: only rank-one labels are supported");
  if (u.rows() != label.d || !is_unitary(u, 1e-8)) throw DomainError("zonal_value_mc: u must be a d x d unitary");
  constexpr int kBatches = 20;
  if (samples < kBatches) throw DomainError("zonal_value_mc: need at least 20 samples");
  const int k = label.positive_part[0];
  const int n_mom = 2 * k + 1;

  // Per-batch sums of x^j for Haar x = |U_00|^2.
  RealMatrix batch_sums = RealMatrix::Zero(kBatches, n_mom);
  std::mt19937_64 rng(seed);
  for (std::int64_t s = 0; s < samples; ++s) {
    const ComplexMatrix v = haar_unitary(label.d, rng);
    const double x = std::norm(v(0, 0));
    double xp = 1.0;
    for (int j = 0; j < n_mom; ++j) {
      batch_sums(static_cast<Eigen::Index>(s % kBatches), j) += xp;
      xp *= x;
    }
  }
  RealVector batch_counts(kBatches);
  for (int b = 0; b < kBatches; ++b) batch_counts(b) = static_cast<double>(samples / kBatches + (b < samples % kBatches));

  const double xu = std::norm(u(0, 0));
  const auto evaluate = [&](const RealVector& moments) {
    // p_k = x^k minus its projection onto lower powers under the moment functional.
    RealMatrix hankel(k, k);
    RealVector rhs(k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) hankel(i, j) = moments(i + j);
      rhs(i) = moments(i + k);
    }
    const RealVector a = hankel.fullPivLu().solve(rhs);
    const auto p = [&](double x) {
      double v = std::pow(x, k);
      for (int j = 0; j < k; ++j) v -= a(j) * std::pow(x, j);
      return v;
    };
    return p(xu) / p(1.0);
  };

  const RealVector total = batch_sums.colwise().sum().transpose();
  const double n = static_cast<double>(samples);
  const double value = evaluate(total / n);
  RealVector loo(kBatches);
  for (int b = 0; b < kBatches; ++b)
    loo(b) = evaluate((total - batch_sums.row(b).transpose()) / (n - batch_counts(b)));
  const double mean = loo.mean();
  const double var = (loo.array() - mean).square().sum() * (kBatches - 1.0) / kBatches;
  return {value, std::sqrt(var)};
}

double gate_count_estimate(int n_qubits, int t) {
  if (n_qubits < 1 || t < 1) throw DomainError("gate_count_estimate: need N >= 1 and t >= 1");
  return std::exp(std::numbers::pi * std::sqrt(2.0 * t / 3.0) * (n_qubits - 1));
}

std::int64_t partition_count(int n) {
  if (n < 0) throw DomainError("partition_count: n must be nonnegative");
  std::vector<std::int64_t> p(static_cast<std::size_t>(n) + 1, 0);
  p[0] = 1;
  for (int m = 1; m <= n; ++m) {
    std::int64_t acc = 0;
    for (int j = 1;; ++j) {
      const int g1 = j * (3 * j - 1) / 2;
      if (g1 > m) break;
      const int sign = (j % 2 == 1) ? 1 : -1;
      acc += sign * p[static_cast<std::size_t>(m - g1)];
      const int g2 = j * (3 * j + 1) / 2;
      if (g2 <= m) acc += sign * p[static_cast<std::size_t>(m - g2)];
    }
    p[static_cast<std::size_t>(m)] = acc;
  }
  return p[static_cast<std::size_t>(n)];
}

}  // namespace tdesign::zonal
