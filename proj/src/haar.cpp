#include "tdesign/haar.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <random>

namespace tdesign::haar {

std::vector<Permutation> all_permutations(int t) {
  Permutation p(static_cast<std::size_t>(t));
  std::iota(p.begin(), p.end(), 0);
  std::vector<Permutation> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

int cycle_count(const Permutation& p) {
  std::vector<char> seen(p.size(), 0);
  int cycles = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    ++cycles;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(p[j])) seen[j] = 1;
  }
  return cycles;
}

Permutation inverse(const Permutation& p) {
  Permutation inv(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) inv[static_cast<std::size_t>(p[k])] = static_cast<int>(k);
  return inv;
}

Permutation compose(const Permutation& a, const Permutation& b) {
  Permutation c(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) c[k] = a[static_cast<std::size_t>(b[k])];
  return c;
}

namespace {

std::int64_t ipow(std::int64_t base, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Index of the basis state obtained by moving factor k of `j` to sigma(k).
std::int64_t permuted_index(std::int64_t j, const Permutation& sigma, int d, std::vector<int>& digits,
                            std::vector<int>& out_digits) {
  const int t = static_cast<int>(sigma.size());
  for (int k = t - 1; k >= 0; --k) {
    digits[static_cast<std::size_t>(k)] = static_cast<int>(j % d);
    j /= d;
  }
  for (int k = 0; k < t; ++k)
    out_digits[static_cast<std::size_t>(sigma[static_cast<std::size_t>(k)])] = digits[static_cast<std::size_t>(k)];
  std::int64_t i = 0;
  for (int k = 0; k < t; ++k) i = i * d + out_digits[static_cast<std::size_t>(k)];
  return i;
}

void require_perm(const Permutation& sigma) {
  std::vector<char> seen(sigma.size(), 0);
  for (int v : sigma) {
    if (v < 0 || static_cast<std::size_t>(v) >= sigma.size() || seen[static_cast<std::size_t>(v)])
      throw DomainError("not a permutation");
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

}  // namespace

ComplexMatrix perm_operator(const Permutation& sigma, int d) {
  const int t = static_cast<int>(sigma.size());
  if (t < 1 || d < 1) throw DimensionError("perm_operator: need t >= 1 and d >= 1");
  require_perm(sigma);
  const std::int64_t n = ipow(d, t);
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  std::vector<int> digits(static_cast<std::size_t>(t)), out(static_cast<std::size_t>(t));
  for (std::int64_t j = 0; j < n; ++j) p(permuted_index(j, sigma, d, digits, out), j) = 1.0;
  return p;
}

RealMatrix permutation_gram(int d, int t) {
  const auto perms = all_permutations(t);
  const auto n = static_cast<Eigen::Index>(perms.size());
  RealMatrix g(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const Permutation ainv = inverse(perms[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = 0; b < n; ++b)
      g(a, b) = std::pow(static_cast<double>(d), cycle_count(compose(ainv, perms[static_cast<std::size_t>(b)])));
  }
  return g;
}

MomentOperator::MomentOperator(int d, int t, ComplexMatrix basis, RealMatrix coeffs, RealMatrix gram, int rank)
    : d_(d), t_(t), basis_(std::move(basis)), coeffs_(std::move(coeffs)), gram_(std::move(gram)), rank_(rank) {}

double MomentOperator::trace() const { return (coeffs_ * gram_).trace(); }

ComplexVector MomentOperator::apply(const ComplexVector& v) const {
  if (v.size() != basis_.rows()) throw DimensionError("MomentOperator::apply: size mismatch");
  const ComplexVector overlaps = basis_.adjoint() * v;
  return basis_ * (coeffs_.cast<cplx>() * overlaps);
}

ComplexMatrix MomentOperator::matrix(std::int64_t max_dim) const {
  if (dim() > max_dim) throw DimensionError("MomentOperator::matrix: dimension " + std::to_string(dim()) +
                                            " exceeds dense limit " + std::to_string(max_dim));
  return basis_ * coeffs_.cast<cplx>() * basis_.adjoint();
}

double MomentOperator::frobenius_of(const RealMatrix& x) const {
  // ||B X B^dag||_F^2 = tr(X G X^T G) with G = B^dag B real symmetric.
  const double sq = (x * gram_ * x.transpose() * gram_).trace();
  return std::sqrt(std::max(0.0, sq));
}

double MomentOperator::hermiticity_residual() const { return frobenius_of(coeffs_ - coeffs_.transpose()); }

double MomentOperator::idempotence_residual() const {
  return frobenius_of(coeffs_ * gram_ * coeffs_ - coeffs_);
}

MomentOperator haar_moment_projector(int d, int t, std::int64_t cap) {
  if (d < 1 || t < 1) throw DimensionError("haar_moment_projector: need d >= 1, t >= 1");
  if (t > 8) throw DimensionError("haar_moment_projector: t > 8 is not supported");
  const std::int64_t dt = ipow(d, t);
  if (dt > cap / dt) throw DimensionError("haar_moment_projector: d^(2t) = " + std::to_string(dt) + "^2 exceeds cap " +
                                          std::to_string(cap));
  const auto perms = all_permutations(t);
  const auto r = static_cast<Eigen::Index>(perms.size());
  ComplexMatrix basis = ComplexMatrix::Zero(dt * dt, r);
  std::vector<int> digits(static_cast<std::size_t>(t)), out(static_cast<std::size_t>(t));
  for (Eigen::Index c = 0; c < r; ++c) {
    const auto& sigma = perms[static_cast<std::size_t>(c)];
    for (std::int64_t j = 0; j < dt; ++j) basis(permuted_index(j, sigma, d, digits, out) * dt + j, c) = 1.0;
  }
  RealMatrix gram = permutation_gram(d, t);
  auto pinv = pinv_psd(gram);
  return MomentOperator(d, t, std::move(basis), std::move(pinv.pinv), std::move(gram), pinv.rank);
}

std::int64_t haar_frame_potential(int d, int t) {
  if (t < 1 || d < 1) throw DimensionError("haar_frame_potential: need d, t >= 1");
  if (t > 6) return haar_frame_potential_rsk(d, t);
  return pinv_psd(permutation_gram(d, t)).rank;
}

namespace {

void partitions_rec(int remaining, int max_part, int max_len, std::vector<int>& cur,
                    std::vector<std::vector<int>>& out) {
  if (remaining == 0) {
    out.push_back(cur);
    return;
  }
  if (static_cast<int>(cur.size()) == max_len) return;
  for (int p = std::min(remaining, max_part); p >= 1; --p) {
    cur.push_back(p);
    partitions_rec(remaining - p, p, max_len, cur, out);
    cur.pop_back();
  }
}

// Number of standard Young tableaux by the hook length formula.
std::int64_t standard_tableaux(const std::vector<int>& shape) {
  int n = 0;
  for (int p : shape) n += p;
  std::vector<int> conj(static_cast<std::size_t>(shape.empty() ? 0 : shape[0]), 0);
  for (int p : shape)
    for (int j = 0; j < p; ++j) ++conj[static_cast<std::size_t>(j)];
  long double value = 1.0L;
  for (int k = 2; k <= n; ++k) value *= k;
  for (std::size_t i = 0; i < shape.size(); ++i)
    for (int j = 0; j < shape[i]; ++j) {
      const int hook = (shape[i] - j - 1) + (conj[static_cast<std::size_t>(j)] - static_cast<int>(i) - 1) + 1;
      value /= hook;
    }
  return static_cast<std::int64_t>(std::llround(static_cast<double>(value)));
}

}  // namespace

std::int64_t haar_frame_potential_rsk(int d, int t) {
  if (t > 12) throw DimensionError("haar_frame_potential_rsk: t > 12 is not supported");
  std::vector<std::vector<int>> parts;
  std::vector<int> cur;
  partitions_rec(t, t, d, cur, parts);
  std::int64_t total = 0;
  for (const auto& shape : parts) {
    const std::int64_t f = standard_tableaux(shape);
    total += f * f;
  }
  return total;
}

RealMatrix haar_twirl_ptm2(const RealMatrix& x, int d) {
  const int q = qubits_for_dim(d);
  const int d2 = d * d;
  const int n = d2 * d2;
  if (x.rows() != n || x.cols() != n)
    throw DimensionError("haar_twirl_ptm2: expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");

  // L_U^{(x)2} = (P (x) P)^dag (U (x) conj U (x) U (x) conj U) (P (x) P), factor
  // order (i1, k1, i2, k2). The commutant of that representation is spanned by
  // the permutation operators of S_4 partially transposed on factors 1 and 3.
  const ComplexMatrix p1 = pauli_vec_matrix(q);
  const ComplexMatrix pp = kron(p1, p1);
  const ComplexMatrix y = pp * x.cast<cplx>() * pp.adjoint();

  const auto perms = all_permutations(4);
  const auto r = static_cast<Eigen::Index>(perms.size());
  // Each Q is a 0/1 matrix with n nonzero entries (a partial transpose moves
  // entries but keeps their count); store them as sorted (row, col) lists.
  std::vector<std::vector<std::pair<int, int>>> entries(perms.size());
  for (std::size_t c = 0; c < perms.size(); ++c) {
    const auto& sigma = perms[c];
    auto& list = entries[c];
    list.reserve(static_cast<std::size_t>(n));
    for (int col = 0; col < n; ++col) {
      int jd[4], id[4];
      int tmp = col;
      for (int k = 3; k >= 0; --k) {
        jd[k] = tmp % d;
        tmp /= d;
      }
      for (int k = 0; k < 4; ++k) id[sigma[static_cast<std::size_t>(k)]] = jd[k];
      // Partial transpose on factors 1 and 3 swaps the row and column digit there.
      std::swap(id[1], jd[1]);
      std::swap(id[3], jd[3]);
      int row = 0, pcol = 0;
      for (int k = 0; k < 4; ++k) {
        row = row * d + id[k];
        pcol = pcol * d + jd[k];
      }
      list.emplace_back(row, pcol);
    }
    std::sort(list.begin(), list.end());
  }

  RealMatrix gram(r, r);
  for (Eigen::Index a = 0; a < r; ++a)
    for (Eigen::Index b = 0; b < r; ++b) {
      const auto& ea = entries[static_cast<std::size_t>(a)];
      const auto& eb = entries[static_cast<std::size_t>(b)];
      std::vector<std::pair<int, int>> common;
      std::set_intersection(ea.begin(), ea.end(), eb.begin(), eb.end(), std::back_inserter(common));
      gram(a, b) = static_cast<double>(common.size());
    }
  const auto pinv = pinv_psd(gram);

  ComplexVector overlaps(r);
  for (Eigen::Index a = 0; a < r; ++a) {
    cplx s = 0.0;
    for (const auto& [row, col] : entries[static_cast<std::size_t>(a)]) s += y(row, col);
    overlaps(a) = s;  // tr(Q_a^T Y), Q real
  }
  const ComplexVector weights = pinv.pinv.cast<cplx>() * overlaps;

  ComplexMatrix twirled = ComplexMatrix::Zero(n, n);
  for (Eigen::Index a = 0; a < r; ++a)
    for (const auto& [row, col] : entries[static_cast<std::size_t>(a)]) twirled(row, col) += weights(a);

  return (pp.adjoint() * twirled * pp).real();
}

Estimate haar_frame_potential_mc(int d, int t, std::int64_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t s = 0; s < samples; ++s) {
    const ComplexMatrix u = haar_unitary(d, rng);
    const double v = std::pow(std::norm(u.trace()), t);
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq / n - mean * mean) * n / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

}  // namespace tdesign::haar
