#pragma once

#include <random>

#ifdef TDESIGN_HAVE_OPENMP
#include <omp.h>
#endif

namespace tdesign {

template <class Rng>
ComplexMatrix haar_unitary(int d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix z(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = cplx(normal(rng), normal(rng)) / std::sqrt(2.0);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const cplx rjj = r(j, j);
    const double mag = std::abs(rjj);
    const cplx ph = mag > 0 ? rjj / mag : cplx(1.0, 0.0);
    q.col(j) *= ph;
  }
  return q;
}

template <class T, class Body>
T chunked_sum(std::size_t n, T zero, Body&& body, std::size_t chunk) {
  if (chunk == 0) chunk = 1;
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<T> partial(n_chunks, zero);
#ifdef TDESIGN_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    body(begin, end, partial[static_cast<std::size_t>(c)]);
  }
  T total = zero;
  for (const auto& p : partial) total += p;
  return total;
}

}  // namespace tdesign
