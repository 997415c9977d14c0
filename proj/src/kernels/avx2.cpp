#include "hmnc/kernels.hpp"

#if defined(HMNC_HAVE_AVX2_TU)

#include <immintrin.h>

namespace hmnc::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void weighted_gram_avx2(const double* B, const double* w, std::size_t nq, std::size_t J, double* K) {
  for (std::size_t q = 0; q < nq; ++q) {
    const double* row = B + q * J;
    for (std::size_t i = 0; i < J; ++i) {
      const double s = w[q] * row[i];
      const __m256d vs = _mm256_set1_pd(s);
      double* krow = K + i * J;
      std::size_t j = 0;
      for (; j + 4 <= J; j += 4) {
        _mm256_storeu_pd(krow + j,
                         _mm256_fmadd_pd(vs, _mm256_loadu_pd(row + j), _mm256_loadu_pd(krow + j)));
      }
      for (; j < J; ++j) krow[j] += s * row[j];
    }
  }
}

double weighted_dot_avx2(const double* x, const double* y, const double* w, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wx = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i));
    acc = _mm256_fmadd_pd(wx, _mm256_loadu_pd(y + i), acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += w[i] * x[i] * y[i];
  return hsum(acc) + tail;
}

void gemv_accumulate_avx2(const double* B, const double* c, std::size_t nq, std::size_t J, double* y) {
  for (std::size_t q = 0; q < nq; ++q) {
    const double* row = B + q * J;
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= J; j += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(c + j), acc);
    double tail = 0.0;
    for (; j < J; ++j) tail += row[j] * c[j];
    y[q] += hsum(acc) + tail;
  }
}

constexpr KernelTable kAvx2{"avx2", axpy_avx2, weighted_gram_avx2, weighted_dot_avx2, gemv_accumulate_avx2};

}  // namespace

const KernelTable* avx2_table_unchecked() { return &kAvx2; }

}  // namespace hmnc::kernels

#else

namespace hmnc::kernels {
const KernelTable* avx2_table_unchecked() { return nullptr; }
}  // namespace hmnc::kernels

#endif
