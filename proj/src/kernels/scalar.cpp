#include "hmnc/kernels.hpp"

namespace hmnc::kernels {
namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void weighted_gram_scalar(const double* B, const double* w, std::size_t nq, std::size_t J, double* K) {
  for (std::size_t q = 0; q < nq; ++q) {
    const double* row = B + q * J;
    for (std::size_t i = 0; i < J; ++i) {
      const double s = w[q] * row[i];
      double* krow = K + i * J;
      for (std::size_t j = 0; j < J; ++j) krow[j] += s * row[j];
    }
  }
}

double weighted_dot_scalar(const double* x, const double* y, const double* w, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * x[i] * y[i];
  return acc;
}

void gemv_accumulate_scalar(const double* B, const double* c, std::size_t nq, std::size_t J, double* y) {
  for (std::size_t q = 0; q < nq; ++q) {
    const double* row = B + q * J;
    double acc = 0.0;
    for (std::size_t j = 0; j < J; ++j) acc += row[j] * c[j];
    y[q] += acc;
  }
}

constexpr KernelTable kScalar{"scalar", axpy_scalar, weighted_gram_scalar, weighted_dot_scalar,
                              gemv_accumulate_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace hmnc::kernels
