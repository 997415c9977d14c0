#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops shared by assembly, interpolation and error
// evaluation. Every entry point has a portable scalar reference and, on x86-64,
// an AVX2/FMA variant. The active table is chosen once at startup from CPUID;
// HMNC_KERNELS=scalar forces the reference path.

namespace hmnc::kernels {

struct KernelTable {
  std::string_view name;

  /// y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);

  /// K(i,j) += sum_q w[q] * B(q,i) * B(q,j); B is nq x J row-major, K is J x J row-major.
  void (*weighted_gram)(const double* B, const double* w, std::size_t nq, std::size_t J, double* K);

  /// sum_i w[i] * x[i] * y[i]
  double (*weighted_dot)(const double* x, const double* y, const double* w, std::size_t n);

  /// y[q] += sum_j B(q,j) * c[j]; B is nq x J row-major.
  void (*gemv_accumulate)(const double* B, const double* c, std::size_t nq, std::size_t J, double* y);
};

const KernelTable& scalar_kernels();

/// Null when the AVX2 unit was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// Table selected for this process.
const KernelTable& active();

}  // namespace hmnc::kernels
