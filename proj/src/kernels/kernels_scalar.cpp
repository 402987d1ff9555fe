#include "gca/kernels.hpp"

#include <cmath>
#include <cstring>

// Reference kernels. Plain loops, no manual vector width assumptions; these
// define the numeric contract the SIMD variants are tested against.

namespace gca::kern::scalar {

void gemm_nn(std::size_t m, std::size_t n, std::size_t k,
             const double* A, std::size_t lda,
             const double* B, std::size_t ldb,
             double* C, std::size_t ldc, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    double* c = C + i * ldc;
    if (!accumulate) std::memset(c, 0, n * sizeof(double));
    const double* a = A + i * lda;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[p];
      if (av == 0.0) continue;
      const double* b = B + p * ldb;
      for (std::size_t j = 0; j < n; ++j) c[j] += av * b[j];
    }
  }
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k,
             const double* A, std::size_t lda,
             const double* B, std::size_t ldb,
             double* C, std::size_t ldc, bool accumulate) {
  if (!accumulate) {
    for (std::size_t i = 0; i < m; ++i) std::memset(C + i * ldc, 0, n * sizeof(double));
  }
  for (std::size_t p = 0; p < k; ++p) {
    const double* a = A + p * lda;
    const double* b = B + p * ldb;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = a[i];
      if (av == 0.0) continue;
      double* c = C + i * ldc;
      for (std::size_t j = 0; j < n; ++j) c[j] += av * b[j];
    }
  }
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k,
             const double* A, std::size_t lda,
             const double* B, std::size_t ldb,
             double* C, std::size_t ldc, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = A + i * lda;
    double* c = C + i * ldc;
    for (std::size_t j = 0; j < n; ++j) {
      const double* b = B + j * ldb;
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[p] * b[p];
      if (accumulate) c[j] += s; else c[j] = s;
    }
  }
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal(std::size_t n, double a, double* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void vmul(std::size_t n, const double* x, const double* y, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void vmul_acc(std::size_t n, const double* x, const double* y, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] += x[i] * y[i];
}

void vadd(std::size_t n, const double* x, const double* y, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + y[i];
}

void vsub(std::size_t n, const double* x, const double* y, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - y[i];
}

double dot(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum(std::size_t n, const double* x) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double asum(std::size_t n, const double* x) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::abs(x[i]);
  return s;
}

double sumsq(std::size_t n, const double* x) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

void add_bias_rows(std::size_t m, std::size_t n, const double* bias,
                   double* Y, std::size_t ldy) {
  for (std::size_t i = 0; i < m; ++i) {
    double* y = Y + i * ldy;
    for (std::size_t j = 0; j < n; ++j) y[j] += bias[j];
  }
}

void colsum_acc(std::size_t m, std::size_t n, const double* X, std::size_t ldx,
                double* out) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* x = X + i * ldx;
    for (std::size_t j = 0; j < n; ++j) out[j] += x[j];
  }
}

void tanh_bwd_acc(std::size_t n, const double* y, const double* dy, double* dx) {
  for (std::size_t i = 0; i < n; ++i) dx[i] += dy[i] * (1.0 - y[i] * y[i]);
}

void sigmoid_bwd_acc(std::size_t n, const double* y, const double* dy, double* dx) {
  for (std::size_t i = 0; i < n; ++i) dx[i] += dy[i] * y[i] * (1.0 - y[i]);
}

}  // namespace gca::kern::scalar
