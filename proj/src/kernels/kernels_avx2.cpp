// AVX2+FMA kernel variants. This translation unit is the only one compiled
// with -mavx2 -mfma; it must not be entered unless avx2_supported() is true.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstring>

#include "gca/kernels.hpp"

namespace gca::kern::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// c[0..n) += a*b[0..n)
inline void fma_row(double a, const double* b, double* c, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    __m256d c0 = _mm256_loadu_pd(c + j);
    __m256d c1 = _mm256_loadu_pd(c + j + 4);
    c0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b + j), c0);
    c1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b + j + 4), c1);
    _mm256_storeu_pd(c + j, c0);
    _mm256_storeu_pd(c + j + 4, c1);
  }
  for (; j + 4 <= n; j += 4) {
    __m256d c0 = _mm256_loadu_pd(c + j);
    c0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b + j), c0);
    _mm256_storeu_pd(c + j, c0);
  }
  for (; j < n; ++j) c[j] += a * b[j];
}

}  // namespace

void gemm_nn(std::size_t m, std::size_t n, std::size_t k,
             const double* A, std::size_t lda,
             const double* B, std::size_t ldb,
             double* C, std::size_t ldc, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    double* c = C + i * ldc;
    if (!accumulate) std::memset(c, 0, n * sizeof(double));
    const double* a = A + i * lda;
    for (std::size_t p = 0; p < k; ++p) {
      if (a[p] == 0.0) continue;
      fma_row(a[p], B + p * ldb, c, n);
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
      if (a[i] == 0.0) continue;
      fma_row(a[i], b, C + i * ldc, n);
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
      __m256d acc0 = _mm256_setzero_pd();
      __m256d acc1 = _mm256_setzero_pd();
      std::size_t p = 0;
      for (; p + 8 <= k; p += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + p), _mm256_loadu_pd(b + p), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + p + 4), _mm256_loadu_pd(b + p + 4), acc1);
      }
      for (; p + 4 <= k; p += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + p), _mm256_loadu_pd(b + p), acc0);
      }
      double s = hsum(_mm256_add_pd(acc0, acc1));
      for (; p < k; ++p) s += a[p] * b[p];
      if (accumulate) c[j] += s; else c[j] = s;
    }
  }
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  fma_row(a, x, y, n);
}

void scal(std::size_t n, double a, double* x) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

void vmul(std::size_t n, const double* x, const double* y, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

void vmul_acc(std::size_t n, const double* x, const double* y, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d o = _mm256_loadu_pd(out + i);
    o = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), o);
    _mm256_storeu_pd(out + i, o);
  }
  for (; i < n; ++i) out[i] += x[i] * y[i];
}

void vadd(std::size_t n, const double* x, const double* y, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) out[i] = x[i] + y[i];
}

void vsub(std::size_t n, const double* x, const double* y, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) out[i] = x[i] - y[i];
}

double dot(std::size_t n, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum(std::size_t n, const double* x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double asum(std::size_t n, const double* x) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFll));
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_and_pd(mask, _mm256_loadu_pd(x + i)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += std::abs(x[i]);
  return s;
}

double sumsq(std::size_t n, const double* x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void add_bias_rows(std::size_t m, std::size_t n, const double* bias,
                   double* Y, std::size_t ldy) {
  for (std::size_t i = 0; i < m; ++i) {
    double* y = Y + i * ldy;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      _mm256_storeu_pd(y + j, _mm256_add_pd(_mm256_loadu_pd(y + j), _mm256_loadu_pd(bias + j)));
    }
    for (; j < n; ++j) y[j] += bias[j];
  }
}

void colsum_acc(std::size_t m, std::size_t n, const double* X, std::size_t ldx,
                double* out) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* x = X + i * ldx;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(out + j), _mm256_loadu_pd(x + j)));
    }
    for (; j < n; ++j) out[j] += x[j];
  }
}

void tanh_bwd_acc(std::size_t n, const double* y, const double* dy, double* dx) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yv = _mm256_loadu_pd(y + i);
    const __m256d g = _mm256_fnmadd_pd(yv, yv, one);  // 1 - y^2
    __m256d d = _mm256_loadu_pd(dx + i);
    d = _mm256_fmadd_pd(_mm256_loadu_pd(dy + i), g, d);
    _mm256_storeu_pd(dx + i, d);
  }
  for (; i < n; ++i) dx[i] += dy[i] * (1.0 - y[i] * y[i]);
}

void sigmoid_bwd_acc(std::size_t n, const double* y, const double* dy, double* dx) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yv = _mm256_loadu_pd(y + i);
    const __m256d g = _mm256_mul_pd(yv, _mm256_sub_pd(one, yv));
    __m256d d = _mm256_loadu_pd(dx + i);
    d = _mm256_fmadd_pd(_mm256_loadu_pd(dy + i), g, d);
    _mm256_storeu_pd(dx + i, d);
  }
  for (; i < n; ++i) dx[i] += dy[i] * y[i] * (1.0 - y[i]);
}

}  // namespace gca::kern::avx2

#endif  // x86_64
