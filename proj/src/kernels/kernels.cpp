#include "gca/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace gca::kern {

namespace scalar {
void gemm_nn(std::size_t, std::size_t, std::size_t, const double*, std::size_t,
             const double*, std::size_t, double*, std::size_t, bool);
void gemm_tn(std::size_t, std::size_t, std::size_t, const double*, std::size_t,
             const double*, std::size_t, double*, std::size_t, bool);
void gemm_nt(std::size_t, std::size_t, std::size_t, const double*, std::size_t,
             const double*, std::size_t, double*, std::size_t, bool);
void axpy(std::size_t, double, const double*, double*);
void scal(std::size_t, double, double*);
void vmul(std::size_t, const double*, const double*, double*);
void vmul_acc(std::size_t, const double*, const double*, double*);
void vadd(std::size_t, const double*, const double*, double*);
void vsub(std::size_t, const double*, const double*, double*);
double dot(std::size_t, const double*, const double*);
double sum(std::size_t, const double*);
double asum(std::size_t, const double*);
double sumsq(std::size_t, const double*);
void add_bias_rows(std::size_t, std::size_t, const double*, double*, std::size_t);
void colsum_acc(std::size_t, std::size_t, const double*, std::size_t, double*);
void tanh_bwd_acc(std::size_t, const double*, const double*, double*);
void sigmoid_bwd_acc(std::size_t, const double*, const double*, double*);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void gemm_nn(std::size_t, std::size_t, std::size_t, const double*, std::size_t,
             const double*, std::size_t, double*, std::size_t, bool);
void gemm_tn(std::size_t, std::size_t, std::size_t, const double*, std::size_t,
             const double*, std::size_t, double*, std::size_t, bool);
void gemm_nt(std::size_t, std::size_t, std::size_t, const double*, std::size_t,
             const double*, std::size_t, double*, std::size_t, bool);
void axpy(std::size_t, double, const double*, double*);
void scal(std::size_t, double, double*);
void vmul(std::size_t, const double*, const double*, double*);
void vmul_acc(std::size_t, const double*, const double*, double*);
void vadd(std::size_t, const double*, const double*, double*);
void vsub(std::size_t, const double*, const double*, double*);
double dot(std::size_t, const double*, const double*);
double sum(std::size_t, const double*);
double asum(std::size_t, const double*);
double sumsq(std::size_t, const double*);
void add_bias_rows(std::size_t, std::size_t, const double*, double*, std::size_t);
void colsum_acc(std::size_t, std::size_t, const double*, std::size_t, double*);
void tanh_bwd_acc(std::size_t, const double*, const double*, double*);
void sigmoid_bwd_acc(std::size_t, const double*, const double*, double*);
}  // namespace avx2
#endif

namespace {

std::atomic<Isa> g_isa{Isa::scalar};
std::once_flag g_init;

Isa detect() {
#if defined(__x86_64__) || defined(_M_X64)
  if (const char* env = std::getenv("GCA_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Isa::avx2;
  }
  if (avx2_supported()) return Isa::avx2;
#endif
  return Isa::scalar;
}

inline Isa isa() {
  std::call_once(g_init, [] { g_isa.store(detect()); });
  return g_isa.load(std::memory_order_relaxed);
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return isa(); }

void force_isa(Isa i) {
  std::call_once(g_init, [] {});
  if (i == Isa::avx2 && !avx2_supported()) i = Isa::scalar;
  g_isa.store(i);
}

const char* isa_name(Isa i) { return i == Isa::avx2 ? "avx2" : "scalar"; }

#if defined(__x86_64__) || defined(_M_X64)
#define GCA_DISPATCH(fn, ...)                         \
  do {                                                \
    if (isa() == Isa::avx2) return avx2::fn(__VA_ARGS__); \
    return scalar::fn(__VA_ARGS__);                   \
  } while (0)
#else
#define GCA_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* A,
             std::size_t lda, const double* B, std::size_t ldb, double* C,
             std::size_t ldc, bool acc) {
  GCA_DISPATCH(gemm_nn, m, n, k, A, lda, B, ldb, C, ldc, acc);
}
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* A,
             std::size_t lda, const double* B, std::size_t ldb, double* C,
             std::size_t ldc, bool acc) {
  GCA_DISPATCH(gemm_tn, m, n, k, A, lda, B, ldb, C, ldc, acc);
}
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* A,
             std::size_t lda, const double* B, std::size_t ldb, double* C,
             std::size_t ldc, bool acc) {
  GCA_DISPATCH(gemm_nt, m, n, k, A, lda, B, ldb, C, ldc, acc);
}
void axpy(std::size_t n, double a, const double* x, double* y) {
  GCA_DISPATCH(axpy, n, a, x, y);
}
void scal(std::size_t n, double a, double* x) { GCA_DISPATCH(scal, n, a, x); }
void vmul(std::size_t n, const double* x, const double* y, double* out) {
  GCA_DISPATCH(vmul, n, x, y, out);
}
void vmul_acc(std::size_t n, const double* x, const double* y, double* out) {
  GCA_DISPATCH(vmul_acc, n, x, y, out);
}
void vadd(std::size_t n, const double* x, const double* y, double* out) {
  GCA_DISPATCH(vadd, n, x, y, out);
}
void vsub(std::size_t n, const double* x, const double* y, double* out) {
  GCA_DISPATCH(vsub, n, x, y, out);
}
double dot(std::size_t n, const double* x, const double* y) {
  GCA_DISPATCH(dot, n, x, y);
}
double sum(std::size_t n, const double* x) { GCA_DISPATCH(sum, n, x); }
double asum(std::size_t n, const double* x) { GCA_DISPATCH(asum, n, x); }
double sumsq(std::size_t n, const double* x) { GCA_DISPATCH(sumsq, n, x); }
void add_bias_rows(std::size_t m, std::size_t n, const double* bias, double* Y,
                   std::size_t ldy) {
  GCA_DISPATCH(add_bias_rows, m, n, bias, Y, ldy);
}
void colsum_acc(std::size_t m, std::size_t n, const double* X, std::size_t ldx,
                double* out) {
  GCA_DISPATCH(colsum_acc, m, n, X, ldx, out);
}
void tanh_bwd_acc(std::size_t n, const double* y, const double* dy, double* dx) {
  GCA_DISPATCH(tanh_bwd_acc, n, y, dy, dx);
}
void sigmoid_bwd_acc(std::size_t n, const double* y, const double* dy, double* dx) {
  GCA_DISPATCH(sigmoid_bwd_acc, n, y, dy, dx);
}

#undef GCA_DISPATCH

// Scalar std::tanh / std::exp in both paths: keeps the two ISA paths bitwise
// identical on transcendentals, so dispatch choice cannot perturb training.
void tanh_fwd(std::size_t n, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
}

void sigmoid_fwd(std::size_t n, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) {
    const double v = x[i];
    if (v >= 0.0) {
      const double e = std::exp(-v);
      y[i] = 1.0 / (1.0 + e);
    } else {
      const double e = std::exp(v);
      y[i] = e / (1.0 + e);
    }
  }
}

}  // namespace gca::kern
