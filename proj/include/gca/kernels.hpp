#pragma once

#include <cstddef>

// Data-parallel inner loops behind the autodiff ops. Every routine has a
// scalar reference implementation and (on x86) an AVX2+FMA variant; the
// active variant is chosen once at startup from CPUID and can be overridden
// with the GCA_KERNELS environment variable ("scalar" or "avx2") or
// force_isa(), which the equivalence tests use to compare both paths.
//
// All matrices are row-major with row stride ld.

namespace gca::kern {

enum class Isa { scalar, avx2 };

Isa active_isa();
void force_isa(Isa isa);
bool avx2_supported();
const char* isa_name(Isa isa);

// C(m,n) = A(m,k)·B(k,n) [+ C if accumulate]
void gemm_nn(std::size_t m, std::size_t n, std::size_t k,
             const double* A, std::size_t lda,
             const double* B, std::size_t ldb,
             double* C, std::size_t ldc, bool accumulate);

// C(m,n) = Aᵀ·B with A(k,m), B(k,n) [+ C if accumulate]
void gemm_tn(std::size_t m, std::size_t n, std::size_t k,
             const double* A, std::size_t lda,
             const double* B, std::size_t ldb,
             double* C, std::size_t ldc, bool accumulate);

// C(m,n) = A·Bᵀ with A(m,k), B(n,k) [+ C if accumulate]
void gemm_nt(std::size_t m, std::size_t n, std::size_t k,
             const double* A, std::size_t lda,
             const double* B, std::size_t ldb,
             double* C, std::size_t ldc, bool accumulate);

void axpy(std::size_t n, double a, const double* x, double* y);  // y += a·x
void scal(std::size_t n, double a, double* x);                   // x *= a
void vmul(std::size_t n, const double* x, const double* y, double* out);
void vmul_acc(std::size_t n, const double* x, const double* y, double* out);  // out += x·y
void vadd(std::size_t n, const double* x, const double* y, double* out);
void vsub(std::size_t n, const double* x, const double* y, double* out);

double dot(std::size_t n, const double* x, const double* y);
double sum(std::size_t n, const double* x);
double asum(std::size_t n, const double* x);   // Σ|xᵢ|
double sumsq(std::size_t n, const double* x);  // Σxᵢ²

// Y[i,:] += bias for every row.
void add_bias_rows(std::size_t m, std::size_t n, const double* bias,
                   double* Y, std::size_t ldy);
// out[j] += Σᵢ X[i,j]
void colsum_acc(std::size_t m, std::size_t n, const double* X, std::size_t ldx,
                double* out);

// Transcendentals stay scalar in both variants so the two paths agree bitwise.
void tanh_fwd(std::size_t n, const double* x, double* y);
void sigmoid_fwd(std::size_t n, const double* x, double* y);
// dx += dy·(1−y²) / dx += dy·y·(1−y), y = forward output
void tanh_bwd_acc(std::size_t n, const double* y, const double* dy, double* dx);
void sigmoid_bwd_acc(std::size_t n, const double* y, const double* dy, double* dx);

}  // namespace gca::kern
