#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "gca/kernels.hpp"
#include "gca/matrix.hpp"
#include "gca/rng.hpp"

using namespace gca;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = rng.uniform(-2.0, 2.0);
  return m;
}

// Plain triple-loop oracle, independent of the kernel implementations.
Matrix gemm_oracle(const Matrix& a, const Matrix& b, bool ta, bool tb) {
  const std::size_t m = ta ? a.cols() : a.rows();
  const std::size_t k = ta ? a.rows() : a.cols();
  const std::size_t n = tb ? b.rows() : b.cols();
  Matrix c(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        const double av = ta ? a(p, i) : a(i, p);
        const double bv = tb ? b(j, p) : b(p, j);
        s += av * bv;
      }
      c(i, j) = s;
    }
  return c;
}

void check_close(const Matrix& got, const Matrix& want, double tol) {
  REQUIRE(got.rows() == want.rows());
  REQUIRE(got.cols() == want.cols());
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double scale = std::max(1.0, std::abs(want[i]));
    CHECK(std::abs(got[i] - want[i]) <= tol * scale);
  }
}

struct IsaGuard {
  kern::Isa saved;
  IsaGuard() : saved(kern::active_isa()) {}
  ~IsaGuard() { kern::force_isa(saved); }
};

const std::vector<std::array<std::size_t, 3>> kGemmShapes = {
    {1, 1, 1}, {3, 5, 7}, {8, 8, 8}, {13, 17, 9}, {64, 33, 50}, {5, 1, 23}, {2, 31, 4}};

}  // namespace

TEST_CASE("gemm variants match triple-loop oracle on both isa paths") {
  IsaGuard guard;
  for (auto isa : {kern::Isa::scalar, kern::Isa::avx2}) {
    if (isa == kern::Isa::avx2 && !kern::avx2_supported()) continue;
    kern::force_isa(isa);
    Rng rng(42);
    for (auto [m, n, k] : kGemmShapes) {
      Matrix a = random_matrix(m, k, rng);
      Matrix b = random_matrix(k, n, rng);
      Matrix c(m, n);
      kern::gemm_nn(m, n, k, a.data(), k, b.data(), n, c.data(), n, false);
      check_close(c, gemm_oracle(a, b, false, false), 1e-12);

      Matrix at = random_matrix(k, m, rng);
      Matrix ct(m, n);
      kern::gemm_tn(m, n, k, at.data(), m, b.data(), n, ct.data(), n, false);
      check_close(ct, gemm_oracle(at, b, true, false), 1e-12);

      Matrix bt = random_matrix(n, k, rng);
      Matrix cnt(m, n);
      kern::gemm_nt(m, n, k, a.data(), k, bt.data(), k, cnt.data(), k >= 1 ? n : n, false);
      check_close(cnt, gemm_oracle(a, bt, false, true), 1e-12);
    }
  }
}

TEST_CASE("gemm accumulate adds onto existing output") {
  Rng rng(7);
  Matrix a = random_matrix(6, 4, rng);
  Matrix b = random_matrix(4, 9, rng);
  Matrix c = random_matrix(6, 9, rng);
  Matrix expect = c;
  Matrix prod = gemm_oracle(a, b, false, false);
  for (std::size_t i = 0; i < expect.size(); ++i) expect[i] += prod[i];
  kern::gemm_nn(6, 9, 4, a.data(), 4, b.data(), 9, c.data(), 9, true);
  check_close(c, expect, 1e-12);
}

TEST_CASE("scalar and avx2 paths agree elementwise") {
  if (!kern::avx2_supported()) return;
  IsaGuard guard;
  Rng rng(123);
  // sizes straddle the vector width to exercise remainder loops
  for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 31u, 64u, 129u}) {
    Matrix x = random_matrix(1, n, rng);
    Matrix y = random_matrix(1, n, rng);

    auto run = [&](kern::Isa isa) {
      kern::force_isa(isa);
      std::vector<double> out;
      Matrix t(1, n), yy = y;
      kern::vmul(n, x.data(), y.data(), t.data());
      out.insert(out.end(), t.data(), t.data() + n);
      kern::vadd(n, x.data(), y.data(), t.data());
      out.insert(out.end(), t.data(), t.data() + n);
      kern::vsub(n, x.data(), y.data(), t.data());
      out.insert(out.end(), t.data(), t.data() + n);
      kern::axpy(n, 1.7, x.data(), yy.data());
      out.insert(out.end(), yy.data(), yy.data() + n);
      out.push_back(kern::dot(n, x.data(), y.data()));
      out.push_back(kern::sum(n, x.data()));
      out.push_back(kern::asum(n, x.data()));
      out.push_back(kern::sumsq(n, x.data()));
      return out;
    };
    auto s = run(kern::Isa::scalar);
    auto v = run(kern::Isa::avx2);
    REQUIRE(s.size() == v.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double scale = std::max({1.0, std::abs(s[i])});
      CHECK(std::abs(s[i] - v[i]) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("gemm equivalence between isa paths") {
  if (!kern::avx2_supported()) return;
  IsaGuard guard;
  Rng rng(99);
  for (auto [m, n, k] : kGemmShapes) {
    Matrix a = random_matrix(m, k, rng);
    Matrix b = random_matrix(k, n, rng);
    Matrix cs(m, n), cv(m, n);
    kern::force_isa(kern::Isa::scalar);
    kern::gemm_nn(m, n, k, a.data(), k, b.data(), n, cs.data(), n, false);
    kern::force_isa(kern::Isa::avx2);
    kern::gemm_nn(m, n, k, a.data(), k, b.data(), n, cv.data(), n, false);
    check_close(cv, cs, 1e-12);
  }
}

TEST_CASE("transcendental forward paths are identical across isa") {
  if (!kern::avx2_supported()) return;
  IsaGuard guard;
  Rng rng(5);
  Matrix x = random_matrix(1, 77, rng);
  Matrix ys(1, 77), yv(1, 77);
  kern::force_isa(kern::Isa::scalar);
  kern::tanh_fwd(77, x.data(), ys.data());
  kern::force_isa(kern::Isa::avx2);
  kern::tanh_fwd(77, x.data(), yv.data());
  for (std::size_t i = 0; i < 77; ++i) CHECK(ys[i] == yv[i]);

  kern::force_isa(kern::Isa::scalar);
  kern::sigmoid_fwd(77, x.data(), ys.data());
  kern::force_isa(kern::Isa::avx2);
  kern::sigmoid_fwd(77, x.data(), yv.data());
  for (std::size_t i = 0; i < 77; ++i) CHECK(ys[i] == yv[i]);
}

TEST_CASE("bias and column-sum helpers") {
  Rng rng(11);
  Matrix y = random_matrix(5, 6, rng);
  Matrix bias = random_matrix(1, 6, rng);
  Matrix expect = y;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 6; ++j) expect(i, j) += bias[j];
  kern::add_bias_rows(5, 6, bias.data(), y.data(), 6);
  check_close(y, expect, 1e-15);

  Matrix cs(1, 6);
  kern::colsum_acc(5, 6, y.data(), 6, cs.data());
  for (std::size_t j = 0; j < 6; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < 5; ++i) s += y(i, j);
    CHECK(cs[j] == doctest::Approx(s).epsilon(1e-12));
  }
}
