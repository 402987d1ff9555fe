#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "gca/errors.hpp"
#include "gca/matrix.hpp"
#include "gca/rng.hpp"
#include "gca/synthgen.hpp"

using namespace gca;
using namespace gca::synth;

namespace {

// Direct matrix recursion, written independently of simulate_domain: per-lag
// contribution vectors are formed first and then summed.
Matrix linear_var_oracle(const GroundTruthStructure& s, const Matrix& initial,
                         std::size_t steps) {
  const std::size_t D = s.D, k = s.k;
  Matrix traj(k + steps, D);
  for (std::size_t t = 0; t < k; ++t)
    for (std::size_t v = 0; v < D; ++v) traj(t, v) = initial(t, v);
  std::vector<double> contrib(D);
  for (std::size_t t = k; t < k + steps; ++t) {
    std::vector<double> acc(D, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t u = 0; u < D; ++u) {
        double c = 0.0;
        for (std::size_t v = 0; v < D; ++v) c += s.weights[j](u, v) * traj(t - j - 1, v);
        contrib[u] = c;
      }
      for (std::size_t u = 0; u < D; ++u) acc[u] += contrib[u];
    }
    for (std::size_t u = 0; u < D; ++u) traj(t, u) = acc[u];
  }
  return traj;
}

GroundTruthStructure diag_structure(std::size_t D, double w) {
  GroundTruthStructure s;
  s.D = D;
  s.k = 1;
  s.edge_density = 1.0;
  s.adjacency.assign(1, Matrix(D, D));
  s.weights.assign(1, Matrix(D, D));
  for (std::size_t i = 0; i < D; ++i) {
    s.adjacency[0](i, i) = 1.0;
    s.weights[0](i, i) = w;
  }
  return s;
}

// Ordinary least squares via normal equations; small systems only.
std::vector<double> solve_ols(const std::vector<std::vector<double>>& X,
                              const std::vector<double>& y) {
  const std::size_t n = X.size(), p = X[0].size();
  std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < n; ++t) s += X[t][i] * X[t][j];
      a[i][j] = s;
    }
    double s = 0.0;
    for (std::size_t t = 0; t < n; ++t) s += X[t][i] * y[t];
    a[i][p] = s;
  }
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < p; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[piv], a[col]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == col || a[col][col] == 0.0) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t cc = col; cc <= p; ++cc) a[r][cc] -= f * a[col][cc];
    }
  }
  std::vector<double> beta(p, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    if (a[i][i] != 0.0) beta[i] = a[i][p] / a[i][i];
  return beta;
}

}  // namespace

TEST_CASE("density 1 gives the all-ones adjacency") {
  auto s = sample_structure(2, 1, 1.0, 0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(s.adjacency[0][i] == 1.0);
}

TEST_CASE("degenerate inputs are rejected") {
  CHECK_THROWS_AS((void)sample_structure(2, 1, 0.0, 0), ConfigError);
  CHECK_THROWS_AS((void)sample_structure(2, 1, 1.1, 0), ConfigError);
  CHECK_THROWS_AS((void)sample_structure(1, 1, 0.5, 0), ConfigError);
  CHECK_THROWS_AS((void)sample_structure(2, 0, 0.5, 0), ConfigError);
}

TEST_CASE("seeded structure is frozen: D=5 k=3 density=0.2 seed=7 has 14 edges") {
  auto s = sample_structure(5, 3, 0.2, 7);
  CHECK(s.edge_count() == 14);  // golden value of the seeded run (expectation 15)
  auto s2 = sample_structure(5, 3, 0.2, 7);
  CHECK(s.hamming_distance(s2) == 0);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 25; ++i) CHECK(s.weights[j][i] == s2.weights[j][i]);
}

TEST_CASE("every lag slice keeps at least one edge even at tiny densities") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto s = sample_structure(3, 4, 0.001, seed);
    for (std::size_t j = 0; j < 4; ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < 9; ++i) sum += s.adjacency[j][i];
      CHECK(sum >= 1.0);
    }
  }
}

TEST_CASE("rescaled systems sit at or below the stability bound") {
  for (std::uint64_t seed : {7ull, 21ull, 99ull}) {
    auto s = sample_structure(5, 3, 0.4, seed);
    CHECK(companion_spectral_radius(s.weights) <= kStabilityBound + 1e-6);
  }
}

TEST_CASE("identity map with vanishing noise holds the state constant") {
  auto s = diag_structure(2, 1.0);
  DomainGenConfig cfg{1e-300, 1, 0.0, 20, 0, 5};
  Matrix init(1, 2);
  init(0, 0) = init(0, 1) = 1.0;
  auto series = simulate_domain(s, cfg, &init);
  for (std::size_t t = 0; t < series.values.rows(); ++t) {
    CHECK(series.values(t, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(series.values(t, 1) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("0.5 identity decays geometrically") {
  auto s = diag_structure(2, 0.5);
  DomainGenConfig cfg{1e-300, 1, 0.0, 12, 0, 5};
  Matrix init(1, 2);
  init(0, 0) = init(0, 1) = 1.0;
  auto series = simulate_domain(s, cfg, &init);
  for (std::size_t t = 0; t < series.values.rows(); ++t) {
    const double expect = std::pow(0.5, double(t));
    CHECK(series.values(t, 0) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("c=0 zero-noise trajectories match the direct recursion oracle to 1e-10") {
  auto s = sample_structure(4, 2, 0.4, 3);
  Matrix init(2, 4);
  Rng rng(17);
  for (std::size_t i = 0; i < init.size(); ++i) init[i] = rng.normal();
  DomainGenConfig cfg{1e-300, 1, 0.0, 22, 0, 9};
  auto series = simulate_domain(s, cfg, &init);
  Matrix oracle = linear_var_oracle(s, init, 20);
  REQUIRE(series.values.rows() == 22);
  for (std::size_t t = 0; t < 22; ++t)
    for (std::size_t v = 0; v < 4; ++v)
      CHECK(std::abs(series.values(t, v) - oracle(t, v)) <= 1e-10);
}

TEST_CASE("sample_interval=n equals every n-th element of the interval-1 run") {
  auto s = sample_structure(3, 2, 0.5, 11);
  for (int n : {2, 3}) {
    DomainGenConfig base{2.0, 1, 0.04, 1200, 100, 77};
    DomainGenConfig sub = base;
    sub.sample_interval = n;
    auto full = simulate_domain(s, base);
    auto dec = simulate_domain(s, sub);
    REQUIRE(dec.values.rows() == (1200 - 1 - 100) / std::size_t(n) + 1);
    for (std::size_t i = 0; i < dec.values.rows(); ++i)
      for (std::size_t v = 0; v < 3; ++v)
        CHECK(dec.values(i, v) == full.values(i * n, v));  // bit-exact
  }
}

TEST_CASE("determinism: identical seeds give bit-identical series") {
  auto s = sample_structure(4, 3, 0.3, 2);
  DomainGenConfig cfg{5.0, 2, 0.04, 2000, 100, 31};
  auto a = simulate_domain(s, cfg);
  auto b = simulate_domain(s, cfg);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("domain-2 settings: regression residual variance recovers noise_variance") {
  // interval 1 on the raw grid; the innovation property lives on the raw recursion
  auto s = sample_structure(5, 3, 0.2, 7);
  DomainGenConfig cfg{5.0, 1, 0.04, 10103, 100, 13};
  auto series = simulate_domain(s, cfg);
  const std::size_t T = series.values.rows();
  REQUIRE(T >= 10000);
  const std::size_t k = 3, D = 5;

  double resid_var_sum = 0.0;
  for (std::size_t u = 0; u < D; ++u) {
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (std::size_t t = k; t < T; ++t) {
      std::vector<double> row;
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t v = 0; v < D; ++v) {
          if (s.adjacency[j](u, v) == 0.0) continue;
          const double z = series.values(t - j - 1, v);
          row.push_back(z + cfg.nonlin_c * std::sin(z));
        }
      X.push_back(std::move(row));
      y.push_back(series.values(t, u));
    }
    if (X[0].empty()) {
      // no parents for this variable: the series is pure noise
      double m = 0.0, ss = 0.0;
      for (double v : y) m += v;
      m /= double(y.size());
      for (double v : y) ss += (v - m) * (v - m);
      resid_var_sum += ss / double(y.size() - 1);
      continue;
    }
    auto beta = solve_ols(X, y);
    double ss = 0.0;
    for (std::size_t t = 0; t < X.size(); ++t) {
      double pred = 0.0;
      for (std::size_t p = 0; p < beta.size(); ++p) pred += beta[p] * X[t][p];
      const double e = y[t] - pred;
      ss += e * e;
    }
    resid_var_sum += ss / double(X.size() - beta.size());
  }
  const double resid_var = resid_var_sum / double(D);
  CHECK(resid_var == doctest::Approx(5.0).epsilon(0.10));
}

TEST_CASE("strong edges leave a significant lagged cross-correlation") {
  GroundTruthStructure s;
  s.D = 3;
  s.k = 1;
  s.edge_density = 0.3;
  s.adjacency.assign(1, Matrix(3, 3));
  s.weights.assign(1, Matrix(3, 3));
  s.adjacency[0](0, 1) = 1.0;
  s.weights[0](0, 1) = 0.6;  // z^1 drives z^0 at lag 1
  for (std::size_t i = 0; i < 3; ++i) {
    s.adjacency[0](i, i) = 1.0;
    s.weights[0](i, i) = 0.3;
  }
  DomainGenConfig cfg{1.0, 1, 0.0, 5200, 100, 4};
  auto series = simulate_domain(s, cfg);
  const std::size_t T = series.values.rows();
  REQUIRE(T >= 5000);

  auto corr_lag1 = [&](std::size_t u, std::size_t v) {
    double mu = 0.0, mv = 0.0;
    const std::size_t n = T - 1;
    for (std::size_t t = 1; t < T; ++t) {
      mu += series.values(t, u);
      mv += series.values(t - 1, v);
    }
    mu /= double(n);
    mv /= double(n);
    double suv = 0.0, suu = 0.0, svv = 0.0;
    for (std::size_t t = 1; t < T; ++t) {
      const double a = series.values(t, u) - mu;
      const double b = series.values(t - 1, v) - mv;
      suv += a * b;
      suu += a * a;
      svv += b * b;
    }
    return suv / std::sqrt(suu * svv);
  };
  const double r = corr_lag1(0, 1);
  // significance 0.01 two-sided: |r|·sqrt(n) > 2.576
  CHECK(std::abs(r) * std::sqrt(double(T - 1)) > 2.576);
}

TEST_CASE("family jitter: zero keeps structures identical, 0.1 flips the frozen count") {
  std::vector<DomainGenConfig> cfgs(3);
  cfgs[0] = {1.0, 1, 0.02, 3000, 100, 11};
  cfgs[1] = {5.0, 2, 0.04, 3000, 100, 12};
  cfgs[2] = {10.0, 3, 0.06, 3000, 100, 13};

  auto fam0 = make_domain_family(5, 3, 0.2, cfgs, 0.0, 21);
  CHECK(fam0.structures[0]->hamming_distance(*fam0.structures[1]) == 0);
  CHECK(fam0.structures[0]->hamming_distance(*fam0.structures[2]) == 0);

  auto fam = make_domain_family(5, 3, 0.2, cfgs, 0.1, 21);
  // round(0.1·75) = 8 distinct off-diagonal flips per non-anchor domain
  CHECK(fam.structures[0]->hamming_distance(*fam.structures[1]) == 8);
  CHECK(fam.structures[0]->hamming_distance(*fam.structures[2]) == 8);
  for (std::size_t d = 0; d < 3; ++d) {
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t i = 0; i < 5; ++i)
        CHECK(fam.structures[d]->adjacency[j](i, i) ==
              fam.structures[0]->adjacency[j](i, i));  // self-lags preserved
  }
  CHECK(fam.series[0].values.rows() == 2900);
  CHECK(fam.series[1].values.rows() == 1450);
  CHECK(fam.series[2].values.rows() == 967);
  for (const auto& ser : fam.series)
    for (std::size_t i = 0; i < ser.values.size(); ++i)
      CHECK(std::isfinite(ser.values[i]));
}

TEST_CASE("jitter outside [0, 0.2] is rejected") {
  std::vector<DomainGenConfig> cfgs(2);
  cfgs[0] = {1.0, 1, 0.0, 500, 100, 1};
  cfgs[1] = {1.0, 1, 0.0, 500, 100, 2};
  CHECK_THROWS_AS((void)make_domain_family(4, 2, 0.3, cfgs, 0.3, 5), ConfigError);
  CHECK_THROWS_AS((void)make_domain_family(4, 2, 0.3, cfgs, -0.1, 5), ConfigError);
}

TEST_CASE("csv, manifest and structure files round-trip") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "gca_synthgen_test";
  fs::create_directories(dir);

  auto s = sample_structure(3, 2, 0.5, 42);
  DomainGenConfig cfg{1.0, 1, 0.02, 400, 100, 8};
  auto series = simulate_domain(s, cfg);
  series.domain_id = "domain1";
  series.ground_truth = std::make_shared<GroundTruthStructure>(s);

  const auto csv = (dir / "domain1.csv").string();
  const auto sj = (dir / "structure1.json").string();
  const auto mf = (dir / "manifest1.json").string();
  write_series_csv(csv, series);
  write_structure_json(sj, s);
  write_manifest_json(mf, series, cfg, csv, sj);

  auto back = read_structure_json(sj);
  CHECK(back.k == s.k);
  CHECK(back.D == s.D);
  CHECK(back.hamming_distance(s) == 0);

  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "v0,v1,v2");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == series.values.rows());
  fs::remove_all(dir);
}
