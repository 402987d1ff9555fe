#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "gca/dataio.hpp"
#include "gca/errors.hpp"
#include "gca/rng.hpp"

using namespace gca;
using namespace gca::data;

namespace {

synth::RawSeries series_from(std::vector<std::vector<double>> rows,
                             const std::string& id = "d") {
  synth::RawSeries s;
  s.values = Matrix(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[0].size(); ++j) s.values(i, j) = rows[i][j];
  s.domain_id = id;
  return s;
}

synth::RawSeries random_series(std::size_t T, std::size_t D, std::uint64_t seed) {
  synth::RawSeries s;
  s.values = Matrix(T, D);
  Rng rng(seed);
  for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] = rng.normal(1.0, 3.0);
  s.domain_id = "rnd";
  return s;
}

}  // namespace

TEST_CASE("zscore: constant column is rejected") {
  auto s = series_from({{1.0, 2.0}, {1.0, 3.0}, {1.0, 4.0}});
  CHECK_THROWS_WITH_AS((void)zscore_fit(s.values, 3),
                       doctest::Contains("constant column"), DataError);
}

TEST_CASE("zscore: two-point column normalizes to [-1, 1] under ddof=0") {
  auto s = series_from({{0.0, 5.0}, {2.0, 7.0}});
  auto stats = zscore_fit(s.values, 2);
  auto z = zscore_apply(s.values, stats);
  CHECK(z(0, 0) == doctest::Approx(-1.0));
  CHECK(z(1, 0) == doctest::Approx(1.0));
  CHECK(z(0, 1) == doctest::Approx(-1.0));
  CHECK(z(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("zscore: inverse(apply(x)) round-trips to 1e-10") {
  auto s = random_series(200, 4, 9);
  auto stats = zscore_fit(s.values, 150);
  auto z = zscore_apply(s.values, stats);
  auto back = zscore_invert(z, stats);
  for (std::size_t i = 0; i < s.values.size(); ++i)
    CHECK(std::abs(back[i] - s.values[i]) <= 1e-10);
  // training rows have mean 0 / std 1 within 1e-6
  for (std::size_t v = 0; v < 4; ++v) {
    double m = 0.0, ss = 0.0;
    for (std::size_t t = 0; t < 150; ++t) m += z(t, v);
    m /= 150.0;
    for (std::size_t t = 0; t < 150; ++t) ss += (z(t, v) - m) * (z(t, v) - m);
    CHECK(std::abs(m) <= 1e-6);
    CHECK(std::abs(std::sqrt(ss / 150.0) - 1.0) <= 1e-6);
  }
}

TEST_CASE("window counts follow the stride arithmetic") {
  auto s = random_series(10, 2, 1);
  CHECK(make_windows(s, 5, 1, 1).size() == 5);
  CHECK(make_windows(s, 5, 1, 6).size() == 1);

  auto s6 = random_series(6, 2, 2);
  CHECK_THROWS_AS((void)make_windows(s6, 5, 2, 1), DataError);

  // stride = t_in + tau gives disjoint windows
  auto s20 = random_series(20, 2, 3);
  auto disjoint = make_windows(s20, 3, 2, 5);
  CHECK(disjoint.size() == 4);
  for (std::size_t i = 1; i < disjoint.size(); ++i)
    CHECK(disjoint[i].start == disjoint[i - 1].start + 5);
}

TEST_CASE("windows reconstruct the source slice exactly") {
  auto s = random_series(50, 3, 4);
  auto windows = make_windows(s, 6, 2, 3);
  for (const auto& w : windows) {
    for (std::size_t t = 0; t < 6; ++t)
      for (std::size_t v = 0; v < 3; ++v) CHECK(w.x(t, v) == s.values(w.start + t, v));
    for (std::size_t t = 0; t < 2; ++t)
      for (std::size_t v = 0; v < 3; ++v)
        CHECK(w.y(t, v) == s.values(w.start + 6 + t, v));
  }
}

TEST_CASE("split is temporal, disjoint and exhaustive") {
  auto s = random_series(120, 2, 5);
  auto windows = make_windows(s, 6, 1, 1);
  const std::size_t n = windows.size();
  SplitSpec spec;
  auto sp = split_semi_supervised(windows, spec, DomainRole::source, 3);
  CHECK(sp.train.size() + sp.val.size() + sp.test.size() == n);
  // temporal ordering: train < val < test by start index
  CHECK(sp.train.back().start < sp.val.front().start);
  CHECK(sp.val.back().start < sp.test.front().start);
  std::set<std::size_t> starts;
  for (const auto& part : {sp.train, sp.val, sp.test})
    for (const auto& w : part) starts.insert(w.start);
  CHECK(starts.size() == n);
  for (const auto& w : sp.train) CHECK(w.labeled);
}

TEST_CASE("target labeling: exact count, determinism, full labeling at frac 1") {
  auto s = random_series(200, 2, 6);
  auto windows = make_windows(s, 6, 1, 1);
  SplitSpec spec;
  spec.train_frac = 0.517;  // force round(0.05 * 100) = 5 on exactly 100 train windows
  spec.val_frac = 0.2;
  spec.test_frac = 0.283;

  auto sp = split_semi_supervised(windows, spec, DomainRole::target, 11);
  REQUIRE(sp.train.size() == 100);
  std::size_t labeled = 0;
  for (const auto& w : sp.train) labeled += w.labeled;
  CHECK(labeled == 5);

  auto sp2 = split_semi_supervised(windows, spec, DomainRole::target, 11);
  for (std::size_t i = 0; i < sp.train.size(); ++i)
    CHECK(sp.train[i].labeled == sp2.train[i].labeled);

  SplitSpec all = spec;
  all.target_label_frac = 1.0;
  auto sp3 = split_semi_supervised(windows, all, DomainRole::target, 11);
  for (const auto& w : sp3.train) CHECK(w.labeled);
}

TEST_CASE("prepare_domain fits stats on training rows only") {
  auto s = random_series(300, 3, 7);
  // plant a wild value in the test region; train stats must not see it
  s.values(295, 0) = 1e5;
  auto prep = prepare_domain(s, 6, 1, 1, SplitSpec{}, DomainRole::source, 1);
  const std::size_t n_train = prep.splits.train.size();
  const std::size_t train_rows = (n_train - 1) + 6 + 1;
  auto expect = zscore_fit(s.values, train_rows);
  for (std::size_t v = 0; v < 3; ++v) {
    CHECK(prep.stats.mean[v] == expect.mean[v]);
    CHECK(prep.stats.stddev[v] == expect.stddev[v]);
    CHECK(std::abs(prep.stats.mean[v]) < 100.0);  // outlier not absorbed
  }
}

TEST_CASE("csv ingestion: round trip, error locations, NaN policy") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "gca_dataio_test";
  fs::create_directories(dir);
  const auto good = (dir / "good.csv").string();
  {
    std::ofstream out(good);
    out << "v0,v1\n1.5,2\n-3,4.25\n";
  }
  auto s = ingest_csv(good);
  CHECK(s.domain_id == "good");
  CHECK(s.values.rows() == 2);
  CHECK(s.values(1, 1) == 4.25);
  CHECK(s.ground_truth == nullptr);

  const auto bad = (dir / "bad.csv").string();
  {
    std::ofstream out(bad);
    out << "v0,v1\n1,2\n3,oops\n";
  }
  CHECK_THROWS_WITH_AS((void)ingest_csv(bad), doctest::Contains("row 2, column 2"),
                       DataError);

  const auto nan = (dir / "nan.csv").string();
  {
    std::ofstream out(nan);
    out << "v0,v1\n1,nan\n";
  }
  CHECK_THROWS_AS((void)ingest_csv(nan), DataError);

  const auto ragged = (dir / "ragged.csv").string();
  {
    std::ofstream out(ragged);
    out << "v0,v1\n1,2\n3\n";
  }
  CHECK_THROWS_AS((void)ingest_csv(ragged), DataError);
  fs::remove_all(dir);
}

TEST_CASE("split manifest records indices and label flags") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "gca_dataio_manifest";
  fs::create_directories(dir);
  auto s = random_series(60, 2, 8);
  auto sp = split_semi_supervised(make_windows(s, 5, 1, 1), SplitSpec{},
                                  DomainRole::target, 2);
  const auto path = (dir / "split.json").string();
  write_split_manifest(path, sp);
  std::ifstream in(path);
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(all.find("\"train\"") != std::string::npos);
  CHECK(all.find("\"labeled\"") != std::string::npos);
  fs::remove_all(dir);
}
