#include "gca/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "gca/errors.hpp"
#include "gca/rng.hpp"

namespace gca::data {

void SplitSpec::validate() const {
  for (double f : {train_frac, val_frac, test_frac}) {
    if (!(f > 0.0 && f < 1.0)) throw ConfigError("SplitSpec: fractions must lie in (0,1)");
  }
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
    throw ConfigError("SplitSpec: fractions must sum to 1");
  if (target_label_frac < 0.0 || target_label_frac > 1.0)
    throw ConfigError("SplitSpec: target_label_frac must lie in [0,1]");
}

NormStats zscore_fit(const Matrix& values, std::size_t train_rows) {
  if (train_rows < 2) throw DataError("zscore_fit: need at least 2 training rows");
  if (train_rows > values.rows()) throw DataError("zscore_fit: train_rows exceeds series");
  const std::size_t D = values.cols();
  NormStats stats;
  stats.mean.assign(D, 0.0);
  stats.stddev.assign(D, 0.0);
  for (std::size_t t = 0; t < train_rows; ++t)
    for (std::size_t v = 0; v < D; ++v) stats.mean[v] += values(t, v);
  for (std::size_t v = 0; v < D; ++v) stats.mean[v] /= double(train_rows);
  for (std::size_t t = 0; t < train_rows; ++t)
    for (std::size_t v = 0; v < D; ++v) {
      const double d = values(t, v) - stats.mean[v];
      stats.stddev[v] += d * d;
    }
  for (std::size_t v = 0; v < D; ++v) {
    stats.stddev[v] = std::sqrt(stats.stddev[v] / double(train_rows));
    if (stats.stddev[v] < 1e-12)
      throw DataError("zscore_fit: constant column v" + std::to_string(v));
  }
  return stats;
}

Matrix zscore_apply(const Matrix& values, const NormStats& stats) {
  if (values.cols() != stats.mean.size()) throw ShapeError("zscore_apply: dim mismatch");
  Matrix out(values.rows(), values.cols());
  for (std::size_t t = 0; t < values.rows(); ++t)
    for (std::size_t v = 0; v < values.cols(); ++v)
      out(t, v) = (values(t, v) - stats.mean[v]) / stats.stddev[v];
  return out;
}

Matrix zscore_invert(const Matrix& values, const NormStats& stats) {
  if (values.cols() != stats.mean.size()) throw ShapeError("zscore_invert: dim mismatch");
  Matrix out(values.rows(), values.cols());
  for (std::size_t t = 0; t < values.rows(); ++t)
    for (std::size_t v = 0; v < values.cols(); ++v)
      out(t, v) = values(t, v) * stats.stddev[v] + stats.mean[v];
  return out;
}

std::vector<SeriesWindow> make_windows(const synth::RawSeries& series,
                                       std::size_t t_in, std::size_t tau,
                                       std::size_t stride) {
  if (t_in < 1 || tau < 1 || stride < 1)
    throw ConfigError("make_windows: t_in, tau, stride must be >= 1");
  const std::size_t T = series.values.rows();
  const std::size_t D = series.values.cols();
  if (T < t_in + tau) throw DataError("make_windows: series too short for window layout");

  const std::size_t count = (T - t_in - tau) / stride + 1;
  std::vector<SeriesWindow> out;
  out.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    SeriesWindow win;
    win.start = w * stride;
    win.domain_id = series.domain_id;
    win.x = Matrix(t_in, D);
    win.y = Matrix(tau, D);
    for (std::size_t t = 0; t < t_in; ++t)
      for (std::size_t v = 0; v < D; ++v) win.x(t, v) = series.values(win.start + t, v);
    for (std::size_t t = 0; t < tau; ++t)
      for (std::size_t v = 0; v < D; ++v)
        win.y(t, v) = series.values(win.start + t_in + t, v);
    out.push_back(std::move(win));
  }
  return out;
}

SplitWindows split_semi_supervised(std::vector<SeriesWindow> windows,
                                   const SplitSpec& spec, DomainRole role,
                                   std::uint64_t seed) {
  spec.validate();
  const std::size_t n = windows.size();
  if (n < 3) throw DataError("split_semi_supervised: too few windows");

  auto n_train = static_cast<std::size_t>(std::llround(spec.train_frac * double(n)));
  auto n_val = static_cast<std::size_t>(std::llround(spec.val_frac * double(n)));
  n_train = std::max<std::size_t>(1, std::min(n_train, n - 2));
  n_val = std::max<std::size_t>(1, std::min(n_val, n - n_train - 1));
  const std::size_t n_test = n - n_train - n_val;
  if (n_test == 0) throw DataError("split_semi_supervised: empty test partition");

  SplitWindows out;
  out.train.assign(windows.begin(), windows.begin() + n_train);
  out.val.assign(windows.begin() + n_train, windows.begin() + n_train + n_val);
  out.test.assign(windows.begin() + n_train + n_val, windows.end());

  if (role == DomainRole::source) {
    for (auto& w : out.train) w.labeled = true;
  } else {
    for (auto& w : out.train) w.labeled = false;
    auto n_labeled =
        static_cast<std::size_t>(std::llround(spec.target_label_frac * double(n_train)));
    n_labeled = std::min(n_labeled, n_train);
    std::vector<std::size_t> idx(n_train);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n_train - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, std::int64_t(i)));
      std::swap(idx[i], idx[j]);
    }
    for (std::size_t i = 0; i < n_labeled; ++i) out.train[idx[i]].labeled = true;
  }
  for (auto& w : out.val) w.labeled = true;
  for (auto& w : out.test) w.labeled = true;
  return out;
}

PreparedDomain prepare_domain(const synth::RawSeries& series, std::size_t t_in,
                              std::size_t tau, std::size_t stride,
                              const SplitSpec& spec, DomainRole role,
                              std::uint64_t seed) {
  spec.validate();
  const std::size_t T = series.values.rows();
  if (T < t_in + tau) throw DataError("prepare_domain: series too short");
  const std::size_t count = (T - t_in - tau) / stride + 1;
  auto n_train = static_cast<std::size_t>(std::llround(spec.train_frac * double(count)));
  n_train = std::max<std::size_t>(1, std::min(n_train, count - 2));

  // rows covered by the training windows, y block included
  const std::size_t train_rows = (n_train - 1) * stride + t_in + tau;
  NormStats stats = zscore_fit(series.values, train_rows);

  synth::RawSeries normalized;
  normalized.values = zscore_apply(series.values, stats);
  normalized.domain_id = series.domain_id;
  normalized.ground_truth = series.ground_truth;

  PreparedDomain out;
  out.splits = split_semi_supervised(make_windows(normalized, t_in, tau, stride),
                                     spec, role, seed);
  out.stats = std::move(stats);
  out.domain_id = series.domain_id;
  out.ground_truth = series.ground_truth;
  return out;
}

synth::RawSeries ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("ingest_csv: empty file " + path);

  std::size_t cols = 1;
  for (char ch : line) cols += ch == ',';

  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      ++col;
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw DataError("ingest_csv: parse error at row " + std::to_string(row) +
                        ", column " + std::to_string(col));
      }
      if (used != cell.size() || !std::isfinite(v))
        throw DataError("ingest_csv: non-finite or trailing junk at row " +
                        std::to_string(row) + ", column " + std::to_string(col));
      values.push_back(v);
    }
    if (col != cols)
      throw DataError("ingest_csv: row " + std::to_string(row) + " has " +
                      std::to_string(col) + " columns, expected " + std::to_string(cols));
  }
  if (values.empty()) throw DataError("ingest_csv: no data rows in " + path);

  synth::RawSeries out;
  out.values = Matrix(values.size() / cols, cols);
  for (std::size_t i = 0; i < values.size(); ++i) out.values[i] = values[i];
  out.domain_id = std::filesystem::path(path).stem().string();
  return out;
}

void write_split_manifest(const std::string& path, const SplitWindows& splits) {
  using nlohmann::json;
  auto dump = [](const std::vector<SeriesWindow>& part) {
    json arr = json::array();
    for (const auto& w : part) arr.push_back({{"start", w.start}, {"labeled", w.labeled}});
    return arr;
  };
  json doc{{"train", dump(splits.train)}, {"val", dump(splits.val)}, {"test", dump(splits.test)}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace gca::data
