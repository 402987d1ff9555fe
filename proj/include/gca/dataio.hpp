#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gca/matrix.hpp"
#include "gca/synthgen.hpp"

// Windowing, normalization, temporal splitting and semi-supervised labeling.
// Splits are contiguous in time (train earliest, test latest); normalization
// statistics are fit on the training rows only and stored for the inverse
// transform.

namespace gca::data {

struct SeriesWindow {
  Matrix x;  // t_in × D past block
  Matrix y;  // tau × D future block, starts where x ends
  std::string domain_id;
  bool labeled = true;
  std::size_t start = 0;  // row index of x(0) in the source series
};

struct SplitSpec {
  double train_frac = 0.6;
  double val_frac = 0.2;
  double test_frac = 0.2;
  double target_label_frac = 0.05;

  void validate() const;
};

struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // ddof = 0
};

enum class DomainRole { source, target };

struct SplitWindows {
  std::vector<SeriesWindow> train;
  std::vector<SeriesWindow> val;
  std::vector<SeriesWindow> test;
};

// Everything a trainer needs from one domain.
struct PreparedDomain {
  SplitWindows splits;
  NormStats stats;
  std::string domain_id;
  std::shared_ptr<const synth::GroundTruthStructure> ground_truth;
};

// Fit on rows [0, train_rows); throws DataError("constant column ...") when a
// column's std is below 1e-12.
NormStats zscore_fit(const Matrix& values, std::size_t train_rows);
Matrix zscore_apply(const Matrix& values, const NormStats& stats);
Matrix zscore_invert(const Matrix& values, const NormStats& stats);

std::vector<SeriesWindow> make_windows(const synth::RawSeries& series,
                                       std::size_t t_in, std::size_t tau,
                                       std::size_t stride);

SplitWindows split_semi_supervised(std::vector<SeriesWindow> windows,
                                   const SplitSpec& spec, DomainRole role,
                                   std::uint64_t seed);

// zscore_fit on the train-window row span, apply, window, split.
PreparedDomain prepare_domain(const synth::RawSeries& series, std::size_t t_in,
                              std::size_t tau, std::size_t stride,
                              const SplitSpec& spec, DomainRole role,
                              std::uint64_t seed);

// Strict numeric CSV with a header row; NaN and ragged rows are rejected with
// the offending row/column in the message.
synth::RawSeries ingest_csv(const std::string& path);

void write_split_manifest(const std::string& path, const SplitWindows& splits);

}  // namespace gca::data
