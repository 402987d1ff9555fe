#include "gca/eval_structures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>

#include "gca/errors.hpp"

namespace gca::eval {

double auprc_flat(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw ShapeError("auprc: scores/labels size mismatch");
  const std::size_t n = scores.size();
  std::size_t positives = 0;
  for (int l : labels) positives += l != 0;
  if (positives == 0) throw DataError("auprc: no positive labels");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double area = 0.0;
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    std::size_t dtp = 0, dfp = 0;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]]) ++dtp; else ++dfp;
      ++j;
    }
    tp += dtp;
    fp += dfp;
    if (dtp > 0) {
      const double recall_step = double(dtp) / double(positives);
      const double precision = double(tp) / double(tp + fp);
      area += recall_step * precision;
    }
    i = j;
  }
  return area;
}

double auprc(const std::vector<Matrix>& edge_probs,
             const synth::GroundTruthStructure& truth, bool include_diagonal) {
  if (edge_probs.size() != truth.k) throw ShapeError("auprc: lag count mismatch");
  std::vector<double> scores;
  std::vector<int> labels;
  for (std::size_t j = 0; j < truth.k; ++j) {
    if (edge_probs[j].rows() != truth.D || edge_probs[j].cols() != truth.D)
      throw ShapeError("auprc: slice shape mismatch");
    for (std::size_t u = 0; u < truth.D; ++u)
      for (std::size_t v = 0; v < truth.D; ++v) {
        if (!include_diagonal && u == v) continue;
        scores.push_back(edge_probs[j](u, v));
        labels.push_back(truth.adjacency[j](u, v) != 0.0 ? 1 : 0);
      }
  }
  return auprc_flat(scores, labels);
}

double structure_l1(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  if (a.size() != b.size() || a.empty()) throw ShapeError("structure_l1: lag count mismatch");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (!a[j].same_shape(b[j])) throw ShapeError("structure_l1: slice shape mismatch");
    for (std::size_t i = 0; i < a[j].size(); ++i) sum += std::abs(a[j][i] - b[j][i]);
    count += a[j].size();
  }
  return sum / double(count);
}

std::vector<TracePoint> auprc_vs_rmse_trace(const std::string& log_path,
                                            const std::string& auprc_field,
                                            const std::string& rmse_field) {
  std::ifstream in(log_path);
  if (!in) throw IoError("cannot open: " + log_path);
  std::vector<TracePoint> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto doc = nlohmann::json::parse(line);
    if (doc.value("type", "") != "epoch") continue;
    if (!doc.contains(auprc_field) || !doc.contains(rmse_field))
      throw DataError("auprc_vs_rmse_trace: missing field in epoch record");
    out.push_back({doc[auprc_field].get<double>(), doc[rmse_field].get<double>()});
  }
  return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && x[order[j]] == x[order[i]]) ++j;
    const double avg = 0.5 * double(i + j - 1) + 1.0;
    for (std::size_t q = i; q < j; ++q) ranks[order[q]] = avg;
    i = j;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw ShapeError("spearman: bad input sizes");
  auto ra = average_ranks(a);
  auto rb = average_ranks(b);
  const double n = double(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = ra[i] - ma, db = rb[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace gca::eval
