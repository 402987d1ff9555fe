#include "gca/plots.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <vector>

#include "gca/errors.hpp"
#include "gca/pngio.hpp"

namespace gca::plot {

namespace {

using nlohmann::json;

constexpr std::size_t kCell = 14;
constexpr std::size_t kGap = 6;
constexpr std::size_t kMargin = 12;
constexpr std::size_t kPanelRows = 3;

struct Rgb {
  std::uint8_t r, g, b;
};

const Rgb kPalette[] = {{214, 69, 65},  {31, 119, 180}, {44, 160, 44},
                        {148, 103, 189}, {255, 127, 14}, {23, 190, 207},
                        {140, 86, 75},  {127, 127, 127}};

std::vector<json> epoch_records(const std::string& log_path) {
  std::ifstream in(log_path);
  if (!in) throw IoError("cannot open: " + log_path);
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto doc = json::parse(line);
    if (doc.value("type", "") == "epoch") out.push_back(std::move(doc));
  }
  if (out.empty()) throw DataError("no epoch records in " + log_path);
  return out;
}

// normalized polyline plot of several named series on a shared canvas
void draw_series(const std::string& out_png,
                 const std::vector<std::pair<std::string, std::vector<double>>>& series) {
  const std::size_t W = 720, H = 420, M = 40;
  Image img(W, H);
  img.line(int(M), int(H - M), int(W - M / 2), int(H - M), 0, 0, 0);
  img.line(int(M), int(H - M), int(M), int(M / 2), 0, 0, 0);

  std::size_t color = 0;
  for (const auto& [name, values] : series) {
    (void)name;
    if (values.size() < 2) continue;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi <= lo) hi = lo + 1.0;
    const Rgb c = kPalette[color % (sizeof kPalette / sizeof kPalette[0])];
    int px = -1, py = -1;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double fx = double(i) / double(values.size() - 1);
      const double fy = (values[i] - lo) / (hi - lo);
      const int x = int(M + fx * double(W - 1.5 * M));
      const int y = int(H - M - fy * double(H - 1.5 * M));
      if (px >= 0) img.line(px, py, x, y, c.r, c.g, c.b);
      px = x;
      py = y;
    }
    // color key swatch
    img.fill_rect(W - M * 3, M / 2 + color * 12, 18, 8, c.r, c.g, c.b);
    ++color;
  }
  write_png(out_png, img);
}

void heat_cell(Image& img, std::size_t x0, std::size_t y0, double v, bool truth) {
  v = std::clamp(v, 0.0, 1.0);
  std::uint8_t r, g, b;
  if (truth) {
    r = std::uint8_t(255 - 155 * v);
    g = std::uint8_t(255 - 215 * v);
    b = std::uint8_t(255 - 215 * v);
  } else {
    r = std::uint8_t(255 - 215 * v);
    g = std::uint8_t(255 - 150 * v);
    b = std::uint8_t(255 - 55 * v);
  }
  img.fill_rect(x0, y0, kCell - 1, kCell - 1, r, g, b);
}

using Tensor = std::vector<std::vector<std::vector<double>>>;  // [k][D][D]

Tensor read_tensor(const json& doc, const std::string& field) {
  if (!doc.contains(field))
    throw DataError("ledger is missing field: " + field);
  return doc.at(field).get<Tensor>();
}

}  // namespace

std::pair<std::size_t, std::size_t> heatmap_dims(std::size_t k, std::size_t D) {
  const std::size_t width = 2 * kMargin + k * D * kCell + (k - 1) * kGap;
  const std::size_t height = 2 * kMargin + kPanelRows * D * kCell +
                             (kPanelRows - 1) * kGap;
  return {width, height};
}

void render_training_curves(const std::string& log_path, const std::string& out_png) {
  auto records = epoch_records(log_path);
  std::vector<double> auprc_src, auprc_tgt, rmse;
  for (const auto& r : records) {
    if (!r.contains("auprc_source") || !r.contains("test_rmse"))
      throw DataError("epoch record lacks auprc_source/test_rmse fields");
    auprc_src.push_back(r["auprc_source"].get<double>());
    auprc_tgt.push_back(r.value("auprc_target", -1.0));
    rmse.push_back(r["test_rmse"].get<double>());
  }
  draw_series(out_png, {{"auprc_source", auprc_src},
                        {"auprc_target", auprc_tgt},
                        {"test_rmse", rmse}});
}

void render_loss_curves(const std::string& log_path, const std::string& out_png) {
  auto records = epoch_records(log_path);
  const char* fields[] = {"recon_src", "recon_tgt", "kl_src", "kl_tgt",
                          "disc",      "sparsity_src", "sparsity_tgt", "strengthen"};
  std::vector<std::pair<std::string, std::vector<double>>> series;
  for (const char* f : fields) {
    std::vector<double> vals;
    for (const auto& r : records) {
      if (!r.contains(f)) throw DataError(std::string("epoch record lacks field ") + f);
      vals.push_back(r[f].get<double>());
    }
    series.emplace_back(f, std::move(vals));
  }
  draw_series(out_png, series);
}

void render_structure_heatmaps(const std::string& ledger_path, const std::string& out_png) {
  std::ifstream in(ledger_path);
  if (!in) throw IoError("cannot open: " + ledger_path);
  json doc = json::parse(in);
  const Tensor src = read_tensor(doc, "edge_probs_source");
  const Tensor tgt = read_tensor(doc, "edge_probs_target");
  const Tensor truth = read_tensor(doc, "truth_target");

  const std::size_t k = src.size();
  const std::size_t D = src[0].size();
  auto [W, H] = heatmap_dims(k, D);
  Image img(W, H);

  const Tensor* panels[kPanelRows] = {&src, &tgt, &truth};
  for (std::size_t p = 0; p < kPanelRows; ++p) {
    const std::size_t y0 = kMargin + p * (D * kCell + kGap);
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t x0 = kMargin + j * (D * kCell + kGap);
      for (std::size_t u = 0; u < D; ++u)
        for (std::size_t v = 0; v < D; ++v)
          heat_cell(img, x0 + v * kCell, y0 + u * kCell, (*panels[p])[j][u][v], p == 2);
    }
  }
  write_png(out_png, img);
}

}  // namespace gca::plot
