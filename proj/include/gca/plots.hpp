#pragma once

#include <string>
#include <utility>

namespace gca::plot {

// Deterministic layout of the structure-heatmap figure: three panel rows
// (source probabilities, target probabilities, ground truth) with k slices of
// D×D cells each.
std::pair<std::size_t, std::size_t> heatmap_dims(std::size_t k, std::size_t D);

// (a) per-epoch AUPRC and RMSE curves from a training log
void render_training_curves(const std::string& log_path, const std::string& out_png);
// (b) source/target/truth structure heatmaps from a result ledger
void render_structure_heatmaps(const std::string& ledger_path, const std::string& out_png);
// (c) loss-component curves from a training log
void render_loss_curves(const std::string& log_path, const std::string& out_png);

}  // namespace gca::plot
