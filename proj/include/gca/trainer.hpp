#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gca/dataio.hpp"
#include "gca/gca_model.hpp"
#include "gca/objective.hpp"

namespace gca::train {

struct TauSchedule {
  double start = 1.0;
  double end = 0.3;
};

struct TrainConfig {
  std::size_t epochs = 60;
  std::size_t batch_size = 128;
  double learning_rate = 1e-3;
  std::string optimizer = "adam";
  std::uint64_t seed = 1;
  std::size_t early_stop_patience = 10;
  double grad_clip = 5.0;
  TauSchedule tau;
  obj::LossWeights weights;
  obj::StructurePrior prior;
  model::Variant variant = model::Variant::gca;
  std::size_t target_dim = 0;
  bool use_unlabeled_target = false;
  enc::SampleMode sample_mode = enc::SampleMode::soft;
  std::size_t eval_horizon = 1;
  std::string checkpoint_path;  // best checkpoint lands here when non-empty
  std::string log_path;         // JSON-lines training log when non-empty
  std::uint64_t config_hash = 0;
  bool log_epoch_test = true;   // per-epoch target-test RMSE + AUPRC in the log

  void validate() const;
};

struct EvalResult {
  double rmse = 0;
  double mae = 0;
  double rmse_target_dim = 0;
  double mae_target_dim = 0;
  std::size_t windows = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double tau = 0;
  obj::LossBreakdown mean_loss;
  double val_rmse = 0;
  double test_rmse = 0;
  double auprc_source = -1;  // -1: no ground truth available
  double auprc_target = -1;
  double structure_l1 = 0;
};

struct TrainResult {
  double best_val_rmse = 0;
  std::size_t best_epoch = 0;
  std::vector<EpochRecord> history;
};

// Adam with global-norm gradient clipping.
class AdamOptimizer {
 public:
  AdamOptimizer(std::vector<model::Param*> params, double lr, double clip);
  void zero_grad();
  void step();
  std::uint64_t steps_taken() const { return t_; }
  void set_steps(std::uint64_t t) { t_ = t; }

 private:
  std::vector<model::Param*> params_;
  double lr_;
  double clip_;
  std::uint64_t t_ = 0;
};

// Joint semi-supervised training; the model is left holding the best-epoch
// parameters (selected on target validation RMSE).
TrainResult train(GcaModel& model, const data::PreparedDomain& source,
                  const data::PreparedDomain& target, const TrainConfig& cfg);

EvalResult evaluate(GcaModel& model, const std::vector<data::SeriesWindow>& windows,
                    data::DomainRole role, std::size_t horizon,
                    std::size_t target_dim = 0);

// Batched forecasts for a window set (horizon rows per window).
std::vector<Matrix> forecast(GcaModel& model,
                             const std::vector<data::SeriesWindow>& windows,
                             data::DomainRole role, std::size_t horizon);

// Mean noise-free edge probabilities over (at most max_windows) windows.
std::vector<Matrix> edge_scores(GcaModel& model,
                                const std::vector<data::SeriesWindow>& windows,
                                data::DomainRole role, std::size_t max_windows = 256);

struct SweepStats {
  double rmse_mean = 0, rmse_std = 0;
  double mae_mean = 0, mae_std = 0;
  std::vector<EvalResult> runs;
};

// Independent seeded runs of train+evaluate; fresh model per seed.
SweepStats seed_sweep(const GcaModelConfig& model_cfg,
                      const data::PreparedDomain& source,
                      const data::PreparedDomain& target, const TrainConfig& cfg,
                      std::size_t n_seeds);

// ---- checkpointing ----

struct CheckpointMeta {
  std::uint64_t config_hash = 0;
  std::uint64_t epoch = 0;
  std::uint64_t adam_steps = 0;
  data::NormStats stats_source;
  data::NormStats stats_target;
};

void save_checkpoint(const std::string& path, GcaModel& model,
                     const CheckpointMeta& meta);
CheckpointMeta load_checkpoint(const std::string& path, GcaModel& model);

}  // namespace gca::train
