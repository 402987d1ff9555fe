#pragma once

#include <cstdint>
#include <vector>

#include "gca/autodiff.hpp"
#include "gca/dataio.hpp"
#include "gca/model.hpp"
#include "gca/trainer.hpp"

// Reference forecaster: a vanilla LSTM trained on the pooled labeled source
// and target windows, evaluated autoregressively. Shares the trainer's
// optimizer and early-stopping protocol so comparisons stay like-for-like.

namespace gca::baseline {

struct LstmConfig {
  std::size_t D = 0;
  std::size_t hidden = 32;
  std::uint64_t init_seed = 1;
};

class LstmForecaster {
 public:
  explicit LstmForecaster(const LstmConfig& cfg);

  // steps: window rows oldest → newest, each (n, D). Returns ẑ for the next step.
  ad::Var forward(model::GraphCtx& ctx, const std::vector<ad::Var>& steps) const;

  std::vector<ad::Var> rollout(model::GraphCtx& ctx, std::vector<ad::Var> steps,
                               std::size_t horizon) const;

  std::vector<model::Param*> params() { return store_.all(); }
  const LstmConfig& config() const { return cfg_; }

 private:
  LstmConfig cfg_;
  model::ParamStore store_;
  model::Param* w_ = nullptr;   // (D+H, 4H) fused gate weights [i f g o]
  model::Param* b_ = nullptr;   // (1, 4H)
  model::Param* wo_ = nullptr;  // (H, D) readout
  model::Param* bo_ = nullptr;  // (1, D)
};

struct LstmTrainResult {
  double best_val_rmse = 0;
  std::size_t best_epoch = 0;
};

LstmTrainResult train_lstm(LstmForecaster& model, const data::PreparedDomain& source,
                           const data::PreparedDomain& target,
                           const train::TrainConfig& cfg);

train::EvalResult evaluate_lstm(LstmForecaster& model,
                                const std::vector<data::SeriesWindow>& windows,
                                std::size_t horizon, std::size_t target_dim = 0);

}  // namespace gca::baseline
