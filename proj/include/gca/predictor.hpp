#pragma once

#include <vector>

#include "gca/autodiff.hpp"
#include "gca/matrix.hpp"
#include "gca/model.hpp"
#include "gca/rng.hpp"

// Structure-masked forecaster. Intra-lag step: for output variable u, lag
// input z_{t−j} is gated elementwise by row u of the lag-j slice and mapped by
// the shared g_j to a d_e-wide contribution. Inter-lag step: G aggregates the
// k contributions of each output variable together with the domain latent β
// into one scalar per variable. Keeping the per-variable rows separate all the
// way through is what makes ∂ẑ^u/∂z^v vanish exactly when the (u,v) gate is 0.

namespace gca::pred {

struct PredictorConfig {
  std::size_t D = 0;
  std::size_t k = 0;
  std::size_t d_e = 32;
  std::size_t d_beta = 8;
  std::size_t hidden = 0;  // 0 → max(32, 4·D)

  std::size_t hidden_width() const { return hidden ? hidden : std::max<std::size_t>(32, 4 * D); }
};

class Predictor {
 public:
  Predictor() = default;
  Predictor(model::ParamStore& store, PredictorConfig cfg);

  void init(Rng& rng);

  // z_lag: (n, D) values at lag j; slice: (n, D·D) gates. Returns the stacked
  // contributions (n·D, d_e), one row per (sample, output variable).
  ad::Var intra_lag(model::GraphCtx& ctx, ad::Var z_lag, ad::Var slice,
                    std::size_t lag_index) const;

  // contribs: exactly k outputs of intra_lag. Returns (n, D).
  ad::Var inter_lag(model::GraphCtx& ctx, const std::vector<ad::Var>& contribs,
                    ad::Var beta) const;

  // lags[j]: (n, D) values of z_{t−j−1} (most recent first).
  ad::Var predict_one_step(model::GraphCtx& ctx, const std::vector<ad::Var>& lags,
                           const std::vector<ad::Var>& slices, ad::Var beta) const;

  // Autoregressive horizon-τ forecast; the structure is held fixed throughout.
  std::vector<ad::Var> rollout(model::GraphCtx& ctx, std::vector<ad::Var> lags,
                               const std::vector<ad::Var>& slices, ad::Var beta,
                               std::size_t horizon) const;

  const PredictorConfig& config() const { return cfg_; }
  model::Mlp& aggregator() { return G_; }

 private:
  PredictorConfig cfg_;
  std::vector<model::Mlp> g_;
  model::Mlp G_;
};

}  // namespace gca::pred
