#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gca/dataio.hpp"
#include "gca/matrix.hpp"
#include "gca/model.hpp"
#include "gca/predictor.hpp"
#include "gca/structure_encoder.hpp"

namespace gca {

struct GcaModelConfig {
  std::size_t D = 0;
  std::size_t k = 0;
  std::size_t d_alpha = 8;
  std::size_t d_beta = 8;
  std::size_t d_e = 32;
  std::size_t enc_hidden = 0;   // 0 → max(32, 4·D)
  std::size_t pred_hidden = 0;  // 0 → max(32, 4·D)
  bool full_window = false;
  std::size_t t_in = 0;  // only read in full-window mode
  std::uint64_t init_seed = 1;
};

// Shared encoder/predictor plus the per-domain latents α and β. Parameter
// construction order is fixed; checkpoints rely on it.
class GcaModel {
 public:
  GcaModel(const GcaModelConfig& cfg, model::Variant variant);

  const GcaModelConfig& config() const { return cfg_; }
  model::Variant variant() const { return variant_; }

  enc::StructureEncoder& encoder() { return encoder_; }
  const enc::StructureEncoder& encoder() const { return encoder_; }
  pred::Predictor& predictor() { return predictor_; }

  model::Param* alpha(data::DomainRole role) {
    return role == data::DomainRole::source ? alpha_src_ : alpha_tgt_;
  }
  model::Param* beta(data::DomainRole role) {
    return role == data::DomainRole::source ? beta_src_ : beta_tgt_;
  }

  std::vector<model::Param*> params() { return store_.all(); }
  std::vector<model::Param*> encoder_params() const { return encoder_params_; }
  std::vector<model::Param*> predictor_params() const { return predictor_params_; }

 private:
  GcaModelConfig cfg_;
  model::Variant variant_;
  model::ParamStore store_;
  enc::StructureEncoder encoder_;
  pred::Predictor predictor_;
  model::Param* alpha_src_ = nullptr;
  model::Param* alpha_tgt_ = nullptr;
  model::Param* beta_src_ = nullptr;
  model::Param* beta_tgt_ = nullptr;
  std::vector<model::Param*> encoder_params_;
  std::vector<model::Param*> predictor_params_;
};

// Dense view of a set of windows: encoder history plus per-lag input vectors
// and the one-step-ahead target.
struct Batch {
  Matrix history;            // (n, k·D) or (n, t_in·D), most recent lag first
  std::vector<Matrix> lags;  // k × (n, D), lags[j] = z_{t−j−1}
  Matrix y;                  // (n, D) first future row
  std::size_t size() const { return y.rows(); }
};

Batch build_batch(const std::vector<data::SeriesWindow>& windows,
                  const std::vector<std::size_t>& indices,
                  const GcaModelConfig& cfg);

// Stacked future rows for multi-step evaluation: steps[s] is (n, D).
std::vector<Matrix> build_targets(const std::vector<data::SeriesWindow>& windows,
                                  const std::vector<std::size_t>& indices,
                                  std::size_t horizon);

}  // namespace gca
