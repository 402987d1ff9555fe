#pragma once

#include <cstdint>
#include <vector>

#include "gca/autodiff.hpp"
#include "gca/matrix.hpp"
#include "gca/model.hpp"
#include "gca/rng.hpp"

// Recurrent structure reconstruction: lag slices are inferred one after
// another, each conditioned on the already-sampled slices, the recent history
// and the domain's structural latent. Slice j is a D×D matrix whose (u,v)
// entry gates the influence of z^v_{t−j} on z^u_t; per edge the encoder emits
// two category scores (absent, present) and sampling goes through the binary
// concrete relaxation.

namespace gca::enc {

struct EncoderConfig {
  std::size_t D = 0;
  std::size_t k = 0;
  std::size_t d_alpha = 8;
  std::size_t hidden = 0;    // 0 → max(32, 4·D)
  bool use_alpha = true;     // disabled by the gca-alpha variant
  bool full_window = false;  // feed the whole t_in window instead of the last k steps
  std::size_t t_in = 0;      // only read in full-window mode

  std::size_t hidden_width() const { return hidden ? hidden : std::max<std::size_t>(32, 4 * D); }
  std::size_t history_width() const { return (full_window ? t_in : k) * D; }
};

// probs: no Gumbel noise at all, gates are the plain edge probabilities
// (evaluation-time setting).
enum class SampleMode { soft, hard, probs };

// Per-lag tensors for one batch; all matrices are (n, D·D), flattened row-major
// over (u, v).
struct Reconstruction {
  std::vector<ad::Var> logit_diff;  // present minus absent score
  std::vector<ad::Var> sample;      // gates handed to the predictor
  std::vector<ad::Var> probs;       // noise-free edge probabilities
};

class StructureEncoder {
 public:
  StructureEncoder() = default;
  StructureEncoder(model::ParamStore& store, EncoderConfig cfg);

  void init(Rng& rng);

  // history: (n, history_width) ordered most recent lag first; prev_slices has
  // exactly lag_index entries. Returns (n, 2·D·D): first D·D columns are the
  // "absent" scores, the rest "present".
  ad::Var encode_logits(model::GraphCtx& ctx, ad::Var history,
                        const std::vector<ad::Var>& prev_slices,
                        std::size_t lag_index, ad::Var alpha) const;

  // Runs the j = 1..k recursion, feeding each sampled slice into the next call.
  Reconstruction reconstruct(model::GraphCtx& ctx, const Matrix& history,
                             model::Param* alpha, double tau, Rng& noise_rng,
                             SampleMode mode) const;

  const EncoderConfig& config() const { return cfg_; }

 private:
  EncoderConfig cfg_;
  std::vector<model::Mlp> f_;
};

// Batch mean of the noise-free probabilities: k matrices of shape D×D.
std::vector<Matrix> batch_mean_probs(const Reconstruction& rec, std::size_t D);

// Single-slice helpers on plain matrices (the unit-test surface).
// logits: (n_edges, 2) with columns [absent, present].
Matrix gumbel_sample_slice(const Matrix& logits, double tau, Rng& rng, bool hard);
Matrix edge_probabilities_slice(const Matrix& logits);

}  // namespace gca::enc
