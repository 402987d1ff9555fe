#include "gca/structure_encoder.hpp"

#include <cmath>

#include "gca/errors.hpp"
#include "gca/kernels.hpp"

namespace gca::enc {

StructureEncoder::StructureEncoder(model::ParamStore& store, EncoderConfig cfg)
    : cfg_(cfg) {
  if (cfg_.D < 2 || cfg_.k < 1) throw ConfigError("StructureEncoder: need D >= 2, k >= 1");
  if (cfg_.full_window && cfg_.t_in < cfg_.k)
    throw ConfigError("StructureEncoder: t_in must cover the maximum lag");
  const std::size_t hidden = cfg_.hidden_width();
  const std::size_t edges = cfg_.D * cfg_.D;
  for (std::size_t j = 0; j < cfg_.k; ++j) {
    const std::size_t in_width = j * edges + cfg_.history_width() +
                                 (cfg_.use_alpha ? cfg_.d_alpha : 0);
    f_.emplace_back(store, "encoder.f" + std::to_string(j + 1),
                    std::vector<std::size_t>{in_width, hidden, hidden, 2 * edges});
  }
}

void StructureEncoder::init(Rng& rng) {
  for (auto& mlp : f_) mlp.init(rng);
}

ad::Var StructureEncoder::encode_logits(model::GraphCtx& ctx, ad::Var history,
                                        const std::vector<ad::Var>& prev_slices,
                                        std::size_t lag_index, ad::Var alpha) const {
  if (lag_index < 1 || lag_index > cfg_.k)
    throw ShapeError("encode_logits: lag_index out of range");
  if (prev_slices.size() != lag_index - 1)
    throw ShapeError("encode_logits: prev_slices must hold lag_index-1 slices");
  if (history.cols() != cfg_.history_width())
    throw ShapeError("encode_logits: history width mismatch");

  std::vector<ad::Var> parts(prev_slices.begin(), prev_slices.end());
  parts.push_back(history);
  if (cfg_.use_alpha) {
    if (alpha.cols() != cfg_.d_alpha) throw ShapeError("encode_logits: alpha width mismatch");
    parts.push_back(ad::broadcast_row(alpha, history.rows()));
  }
  return f_[lag_index - 1].forward(ctx, ad::concat_cols(parts));
}

Reconstruction StructureEncoder::reconstruct(model::GraphCtx& ctx,
                                             const Matrix& history,
                                             model::Param* alpha, double tau,
                                             Rng& noise_rng, SampleMode mode) const {
  if (history.cols() != cfg_.history_width())
    throw ShapeError("reconstruct: history width mismatch");
  const std::size_t n = history.rows();
  const std::size_t edges = cfg_.D * cfg_.D;

  ad::Var hist = ctx.tape.input(history);
  ad::Var alpha_var;
  if (cfg_.use_alpha) {
    if (!alpha) throw ConfigError("reconstruct: alpha latent missing");
    alpha_var = ctx.bind(*alpha);
  }

  Reconstruction rec;
  std::vector<ad::Var> prev;
  for (std::size_t j = 1; j <= cfg_.k; ++j) {
    ad::Var logits = encode_logits(ctx, hist, prev, j, alpha_var);
    ad::Var absent = ad::slice_cols(logits, 0, edges);
    ad::Var present = ad::slice_cols(logits, edges, edges);
    ad::Var diff = ad::sub(present, absent);
    rec.logit_diff.push_back(diff);
    ad::Var probs = ad::sigmoid_op(diff);
    rec.probs.push_back(probs);

    ad::Var sample;
    if (mode == SampleMode::probs) {
      sample = probs;
    } else {
      // per-edge difference of two Gumbel draws, present minus absent
      Matrix noise(n, edges);
      for (std::size_t i = 0; i < noise.size(); ++i) {
        const double g_absent = noise_rng.gumbel();
        const double g_present = noise_rng.gumbel();
        noise[i] = g_present - g_absent;
      }
      ad::Var soft = ad::gumbel_soft(diff, noise, tau);
      sample = mode == SampleMode::hard ? ad::hard_threshold_st(soft) : soft;
    }
    rec.sample.push_back(sample);
    prev.push_back(sample);
  }
  return rec;
}

std::vector<Matrix> batch_mean_probs(const Reconstruction& rec, std::size_t D) {
  std::vector<Matrix> out;
  for (const auto& p : rec.probs) {
    const Matrix& v = p.val();
    Matrix slice(D, D);
    for (std::size_t i = 0; i < v.rows(); ++i)
      kern::axpy(D * D, 1.0, v.row(i), slice.data());
    kern::scal(D * D, 1.0 / double(v.rows()), slice.data());
    out.push_back(std::move(slice));
  }
  return out;
}

Matrix gumbel_sample_slice(const Matrix& logits, double tau, Rng& rng, bool hard) {
  if (logits.cols() != 2) throw ShapeError("gumbel_sample_slice: expected 2 columns");
  if (!(tau > 0.0)) throw ConfigError("gumbel_sample_slice: tau must be positive");
  Matrix out(logits.rows(), 1);
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const double g_absent = rng.gumbel();
    const double g_present = rng.gumbel();
    const double z = (logits(i, 1) + g_present - (logits(i, 0) + g_absent)) / tau;
    double p;
    kern::sigmoid_fwd(1, &z, &p);
    out[i] = hard ? (p >= 0.5 ? 1.0 : 0.0) : p;
  }
  return out;
}

Matrix edge_probabilities_slice(const Matrix& logits) {
  if (logits.cols() != 2) throw ShapeError("edge_probabilities_slice: expected 2 columns");
  Matrix out(logits.rows(), 1);
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const double z = logits(i, 1) - logits(i, 0);
    kern::sigmoid_fwd(1, &z, &out[i]);
  }
  return out;
}

}  // namespace gca::enc
