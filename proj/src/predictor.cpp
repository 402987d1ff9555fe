#include "gca/predictor.hpp"

#include "gca/errors.hpp"

namespace gca::pred {

Predictor::Predictor(model::ParamStore& store, PredictorConfig cfg) : cfg_(cfg) {
  if (cfg_.D < 1 || cfg_.k < 1) throw ConfigError("Predictor: need D >= 1, k >= 1");
  const std::size_t hidden = cfg_.hidden_width();
  for (std::size_t j = 0; j < cfg_.k; ++j) {
    g_.emplace_back(store, "predictor.g" + std::to_string(j + 1),
                    std::vector<std::size_t>{cfg_.D, hidden, hidden, cfg_.d_e});
  }
  G_ = model::Mlp(store, "predictor.G",
                  std::vector<std::size_t>{cfg_.k * cfg_.d_e + cfg_.d_beta, hidden,
                                           hidden, 1});
}

void Predictor::init(Rng& rng) {
  for (auto& mlp : g_) mlp.init(rng);
  G_.init(rng);
}

ad::Var Predictor::intra_lag(model::GraphCtx& ctx, ad::Var z_lag, ad::Var slice,
                             std::size_t lag_index) const {
  if (lag_index < 1 || lag_index > cfg_.k)
    throw ShapeError("intra_lag: lag_index out of range");
  if (z_lag.cols() != cfg_.D || slice.cols() != cfg_.D * cfg_.D ||
      slice.rows() != z_lag.rows())
    throw ShapeError("intra_lag: shape mismatch");
  // (n, D·D) → (n·D, D): row (i,u) holds the gates A_j[u,:] of sample i
  ad::Var gates = ad::reshape(slice, slice.rows() * cfg_.D, cfg_.D);
  ad::Var masked = ad::row_gate(z_lag, gates);
  return g_[lag_index - 1].forward(ctx, masked);
}

ad::Var Predictor::inter_lag(model::GraphCtx& ctx,
                             const std::vector<ad::Var>& contribs,
                             ad::Var beta) const {
  if (contribs.size() != cfg_.k) throw ShapeError("inter_lag: need exactly k contributions");
  const std::size_t rows = contribs[0].rows();
  for (const auto& c : contribs) {
    if (c.rows() != rows || c.cols() != cfg_.d_e)
      throw ShapeError("inter_lag: contribution shape mismatch");
  }
  if (beta.cols() != cfg_.d_beta) throw ShapeError("inter_lag: beta width mismatch");

  std::vector<ad::Var> parts(contribs.begin(), contribs.end());
  parts.push_back(ad::broadcast_row(beta, rows));
  ad::Var out = G_.forward(ctx, ad::concat_cols(parts));  // (n·D, 1)
  return ad::reshape(out, rows / cfg_.D, cfg_.D);
}

ad::Var Predictor::predict_one_step(model::GraphCtx& ctx,
                                    const std::vector<ad::Var>& lags,
                                    const std::vector<ad::Var>& slices,
                                    ad::Var beta) const {
  if (lags.size() != cfg_.k || slices.size() != cfg_.k)
    throw ShapeError("predict_one_step: need k lags and k slices");
  std::vector<ad::Var> contribs;
  for (std::size_t j = 0; j < cfg_.k; ++j)
    contribs.push_back(intra_lag(ctx, lags[j], slices[j], j + 1));
  return inter_lag(ctx, contribs, beta);
}

std::vector<ad::Var> Predictor::rollout(model::GraphCtx& ctx,
                                        std::vector<ad::Var> lags,
                                        const std::vector<ad::Var>& slices,
                                        ad::Var beta, std::size_t horizon) const {
  if (horizon < 1) throw ConfigError("rollout: horizon must be >= 1");
  std::vector<ad::Var> out;
  for (std::size_t step = 0; step < horizon; ++step) {
    ad::Var next = predict_one_step(ctx, lags, slices, beta);
    out.push_back(next);
    // previous prediction becomes the newest lag input
    for (std::size_t j = cfg_.k - 1; j >= 1; --j) lags[j] = lags[j - 1];
    lags[0] = next;
  }
  return out;
}

}  // namespace gca::pred
