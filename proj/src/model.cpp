#include "gca/model.hpp"

#include <cmath>

#include "gca/errors.hpp"
#include "gca/gca_model.hpp"

namespace gca::model {

Mlp::Mlp(ParamStore& store, const std::string& name,
         const std::vector<std::size_t>& widths) {
  if (widths.size() < 2) throw ConfigError("Mlp: need at least input and output widths");
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    weights_.push_back(store.add(name + ".w" + std::to_string(l), widths[l], widths[l + 1]));
    biases_.push_back(store.add(name + ".b" + std::to_string(l), 1, widths[l + 1]));
  }
}

void Mlp::init(Rng& rng) {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Matrix& w = weights_[l]->value;
    const double bound = std::sqrt(6.0 / double(w.rows() + w.cols()));
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-bound, bound);
    biases_[l]->value.setZero();
  }
}

void Mlp::zero_output_layer() {
  weights_.back()->value.setZero();
  biases_.back()->value.setZero();
}

ad::Var Mlp::forward(GraphCtx& ctx, ad::Var x) const {
  ad::Var h = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    h = ad::linear(h, ctx.bind(*weights_[l]), ctx.bind(*biases_[l]));
    if (l + 1 < weights_.size()) h = ad::tanh_op(h);
  }
  return h;
}

Variant variant_from_string(const std::string& s) {
  if (s == "gca") return Variant::gca;
  if (s == "gca-r") return Variant::gca_r;
  if (s == "gca-e") return Variant::gca_e;
  if (s == "gca-s") return Variant::gca_s;
  if (s == "gca-alpha") return Variant::gca_alpha;
  if (s == "lstm-st") return Variant::lstm_st;
  throw ConfigError("unknown variant: " + s);
}

std::string variant_to_string(Variant v) {
  switch (v) {
    case Variant::gca: return "gca";
    case Variant::gca_r: return "gca-r";
    case Variant::gca_e: return "gca-e";
    case Variant::gca_s: return "gca-s";
    case Variant::gca_alpha: return "gca-alpha";
    case Variant::lstm_st: return "lstm-st";
  }
  return "gca";
}

}  // namespace gca::model

namespace gca {

GcaModel::GcaModel(const GcaModelConfig& cfg, model::Variant variant)
    : cfg_(cfg), variant_(variant) {
  enc::EncoderConfig ec;
  ec.D = cfg.D;
  ec.k = cfg.k;
  ec.d_alpha = cfg.d_alpha;
  ec.hidden = cfg.enc_hidden;
  ec.use_alpha = variant != model::Variant::gca_alpha;
  ec.full_window = cfg.full_window;
  ec.t_in = cfg.t_in;
  encoder_ = enc::StructureEncoder(store_, ec);
  encoder_params_ = store_.all();

  pred::PredictorConfig pc;
  pc.D = cfg.D;
  pc.k = cfg.k;
  pc.d_e = cfg.d_e;
  pc.d_beta = cfg.d_beta;
  pc.hidden = cfg.pred_hidden;
  const std::size_t before_pred = store_.size();
  predictor_ = pred::Predictor(store_, pc);
  {
    auto all = store_.all();
    predictor_params_.assign(all.begin() + before_pred, all.end());
  }

  alpha_src_ = store_.add("alpha.source", 1, cfg.d_alpha);
  alpha_tgt_ = store_.add("alpha.target", 1, cfg.d_alpha);
  beta_src_ = store_.add("beta.source", 1, cfg.d_beta);
  beta_tgt_ = store_.add("beta.target", 1, cfg.d_beta);

  Rng root(cfg.init_seed);
  Rng enc_rng = root.fork(1);
  Rng pred_rng = root.fork(2);
  Rng latent_rng = root.fork(3);
  encoder_.init(enc_rng);
  predictor_.init(pred_rng);
  for (model::Param* p : {alpha_src_, alpha_tgt_, beta_src_, beta_tgt_}) {
    for (std::size_t i = 0; i < p->value.size(); ++i)
      p->value[i] = latent_rng.uniform(-0.5, 0.5);
  }
}

Batch build_batch(const std::vector<data::SeriesWindow>& windows,
                  const std::vector<std::size_t>& indices,
                  const GcaModelConfig& cfg) {
  if (indices.empty()) throw DataError("build_batch: empty index set");
  const std::size_t n = indices.size();
  const std::size_t D = cfg.D, k = cfg.k;
  const std::size_t t_in = windows[indices[0]].x.rows();
  if (t_in < k) throw ShapeError("build_batch: window history shorter than max lag");
  const std::size_t hist_lags = cfg.full_window ? t_in : k;

  Batch b;
  b.history = Matrix(n, hist_lags * D);
  b.lags.assign(k, Matrix(n, D));
  b.y = Matrix(n, D);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& w = windows[indices[i]];
    if (w.x.rows() != t_in || w.x.cols() != D)
      throw ShapeError("build_batch: inconsistent window shapes");
    for (std::size_t j = 0; j < hist_lags; ++j) {
      const double* src = w.x.row(t_in - 1 - j);
      for (std::size_t v = 0; v < D; ++v) b.history(i, j * D + v) = src[v];
    }
    for (std::size_t j = 0; j < k; ++j) {
      const double* src = w.x.row(t_in - 1 - j);
      for (std::size_t v = 0; v < D; ++v) b.lags[j](i, v) = src[v];
    }
    for (std::size_t v = 0; v < D; ++v) b.y(i, v) = w.y(0, v);
  }
  return b;
}

std::vector<Matrix> build_targets(const std::vector<data::SeriesWindow>& windows,
                                  const std::vector<std::size_t>& indices,
                                  std::size_t horizon) {
  if (indices.empty()) throw DataError("build_targets: empty index set");
  const std::size_t D = windows[indices[0]].y.cols();
  if (windows[indices[0]].y.rows() < horizon)
    throw DataError("build_targets: window future block shorter than horizon");
  std::vector<Matrix> steps(horizon, Matrix(indices.size(), D));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& w = windows[indices[i]];
    for (std::size_t s = 0; s < horizon; ++s)
      for (std::size_t v = 0; v < D; ++v) steps[s](i, v) = w.y(s, v);
  }
  return steps;
}

}  // namespace gca
