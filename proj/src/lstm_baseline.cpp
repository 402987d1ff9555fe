#include "gca/lstm_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gca/errors.hpp"
#include "gca/rng.hpp"

namespace gca::baseline {

namespace {

std::vector<ad::Var> window_steps(ad::Tape& tape,
                                  const std::vector<data::SeriesWindow>& windows,
                                  const std::vector<std::size_t>& idx) {
  const std::size_t t_in = windows[idx[0]].x.rows();
  const std::size_t D = windows[idx[0]].x.cols();
  std::vector<ad::Var> steps;
  for (std::size_t t = 0; t < t_in; ++t) {
    Matrix m(idx.size(), D);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t v = 0; v < D; ++v) m(i, v) = windows[idx[i]].x(t, v);
    steps.push_back(tape.input(m));
  }
  return steps;
}

Matrix first_targets(const std::vector<data::SeriesWindow>& windows,
                     const std::vector<std::size_t>& idx) {
  const std::size_t D = windows[idx[0]].y.cols();
  Matrix y(idx.size(), D);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t v = 0; v < D; ++v) y(i, v) = windows[idx[i]].y(0, v);
  return y;
}

}  // namespace

LstmForecaster::LstmForecaster(const LstmConfig& cfg) : cfg_(cfg) {
  if (cfg_.D < 1 || cfg_.hidden < 1) throw ConfigError("LstmForecaster: bad dimensions");
  const std::size_t H = cfg_.hidden;
  w_ = store_.add("lstm.w", cfg_.D + H, 4 * H);
  b_ = store_.add("lstm.b", 1, 4 * H);
  wo_ = store_.add("lstm.wo", H, cfg_.D);
  bo_ = store_.add("lstm.bo", 1, cfg_.D);

  Rng rng(cfg_.init_seed);
  auto glorot = [&](Matrix& m) {
    const double bound = std::sqrt(6.0 / double(m.rows() + m.cols()));
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = rng.uniform(-bound, bound);
  };
  glorot(w_->value);
  glorot(wo_->value);
  b_->value.setZero();
  for (std::size_t i = H; i < 2 * H; ++i) b_->value[i] = 1.0;  // forget-gate bias
  bo_->value.setZero();
}

ad::Var LstmForecaster::forward(model::GraphCtx& ctx,
                                const std::vector<ad::Var>& steps) const {
  if (steps.empty()) throw ShapeError("LstmForecaster::forward: no steps");
  const std::size_t n = steps[0].rows();
  const std::size_t H = cfg_.hidden;
  ad::Tape& tape = ctx.tape;

  ad::Var h = tape.input(Matrix(n, H));
  ad::Var c = tape.input(Matrix(n, H));
  ad::Var w = ctx.bind(*w_);
  ad::Var b = ctx.bind(*b_);
  for (const auto& x : steps) {
    if (x.cols() != cfg_.D) throw ShapeError("LstmForecaster::forward: step width");
    ad::Var gates = ad::linear(ad::concat_cols({x, h}), w, b);
    ad::Var i = ad::sigmoid_op(ad::slice_cols(gates, 0, H));
    ad::Var f = ad::sigmoid_op(ad::slice_cols(gates, H, H));
    ad::Var g = ad::tanh_op(ad::slice_cols(gates, 2 * H, H));
    ad::Var o = ad::sigmoid_op(ad::slice_cols(gates, 3 * H, H));
    c = ad::add(ad::mul(f, c), ad::mul(i, g));
    h = ad::mul(o, ad::tanh_op(c));
  }
  return ad::linear(h, ctx.bind(*wo_), ctx.bind(*bo_));
}

std::vector<ad::Var> LstmForecaster::rollout(model::GraphCtx& ctx,
                                             std::vector<ad::Var> steps,
                                             std::size_t horizon) const {
  std::vector<ad::Var> out;
  for (std::size_t s = 0; s < horizon; ++s) {
    ad::Var next = forward(ctx, steps);
    out.push_back(next);
    steps.erase(steps.begin());
    steps.push_back(next);
  }
  return out;
}

LstmTrainResult train_lstm(LstmForecaster& model, const data::PreparedDomain& source,
                           const data::PreparedDomain& target,
                           const train::TrainConfig& cfg) {
  cfg.validate();
  // pooled labeled windows from both domains
  std::vector<data::SeriesWindow> pool;
  for (const auto& w : source.splits.train)
    if (w.labeled) pool.push_back(w);
  for (const auto& w : target.splits.train)
    if (w.labeled) pool.push_back(w);
  if (pool.empty()) throw DataError("train_lstm: no labeled windows");

  Rng root(cfg.seed);
  Rng shuffle_rng = root.fork(1);
  train::AdamOptimizer opt(model.params(), cfg.learning_rate, cfg.grad_clip);

  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t steps_per_epoch = std::max<std::size_t>(1, pool.size() / cfg.batch_size);

  LstmTrainResult result;
  result.best_val_rmse = evaluate_lstm(model, target.splits.val, 1, cfg.target_dim).rmse;
  result.best_epoch = 0;
  std::vector<Matrix> best;
  auto snapshot = [&] {
    best.clear();
    for (auto* p : model.params()) best.push_back(p->value);
  };
  auto restore = [&] {
    auto params = model.params();
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best[i];
  };
  snapshot();

  std::size_t patience_left = cfg.early_stop_patience;
  std::size_t cursor = order.size();
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t step = 0; step < steps_per_epoch; ++step) {
      std::vector<std::size_t> idx;
      while (idx.size() < cfg.batch_size) {
        if (cursor == order.size()) {
          for (std::size_t i = order.size() - 1; i > 0; --i) {
            const auto j =
                static_cast<std::size_t>(shuffle_rng.uniform_int(0, std::int64_t(i)));
            std::swap(order[i], order[j]);
          }
          cursor = 0;
        }
        idx.push_back(order[cursor++]);
      }
      ad::Tape tape;
      model::GraphCtx ctx{tape, true};
      ad::Var pred = model.forward(ctx, window_steps(tape, pool, idx));
      ad::Var loss = ad::mse(pred, first_targets(pool, idx));
      if (!std::isfinite(loss.scalar()))
        throw NumericError("train_lstm: non-finite loss");
      opt.zero_grad();
      tape.backward(loss);
      ctx.flush_grads();
      opt.step();
    }
    const double val = evaluate_lstm(model, target.splits.val, 1, cfg.target_dim).rmse;
    if (val < result.best_val_rmse) {
      result.best_val_rmse = val;
      result.best_epoch = epoch;
      snapshot();
      patience_left = cfg.early_stop_patience;
    } else if (cfg.early_stop_patience > 0 && --patience_left == 0) {
      break;
    }
  }
  restore();
  return result;
}

train::EvalResult evaluate_lstm(LstmForecaster& model,
                                const std::vector<data::SeriesWindow>& windows,
                                std::size_t horizon, std::size_t target_dim) {
  if (windows.empty()) throw DataError("evaluate_lstm: no windows");
  if (windows[0].y.rows() < horizon)
    throw DataError("evaluate_lstm: horizon exceeds future block");
  ad::Tape tape;
  model::GraphCtx ctx{tape, false};
  std::vector<std::size_t> idx(windows.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto preds = model.rollout(ctx, window_steps(tape, windows, idx), horizon);

  const std::size_t D = model.config().D;
  double se = 0, ae = 0, se_dim = 0, ae_dim = 0;
  std::size_t count = 0, count_dim = 0;
  for (std::size_t s = 0; s < horizon; ++s) {
    const Matrix& p = preds[s].val();
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t v = 0; v < D; ++v) {
        const double e = p(i, v) - windows[i].y(s, v);
        se += e * e;
        ae += std::abs(e);
        ++count;
        if (v == target_dim) {
          se_dim += e * e;
          ae_dim += std::abs(e);
          ++count_dim;
        }
      }
  }
  train::EvalResult r;
  r.rmse = std::sqrt(se / double(count));
  r.mae = ae / double(count);
  r.rmse_target_dim = std::sqrt(se_dim / double(count_dim));
  r.mae_target_dim = ae_dim / double(count_dim);
  r.windows = windows.size();
  return r;
}

}  // namespace gca::baseline
