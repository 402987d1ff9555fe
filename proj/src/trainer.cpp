#include "gca/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <numeric>

#include "gca/errors.hpp"
#include "gca/eval_structures.hpp"
#include "gca/kernels.hpp"
#include "gca/rng.hpp"

namespace gca::train {

namespace {

using nlohmann::json;

// Shuffled index stream over a pool; reshuffles on wrap so every draw has a
// full batch even when the pool is smaller than the batch.
class BatchCycler {
 public:
  BatchCycler(std::size_t pool, Rng rng) : rng_(rng), idx_(pool) {
    std::iota(idx_.begin(), idx_.end(), 0);
    shuffle();
  }

  std::vector<std::size_t> draw(std::size_t n) {
    std::vector<std::size_t> out;
    out.reserve(n);
    while (out.size() < n) {
      if (pos_ == idx_.size()) {
        shuffle();
        pos_ = 0;
      }
      out.push_back(idx_[pos_++]);
    }
    return out;
  }

 private:
  void shuffle() {
    if (idx_.size() < 2) return;
    for (std::size_t i = idx_.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng_.uniform_int(0, std::int64_t(i)));
      std::swap(idx_[i], idx_[j]);
    }
  }
  Rng rng_;
  std::vector<std::size_t> idx_;
  std::size_t pos_ = 0;
};

std::vector<std::size_t> labeled_indices(const std::vector<data::SeriesWindow>& ws) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ws.size(); ++i)
    if (ws[i].labeled) out.push_back(i);
  return out;
}

std::vector<std::size_t> unlabeled_indices(const std::vector<data::SeriesWindow>& ws) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ws.size(); ++i)
    if (!ws[i].labeled) out.push_back(i);
  return out;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> out(n);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

void write_json_line(std::ofstream& out, const json& doc) {
  if (out.is_open()) out << doc.dump() << "\n";
}

json breakdown_json(const obj::LossBreakdown& b) {
  return json{{"recon_src", b.recon_src}, {"recon_tgt", b.recon_tgt},
              {"kl_src", b.kl_src},       {"kl_tgt", b.kl_tgt},
              {"disc", b.disc},           {"sparsity_src", b.sparsity_src},
              {"sparsity_tgt", b.sparsity_tgt}, {"strengthen", b.strengthen},
              {"total", b.total},         {"gamma", b.gamma},
              {"lambda", b.lambda},       {"delta", b.delta}};
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("TrainConfig: batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("TrainConfig: learning_rate must be > 0");
  if (optimizer != "adam") throw ConfigError("TrainConfig: unknown optimizer " + optimizer);
  if (!(tau.start > 0.0) || !(tau.end > 0.0))
    throw ConfigError("TrainConfig: temperatures must be positive");
  if (eval_horizon < 1) throw ConfigError("TrainConfig: eval_horizon must be >= 1");
}

AdamOptimizer::AdamOptimizer(std::vector<model::Param*> params, double lr, double clip)
    : params_(std::move(params)), lr_(lr), clip_(clip) {}

void AdamOptimizer::zero_grad() {
  for (auto* p : params_) p->zero_grad();
}

void AdamOptimizer::step() {
  double sq = 0.0;
  for (auto* p : params_) sq += kern::sumsq(p->grad.size(), p->grad.data());
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) throw NumericError("AdamOptimizer: non-finite gradient");
  const double scale = (clip_ > 0.0 && norm > clip_) ? clip_ / norm : 1.0;

  ++t_;
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const double bc1 = 1.0 - std::pow(b1, double(t_));
  const double bc2 = 1.0 - std::pow(b2, double(t_));
  for (auto* p : params_) {
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double g = p->grad[i] * scale;
      p->m[i] = b1 * p->m[i] + (1.0 - b1) * g;
      p->v[i] = b2 * p->v[i] + (1.0 - b2) * g * g;
      const double mhat = p->m[i] / bc1;
      const double vhat = p->v[i] / bc2;
      p->value[i] -= lr_ * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

std::vector<Matrix> forecast(GcaModel& model,
                             const std::vector<data::SeriesWindow>& windows,
                             data::DomainRole role, std::size_t horizon) {
  if (windows.empty()) throw DataError("forecast: no windows");
  ad::Tape tape;
  model::GraphCtx ctx{tape, false};
  Batch batch = build_batch(windows, all_indices(windows.size()), model.config());

  Rng unused(0);
  auto rec = model.encoder().reconstruct(ctx, batch.history, model.alpha(role), 1.0,
                                         unused, enc::SampleMode::probs);
  std::vector<ad::Var> lag_vars;
  for (const auto& lag : batch.lags) lag_vars.push_back(tape.input(lag));
  auto preds = model.predictor().rollout(ctx, lag_vars, rec.sample,
                                         ctx.bind(*model.beta(role)), horizon);
  std::vector<Matrix> out;
  for (auto& p : preds) out.push_back(p.val());
  return out;
}

EvalResult evaluate(GcaModel& model, const std::vector<data::SeriesWindow>& windows,
                    data::DomainRole role, std::size_t horizon,
                    std::size_t target_dim) {
  if (windows.empty()) throw DataError("evaluate: no windows");
  if (windows[0].y.rows() < horizon)
    throw DataError("evaluate: windows provide fewer future rows than the horizon");
  auto preds = forecast(model, windows, role, horizon);
  auto targets = build_targets(windows, all_indices(windows.size()), horizon);

  const std::size_t D = model.config().D;
  double se = 0, ae = 0, se_dim = 0, ae_dim = 0;
  std::size_t count = 0, count_dim = 0;
  for (std::size_t s = 0; s < horizon; ++s) {
    for (std::size_t i = 0; i < preds[s].rows(); ++i)
      for (std::size_t v = 0; v < D; ++v) {
        const double e = preds[s](i, v) - targets[s](i, v);
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
  EvalResult r;
  r.rmse = std::sqrt(se / double(count));
  r.mae = ae / double(count);
  r.rmse_target_dim = std::sqrt(se_dim / double(count_dim));
  r.mae_target_dim = ae_dim / double(count_dim);
  r.windows = windows.size();
  return r;
}

std::vector<Matrix> edge_scores(GcaModel& model,
                                const std::vector<data::SeriesWindow>& windows,
                                data::DomainRole role, std::size_t max_windows) {
  if (windows.empty()) throw DataError("edge_scores: no windows");
  const std::size_t n = std::min(windows.size(), max_windows);
  ad::Tape tape;
  model::GraphCtx ctx{tape, false};
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Batch batch = build_batch(windows, idx, model.config());
  Rng unused(0);
  auto rec = model.encoder().reconstruct(ctx, batch.history, model.alpha(role), 1.0,
                                         unused, enc::SampleMode::probs);
  return enc::batch_mean_probs(rec, model.config().D);
}

TrainResult train(GcaModel& model, const data::PreparedDomain& source,
                  const data::PreparedDomain& target, const TrainConfig& cfg) {
  cfg.validate();
  const auto src_pool = labeled_indices(source.splits.train);
  const auto tgt_pool = labeled_indices(target.splits.train);
  const auto tgt_unl_pool = unlabeled_indices(target.splits.train);
  if (src_pool.empty()) throw DataError("train: no labeled source windows");
  if (tgt_pool.empty()) throw DataError("train: need at least one labeled target window");

  obj::ObjectiveFlags flags;
  flags.variant = cfg.variant;
  flags.target_dim = cfg.target_dim;
  flags.use_unlabeled_target = cfg.use_unlabeled_target;
  flags.mode = cfg.sample_mode;

  Rng root(cfg.seed);
  BatchCycler src_cycler(src_pool.size(), root.fork(1));
  BatchCycler tgt_cycler(tgt_pool.size(), root.fork(2));
  BatchCycler unl_cycler(std::max<std::size_t>(tgt_unl_pool.size(), 1), root.fork(3));
  Rng noise_rng = root.fork(4);

  AdamOptimizer opt(model.params(), cfg.learning_rate, cfg.grad_clip);

  std::ofstream log;
  if (!cfg.log_path.empty()) {
    log.open(cfg.log_path);
    if (!log) throw IoError("cannot open log for writing: " + cfg.log_path);
  }

  const std::size_t steps_per_epoch = std::max<std::size_t>(1, src_pool.size() / cfg.batch_size);

  TrainResult result;
  result.best_val_rmse = std::numeric_limits<double>::infinity();

  // snapshot of the best parameters seen so far
  std::vector<Matrix> best_values;
  auto snapshot = [&] {
    best_values.clear();
    for (auto* p : model.params()) best_values.push_back(p->value);
  };
  auto restore = [&] {
    if (best_values.empty()) return;
    auto params = model.params();
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_values[i];
  };
  snapshot();
  result.best_epoch = 0;

  auto eval_val = [&] {
    return evaluate(model, target.splits.val, data::DomainRole::target, 1,
                    cfg.target_dim).rmse;
  };

  // epoch 0 record: untouched initialization
  {
    const double v = eval_val();
    result.best_val_rmse = v;
  }

  std::size_t patience_left = cfg.early_stop_patience;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double frac = cfg.epochs > 1 ? double(epoch - 1) / double(cfg.epochs - 1) : 0.0;
    const double tau = cfg.tau.start + (cfg.tau.end - cfg.tau.start) * frac;

    obj::LossBreakdown mean_b;
    for (std::size_t step = 0; step < steps_per_epoch; ++step) {
      const auto src_idx_local = src_cycler.draw(cfg.batch_size);
      const auto tgt_idx_local = tgt_cycler.draw(cfg.batch_size);
      std::vector<std::size_t> src_idx, tgt_idx;
      for (auto i : src_idx_local) src_idx.push_back(src_pool[i]);
      for (auto i : tgt_idx_local) tgt_idx.push_back(tgt_pool[i]);

      Batch src_batch = build_batch(source.splits.train, src_idx, model.config());
      Batch tgt_batch = build_batch(target.splits.train, tgt_idx, model.config());

      Batch unl_batch;
      const Batch* unl_ptr = nullptr;
      if (cfg.use_unlabeled_target && !tgt_unl_pool.empty()) {
        const auto unl_local = unl_cycler.draw(cfg.batch_size);
        std::vector<std::size_t> unl_idx;
        for (auto i : unl_local) unl_idx.push_back(tgt_unl_pool[i % tgt_unl_pool.size()]);
        unl_batch = build_batch(target.splits.train, unl_idx, model.config());
        unl_ptr = &unl_batch;
      }

      ad::Tape tape;
      model::GraphCtx ctx{tape, true};
      auto res = obj::total_loss(ctx, model, src_batch, tgt_batch, cfg.weights,
                                 cfg.prior, flags, tau, noise_rng, unl_ptr);
      if (!std::isfinite(res.breakdown.total))
        throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch));

      opt.zero_grad();
      tape.backward(res.total);
      ctx.flush_grads();
      opt.step();

      mean_b.recon_src += res.breakdown.recon_src;
      mean_b.recon_tgt += res.breakdown.recon_tgt;
      mean_b.kl_src += res.breakdown.kl_src;
      mean_b.kl_tgt += res.breakdown.kl_tgt;
      mean_b.disc += res.breakdown.disc;
      mean_b.sparsity_src += res.breakdown.sparsity_src;
      mean_b.sparsity_tgt += res.breakdown.sparsity_tgt;
      mean_b.strengthen += res.breakdown.strengthen;
      mean_b.total += res.breakdown.total;
      mean_b.gamma = res.breakdown.gamma;
      mean_b.lambda = res.breakdown.lambda;
      mean_b.delta = res.breakdown.delta;

      json line = breakdown_json(res.breakdown);
      line["type"] = "step";
      line["epoch"] = epoch;
      line["step"] = step;
      line["tau"] = tau;
      write_json_line(log, line);
    }
    const double inv_steps = 1.0 / double(steps_per_epoch);
    mean_b.recon_src *= inv_steps;
    mean_b.recon_tgt *= inv_steps;
    mean_b.kl_src *= inv_steps;
    mean_b.kl_tgt *= inv_steps;
    mean_b.disc *= inv_steps;
    mean_b.sparsity_src *= inv_steps;
    mean_b.sparsity_tgt *= inv_steps;
    mean_b.strengthen *= inv_steps;
    mean_b.total *= inv_steps;

    EpochRecord rec;
    rec.epoch = epoch;
    rec.tau = tau;
    rec.mean_loss = mean_b;
    rec.val_rmse = eval_val();

    if (cfg.log_epoch_test) {
      rec.test_rmse = evaluate(model, target.splits.test, data::DomainRole::target, 1,
                               cfg.target_dim).rmse;
      auto src_scores = edge_scores(model, source.splits.val, data::DomainRole::source);
      auto tgt_scores = edge_scores(model, target.splits.val, data::DomainRole::target);
      rec.structure_l1 = eval::structure_l1(src_scores, tgt_scores);
      if (source.ground_truth)
        rec.auprc_source = eval::auprc(src_scores, *source.ground_truth);
      if (target.ground_truth)
        rec.auprc_target = eval::auprc(tgt_scores, *target.ground_truth);
    }

    json line = breakdown_json(mean_b);
    line["type"] = "epoch";
    line["epoch"] = epoch;
    line["tau"] = tau;
    line["val_rmse"] = rec.val_rmse;
    line["test_rmse"] = rec.test_rmse;
    line["auprc_source"] = rec.auprc_source;
    line["auprc_target"] = rec.auprc_target;
    line["structure_l1"] = rec.structure_l1;
    write_json_line(log, line);

    result.history.push_back(rec);

    if (rec.val_rmse < result.best_val_rmse) {
      result.best_val_rmse = rec.val_rmse;
      result.best_epoch = epoch;
      snapshot();
      patience_left = cfg.early_stop_patience;
    } else if (cfg.early_stop_patience > 0 && --patience_left == 0) {
      break;
    }
  }

  restore();

  if (!cfg.checkpoint_path.empty()) {
    CheckpointMeta meta;
    meta.config_hash = cfg.config_hash;
    meta.epoch = result.best_epoch;
    meta.adam_steps = opt.steps_taken();
    meta.stats_source = source.stats;
    meta.stats_target = target.stats;
    save_checkpoint(cfg.checkpoint_path, model, meta);
  }
  return result;
}

SweepStats seed_sweep(const GcaModelConfig& model_cfg,
                      const data::PreparedDomain& source,
                      const data::PreparedDomain& target, const TrainConfig& cfg,
                      std::size_t n_seeds) {
  if (n_seeds < 2) throw ConfigError("seed_sweep: need at least 2 seeds");
  SweepStats stats;
  for (std::size_t s = 0; s < n_seeds; ++s) {
    GcaModelConfig mc = model_cfg;
    mc.init_seed = model_cfg.init_seed + s;
    TrainConfig tc = cfg;
    tc.seed = cfg.seed + s;
    tc.checkpoint_path.clear();
    tc.log_path.clear();
    GcaModel model(mc, cfg.variant);
    train(model, source, target, tc);
    stats.runs.push_back(evaluate(model, target.splits.test, data::DomainRole::target,
                                  cfg.eval_horizon, cfg.target_dim));
  }
  auto agg = [&](auto pick, double& mean, double& sd) {
    mean = 0;
    for (const auto& r : stats.runs) mean += pick(r);
    mean /= double(stats.runs.size());
    sd = 0;
    for (const auto& r : stats.runs) sd += (pick(r) - mean) * (pick(r) - mean);
    sd = std::sqrt(sd / double(stats.runs.size()));
  };
  agg([](const EvalResult& r) { return r.rmse; }, stats.rmse_mean, stats.rmse_std);
  agg([](const EvalResult& r) { return r.mae; }, stats.mae_mean, stats.mae_std);
  return stats;
}

// ---- checkpoint io ----

namespace {

void put_u32(std::ofstream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }
void put_u64(std::ofstream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); }
std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
std::uint64_t get_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 8);
  return v;
}
void put_string(std::ofstream& out, const std::string& s) {
  put_u32(out, std::uint32_t(s.size()));
  out.write(s.data(), std::streamsize(s.size()));
}
std::string get_string(std::ifstream& in) {
  const auto n = get_u32(in);
  std::string s(n, '\0');
  in.read(s.data(), n);
  return s;
}
void put_doubles(std::ofstream& out, const double* p, std::size_t n) {
  out.write(reinterpret_cast<const char*>(p), std::streamsize(n * sizeof(double)));
}
void get_doubles(std::ifstream& in, double* p, std::size_t n) {
  in.read(reinterpret_cast<char*>(p), std::streamsize(n * sizeof(double)));
}
void put_stats(std::ofstream& out, const data::NormStats& s) {
  put_u64(out, s.mean.size());
  put_doubles(out, s.mean.data(), s.mean.size());
  put_doubles(out, s.stddev.data(), s.stddev.size());
}
data::NormStats get_stats(std::ifstream& in) {
  data::NormStats s;
  const auto n = get_u64(in);
  s.mean.resize(n);
  s.stddev.resize(n);
  get_doubles(in, s.mean.data(), n);
  get_doubles(in, s.stddev.data(), n);
  return s;
}

constexpr char kMagic[5] = "GCAC";

}  // namespace

void save_checkpoint(const std::string& path, GcaModel& model,
                     const CheckpointMeta& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);
  out.write(kMagic, 4);
  put_u32(out, 1);  // version
  put_u64(out, meta.config_hash);
  put_u64(out, meta.epoch);
  put_u64(out, meta.adam_steps);
  auto params = model.params();
  put_u32(out, std::uint32_t(params.size()));
  for (auto* p : params) {
    put_string(out, p->name);
    put_u64(out, p->value.rows());
    put_u64(out, p->value.cols());
    put_doubles(out, p->value.data(), p->value.size());
    put_doubles(out, p->m.data(), p->m.size());
    put_doubles(out, p->v.data(), p->v.size());
  }
  put_stats(out, meta.stats_source);
  put_stats(out, meta.stats_target);
  if (!out) throw IoError("checkpoint write failed: " + path);
}

CheckpointMeta load_checkpoint(const std::string& path, GcaModel& model) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw IoError("not a checkpoint file: " + path);
  if (get_u32(in) != 1) throw IoError("unsupported checkpoint version in " + path);
  CheckpointMeta meta;
  meta.config_hash = get_u64(in);
  meta.epoch = get_u64(in);
  meta.adam_steps = get_u64(in);
  auto params = model.params();
  const auto n = get_u32(in);
  if (n != params.size()) throw IoError("checkpoint parameter count mismatch");
  for (auto* p : params) {
    const std::string name = get_string(in);
    const auto rows = get_u64(in);
    const auto cols = get_u64(in);
    if (name != p->name || rows != p->value.rows() || cols != p->value.cols())
      throw IoError("checkpoint layout mismatch at parameter " + p->name);
    get_doubles(in, p->value.data(), p->value.size());
    get_doubles(in, p->m.data(), p->m.size());
    get_doubles(in, p->v.data(), p->v.size());
  }
  meta.stats_source = get_stats(in);
  meta.stats_target = get_stats(in);
  if (!in) throw IoError("checkpoint truncated: " + path);
  return meta;
}

}  // namespace gca::train
