#include "gca/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>

#include "gca/errors.hpp"

namespace gca::config {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError("unknown config key: " + path + it.key());
  }
}

template <class T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value type at " + path + key);
  }
}

SynthgenSection parse_synthgen(const json& j) {
  SynthgenSection s;
  reject_unknown(j, {"D", "k", "edge_density", "structure_jitter", "seed", "domains"},
                 "synthgen.");
  s.D = get_or<std::size_t>(j, "D", s.D, "synthgen.");
  s.k = get_or<std::size_t>(j, "k", s.k, "synthgen.");
  s.edge_density = get_or<double>(j, "edge_density", s.edge_density, "synthgen.");
  s.structure_jitter = get_or<double>(j, "structure_jitter", s.structure_jitter, "synthgen.");
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed, "synthgen.");
  if (j.contains("domains")) {
    if (!j["domains"].is_array()) throw ConfigError("synthgen.domains must be an array");
    std::size_t i = 0;
    for (const auto& dj : j["domains"]) {
      const std::string path = "synthgen.domains[" + std::to_string(i) + "].";
      reject_unknown(dj, {"noise_variance", "sample_interval", "nonlin_c", "length",
                          "burn_in", "seed"},
                     path);
      synth::DomainGenConfig d;
      d.noise_variance = get_or<double>(dj, "noise_variance", 1.0, path);
      d.sample_interval = get_or<int>(dj, "sample_interval", 1, path);
      d.nonlin_c = get_or<double>(dj, "nonlin_c", 0.0, path);
      d.length = get_or<std::size_t>(dj, "length", 1000, path);
      d.burn_in = get_or<std::size_t>(dj, "burn_in", 100, path);
      d.seed = get_or<std::uint64_t>(dj, "seed", s.seed * 1000 + i, path);
      s.domains.push_back(d);
      ++i;
    }
  }
  return s;
}

DataioSection parse_dataio(const json& j) {
  DataioSection s;
  reject_unknown(j, {"t_in", "tau", "stride", "train_frac", "val_frac", "test_frac",
                     "target_label_frac"},
                 "dataio.");
  s.t_in = get_or<std::size_t>(j, "t_in", s.t_in, "dataio.");
  s.tau = get_or<std::size_t>(j, "tau", s.tau, "dataio.");
  s.stride = get_or<std::size_t>(j, "stride", s.stride, "dataio.");
  s.split.train_frac = get_or<double>(j, "train_frac", s.split.train_frac, "dataio.");
  s.split.val_frac = get_or<double>(j, "val_frac", s.split.val_frac, "dataio.");
  s.split.test_frac = get_or<double>(j, "test_frac", s.split.test_frac, "dataio.");
  s.split.target_label_frac =
      get_or<double>(j, "target_label_frac", s.split.target_label_frac, "dataio.");
  return s;
}

ModelSection parse_model(const json& j) {
  ModelSection s;
  reject_unknown(j, {"d_alpha", "d_beta", "d_e", "enc_hidden", "pred_hidden",
                     "full_window", "lstm_hidden"},
                 "model.");
  s.d_alpha = get_or<std::size_t>(j, "d_alpha", s.d_alpha, "model.");
  s.d_beta = get_or<std::size_t>(j, "d_beta", s.d_beta, "model.");
  s.d_e = get_or<std::size_t>(j, "d_e", s.d_e, "model.");
  s.enc_hidden = get_or<std::size_t>(j, "enc_hidden", s.enc_hidden, "model.");
  s.pred_hidden = get_or<std::size_t>(j, "pred_hidden", s.pred_hidden, "model.");
  s.full_window = get_or<bool>(j, "full_window", s.full_window, "model.");
  s.lstm_hidden = get_or<std::size_t>(j, "lstm_hidden", s.lstm_hidden, "model.");
  return s;
}

ObjectiveSection parse_objective(const json& j) {
  ObjectiveSection s;
  reject_unknown(j, {"gamma", "lambda", "delta", "edge_prior", "target_dim",
                     "use_unlabeled_target", "hard_samples"},
                 "objective.");
  s.weights.gamma = get_or<double>(j, "gamma", s.weights.gamma, "objective.");
  s.weights.lambda = get_or<double>(j, "lambda", s.weights.lambda, "objective.");
  s.weights.delta = get_or<double>(j, "delta", s.weights.delta, "objective.");
  s.prior.edge_prior_p = get_or<double>(j, "edge_prior", s.prior.edge_prior_p, "objective.");
  s.target_dim = get_or<std::size_t>(j, "target_dim", s.target_dim, "objective.");
  s.use_unlabeled_target =
      get_or<bool>(j, "use_unlabeled_target", s.use_unlabeled_target, "objective.");
  s.hard_samples = get_or<bool>(j, "hard_samples", s.hard_samples, "objective.");
  return s;
}

TrainerSection parse_trainer(const json& j) {
  TrainerSection s;
  reject_unknown(j, {"epochs", "batch_size", "learning_rate", "optimizer", "seed",
                     "early_stop_patience", "grad_clip", "tau_start", "tau_end",
                     "eval_horizon", "n_seeds"},
                 "trainer.");
  s.epochs = get_or<std::size_t>(j, "epochs", s.epochs, "trainer.");
  s.batch_size = get_or<std::size_t>(j, "batch_size", s.batch_size, "trainer.");
  s.learning_rate = get_or<double>(j, "learning_rate", s.learning_rate, "trainer.");
  s.optimizer = get_or<std::string>(j, "optimizer", s.optimizer, "trainer.");
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed, "trainer.");
  s.early_stop_patience =
      get_or<std::size_t>(j, "early_stop_patience", s.early_stop_patience, "trainer.");
  s.grad_clip = get_or<double>(j, "grad_clip", s.grad_clip, "trainer.");
  s.tau_start = get_or<double>(j, "tau_start", s.tau_start, "trainer.");
  s.tau_end = get_or<double>(j, "tau_end", s.tau_end, "trainer.");
  s.eval_horizon = get_or<std::size_t>(j, "eval_horizon", s.eval_horizon, "trainer.");
  s.n_seeds = get_or<std::size_t>(j, "n_seeds", s.n_seeds, "trainer.");
  return s;
}

TrainSection parse_train(const json& j) {
  TrainSection s;
  reject_unknown(j, {"dataset_dir", "source", "target"}, "train.");
  s.dataset_dir = get_or<std::string>(j, "dataset_dir", s.dataset_dir, "train.");
  s.source = get_or<std::string>(j, "source", s.source, "train.");
  s.target = get_or<std::string>(j, "target", s.target, "train.");
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  reject_unknown(doc, {"synthgen", "dataio", "model", "objective", "trainer", "train"}, "");

  RunConfig cfg;
  if (doc.contains("synthgen")) cfg.synthgen = parse_synthgen(doc["synthgen"]);
  if (doc.contains("dataio")) cfg.dataio = parse_dataio(doc["dataio"]);
  if (doc.contains("model")) cfg.model = parse_model(doc["model"]);
  if (doc.contains("objective")) cfg.objective = parse_objective(doc["objective"]);
  if (doc.contains("trainer")) cfg.trainer = parse_trainer(doc["trainer"]);
  if (doc.contains("train")) cfg.train = parse_train(doc["train"]);
  cfg.raw = doc.dump();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

GcaModelConfig RunConfig::model_config(std::uint64_t init_seed) const {
  GcaModelConfig mc;
  mc.D = synthgen.D;
  mc.k = synthgen.k;
  mc.d_alpha = model.d_alpha;
  mc.d_beta = model.d_beta;
  mc.d_e = model.d_e;
  mc.enc_hidden = model.enc_hidden;
  mc.pred_hidden = model.pred_hidden;
  mc.full_window = model.full_window;
  mc.t_in = effective_t_in();
  mc.init_seed = init_seed;
  return mc;
}

train::TrainConfig RunConfig::train_config(model::Variant variant) const {
  train::TrainConfig tc;
  tc.epochs = trainer.epochs;
  tc.batch_size = trainer.batch_size;
  tc.learning_rate = trainer.learning_rate;
  tc.optimizer = trainer.optimizer;
  tc.seed = trainer.seed;
  tc.early_stop_patience = trainer.early_stop_patience;
  tc.grad_clip = trainer.grad_clip;
  tc.tau.start = trainer.tau_start;
  tc.tau.end = trainer.tau_end;
  tc.weights = objective.weights;
  tc.prior = objective.prior;
  tc.variant = variant;
  tc.target_dim = objective.target_dim;
  tc.use_unlabeled_target = objective.use_unlabeled_target;
  tc.sample_mode = objective.hard_samples ? enc::SampleMode::hard : enc::SampleMode::soft;
  tc.eval_horizon = trainer.eval_horizon;
  tc.config_hash = config_hash(*this);
  return tc;
}

std::uint64_t fnv1a(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  return fnv1a(cfg.raw.data(), cfg.raw.size());
}

std::uint64_t file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for hashing: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a(bytes.data(), bytes.size());
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace gca::config
