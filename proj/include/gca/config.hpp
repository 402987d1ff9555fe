#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gca/dataio.hpp"
#include "gca/gca_model.hpp"
#include "gca/synthgen.hpp"
#include "gca/trainer.hpp"

// One structured JSON config file drives every CLI command; unknown keys are
// rejected with their full path so typos cannot silently change a run.

namespace gca::config {

struct SynthgenSection {
  std::size_t D = 5;
  std::size_t k = 3;
  double edge_density = 0.2;
  double structure_jitter = 0.05;
  std::uint64_t seed = 21;
  std::vector<synth::DomainGenConfig> domains;
};

struct DataioSection {
  std::size_t t_in = 0;  // 0 → 2k
  std::size_t tau = 1;
  std::size_t stride = 1;
  data::SplitSpec split;
};

struct ModelSection {
  std::size_t d_alpha = 8;
  std::size_t d_beta = 8;
  std::size_t d_e = 32;
  std::size_t enc_hidden = 0;
  std::size_t pred_hidden = 0;
  bool full_window = false;
  std::size_t lstm_hidden = 32;
};

struct ObjectiveSection {
  obj::LossWeights weights;
  obj::StructurePrior prior;
  std::size_t target_dim = 0;
  bool use_unlabeled_target = false;
  bool hard_samples = false;
};

struct TrainerSection {
  std::size_t epochs = 60;
  std::size_t batch_size = 128;
  double learning_rate = 1e-3;
  std::string optimizer = "adam";
  std::uint64_t seed = 1;
  std::size_t early_stop_patience = 10;
  double grad_clip = 5.0;
  double tau_start = 1.0;
  double tau_end = 0.3;
  std::size_t eval_horizon = 1;
  std::size_t n_seeds = 3;
};

struct TrainSection {
  std::string dataset_dir;
  std::string source = "domain1";
  std::string target = "domain2";
};

struct RunConfig {
  SynthgenSection synthgen;
  DataioSection dataio;
  ModelSection model;
  ObjectiveSection objective;
  TrainerSection trainer;
  TrainSection train;
  std::string raw;  // canonical dump, input to the config hash

  std::size_t effective_t_in() const {
    return dataio.t_in ? dataio.t_in : 2 * synthgen.k;
  }
  GcaModelConfig model_config(std::uint64_t init_seed) const;
  train::TrainConfig train_config(model::Variant variant) const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

std::uint64_t fnv1a(const void* data, std::size_t n);
std::uint64_t config_hash(const RunConfig& cfg);
std::uint64_t file_hash(const std::string& path);
std::string hash_hex(std::uint64_t h);

}  // namespace gca::config
