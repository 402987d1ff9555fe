// Command-line front end: simulate | train | evaluate | transfer-matrix | plot.
// Every command is driven by one JSON config file; outputs land in versioned
// directories so reruns never clobber earlier results.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "gca/config.hpp"
#include "gca/dataio.hpp"
#include "gca/errors.hpp"
#include "gca/eval_structures.hpp"
#include "gca/gca_model.hpp"
#include "gca/lstm_baseline.hpp"
#include "gca/plots.hpp"
#include "gca/synthgen.hpp"
#include "gca/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gca;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string variant = "gca";
  std::int64_t seed = -1;  // -1: keep config seed
  bool deterministic = false;
};

fs::path resolve_out_dir(const std::string& requested) {
  fs::path base = requested.empty() ? fs::path("out") : fs::path(requested);
  fs::path dir = base;
  int version = 1;
  while (fs::exists(dir) && !fs::is_empty(dir)) {
    ++version;
    dir = base;
    dir += "_v" + std::to_string(version);
  }
  fs::create_directories(dir);
  return dir;
}

json tensor_json(const std::vector<Matrix>& slices) {
  json out = json::array();
  for (const auto& s : slices) {
    json slice = json::array();
    for (std::size_t u = 0; u < s.rows(); ++u) {
      json row = json::array();
      for (std::size_t v = 0; v < s.cols(); ++v) row.push_back(s(u, v));
      slice.push_back(row);
    }
    out.push_back(slice);
  }
  return out;
}

struct DomainFiles {
  std::string id;
  fs::path csv;
  fs::path structure;
};

std::vector<DomainFiles> read_family(const fs::path& dataset_dir) {
  const fs::path family = dataset_dir / "family.json";
  std::ifstream in(family);
  if (!in) throw IoError("cannot open dataset index: " + family.string());
  json doc = json::parse(in);
  std::vector<DomainFiles> out;
  for (const auto& d : doc.at("domains")) {
    DomainFiles f;
    f.id = d.at("domain_id").get<std::string>();
    f.csv = dataset_dir / d.at("csv_file").get<std::string>();
    f.structure = dataset_dir / d.at("structure_file").get<std::string>();
    out.push_back(std::move(f));
  }
  if (out.empty()) throw DataError("dataset index lists no domains");
  return out;
}

synth::RawSeries load_domain(const std::vector<DomainFiles>& family,
                             const std::string& id) {
  for (const auto& f : family) {
    if (f.id != id) continue;
    auto series = data::ingest_csv(f.csv.string());
    series.domain_id = id;
    if (fs::exists(f.structure)) {
      series.ground_truth = std::make_shared<synth::GroundTruthStructure>(
          synth::read_structure_json(f.structure.string()));
    }
    return series;
  }
  throw ConfigError("domain not found in dataset: " + id);
}

std::uint64_t dataset_hash(const std::vector<DomainFiles>& family) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& f : family) {
    const std::uint64_t fh = config::file_hash(f.csv.string());
    h ^= fh + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

// ---- simulate ----

int cmd_simulate(const CommonOpts& opts) {
  auto cfg = config::load_config(opts.config_path);
  if (cfg.synthgen.domains.empty())
    throw ConfigError("synthgen.domains must list at least one domain");
  const std::uint64_t seed = opts.seed >= 0 ? std::uint64_t(opts.seed) : cfg.synthgen.seed;

  auto fam = synth::make_domain_family(cfg.synthgen.D, cfg.synthgen.k,
                                       cfg.synthgen.edge_density, cfg.synthgen.domains,
                                       cfg.synthgen.structure_jitter, seed);

  const fs::path dir = resolve_out_dir(opts.out_dir.empty() ? "dataset" : opts.out_dir);
  json domains = json::array();
  for (std::size_t d = 0; d < fam.series.size(); ++d) {
    const std::string id = fam.series[d].domain_id;
    const std::string csv = id + ".csv";
    const std::string structure = id + "_structure.json";
    const std::string manifest = id + "_manifest.json";
    synth::write_series_csv((dir / csv).string(), fam.series[d]);
    synth::write_structure_json((dir / structure).string(), *fam.structures[d]);
    synth::write_manifest_json((dir / manifest).string(), fam.series[d],
                               cfg.synthgen.domains[d], csv, structure);
    domains.push_back({{"domain_id", id},
                       {"csv_file", csv},
                       {"structure_file", structure},
                       {"manifest_file", manifest},
                       {"rows", fam.series[d].values.rows()}});
  }
  json index{{"schema_version", 1},
             {"seed", seed},
             {"D", cfg.synthgen.D},
             {"k", cfg.synthgen.k},
             {"edge_density", cfg.synthgen.edge_density},
             {"structure_jitter", cfg.synthgen.structure_jitter},
             {"config_hash", config::hash_hex(config::config_hash(cfg))},
             {"domains", domains}};
  std::ofstream out(dir / "family.json");
  out << index.dump(2) << "\n";
  std::cout << dir.string() << "\n";
  return 0;
}

// ---- train ----

struct TrainOutcome {
  train::EvalResult metrics;
  double auprc_source = -1;
  double auprc_target = -1;
  double structure_l1 = 0;
  double best_val_rmse = 0;
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  std::vector<Matrix> probs_src, probs_tgt;
};

TrainOutcome run_gca_training(const config::RunConfig& cfg, model::Variant variant,
                              std::uint64_t seed, const data::PreparedDomain& src,
                              const data::PreparedDomain& tgt,
                              const std::string& checkpoint_path,
                              const std::string& log_path, bool log_epoch_test = true) {
  GcaModel model(cfg.model_config(seed), variant);
  auto tc = cfg.train_config(variant);
  tc.seed = seed;
  tc.checkpoint_path = checkpoint_path;
  tc.log_path = log_path;
  tc.log_epoch_test = log_epoch_test;

  auto result = train::train(model, src, tgt, tc);

  TrainOutcome out;
  out.metrics = train::evaluate(model, tgt.splits.test, data::DomainRole::target,
                                tc.eval_horizon, tc.target_dim);
  out.best_val_rmse = result.best_val_rmse;
  out.best_epoch = result.best_epoch;
  out.epochs_run = result.history.size();
  out.probs_src = train::edge_scores(model, src.splits.test, data::DomainRole::source);
  out.probs_tgt = train::edge_scores(model, tgt.splits.test, data::DomainRole::target);
  out.structure_l1 = eval::structure_l1(out.probs_src, out.probs_tgt);
  if (src.ground_truth) out.auprc_source = eval::auprc(out.probs_src, *src.ground_truth);
  if (tgt.ground_truth) out.auprc_target = eval::auprc(out.probs_tgt, *tgt.ground_truth);
  return out;
}

TrainOutcome run_lstm_training(const config::RunConfig& cfg, std::uint64_t seed,
                               const data::PreparedDomain& src,
                               const data::PreparedDomain& tgt) {
  baseline::LstmConfig lc;
  lc.D = cfg.synthgen.D;
  lc.hidden = cfg.model.lstm_hidden;
  lc.init_seed = seed;
  baseline::LstmForecaster model(lc);
  auto tc = cfg.train_config(model::Variant::lstm_st);
  tc.seed = seed;
  auto result = baseline::train_lstm(model, src, tgt, tc);

  TrainOutcome out;
  out.metrics = baseline::evaluate_lstm(model, tgt.splits.test, tc.eval_horizon,
                                        tc.target_dim);
  out.best_val_rmse = result.best_val_rmse;
  out.best_epoch = result.best_epoch;
  return out;
}

std::pair<data::PreparedDomain, data::PreparedDomain> prepare_pair(
    const config::RunConfig& cfg, const std::vector<DomainFiles>& family,
    const std::string& source_id, const std::string& target_id, std::uint64_t seed) {
  auto src_series = load_domain(family, source_id);
  auto tgt_series = load_domain(family, target_id);
  const std::size_t t_in = cfg.effective_t_in();
  const std::size_t tau = std::max(cfg.dataio.tau, cfg.trainer.eval_horizon);
  auto src = data::prepare_domain(src_series, t_in, tau, cfg.dataio.stride,
                                  cfg.dataio.split, data::DomainRole::source, seed);
  auto tgt = data::prepare_domain(tgt_series, t_in, tau, cfg.dataio.stride,
                                  cfg.dataio.split, data::DomainRole::target, seed + 1);
  return {std::move(src), std::move(tgt)};
}

void write_forecast_csv(const fs::path& path, GcaModel& model,
                        const data::PreparedDomain& tgt, std::size_t horizon) {
  const auto& windows = tgt.splits.test;
  const std::size_t n = std::min<std::size_t>(windows.size(), 512);
  std::vector<data::SeriesWindow> head(windows.begin(), windows.begin() + n);
  auto preds = train::forecast(model, head, data::DomainRole::target, horizon);
  std::ofstream out(path);
  const std::size_t D = model.config().D;
  for (std::size_t v = 0; v < D; ++v) out << (v ? "," : "") << "pred_v" << v;
  for (std::size_t v = 0; v < D; ++v) out << ",true_v" << v;
  out << "\n";
  out.precision(12);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < horizon; ++s) {
      for (std::size_t v = 0; v < D; ++v) out << (v ? "," : "") << preds[s](i, v);
      for (std::size_t v = 0; v < D; ++v) out << "," << head[i].y(s, v);
      out << "\n";
    }
  }
}

int cmd_train(const CommonOpts& opts) {
  auto cfg = config::load_config(opts.config_path);
  if (cfg.train.dataset_dir.empty())
    throw ConfigError("train.dataset_dir must point at a simulated dataset");
  const auto variant = model::variant_from_string(opts.variant);
  const std::uint64_t seed = opts.seed >= 0 ? std::uint64_t(opts.seed) : cfg.trainer.seed;

  auto family = read_family(cfg.train.dataset_dir);
  auto [src, tgt] = prepare_pair(cfg, family, cfg.train.source, cfg.train.target, seed);

  const fs::path dir = resolve_out_dir(opts.out_dir.empty() ? "run" : opts.out_dir);
  data::write_split_manifest((dir / "split_source.json").string(), src.splits);
  data::write_split_manifest((dir / "split_target.json").string(), tgt.splits);

  json ledger{{"schema_version", 1},
              {"command", "train"},
              {"variant", model::variant_to_string(variant)},
              {"seed", seed},
              {"source", cfg.train.source},
              {"target", cfg.train.target},
              {"config_hash", config::hash_hex(config::config_hash(cfg))},
              {"data_hash", config::hash_hex(dataset_hash(family))},
              {"deterministic", opts.deterministic}};

  if (variant == model::Variant::lstm_st) {
    auto outcome = run_lstm_training(cfg, seed, src, tgt);
    ledger["metrics"] = {{"rmse", outcome.metrics.rmse},
                         {"mae", outcome.metrics.mae},
                         {"rmse_target_dim", outcome.metrics.rmse_target_dim},
                         {"mae_target_dim", outcome.metrics.mae_target_dim}};
    ledger["best_epoch"] = outcome.best_epoch;
    ledger["best_val_rmse"] = outcome.best_val_rmse;
  } else {
    const std::string ckpt = (dir / "best.ckpt").string();
    const std::string log = (dir / "train_log.jsonl").string();
    auto outcome = run_gca_training(cfg, variant, seed, src, tgt, ckpt, log);
    ledger["metrics"] = {{"rmse", outcome.metrics.rmse},
                         {"mae", outcome.metrics.mae},
                         {"rmse_target_dim", outcome.metrics.rmse_target_dim},
                         {"mae_target_dim", outcome.metrics.mae_target_dim},
                         {"auprc_source", outcome.auprc_source},
                         {"auprc_target", outcome.auprc_target},
                         {"structure_l1", outcome.structure_l1}};
    ledger["best_epoch"] = outcome.best_epoch;
    ledger["best_val_rmse"] = outcome.best_val_rmse;
    ledger["epochs_run"] = outcome.epochs_run;
    ledger["checkpoint_file"] = "best.ckpt";
    ledger["log_file"] = "train_log.jsonl";
    ledger["edge_probs_source"] = tensor_json(outcome.probs_src);
    ledger["edge_probs_target"] = tensor_json(outcome.probs_tgt);
    if (src.ground_truth) ledger["truth_source"] = tensor_json(src.ground_truth->adjacency);
    if (tgt.ground_truth) ledger["truth_target"] = tensor_json(tgt.ground_truth->adjacency);

    // rebuild + reload to emit forecasts from the stored best checkpoint
    GcaModel model(cfg.model_config(seed), variant);
    train::load_checkpoint(ckpt, model);
    write_forecast_csv(dir / "forecasts.csv", model, tgt, cfg.trainer.eval_horizon);
  }

  std::ofstream out(dir / "ledger.json");
  out << ledger.dump(2) << "\n";
  std::cout << dir.string() << "\n";
  std::cout << "rmse=" << ledger["metrics"]["rmse"].get<double>()
            << " mae=" << ledger["metrics"]["mae"].get<double>() << "\n";
  return 0;
}

// ---- evaluate ----

int cmd_evaluate(const CommonOpts& opts, const std::string& checkpoint) {
  auto cfg = config::load_config(opts.config_path);
  const auto variant = model::variant_from_string(opts.variant);
  if (variant == model::Variant::lstm_st)
    throw ConfigError("evaluate: checkpoints are only written for GCA variants");
  const std::uint64_t seed = opts.seed >= 0 ? std::uint64_t(opts.seed) : cfg.trainer.seed;

  auto family = read_family(cfg.train.dataset_dir);
  auto [src, tgt] = prepare_pair(cfg, family, cfg.train.source, cfg.train.target, seed);
  (void)src;

  GcaModel model(cfg.model_config(seed), variant);
  auto meta = train::load_checkpoint(checkpoint, model);
  auto metrics = train::evaluate(model, tgt.splits.test, data::DomainRole::target,
                                 cfg.trainer.eval_horizon, cfg.objective.target_dim);

  const fs::path dir = resolve_out_dir(opts.out_dir.empty() ? "eval" : opts.out_dir);
  json doc{{"schema_version", 1},
           {"command", "evaluate"},
           {"checkpoint", checkpoint},
           {"checkpoint_epoch", meta.epoch},
           {"metrics",
            {{"rmse", metrics.rmse},
             {"mae", metrics.mae},
             {"rmse_target_dim", metrics.rmse_target_dim},
             {"mae_target_dim", metrics.mae_target_dim}}}};
  std::ofstream out(dir / "eval.json");
  out << doc.dump(2) << "\n";
  std::cout << dir.string() << "\n";
  std::cout << "rmse=" << metrics.rmse << " mae=" << metrics.mae << "\n";
  return 0;
}

// ---- transfer matrix ----

struct CellResult {
  std::string source, target;
  double rmse_mean = 0, rmse_std = 0, mae_mean = 0, mae_std = 0;
  double baseline_rmse_mean = 0, baseline_rmse_std = 0;
  double baseline_mae_mean = 0, baseline_mae_std = 0;
};

int cmd_transfer_matrix(const CommonOpts& opts, bool with_baseline) {
  auto cfg = config::load_config(opts.config_path);
  const auto variant = model::variant_from_string(opts.variant);
  const std::uint64_t base_seed =
      opts.seed >= 0 ? std::uint64_t(opts.seed) : cfg.trainer.seed;
  auto family = read_family(cfg.train.dataset_dir);
  if (family.size() < 2) throw ConfigError("transfer-matrix: need at least 2 domains");

  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t a = 0; a < family.size(); ++a)
    for (std::size_t b = 0; b < family.size(); ++b)
      if (a != b) tasks.emplace_back(a, b);

  std::vector<CellResult> cells(tasks.size());
  auto run_cell = [&](std::size_t t) {
    const auto [a, b] = tasks[t];
    CellResult cell;
    cell.source = family[a].id;
    cell.target = family[b].id;
    std::vector<double> rmse, mae, brmse, bmae;
    for (std::size_t s = 0; s < cfg.trainer.n_seeds; ++s) {
      const std::uint64_t seed = base_seed + 17 * t + s;
      auto [src, tgt] = prepare_pair(cfg, family, cell.source, cell.target, seed);
      auto outcome = run_gca_training(cfg, variant, seed, src, tgt, "", "", false);
      rmse.push_back(outcome.metrics.rmse);
      mae.push_back(outcome.metrics.mae);
      if (with_baseline) {
        auto b_outcome = run_lstm_training(cfg, seed, src, tgt);
        brmse.push_back(b_outcome.metrics.rmse);
        bmae.push_back(b_outcome.metrics.mae);
      }
    }
    auto mean_std = [](const std::vector<double>& v, double& m, double& s) {
      m = 0;
      for (double x : v) m += x;
      m /= double(v.size());
      s = 0;
      for (double x : v) s += (x - m) * (x - m);
      s = std::sqrt(s / double(v.size()));
    };
    mean_std(rmse, cell.rmse_mean, cell.rmse_std);
    mean_std(mae, cell.mae_mean, cell.mae_std);
    if (with_baseline) {
      mean_std(brmse, cell.baseline_rmse_mean, cell.baseline_rmse_std);
      mean_std(bmae, cell.baseline_mae_mean, cell.baseline_mae_std);
    }
    cells[t] = cell;
  };

  if (opts.deterministic) {
    for (std::size_t t = 0; t < tasks.size(); ++t) run_cell(t);
  } else {
    const std::size_t workers =
        std::min<std::size_t>(tasks.size(),
                              std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t t = next.fetch_add(1);
          if (t >= tasks.size()) return;
          run_cell(t);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  const fs::path dir = resolve_out_dir(opts.out_dir.empty() ? "transfer" : opts.out_dir);
  json rows = json::array();
  double avg_rmse = 0, avg_mae = 0, avg_brmse = 0, avg_bmae = 0;
  for (const auto& c : cells) {
    json row{{"task", c.source + "->" + c.target},
             {"rmse_mean", c.rmse_mean},
             {"rmse_std", c.rmse_std},
             {"mae_mean", c.mae_mean},
             {"mae_std", c.mae_std}};
    if (with_baseline) {
      row["baseline_rmse_mean"] = c.baseline_rmse_mean;
      row["baseline_rmse_std"] = c.baseline_rmse_std;
      row["baseline_mae_mean"] = c.baseline_mae_mean;
      row["baseline_mae_std"] = c.baseline_mae_std;
    }
    rows.push_back(row);
    avg_rmse += c.rmse_mean;
    avg_mae += c.mae_mean;
    avg_brmse += c.baseline_rmse_mean;
    avg_bmae += c.baseline_mae_mean;
  }
  const double nt = double(cells.size());
  json doc{{"schema_version", 1},
           {"command", "transfer-matrix"},
           {"variant", model::variant_to_string(variant)},
           {"n_seeds", cfg.trainer.n_seeds},
           {"with_baseline", with_baseline},
           {"config_hash", config::hash_hex(config::config_hash(cfg))},
           {"tasks", rows},
           {"average",
            {{"rmse_mean", avg_rmse / nt},
             {"mae_mean", avg_mae / nt},
             {"baseline_rmse_mean", with_baseline ? avg_brmse / nt : 0.0},
             {"baseline_mae_mean", with_baseline ? avg_bmae / nt : 0.0}}}};
  std::ofstream out(dir / "transfer_matrix.json");
  out << doc.dump(2) << "\n";

  std::ofstream table(dir / "table.txt");
  table.precision(4);
  table << std::fixed;
  table << "Task      Metric  " << model::variant_to_string(variant);
  if (with_baseline) table << "  LSTM_S+T";
  table << "\n";
  for (const auto& c : cells) {
    table << c.source << "->" << c.target << "  RMSE  " << c.rmse_mean << "±"
          << c.rmse_std;
    if (with_baseline) table << "  " << c.baseline_rmse_mean << "±" << c.baseline_rmse_std;
    table << "\n";
    table << c.source << "->" << c.target << "  MAE   " << c.mae_mean << "±" << c.mae_std;
    if (with_baseline) table << "  " << c.baseline_mae_mean << "±" << c.baseline_mae_std;
    table << "\n";
  }
  table << "Average   RMSE  " << avg_rmse / nt;
  if (with_baseline) table << "  " << avg_brmse / nt;
  table << "\n";
  table << "Average   MAE   " << avg_mae / nt;
  if (with_baseline) table << "  " << avg_bmae / nt;
  table << "\n";

  std::cout << dir.string() << "\n";
  return 0;
}

// ---- plot ----

int cmd_plot(const CommonOpts& opts, const std::string& ledger_path) {
  std::ifstream in(ledger_path);
  if (!in) throw IoError("cannot open ledger: " + ledger_path);
  json ledger = json::parse(in);
  const fs::path ledger_dir = fs::path(ledger_path).parent_path();
  if (!ledger.contains("log_file"))
    throw DataError("ledger is missing field: log_file");
  const fs::path log = ledger_dir / ledger["log_file"].get<std::string>();

  const fs::path dir = resolve_out_dir(opts.out_dir.empty() ? "plots" : opts.out_dir);
  plot::render_training_curves(log.string(), (dir / "curves.png").string());
  plot::render_structure_heatmaps(ledger_path, (dir / "heatmaps.png").string());
  plot::render_loss_curves(log.string(), (dir / "loss.png").string());
  std::cout << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Granger-causal structure transfer for time-series forecasting"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string checkpoint;
  std::string ledger_path;
  bool with_baseline = false;

  auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    auto* c = cmd->add_option("--config", opts.config_path, "JSON config file");
    if (needs_config) c->required();
    cmd->add_option("--out", opts.out_dir, "output directory (versioned if taken)");
    cmd->add_option("--seed", opts.seed, "override the config seed");
    cmd->add_option("--variant", opts.variant,
                    "gca | gca-r | gca-e | gca-s | gca-alpha | lstm-st");
    cmd->add_flag("--deterministic", opts.deterministic,
                  "single-threaded, bit-reproducible mode");
  };

  auto* sim = app.add_subcommand("simulate", "generate a synthetic multi-domain dataset");
  add_common(sim);
  auto* train_cmd = app.add_subcommand("train", "train one source→target task");
  add_common(train_cmd);
  auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a stored checkpoint");
  add_common(eval_cmd);
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  auto* matrix = app.add_subcommand("transfer-matrix", "all ordered domain pairs");
  add_common(matrix);
  matrix->add_flag("--with-baseline", with_baseline, "add the LSTM_S+T column");
  auto* plot_cmd = app.add_subcommand("plot", "render figures from a result ledger");
  add_common(plot_cmd, false);
  plot_cmd->add_option("--ledger", ledger_path, "ledger.json from a training run")
      ->required();

  try {
    app.parse(argc, argv);
    if (sim->parsed()) return cmd_simulate(opts);
    if (train_cmd->parsed()) return cmd_train(opts);
    if (eval_cmd->parsed()) return cmd_evaluate(opts, checkpoint);
    if (matrix->parsed()) return cmd_transfer_matrix(opts, with_baseline);
    if (plot_cmd->parsed()) return cmd_plot(opts, ledger_path);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ShapeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
