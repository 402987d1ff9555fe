#include "gca/synthgen.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "gca/errors.hpp"
#include "gca/rng.hpp"

namespace gca::synth {

namespace {

using nlohmann::json;

void check_dims(std::size_t D, std::size_t k) {
  if (D < 2) throw ConfigError("sample_structure: D must be >= 2 (no cross-variable causality below that)");
  if (k < 1) throw ConfigError("sample_structure: k must be >= 1");
}

// Uniform scaling of all weights until the companion system is stable.
void rescale_for_stability(std::vector<Matrix>& weights) {
  for (int iter = 0; iter < 60; ++iter) {
    const double rho = companion_spectral_radius(weights);
    if (rho <= kStabilityBound) return;
    const double s = std::max(0.6, kStabilityBound / rho * 0.98);
    for (auto& w : weights)
      for (std::size_t i = 0; i < w.size(); ++i) w[i] *= s;
  }
  throw NumericError("rescale_for_stability: spectral radius did not converge");
}

void assign_weights(GroundTruthStructure& s, Rng& rng) {
  s.weights.assign(s.k, Matrix(s.D, s.D));
  for (std::size_t j = 0; j < s.k; ++j) {
    for (std::size_t u = 0; u < s.D; ++u) {
      for (std::size_t v = 0; v < s.D; ++v) {
        if (s.adjacency[j](u, v) == 0.0) continue;
        const double mag = rng.uniform(0.5, 1.0);
        s.weights[j](u, v) = rng.bernoulli(0.5) ? mag : -mag;
      }
    }
  }
}

}  // namespace

std::size_t GroundTruthStructure::edge_count() const {
  std::size_t n = 0;
  for (const auto& a : adjacency)
    for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != 0.0;
  return n;
}

std::size_t GroundTruthStructure::hamming_distance(const GroundTruthStructure& o) const {
  if (o.k != k || o.D != D) throw ShapeError("hamming_distance: shape mismatch");
  std::size_t n = 0;
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < adjacency[j].size(); ++i)
      n += adjacency[j][i] != o.adjacency[j][i];
  return n;
}

double companion_spectral_radius(const std::vector<Matrix>& weights) {
  const std::size_t k = weights.size();
  const std::size_t D = weights[0].rows();
  const std::size_t n = k * D;
  // x holds the stacked state (z_t, ..., z_{t-k+1}); one companion step is
  // y_0 = Σ_j W_j x_j followed by a shift.
  std::vector<double> x(n), y(n);
  Rng rng(0xC0FFEE);
  for (auto& v : x) v = rng.normal();

  double log_growth = 0.0;
  int counted = 0;
  const int iters = 512;
  for (int it = 0; it < iters; ++it) {
    for (std::size_t u = 0; u < D; ++u) {
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const Matrix& w = weights[j];
        const double* xj = x.data() + j * D;
        for (std::size_t v = 0; v < D; ++v) s += w(u, v) * xj[v];
      }
      y[u] = s;
    }
    for (std::size_t j = k - 1; j >= 1; --j) {
      for (std::size_t v = 0; v < D; ++v) y[j * D + v] = x[(j - 1) * D + v];
    }
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    if (it >= iters / 2) {
      log_growth += std::log(norm);
      ++counted;
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
  }
  return std::exp(log_growth / counted);
}

GroundTruthStructure sample_structure(std::size_t D, std::size_t k,
                                      double edge_density, std::uint64_t seed) {
  check_dims(D, k);
  if (!(edge_density > 0.0) || edge_density > 1.0)
    throw ConfigError("sample_structure: edge_density must be in (0, 1]");

  GroundTruthStructure s;
  s.D = D;
  s.k = k;
  s.edge_density = edge_density;
  s.adjacency.assign(k, Matrix(D, D));

  Rng root(seed);
  Rng draw = root.fork(0);
  for (std::size_t j = 0; j < k; ++j) {
    bool any = false;
    for (std::size_t u = 0; u < D; ++u)
      for (std::size_t v = 0; v < D; ++v)
        if (draw.bernoulli(edge_density)) {
          s.adjacency[j](u, v) = 1.0;
          any = true;
        }
    if (!any) {
      // degenerate slice: force one edge so every lag stays live
      const auto u = static_cast<std::size_t>(draw.uniform_int(0, D - 1));
      const auto v = static_cast<std::size_t>(draw.uniform_int(0, D - 1));
      s.adjacency[j](u, v) = 1.0;
    }
  }

  Rng wrng = root.fork(1);
  assign_weights(s, wrng);
  rescale_for_stability(s.weights);
  return s;
}

RawSeries simulate_domain(const GroundTruthStructure& structure,
                          const DomainGenConfig& cfg, const Matrix* initial) {
  const std::size_t D = structure.D, k = structure.k;
  if (structure.weights.size() != k || structure.adjacency.size() != k)
    throw ShapeError("simulate_domain: structure slices inconsistent");
  if (!(cfg.noise_variance > 0.0)) throw ConfigError("simulate_domain: noise_variance must be > 0");
  if (cfg.sample_interval < 1) throw ConfigError("simulate_domain: sample_interval must be >= 1");
  if (cfg.length <= cfg.burn_in) throw ConfigError("simulate_domain: length must exceed burn_in");
  if (initial && (initial->rows() != k || initial->cols() != D))
    throw ShapeError("simulate_domain: initial state must be k x D");

  const double sigma = std::sqrt(cfg.noise_variance);
  std::vector<Matrix> weights = structure.weights;

  for (int attempt = 0; attempt <= kMaxRescaleRetries; ++attempt) {
    Rng root(cfg.seed);
    Rng init_rng = root.fork(0);
    Rng noise_rng = root.fork(1);

    Matrix raw(cfg.length, D);
    for (std::size_t t = 0; t < k && t < cfg.length; ++t) {
      for (std::size_t v = 0; v < D; ++v)
        raw(t, v) = initial ? (*initial)(t, v) : init_rng.normal();
    }

    bool overflow = false;
    for (std::size_t t = k; t < cfg.length && !overflow; ++t) {
      for (std::size_t u = 0; u < D; ++u) {
        double s = noise_rng.normal() * sigma;
        for (std::size_t j = 0; j < k; ++j) {
          const Matrix& w = weights[j];
          const double* lag = raw.row(t - j - 1);
          for (std::size_t v = 0; v < D; ++v) {
            const double wv = w(u, v);
            if (wv == 0.0) continue;
            s += wv * (lag[v] + cfg.nonlin_c * std::sin(lag[v]));
          }
        }
        if (!std::isfinite(s) || std::abs(s) > kOverflowGuard) {
          overflow = true;
          break;
        }
        raw(t, u) = s;
      }
    }

    if (overflow) {
      for (auto& w : weights)
        for (std::size_t i = 0; i < w.size(); ++i) w[i] *= 0.5;
      continue;
    }

    const auto interval = static_cast<std::size_t>(cfg.sample_interval);
    const std::size_t kept = (cfg.length - 1 - cfg.burn_in) / interval + 1;
    RawSeries out;
    out.values = Matrix(kept, D);
    for (std::size_t i = 0; i < kept; ++i) {
      const double* src = raw.row(cfg.burn_in + i * interval);
      for (std::size_t v = 0; v < D; ++v) out.values(i, v) = src[v];
    }
    return out;
  }
  throw NumericError("simulate_domain: trajectory diverged after rescaling retries");
}

DomainFamily make_domain_family(std::size_t D, std::size_t k, double edge_density,
                                const std::vector<DomainGenConfig>& configs,
                                double structure_jitter, std::uint64_t seed) {
  check_dims(D, k);
  if (structure_jitter < 0.0 || structure_jitter > 0.2)
    throw ConfigError("make_domain_family: structure_jitter must be in [0, 0.2]");
  if (configs.empty()) throw ConfigError("make_domain_family: no domain configs");

  const GroundTruthStructure base = sample_structure(D, k, edge_density, seed);
  Rng root(seed);

  DomainFamily fam;
  const auto n_flips =
      static_cast<std::size_t>(std::llround(structure_jitter * double(k * D * D)));

  for (std::size_t d = 0; d < configs.size(); ++d) {
    GroundTruthStructure s = base;
    Rng jrng = root.fork(100 + d);

    // first domain is the anchor; the others differ from it by n_flips entries
    std::size_t done = d == 0 ? n_flips : 0;
    std::vector<bool> used(k * D * D, false);
    int guard = 0;
    while (done < n_flips && guard++ < 10000) {
      const auto j = static_cast<std::size_t>(jrng.uniform_int(0, k - 1));
      const auto u = static_cast<std::size_t>(jrng.uniform_int(0, D - 1));
      const auto v = static_cast<std::size_t>(jrng.uniform_int(0, D - 1));
      if (u == v) continue;  // self-lags stay fixed across domains
      const std::size_t flat = (j * D + u) * D + v;
      if (used[flat]) continue;
      double& cell = s.adjacency[j](u, v);
      if (cell != 0.0) {
        // dropping the last edge of a slice would break the invariant
        double slice_sum = 0.0;
        for (std::size_t i = 0; i < s.adjacency[j].size(); ++i) slice_sum += s.adjacency[j][i];
        if (slice_sum <= 1.0) continue;
        cell = 0.0;
        s.weights[j](u, v) = 0.0;
      } else {
        cell = 1.0;
        const double mag = jrng.uniform(0.5, 1.0);
        s.weights[j](u, v) = jrng.bernoulli(0.5) ? mag : -mag;
      }
      used[flat] = true;
      ++done;
    }
    rescale_for_stability(s.weights);

    auto shared = std::make_shared<GroundTruthStructure>(std::move(s));
    RawSeries series = simulate_domain(*shared, configs[d]);
    series.domain_id = "domain" + std::to_string(d + 1);
    series.ground_truth = shared;
    fam.structures.push_back(shared);
    fam.series.push_back(std::move(series));
  }
  return fam;
}

void write_series_csv(const std::string& path, const RawSeries& series) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  const std::size_t D = series.values.cols();
  for (std::size_t v = 0; v < D; ++v) out << (v ? "," : "") << "v" << v;
  out << "\n";
  out.precision(17);
  for (std::size_t t = 0; t < series.values.rows(); ++t) {
    for (std::size_t v = 0; v < D; ++v) {
      if (v) out << ",";
      out << series.values(t, v);
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_structure_json(const std::string& path, const GroundTruthStructure& s) {
  json adj = json::array();
  for (std::size_t j = 0; j < s.k; ++j) {
    json slice = json::array();
    for (std::size_t u = 0; u < s.D; ++u) {
      json row = json::array();
      for (std::size_t v = 0; v < s.D; ++v) row.push_back(int(s.adjacency[j](u, v)));
      slice.push_back(row);
    }
    adj.push_back(slice);
  }
  json doc{{"k", s.k}, {"D", s.D}, {"edge_density", s.edge_density}, {"adjacency", adj}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << doc.dump(2) << "\n";
}

GroundTruthStructure read_structure_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  json doc = json::parse(in);
  GroundTruthStructure s;
  s.k = doc.at("k").get<std::size_t>();
  s.D = doc.at("D").get<std::size_t>();
  s.edge_density = doc.value("edge_density", 0.0);
  s.adjacency.assign(s.k, Matrix(s.D, s.D));
  const auto& adj = doc.at("adjacency");
  for (std::size_t j = 0; j < s.k; ++j)
    for (std::size_t u = 0; u < s.D; ++u)
      for (std::size_t v = 0; v < s.D; ++v)
        s.adjacency[j](u, v) = adj.at(j).at(u).at(v).get<int>() ? 1.0 : 0.0;
  return s;
}

void write_manifest_json(const std::string& path, const RawSeries& series,
                         const DomainGenConfig& cfg, const std::string& csv_file,
                         const std::string& structure_file) {
  json doc{
      {"domain_id", series.domain_id},
      {"D", series.values.cols()},
      {"k", series.ground_truth ? series.ground_truth->k : 0},
      {"config",
       {{"noise_variance", cfg.noise_variance},
        {"sample_interval", cfg.sample_interval},
        {"nonlin_c", cfg.nonlin_c},
        {"length", cfg.length},
        {"burn_in", cfg.burn_in},
        {"seed", cfg.seed}}},
      {"csv_file", csv_file},
      {"structure_file", structure_file},
  };
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace gca::synth
