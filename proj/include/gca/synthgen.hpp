#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gca/matrix.hpp"

// Multi-domain synthetic generator: a shared sparse lagged causal structure
// with per-domain perturbations drives a nonlinear VAR
//   z_t = Σ_j W_j·(z_{t−j} + c·sin(z_{t−j})) + ε,  ε ~ N(0, σ²I).
// The binary adjacency is the scoring ground truth; the signed weights exist
// only to make the recursion well-behaved and are rescaled until the
// companion-form spectral radius is ≤ kStabilityBound.

namespace gca::synth {

inline constexpr double kStabilityBound = 0.95;
inline constexpr double kOverflowGuard = 1e6;
inline constexpr int kMaxRescaleRetries = 5;

struct GroundTruthStructure {
  std::size_t k = 0;
  std::size_t D = 0;
  double edge_density = 0.0;
  std::vector<Matrix> adjacency;  // k slices, D×D, entries in {0,1}
  std::vector<Matrix> weights;    // same support, signed simulation weights

  // adjacency[j](u,v): influence of z^v_{t−j−1} on z^u_t (slice j is lag j+1)
  std::size_t edge_count() const;
  std::size_t hamming_distance(const GroundTruthStructure& o) const;
};

struct DomainGenConfig {
  double noise_variance = 1.0;
  int sample_interval = 1;
  double nonlin_c = 0.0;
  std::size_t length = 1000;   // raw trajectory steps, burn-in included
  std::size_t burn_in = 100;
  std::uint64_t seed = 0;
};

struct RawSeries {
  Matrix values;  // kept rows × D
  std::string domain_id;
  std::shared_ptr<const GroundTruthStructure> ground_truth;  // absent for CSV data
};

struct DomainFamily {
  std::vector<std::shared_ptr<const GroundTruthStructure>> structures;
  std::vector<RawSeries> series;
};

// Bernoulli(edge_density) support, U[0.5,1] signed weights, rescaled for
// stability. Deterministic in seed. Throws ConfigError on D<2, k<1 or
// density outside (0,1].
GroundTruthStructure sample_structure(std::size_t D, std::size_t k,
                                      double edge_density, std::uint64_t seed);

// `initial` (k×D, row j = z_{j}) overrides the N(0,I) start when given; the
// noise stream is independent of the initial-state stream either way.
RawSeries simulate_domain(const GroundTruthStructure& structure,
                          const DomainGenConfig& cfg,
                          const Matrix* initial = nullptr);

// One base structure; per-domain copies flip round(jitter·k·D·D) off-diagonal
// entries and are then simulated with their own config.
DomainFamily make_domain_family(std::size_t D, std::size_t k, double edge_density,
                                const std::vector<DomainGenConfig>& configs,
                                double structure_jitter, std::uint64_t seed);

// Power-method estimate of the companion-form spectral radius of `weights`.
double companion_spectral_radius(const std::vector<Matrix>& weights);

// External interfaces: per-domain CSV + JSON manifest + binary structure JSON.
void write_series_csv(const std::string& path, const RawSeries& series);
void write_structure_json(const std::string& path, const GroundTruthStructure& s);
void write_manifest_json(const std::string& path, const RawSeries& series,
                         const DomainGenConfig& cfg,
                         const std::string& csv_file,
                         const std::string& structure_file);

GroundTruthStructure read_structure_json(const std::string& path);

}  // namespace gca::synth
