#pragma once

#include <string>
#include <vector>

#include "gca/matrix.hpp"
#include "gca/synthgen.hpp"

// Structure scoring. AUPRC uses a pooled ranking over all lags and edges;
// tied scores form one group contributing a single precision/recall point,
// and the area is the step integral Σ ΔR·precision over those points (all
// scores equal therefore gives exactly the prevalence).

namespace gca::eval {

double auprc_flat(const std::vector<double>& scores, const std::vector<int>& labels);

// edge_probs: k matrices of D×D scores. Throws DataError when the truth has
// no positive edge (after diagonal exclusion, if requested).
double auprc(const std::vector<Matrix>& edge_probs,
             const synth::GroundTruthStructure& truth, bool include_diagonal = true);

// Same value as the training discrepancy, no gradient semantics.
double structure_l1(const std::vector<Matrix>& a, const std::vector<Matrix>& b);

struct TracePoint {
  double auprc = 0;
  double rmse = 0;
};

// Reads per-epoch lines out of a JSON-lines training log; throws DataError if
// a line lacks the requested fields.
std::vector<TracePoint> auprc_vs_rmse_trace(const std::string& log_path,
                                            const std::string& auprc_field = "auprc_source",
                                            const std::string& rmse_field = "test_rmse");

// Rank correlation with average ranks on ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace gca::eval
