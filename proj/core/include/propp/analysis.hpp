#pragma once

#include <cstdint>
#include <string>

#include "propp/dataset_io.hpp"
#include "propp/propensity.hpp"
#include "propp/types.hpp"

namespace propp {

// One analysis request.  `method` is one of ignore | pool | mpp | propp |
// fixed:<delta> | wang:<fraction>.
struct AnalysisConfig {
  std::string method = "propp";
  WeightScheme scheme{};  // ATTrial, capped
  BetaParams delta_prior{1.0, 1.0};
  std::size_t n_samples = 10000;
  std::uint64_t seed = 0;
  double ridge = 1e-4;
  double weight_floor = 0.0;
};

// Validates cfg.method; throws InputError with the offending string.
void validate_method_string(const std::string& method);

// Runs one analysis and renders the full result document as pretty-printed
// JSON: config echo (every effective value, seed included), posterior
// summary, propensity diagnostics for score-based methods, and sampler
// counters for sampled methods.  Output is byte-deterministic in its
// inputs; timing never appears here.
std::string run_analysis_document(const LoadedDataset& data,
                                  const AnalysisConfig& cfg,
                                  const std::string& data_label);

}  // namespace propp
