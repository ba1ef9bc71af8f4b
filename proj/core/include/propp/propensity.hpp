#pragma once

#include <cstddef>
#include <vector>

#include "propp/types.hpp"

namespace propp {

// Target population for the balancing weights.
enum class WeightVariant { kATE, kATTrial, kATExternal };

struct WeightScheme {
  WeightVariant variant = WeightVariant::kATTrial;
  bool capped = true;  // cap external weights at 1
};

// Logistic model for P(in trial | covariates), fitted on standardized
// covariates.  Coefficients are on the standardized scale; means/sds carry
// the transform so prediction works on raw data.
struct PropensityModel {
  double intercept = 0.0;
  std::vector<double> coefficients;
  std::vector<double> covariate_means;
  std::vector<double> covariate_sds;
  double ridge = 0.0;
  bool converged = false;
  int iterations = 0;
};

// A dataset together with its propensity scores and balancing weights,
// aligned with dataset.records.
struct WeightedDataset {
  Dataset dataset;
  std::vector<double> scores;
  std::vector<double> weights;
};

// Ridge-penalized logistic regression of the trial indicator on the
// covariates, by Newton-Raphson with step halving.  The penalty applies to
// the standardized slopes only, never the intercept.  Requires at least one
// patient in each arm.
PropensityModel fit_propensity(const Dataset& data, double ridge = 1e-4,
                               double tol = 1e-8, int max_iter = 100);

// Propensity scores for each record, clamped to the open interval (0, 1).
std::vector<double> predict_scores(const PropensityModel& model,
                                   const Dataset& data);

// Balancing weights from scores.  With capping, external weights are
// truncated at 1; trial weights are never capped.
std::vector<double> compute_weights(const std::vector<double>& scores,
                                    const std::vector<bool>& in_trial,
                                    const WeightScheme& scheme);

// Zeroes external weights below `floor`; returns how many were zeroed.
std::size_t apply_weight_floor(std::vector<double>& weights,
                               const std::vector<bool>& in_trial,
                               double floor);

// Standardized mean difference (external minus trial) per covariate, using
// the given per-patient weights and the unweighted pooled standard
// deviation as denominator.
std::vector<double> standardized_mean_diff(const Dataset& data,
                                           const std::vector<double>& weights);

// Convenience pipeline: score with `model`, weight with `scheme`, apply the
// floor, and bundle the result.
WeightedDataset weight_dataset(const Dataset& data,
                               const PropensityModel& model,
                               const WeightScheme& scheme,
                               double weight_floor = 0.0);

std::vector<bool> trial_indicators(const Dataset& data);

}  // namespace propp
