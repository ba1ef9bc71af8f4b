#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "propp/borrowing.hpp"
#include "propp/rng.hpp"
#include "propp/types.hpp"

namespace propp {

// Data-generating scenarios.  The grid axis is the trial effect eta for
// kDrift and the latent-class covariate mean mu_e for the others.
enum class Scenario { kDrift, kMixture, kNoMixture, kSuperfluous };

// Cohort-size / dimension settings.
enum class Setting { kEqualN, kLargeExternal, kLargeTrial, kManyCovariates };

enum class SimMethod { kIgnore, kPool, kMpp, kPropp, kWang10, kWang20 };

std::string to_string(Scenario s);
std::string to_string(Setting s);
std::string to_string(SimMethod m);
Scenario parse_scenario(const std::string& name);
Setting parse_setting(const std::string& name);
SimMethod parse_sim_method(const std::string& name);

// Full specification of one simulation study.
struct ScenarioConfig {
  Scenario scenario = Scenario::kDrift;
  Setting setting = Setting::kEqualN;

  int n_trial = 400;
  int n_external = 400;
  int k = 5;

  double beta0 = 0.0;           // outcome intercept
  std::vector<double> beta;     // covariate effects, size k
  double eta = 0.0;             // trial effect (drift grid overrides)
  double psi = 1.0;             // share of external patients from the trial class
  double mu0 = 0.0, sigma0 = 1.0;   // trial-class covariate distribution
  double mu_e = 0.0, sigma_e = 1.0; // shifted-class distribution (mixture grid overrides mu_e)

  int replicates = 1000;
  std::vector<SimMethod> methods = {SimMethod::kIgnore, SimMethod::kPool,
                                    SimMethod::kMpp,    SimMethod::kPropp,
                                    SimMethod::kWang10, SimMethod::kWang20};
  std::uint64_t seed = 0;

  // Engine knobs shared by all sampled fits.
  DeltaPrior prior;
  std::size_t n_posterior_samples = 10000;
  double ridge = 1e-4;
};

// Canonical configuration for a scenario/setting pair.  Covariate effects:
// kDrift has beta = 0; kMixture/kNoMixture use beta_j = 0.1; kSuperfluous
// zeroes the first `superfluous_zeroed` effects and redistributes their sum
// over the rest, keeping the total at 0.1 * k.
ScenarioConfig make_scenario_config(Scenario scenario, Setting setting,
                                    int superfluous_zeroed = 1);

// One simulated cohort at the given grid value.  Patients are generated
// trial block first, per patient covariates then outcome, so the stream
// layout is stable.
Dataset generate_dataset(const ScenarioConfig& cfg, double grid_value,
                         Rng& rng);

// Marginal trial response rate E[expit(beta0 + beta'X + eta)], by Monte
// Carlo over the covariate distribution with 10^6 antithetic evaluations
// and a fixed internal seed.
double true_trial_rate(const ScenarioConfig& cfg, double grid_value);

struct ReplicateResult {
  SimMethod method = SimMethod::kIgnore;
  bool failed = false;
  double estimate = 0.0;  // posterior mean
  double lo = 0.0, hi = 0.0;  // equal-tailed 95% interval
};

// Runs every configured method on one simulated cohort.  The replicate
// stream seed depends only on (cfg.seed, grid_value, replicate_index), so
// any subset of the grid reproduces the same per-replicate results.
std::vector<ReplicateResult> run_replicate(const ScenarioConfig& cfg,
                                           double grid_value,
                                           int replicate_index);

struct MetricsRow {
  SimMethod method = SimMethod::kIgnore;
  double grid_value = 0.0;
  double true_rate = 0.0;
  double rmse = 0.0;   // posterior mean vs truth, probability scale
  double type1 = 0.0;  // share of intervals excluding the truth
  int failures = 0;
  int replicates = 0;  // non-failed replicates behind rmse/type1
};

// Aggregates per-replicate results for one method and grid value.  Sums in
// replicate-index order after sorting, so the outcome does not depend on
// the order results are supplied in.
MetricsRow aggregate_replicates(SimMethod method, double grid_value,
                                double true_rate,
                                std::vector<std::pair<int, ReplicateResult>>
                                    indexed_results);

// Full grid run: `cfg.replicates` replicates per grid value, aggregated per
// method.  Rows are emitted grid-major, methods in cfg order.
std::vector<MetricsRow> run_grid(const ScenarioConfig& cfg,
                                 const std::vector<double>& grid);

}  // namespace propp
