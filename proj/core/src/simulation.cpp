#include "propp/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "propp/special_functions.hpp"

namespace propp {

namespace {

constexpr std::uint64_t kTagData = 0xDA7A;
constexpr std::uint64_t kTagMethod = 0x4D45;
constexpr std::uint64_t kTrueRateSeed = 0x7472757468ull;
constexpr int kTrueRatePairs = 500000;  // 10^6 density evaluations

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::kDrift: return "drift";
    case Scenario::kMixture: return "mixture";
    case Scenario::kNoMixture: return "nomixture";
    case Scenario::kSuperfluous: return "superfluous";
  }
  return "?";
}

std::string to_string(Setting s) {
  switch (s) {
    case Setting::kEqualN: return "equal";
    case Setting::kLargeExternal: return "large-external";
    case Setting::kLargeTrial: return "large-trial";
    case Setting::kManyCovariates: return "many-covariates";
  }
  return "?";
}

std::string to_string(SimMethod m) {
  switch (m) {
    case SimMethod::kIgnore: return "ignore";
    case SimMethod::kPool: return "pool";
    case SimMethod::kMpp: return "mpp";
    case SimMethod::kPropp: return "propp";
    case SimMethod::kWang10: return "wang10";
    case SimMethod::kWang20: return "wang20";
  }
  return "?";
}

Scenario parse_scenario(const std::string& name) {
  if (name == "drift") return Scenario::kDrift;
  if (name == "mixture") return Scenario::kMixture;
  if (name == "nomixture") return Scenario::kNoMixture;
  if (name == "superfluous") return Scenario::kSuperfluous;
  throw InputError("unknown scenario '" + name + "'");
}

Setting parse_setting(const std::string& name) {
  if (name == "equal") return Setting::kEqualN;
  if (name == "large-external") return Setting::kLargeExternal;
  if (name == "large-trial") return Setting::kLargeTrial;
  if (name == "many-covariates") return Setting::kManyCovariates;
  throw InputError("unknown setting '" + name + "'");
}

SimMethod parse_sim_method(const std::string& name) {
  if (name == "ignore") return SimMethod::kIgnore;
  if (name == "pool") return SimMethod::kPool;
  if (name == "mpp") return SimMethod::kMpp;
  if (name == "propp") return SimMethod::kPropp;
  if (name == "wang10") return SimMethod::kWang10;
  if (name == "wang20") return SimMethod::kWang20;
  throw InputError("unknown method '" + name + "'");
}

ScenarioConfig make_scenario_config(Scenario scenario, Setting setting,
                                    int superfluous_zeroed) {
  ScenarioConfig cfg;
  cfg.scenario = scenario;
  cfg.setting = setting;

  switch (setting) {
    case Setting::kEqualN:
      cfg.n_trial = 400; cfg.n_external = 400; cfg.k = 5;
      break;
    case Setting::kLargeExternal:
      cfg.n_trial = 400; cfg.n_external = 2000; cfg.k = 5;
      break;
    case Setting::kLargeTrial:
      cfg.n_trial = 400; cfg.n_external = 200; cfg.k = 5;
      break;
    case Setting::kManyCovariates:
      cfg.n_trial = 400; cfg.n_external = 400; cfg.k = 10;
      break;
  }

  switch (scenario) {
    case Scenario::kDrift:
      // Pure outcome drift: covariates carry no signal, both cohorts share
      // one covariate distribution.
      cfg.beta.assign(cfg.k, 0.0);
      cfg.psi = 1.0;
      break;
    case Scenario::kMixture:
      cfg.beta.assign(cfg.k, 0.1);
      cfg.psi = 0.5;
      break;
    case Scenario::kNoMixture:
      cfg.beta.assign(cfg.k, 0.1);
      cfg.psi = 0.0;
      break;
    case Scenario::kSuperfluous: {
      if (superfluous_zeroed < 0 || superfluous_zeroed >= cfg.k)
        throw InputError("superfluous: zeroed count must lie in [0, k)");
      const double total = 0.1 * cfg.k;
      cfg.beta.assign(cfg.k, 0.0);
      for (int j = superfluous_zeroed; j < cfg.k; ++j)
        cfg.beta[j] = total / (cfg.k - superfluous_zeroed);
      cfg.psi = 0.5;
      break;
    }
  }
  return cfg;
}

namespace {

// Applies the grid axis: eta for drift, the shifted-class mean otherwise.
ScenarioConfig at_grid(const ScenarioConfig& cfg, double grid_value) {
  ScenarioConfig g = cfg;
  if (cfg.scenario == Scenario::kDrift)
    g.eta = grid_value;
  else
    g.mu_e = grid_value;
  return g;
}

}  // namespace

Dataset generate_dataset(const ScenarioConfig& cfg, double grid_value,
                         Rng& rng) {
  if (cfg.beta.size() != static_cast<std::size_t>(cfg.k))
    throw InputError("generate_dataset: beta dimension mismatch");
  if (cfg.n_trial < 1 || cfg.n_external < 0)
    throw InputError("generate_dataset: invalid cohort sizes");

  const ScenarioConfig g = at_grid(cfg, grid_value);
  std::vector<PatientRecord> records;
  records.reserve(g.n_trial + g.n_external);

  for (int i = 0; i < g.n_trial; ++i) {
    PatientRecord r;
    r.in_trial = true;
    r.covariates.resize(g.k);
    double lin = g.beta0 + g.eta;
    for (int j = 0; j < g.k; ++j) {
      r.covariates[j] = rng.normal(g.mu0, g.sigma0);
      lin += g.beta[j] * r.covariates[j];
    }
    r.outcome = rng.bernoulli(expit(lin)) ? 1 : 0;
    records.push_back(std::move(r));
  }
  for (int i = 0; i < g.n_external; ++i) {
    PatientRecord r;
    r.in_trial = false;
    r.covariates.resize(g.k);
    const bool trial_class = rng.uniform01() < g.psi;
    const double mu = trial_class ? g.mu0 : g.mu_e;
    const double sigma = trial_class ? g.sigma0 : g.sigma_e;
    double lin = g.beta0;  // no trial effect off-study
    for (int j = 0; j < g.k; ++j) {
      r.covariates[j] = rng.normal(mu, sigma);
      lin += g.beta[j] * r.covariates[j];
    }
    r.outcome = rng.bernoulli(expit(lin)) ? 1 : 0;
    records.push_back(std::move(r));
  }
  return Dataset::create(std::move(records), g.k);
}

double true_trial_rate(const ScenarioConfig& cfg, double grid_value) {
  if (cfg.beta.size() != static_cast<std::size_t>(cfg.k))
    throw InputError("true_trial_rate: beta dimension mismatch");
  const ScenarioConfig g = at_grid(cfg, grid_value);

  // beta'X collapses to a single normal: mean mu0 * sum(beta), sd
  // sigma0 * ||beta||.  Antithetic pairs kill the odd error terms, so
  // symmetric cases come out exact.
  double bsum = 0.0, bnorm2 = 0.0;
  for (double b : g.beta) {
    bsum += b;
    bnorm2 += b * b;
  }
  const double m = g.beta0 + g.eta + g.mu0 * bsum;
  const double s = g.sigma0 * std::sqrt(bnorm2);
  if (s == 0.0) return expit(m);

  Rng rng(kTrueRateSeed);
  double acc = 0.0;
  for (int i = 0; i < kTrueRatePairs; ++i) {
    const double z = rng.normal();
    acc += 0.5 * (expit(m + s * z) + expit(m - s * z));
  }
  return acc / kTrueRatePairs;
}

std::vector<ReplicateResult> run_replicate(const ScenarioConfig& cfg,
                                           double grid_value,
                                           int replicate_index) {
  if (replicate_index < 0)
    throw InputError("run_replicate: negative replicate index");
  const std::uint64_t rep_seed =
      seed_mix({cfg.seed, double_key(grid_value),
                static_cast<std::uint64_t>(replicate_index)});

  Rng data_rng(seed_mix({rep_seed, kTagData}));
  const Dataset data = generate_dataset(cfg, grid_value, data_rng);

  const bool needs_scores =
      std::any_of(cfg.methods.begin(), cfg.methods.end(), [](SimMethod m) {
        return m == SimMethod::kPropp || m == SimMethod::kWang10 ||
               m == SimMethod::kWang20;
      });
  std::vector<double> scores;
  if (needs_scores)
    scores = predict_scores(fit_propensity(data, cfg.ridge), data);

  std::vector<ReplicateResult> results;
  results.reserve(cfg.methods.size());
  for (SimMethod m : cfg.methods) {
    ReplicateResult res;
    res.method = m;
    const std::uint64_t method_seed =
        seed_mix({rep_seed, kTagMethod, static_cast<std::uint64_t>(m)});
    try {
      PosteriorSummary s;
      switch (m) {
        case SimMethod::kIgnore:
          s = fit_ignore(data);
          break;
        case SimMethod::kPool:
          s = fit_pooled(data);
          break;
        case SimMethod::kMpp:
          s = fit_mpp(data, cfg.prior, cfg.n_posterior_samples, method_seed)
                  .summary;
          break;
        case SimMethod::kPropp: {
          WeightedDataset wd;
          wd.dataset = data;
          wd.scores = scores;
          wd.weights = compute_weights(scores, trial_indicators(data),
                                       WeightScheme{});
          s = fit_propp(wd, cfg.prior, cfg.n_posterior_samples, method_seed)
                  .summary;
          break;
        }
        case SimMethod::kWang10:
          s = fit_wang_stratified(data, scores, 5, 0.1, method_seed);
          break;
        case SimMethod::kWang20:
          s = fit_wang_stratified(data, scores, 5, 0.2, method_seed);
          break;
      }
      res.estimate = s.mean;
      res.lo = s.q025;
      res.hi = s.q975;
    } catch (const MethodFailure&) {
      res.failed = true;
    }
    results.push_back(res);
  }
  return results;
}

MetricsRow aggregate_replicates(
    SimMethod method, double grid_value, double true_rate,
    std::vector<std::pair<int, ReplicateResult>> indexed_results) {
  // Fixed summation order makes aggregation independent of arrival order.
  std::sort(indexed_results.begin(), indexed_results.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  MetricsRow row;
  row.method = method;
  row.grid_value = grid_value;
  row.true_rate = true_rate;

  double se_sum = 0.0;
  int misses = 0;
  for (const auto& [index, res] : indexed_results) {
    if (res.failed) {
      ++row.failures;
      continue;
    }
    const double err = res.estimate - true_rate;
    se_sum += err * err;
    if (true_rate < res.lo || true_rate > res.hi) ++misses;
    ++row.replicates;
  }
  if (row.replicates > 0) {
    row.rmse = std::sqrt(se_sum / row.replicates);
    row.type1 = static_cast<double>(misses) / row.replicates;
  } else {
    row.rmse = std::numeric_limits<double>::quiet_NaN();
    row.type1 = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

std::vector<MetricsRow> run_grid(const ScenarioConfig& cfg,
                                 const std::vector<double>& grid) {
  if (grid.empty()) throw InputError("run_grid: empty grid");
  if (cfg.replicates < 1) throw InputError("run_grid: need >= 1 replicates");
  if (cfg.methods.empty()) throw InputError("run_grid: no methods selected");

  std::vector<MetricsRow> rows;
  for (double gv : grid) {
    const double truth = true_trial_rate(cfg, gv);
    std::map<SimMethod, std::vector<std::pair<int, ReplicateResult>>> bucket;
    for (int rep = 0; rep < cfg.replicates; ++rep)
      for (const ReplicateResult& res : run_replicate(cfg, gv, rep))
        bucket[res.method].push_back({rep, res});
    for (SimMethod m : cfg.methods)
      rows.push_back(aggregate_replicates(m, gv, truth, std::move(bucket[m])));
  }
  return rows;
}

}  // namespace propp
