#include <benchmark/benchmark.h>

#include <vector>

#include "propp/borrowing.hpp"
#include "propp/propensity.hpp"
#include "propp/rng.hpp"
#include "propp/special_functions.hpp"
#include "propp/simulation.hpp"

namespace {

using namespace propp;

Dataset two_arm_cohort(int n_trial, int n_external, int k) {
  ScenarioConfig cfg = make_scenario_config(Scenario::kMixture,
                                            Setting::kEqualN);
  cfg.n_trial = n_trial;
  cfg.n_external = n_external;
  cfg.k = k;
  cfg.beta.assign(k, 0.1);
  Rng rng(7);
  return generate_dataset(cfg, -0.5, rng);
}

BorrowingInput demo_counts() {
  BorrowingInput in;
  in.trial = {75.0, 57.0};
  in.external = {129.0, 112.0};
  return in;
}

void bm_log_gamma(benchmark::State& state) {
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_gamma(x));
    x += 0.37;
    if (x > 400.0) x -= 399.5;
  }
}
BENCHMARK(bm_log_gamma);

void bm_beta_cdf(benchmark::State& state) {
  double x = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(beta_cdf(BetaParams(76.0, 58.0), x));
    x += 0.013;
    if (x > 0.99) x -= 0.98;
  }
}
BENCHMARK(bm_beta_cdf);

void bm_beta_quantile(benchmark::State& state) {
  double q = 0.025;
  for (auto _ : state) {
    benchmark::DoNotOptimize(beta_quantile(BetaParams(76.0, 58.0), q));
    q += 0.019;
    if (q > 0.975) q -= 0.95;
  }
}
BENCHMARK(bm_beta_quantile);

void bm_log_marginal_delta(benchmark::State& state) {
  const BorrowingInput in = demo_counts();
  const DeltaPrior prior{};
  double d = 0.001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_marginal_delta(d, in, prior));
    d += 0.0013;
    if (d > 0.999) d -= 0.998;
  }
}
BENCHMARK(bm_log_marginal_delta);

void bm_sample_delta(benchmark::State& state) {
  const BorrowingInput in = demo_counts();
  const DeltaPrior prior{};
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sample_delta(in, prior, static_cast<std::size_t>(state.range(0)),
                     seed++));
  }
}
BENCHMARK(bm_sample_delta)->Arg(1000)->Arg(10000);

void bm_fit_mpp(benchmark::State& state) {
  const Dataset data = two_arm_cohort(400, 400, 0);
  const DeltaPrior prior{};
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_mpp(data, prior, 10000, seed++));
  }
}
BENCHMARK(bm_fit_mpp);

void bm_fit_propensity(benchmark::State& state) {
  const Dataset data = two_arm_cohort(400, static_cast<int>(state.range(0)),
                                      5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_propensity(data, 1e-4));
  }
}
BENCHMARK(bm_fit_propensity)->Arg(400)->Arg(2000);

void bm_replicate(benchmark::State& state) {
  ScenarioConfig cfg = make_scenario_config(Scenario::kDrift,
                                            Setting::kEqualN);
  cfg.methods = {SimMethod::kIgnore, SimMethod::kPool, SimMethod::kMpp,
                 SimMethod::kPropp};
  cfg.seed = 3;
  int rep = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_replicate(cfg, 0.25, rep++));
  }
}
BENCHMARK(bm_replicate);

}  // namespace

BENCHMARK_MAIN();
