#include "propp/borrowing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "propp/rng.hpp"
#include "propp/special_functions.hpp"

namespace propp {

namespace {

constexpr std::uint64_t kTagDelta = 0xD17A;
constexpr std::uint64_t kTagTheta = 0x7E7A;
constexpr double kEnvelopeSlack = 1.05;
constexpr double kMinAcceptanceRate = 1e-4;
constexpr std::uint64_t kDegeneracyCheckEvery = 1000000;
constexpr int kWangSummaryDraws = 10000;

void check_counts(const WeightedCounts& c, const char* what) {
  if (!(c.s1 >= 0.0) || !(c.s0 >= 0.0) || !std::isfinite(c.s1) ||
      !std::isfinite(c.s0))
    throw InputError(std::string(what) +
                     " counts must be non-negative and finite");
}

PosteriorSummary summarize(const std::vector<double>& theta,
                           const std::vector<double>& delta) {
  PosteriorSummary s;
  const double n = static_cast<double>(theta.size());
  s.mean = std::accumulate(theta.begin(), theta.end(), 0.0) / n;
  double ss = 0.0;
  for (double t : theta) ss += (t - s.mean) * (t - s.mean);
  s.sd = theta.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.q025 = sample_quantile(theta, 0.025);
  s.q975 = sample_quantile(theta, 0.975);
  if (!delta.empty())
    s.delta_mean =
        std::accumulate(delta.begin(), delta.end(), 0.0) / delta.size();
  s.n_samples = theta.size();
  return s;
}

SampledFit fit_discounted(const BorrowingInput& input, const DeltaPrior& prior,
                          std::size_t n_samples, std::uint64_t seed) {
  SampledFit fit;
  fit.samples.seed = seed;
  fit.samples.delta = sample_delta(input, prior, n_samples,
                                   seed_mix({seed, kTagDelta}), 1001,
                                   &fit.stats);
  fit.samples.theta = sample_theta_given_delta(fit.samples.delta, input,
                                               seed_mix({seed, kTagTheta}));
  fit.summary = summarize(fit.samples.theta, fit.samples.delta);
  return fit;
}

}  // namespace

BorrowingInput BorrowingInput::from_dataset(const Dataset& data) {
  BorrowingInput in;
  for (const auto& r : data.records) {
    WeightedCounts& c = r.in_trial ? in.trial : in.external;
    (r.outcome == 1 ? c.s1 : c.s0) += 1.0;
  }
  return in;
}

BorrowingInput BorrowingInput::from_weighted(const WeightedDataset& wd) {
  if (wd.weights.size() != wd.dataset.size())
    throw InputError("weighted dataset: weight vector length mismatch");
  BorrowingInput in;
  for (std::size_t i = 0; i < wd.dataset.size(); ++i) {
    const auto& r = wd.dataset.records[i];
    const double w = r.in_trial ? 1.0 : wd.weights[i];
    if (!(w >= 0.0) || !std::isfinite(w))
      throw InputError("weighted dataset: weights must be non-negative and finite");
    WeightedCounts& c = r.in_trial ? in.trial : in.external;
    (r.outcome == 1 ? c.s1 : c.s0) += w;
  }
  return in;
}

double log_marginal_delta(double delta, const BorrowingInput& input,
                          const DeltaPrior& prior) {
  if (!std::isfinite(delta) || delta <= 0.0 || delta >= 1.0)
    throw std::domain_error("log_marginal_delta: delta must lie in (0, 1)");
  check_counts(input.trial, "trial");
  check_counts(input.external, "external");

  const double s1e = input.external.s1, s0e = input.external.s0;
  const double s10 = input.trial.s1, s00 = input.trial.s0;
  return log_beta(delta * s1e + s10 + 1.0, delta * s0e + s00 + 1.0) -
         log_beta(delta * s1e + 1.0, delta * s0e + 1.0) +
         (prior.params.alpha - 1.0) * std::log(delta) +
         (prior.params.beta - 1.0) * std::log1p(-delta);
}

std::vector<double> sample_delta(const BorrowingInput& input,
                                 const DeltaPrior& prior, std::size_t n,
                                 std::uint64_t seed, int grid_size,
                                 SamplerStats* stats) {
  if (n == 0) throw InputError("sample_delta: need at least one draw");
  if (grid_size < 1) throw InputError("sample_delta: grid_size must be >= 1");

  // Envelope: slack times the density maximum over cell midpoints.
  double log_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_size; ++i) {
    const double d = (i + 0.5) / grid_size;
    log_max = std::max(log_max, log_marginal_delta(d, input, prior));
  }
  const double log_envelope = log_max + std::log(kEnvelopeSlack);

  Rng rng(seed);
  std::vector<double> draws;
  draws.reserve(n);
  std::uint64_t proposals = 0, accepted = 0;
  while (draws.size() < n) {
    const double d = rng.uniform_open01();
    const double u = rng.uniform01();
    ++proposals;
    if (std::log(u) < log_marginal_delta(d, input, prior) - log_envelope) {
      draws.push_back(d);
      ++accepted;
    }
    if (proposals % kDegeneracyCheckEvery == 0 &&
        static_cast<double>(accepted) <
            kMinAcceptanceRate * static_cast<double>(proposals)) {
      if (stats) *stats = {proposals, accepted};
      throw SamplerDegeneracyError(
          "sample_delta: acceptance rate below 1e-4 after " +
          std::to_string(proposals) +
          " proposals; discounting posterior too concentrated");
    }
  }
  if (stats) *stats = {proposals, accepted};
  return draws;
}

std::vector<double> sample_theta_given_delta(
    const std::vector<double>& delta_draws, const BorrowingInput& input,
    std::uint64_t seed) {
  if (delta_draws.empty())
    throw InputError("sample_theta_given_delta: no delta draws");
  check_counts(input.trial, "trial");
  check_counts(input.external, "external");

  Rng rng(seed);
  std::vector<double> theta;
  theta.reserve(delta_draws.size());
  for (double d : delta_draws) {
    if (!(d >= 0.0 && d <= 1.0))
      throw InputError("sample_theta_given_delta: delta outside [0, 1]");
    theta.push_back(rng.beta(d * input.external.s1 + input.trial.s1 + 1.0,
                             d * input.external.s0 + input.trial.s0 + 1.0));
  }
  return theta;
}

BetaParams ignore_posterior(const BorrowingInput& input) {
  check_counts(input.trial, "trial");
  return {input.trial.s1 + 1.0, input.trial.s0 + 1.0};
}

BetaParams pooled_posterior(const BorrowingInput& input) {
  check_counts(input.trial, "trial");
  check_counts(input.external, "external");
  return {input.trial.s1 + input.external.s1 + 1.0,
          input.trial.s0 + input.external.s0 + 1.0};
}

BetaParams fixed_power_posterior(const BorrowingInput& input, double delta) {
  if (!std::isfinite(delta) || delta < 0.0 || delta > 1.0)
    throw InputError("fixed_power_posterior: delta must lie in [0, 1]");
  check_counts(input.trial, "trial");
  check_counts(input.external, "external");
  return {delta * input.external.s1 + input.trial.s1 + 1.0,
          delta * input.external.s0 + input.trial.s0 + 1.0};
}

PosteriorSummary beta_posterior_summary(const BetaParams& p) {
  PosteriorSummary s;
  s.mean = p.mean();
  s.sd = p.sd();
  s.q025 = beta_quantile(p, 0.025);
  s.q975 = beta_quantile(p, 0.975);
  return s;
}

double sample_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InputError("sample_quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0))
    throw InputError("sample_quantile: q must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * (static_cast<double>(values.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

PosteriorSummary summarize_samples(const PosteriorSamples& samples) {
  if (samples.theta.empty())
    throw InputError("summarize_samples: no theta draws");
  return summarize(samples.theta, samples.delta);
}

PosteriorSummary fit_ignore(const Dataset& data) {
  data.validate();
  return beta_posterior_summary(
      ignore_posterior(BorrowingInput::from_dataset(data)));
}

PosteriorSummary fit_pooled(const Dataset& data) {
  data.validate();
  return beta_posterior_summary(
      pooled_posterior(BorrowingInput::from_dataset(data)));
}

PosteriorSummary fit_fixed_power(const Dataset& data, double delta) {
  data.validate();
  return beta_posterior_summary(
      fixed_power_posterior(BorrowingInput::from_dataset(data), delta));
}

SampledFit fit_mpp(const Dataset& data, const DeltaPrior& prior,
                   std::size_t n_samples, std::uint64_t seed) {
  data.validate();
  return fit_discounted(BorrowingInput::from_dataset(data), prior, n_samples,
                        seed);
}

SampledFit fit_propp(const WeightedDataset& wd, const DeltaPrior& prior,
                     std::size_t n_samples, std::uint64_t seed) {
  wd.dataset.validate();
  return fit_discounted(BorrowingInput::from_weighted(wd), prior, n_samples,
                        seed);
}

WangFit fit_wang_detailed(const Dataset& data,
                          const std::vector<double>& scores, int n_strata,
                          double borrow_fraction, std::uint64_t seed) {
  data.validate();
  if (scores.size() != data.size())
    throw InputError("fit_wang_stratified: score vector length mismatch");
  if (n_strata < 2) throw InputError("fit_wang_stratified: need >= 2 strata");
  if (!(borrow_fraction > 0.0 && borrow_fraction <= 1.0))
    throw InputError("fit_wang_stratified: borrow fraction must lie in (0, 1]");

  std::vector<double> trial_scores;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (data.records[i].in_trial) trial_scores.push_back(scores[i]);
  const auto [lo_it, hi_it] =
      std::minmax_element(trial_scores.begin(), trial_scores.end());
  const double lo = *lo_it, hi = *hi_it;

  // Stratum boundaries: interior quantiles of the trial scores.  A score on
  // a boundary goes to the lower stratum.
  std::vector<double> breaks;
  for (int s = 1; s < n_strata; ++s)
    breaks.push_back(sample_quantile(trial_scores,
                                     static_cast<double>(s) / n_strata));
  auto stratum_of = [&](double score) {
    return static_cast<int>(std::upper_bound(breaks.begin(), breaks.end(),
                                             score) -
                            breaks.begin());
  };

  WangFit fit;
  fit.strata.resize(n_strata);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& r = data.records[i];
    if (r.in_trial) {
      WangStratum& st = fit.strata[stratum_of(scores[i])];
      ++st.n_trial;
      st.s1_trial += r.outcome;
    } else {
      if (scores[i] < lo || scores[i] > hi) {
        ++fit.n_trimmed;  // no trial support at this score
        continue;
      }
      WangStratum& st = fit.strata[stratum_of(scores[i])];
      ++st.n_external;
      st.s1_external += r.outcome;
    }
  }
  for (int s = 0; s < n_strata; ++s)
    if (fit.strata[s].n_trial == 0)
      throw StratificationError("fit_wang_stratified: stratum " +
                                std::to_string(s) + " has no trial patients");

  const double n0 = static_cast<double>(data.n_trial());
  fit.borrow_target = borrow_fraction * n0;
  double overlap_sum = 0.0;
  for (auto& st : fit.strata) {
    const double a = st.n_trial, b = st.n_external;
    st.overlap = b > 0.0 ? std::min(a, b) / std::max(a, b) : 0.0;
    overlap_sum += st.overlap;
  }
  for (auto& st : fit.strata) {
    if (st.n_external > 0 && overlap_sum > 0.0) {
      const double budget = fit.borrow_target * st.overlap / overlap_sum;
      st.delta = std::min(1.0, budget / st.n_external);
    }
    fit.borrowed += st.delta * st.n_external;
    st.posterior =
        BetaParams(st.delta * st.s1_external + st.s1_trial + 1.0,
                   st.delta * (st.n_external - st.s1_external) +
                       (st.n_trial - st.s1_trial) + 1.0);
  }

  // Mixture over strata with weights n_trial_s / n_trial.  The mean is
  // exact; sd and quantiles come from stratified draws.
  PosteriorSummary& sum = fit.summary;
  for (const auto& st : fit.strata)
    sum.mean += st.n_trial / n0 * st.posterior.mean();

  std::vector<int> alloc(n_strata, 0);
  int allocated = 0;
  std::vector<std::pair<double, int>> remainders;
  for (int s = 0; s < n_strata; ++s) {
    const double share = fit.strata[s].n_trial / n0 * kWangSummaryDraws;
    alloc[s] = static_cast<int>(share);
    allocated += alloc[s];
    remainders.push_back({share - alloc[s], s});
  }
  std::sort(remainders.begin(), remainders.end(), [](auto& a, auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  });
  for (int r = 0; allocated < kWangSummaryDraws; ++r, ++allocated)
    ++alloc[remainders[r % n_strata].second];

  Rng rng(seed);
  std::vector<double> draws;
  draws.reserve(kWangSummaryDraws);
  for (int s = 0; s < n_strata; ++s)
    for (int d = 0; d < alloc[s]; ++d)
      draws.push_back(
          rng.beta(fit.strata[s].posterior.alpha, fit.strata[s].posterior.beta));

  double ss = 0.0;
  for (double d : draws) ss += (d - sum.mean) * (d - sum.mean);
  sum.sd = std::sqrt(ss / (static_cast<double>(draws.size()) - 1.0));
  sum.q025 = sample_quantile(draws, 0.025);
  sum.q975 = sample_quantile(draws, 0.975);
  sum.n_samples = draws.size();
  return fit;
}

PosteriorSummary fit_wang_stratified(const Dataset& data,
                                     const std::vector<double>& scores,
                                     int n_strata, double borrow_fraction,
                                     std::uint64_t seed) {
  return fit_wang_detailed(data, scores, n_strata, borrow_fraction, seed)
      .summary;
}

}  // namespace propp
