#pragma once

#include <cstdint>
#include <vector>

#include "propp/propensity.hpp"
#include "propp/types.hpp"

namespace propp {

// Beta prior on the discounting parameter delta.
struct DeltaPrior {
  BetaParams params{1.0, 1.0};
};

// Sufficient statistics for every borrowing method: (possibly weighted)
// responder / non-responder totals per arm.
struct BorrowingInput {
  WeightedCounts trial;
  WeightedCounts external;

  static BorrowingInput from_dataset(const Dataset& data);
  static BorrowingInput from_weighted(const WeightedDataset& wd);
};

struct PosteriorSamples {
  std::vector<double> theta;
  std::vector<double> delta;
  std::uint64_t seed = 0;
};

struct SamplerStats {
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
};

struct SampledFit {
  PosteriorSamples samples;
  PosteriorSummary summary;
  SamplerStats stats;
};

// Log of the marginal posterior density of delta (up to an additive
// constant shared across delta):
//
//   log B(d*s1e + s10 + 1, d*s0e + s00 + 1) - log B(d*s1e + 1, d*s0e + 1)
//     + (a-1) log d + (b-1) log(1-d)
//
// i.e. the weighted-likelihood normalizer ratio times the Beta(a, b) prior
// on delta.  delta must lie in the open interval (0, 1).
double log_marginal_delta(double delta, const BorrowingInput& input,
                          const DeltaPrior& prior);

// Draws from the delta marginal by rejection sampling with uniform
// proposals.  The envelope is 1.05 x the density maximum over a midpoint
// grid of `grid_size` cells.  Throws SamplerDegeneracyError if fewer than
// 1e-4 of proposals have been accepted after every millionth proposal.
std::vector<double> sample_delta(const BorrowingInput& input,
                                 const DeltaPrior& prior, std::size_t n,
                                 std::uint64_t seed, int grid_size = 1001,
                                 SamplerStats* stats = nullptr);

// theta | delta ~ Beta(d*s1e + s10 + 1, d*s0e + s00 + 1), one draw per
// element of delta_draws.
std::vector<double> sample_theta_given_delta(
    const std::vector<double>& delta_draws, const BorrowingInput& input,
    std::uint64_t seed);

// Exact conjugate posteriors.
BetaParams ignore_posterior(const BorrowingInput& input);
BetaParams pooled_posterior(const BorrowingInput& input);
BetaParams fixed_power_posterior(const BorrowingInput& input, double delta);

// Exact summary (mean/sd and equal-tailed 95% interval) of a Beta posterior.
PosteriorSummary beta_posterior_summary(const BetaParams& p);

// Mean/sd/type-7 quantiles of sampled draws.
PosteriorSummary summarize_samples(const PosteriorSamples& samples);

// Type-7 sample quantile (linear interpolation of order statistics).
double sample_quantile(std::vector<double> values, double q);

// Trial-data-only and pool-everything reference fits.
PosteriorSummary fit_ignore(const Dataset& data);
PosteriorSummary fit_pooled(const Dataset& data);
PosteriorSummary fit_fixed_power(const Dataset& data, double delta);

// Modified power prior: delta is random with the marginal above, external
// patients enter unweighted.
SampledFit fit_mpp(const Dataset& data, const DeltaPrior& prior,
                   std::size_t n_samples, std::uint64_t seed);

// Propensity-weighted power prior: same machinery with per-patient weights
// folded into the external counts, so each external patient contributes
// delta * w_i observations.
SampledFit fit_propp(const WeightedDataset& wd, const DeltaPrior& prior,
                     std::size_t n_samples, std::uint64_t seed);

// Stratified fixed-budget borrowing: trim external patients outside the
// trial score range, stratify on quantiles of the trial scores, split the
// budget  borrow_fraction * n_trial  across strata in proportion to the
// per-stratum overlap min(n0s, nes) / max(n0s, nes), and mix the stratum
// posteriors with weights n0s / n_trial.  The mixture mean is exact; sd and
// quantiles come from 10^4 stratified draws.
struct WangStratum {
  int n_trial = 0;
  int n_external = 0;
  double s1_trial = 0.0;
  double s1_external = 0.0;
  double overlap = 0.0;   // min/max trial vs external count ratio
  double delta = 0.0;     // per-patient discount granted to this stratum
  BetaParams posterior{1.0, 1.0};
};

struct WangFit {
  PosteriorSummary summary;
  std::vector<WangStratum> strata;
  int n_trimmed = 0;        // external patients outside the trial score range
  double borrow_target = 0.0;  // borrow_fraction * n_trial
  double borrowed = 0.0;       // sum of delta_s * n_external_s actually used
};

WangFit fit_wang_detailed(const Dataset& data,
                          const std::vector<double>& scores, int n_strata,
                          double borrow_fraction, std::uint64_t seed);

PosteriorSummary fit_wang_stratified(const Dataset& data,
                                     const std::vector<double>& scores,
                                     int n_strata, double borrow_fraction,
                                     std::uint64_t seed);

}  // namespace propp
