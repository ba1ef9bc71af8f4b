#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "propp/errors.hpp"

namespace propp {

// Parameters of a Beta(alpha, beta) distribution.  Construction rejects
// non-positive or non-finite shapes, so a BetaParams value is always usable.
struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;

  BetaParams() = default;
  BetaParams(double a, double b) : alpha(a), beta(b) {
    if (!(std::isfinite(a) && std::isfinite(b) && a > 0.0 && b > 0.0))
      throw InputError("Beta shape parameters must be positive and finite");
  }

  double mean() const { return alpha / (alpha + beta); }
  double sd() const {
    const double s = alpha + beta;
    return std::sqrt(alpha * beta / (s * s * (s + 1.0)));
  }
};

// One patient: arm indicator, binary response, covariate vector.
struct PatientRecord {
  bool in_trial = false;
  int outcome = 0;  // 0 or 1
  std::vector<double> covariates;

  bool operator==(const PatientRecord&) const = default;
};

// A combined trial + external cohort with a common covariate layout.
// Build through create() to get the structural checks; the invariants are
// at least one trial patient, outcomes in {0,1}, and k finite covariates
// per record.
struct Dataset {
  std::vector<PatientRecord> records;
  int k = 0;  // covariates per record

  std::size_t size() const { return records.size(); }
  std::size_t n_trial() const;
  std::size_t n_external() const { return records.size() - n_trial(); }

  static Dataset create(std::vector<PatientRecord> records, int k);
  void validate() const;

  bool operator==(const Dataset&) const = default;
};

// Weighted response / non-response totals for one arm: s1 = sum of weights
// of responders, s0 = sum over non-responders.
struct WeightedCounts {
  double s1 = 0.0;
  double s0 = 0.0;

  double n_effective() const { return s1 + s0; }
};

// Posterior summary of the trial response rate.  delta_mean and n_samples
// are set only by sampled fits; conjugate fits are exact and carry neither.
struct PosteriorSummary {
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  std::optional<double> delta_mean;
  std::optional<std::uint64_t> n_samples;
};

}  // namespace propp
