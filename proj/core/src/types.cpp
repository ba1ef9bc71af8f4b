#include "propp/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace propp {

std::size_t Dataset::n_trial() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(),
                    [](const PatientRecord& r) { return r.in_trial; }));
}

void Dataset::validate() const {
  if (k < 0) throw InputError("dataset: covariate count must be non-negative");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const PatientRecord& r = records[i];
    if (r.outcome != 0 && r.outcome != 1)
      throw InputError("dataset: record " + std::to_string(i) +
                       ": outcome must be 0 or 1");
    if (r.covariates.size() != static_cast<std::size_t>(k))
      throw InputError("dataset: record " + std::to_string(i) + ": expected " +
                       std::to_string(k) + " covariates, got " +
                       std::to_string(r.covariates.size()));
    for (double x : r.covariates)
      if (!std::isfinite(x))
        throw InputError("dataset: record " + std::to_string(i) +
                         ": non-finite covariate");
  }
  if (n_trial() == 0)
    throw InputError("dataset: needs at least one trial patient");
}

Dataset Dataset::create(std::vector<PatientRecord> records, int k) {
  Dataset d{std::move(records), k};
  d.validate();
  return d;
}

}  // namespace propp
