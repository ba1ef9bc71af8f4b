#pragma once

#include <cstdint>

#include "propp/dataset_io.hpp"

namespace propp {

// Synthetic metastatic-melanoma cohort: 132 trial and 241 expanded-access
// patients with age, sex, stage, and ECOG columns.  Categorical marginals
// and responder counts are fixed; the seed drives ages and row-level
// assignment of the categories.
struct DemoCohort {
  Table table;          // raw CSV form (categorical columns as strings)
  LoadedDataset loaded; // expanded form, ready for analysis
  std::uint64_t seed = 0;
};

DemoCohort generate_demo_data(std::uint64_t seed);

}  // namespace propp
