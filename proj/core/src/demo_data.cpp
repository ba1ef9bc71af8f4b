#include "propp/demo_data.hpp"

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "propp/rng.hpp"

namespace propp {

namespace {

constexpr std::uint64_t kTagDemo = 0xDE40;

// Fixed marginals of the synthetic cohort.  Responder counts are keyed to
// ECOG grade, which ties outcomes to the one covariate pair that separates
// the cohorts: grades 2-3 (and unresectable stage III) occur off-trial
// only, and those patients respond worst.
struct CohortSpec {
  int n;
  std::vector<std::pair<std::string, int>> sex;
  std::vector<std::pair<std::string, int>> stage;
  std::vector<std::pair<std::string, int>> ecog;
  std::vector<int> responders_by_ecog;  // aligned with `ecog`
  double age_mean, age_sd;
};

const CohortSpec kTrial{
    132,
    {{"female", 51}, {"male", 81}},
    {{"M1a", 33}, {"M1b", 18}, {"M1c", 81}},
    {{"grade0", 61}, {"grade1", 71}},
    {36, 39},  // 75 responders
    50.0, 15.0,
};

const CohortSpec kExternal{
    241,
    {{"female", 95}, {"male", 146}},
    {{"M1a", 22}, {"M1b", 26}, {"M1c", 182}, {"UnresectableIII", 11}},
    {{"grade0", 112}, {"grade1", 98}, {"grade2", 30}, {"grade3", 1}},
    {68, 54, 7, 0},  // 129 responders
    53.0, 13.0,
};

std::vector<std::string> shuffled_labels(
    const std::vector<std::pair<std::string, int>>& counts, Rng& rng) {
  std::vector<std::string> labels;
  for (const auto& [label, count] : counts)
    labels.insert(labels.end(), count, label);
  rng.shuffle(labels);
  return labels;
}

double truncated_age(double mean, double sd, Rng& rng) {
  double age;
  do {
    age = rng.normal(mean, sd);
  } while (age < 18.0 || age > 90.0);
  return std::round(age * 10.0) / 10.0;
}

void append_cohort(Table& table, const CohortSpec& spec, bool in_trial,
                   Rng& rng) {
  const auto sex = shuffled_labels(spec.sex, rng);
  const auto stage = shuffled_labels(spec.stage, rng);
  const auto ecog = shuffled_labels(spec.ecog, rng);

  // Responders per ECOG grade: shuffle the patients of each grade and mark
  // the first r of them.
  std::vector<int> outcome(spec.n, 0);
  for (std::size_t g = 0; g < spec.ecog.size(); ++g) {
    std::vector<int> members;
    for (int i = 0; i < spec.n; ++i)
      if (ecog[i] == spec.ecog[g].first) members.push_back(i);
    rng.shuffle(members);
    for (int r = 0; r < spec.responders_by_ecog[g]; ++r)
      outcome[members[r]] = 1;
  }

  char age_buf[16];
  for (int i = 0; i < spec.n; ++i) {
    std::snprintf(age_buf, sizeof age_buf, "%.1f",
                  truncated_age(spec.age_mean, spec.age_sd, rng));
    table.rows.push_back({in_trial ? "trial" : "external",
                          outcome[i] ? "1" : "0", age_buf, sex[i], stage[i],
                          ecog[i]});
  }
}

}  // namespace

DemoCohort generate_demo_data(std::uint64_t seed) {
  DemoCohort demo;
  demo.seed = seed;
  demo.table.columns = {"source", "outcome", "age", "sex", "stage", "ecog"};

  Rng rng(seed_mix({seed, kTagDemo}));
  append_cohort(demo.table, kTrial, true, rng);
  append_cohort(demo.table, kExternal, false, rng);

  demo.loaded = expand_table(demo.table, "demo-data");
  return demo;
}

}  // namespace propp
