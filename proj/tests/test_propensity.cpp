#include <doctest.h>

#include <cmath>
#include <vector>

#include "propp/propensity.hpp"
#include "propp/special_functions.hpp"
#include "test_utils.hpp"

using namespace propp;

TEST_CASE("intercept-only fit reproduces the arm share") {
  // Balanced arms: every score is 1/2.
  const Dataset balanced = testutil::counts_dataset(100, 100, 100, 100);
  const PropensityModel m1 = fit_propensity(balanced);
  CHECK(m1.converged);
  for (double s : predict_scores(m1, balanced))
    CHECK(s == doctest::Approx(0.5).epsilon(1e-8));

  // 132 trial vs 241 external: score = 132/373 everywhere.
  const Dataset cohort = testutil::counts_dataset(75, 57, 129, 112);
  const PropensityModel m2 = fit_propensity(cohort);
  CHECK(m2.converged);
  for (double s : predict_scores(m2, cohort))
    CHECK(s == doctest::Approx(132.0 / 373.0).epsilon(1e-8));
}

TEST_CASE("newton fit agrees with an independent IRLS optimizer") {
  const Dataset data = testutil::gaussian_dataset(200, 260, 3, 0.4, 555);
  for (double ridge : {0.0, 1e-4, 0.5}) {
    const PropensityModel model = fit_propensity(data, ridge);
    const testutil::IrlsRef ref = testutil::irls_logistic_ref(data, ridge);
    REQUIRE(ref.ok);
    CHECK(model.converged);
    CHECK(model.intercept == doctest::Approx(ref.intercept).epsilon(1e-6));
    for (int j = 0; j < 3; ++j)
      CHECK(model.coefficients[j] ==
            doctest::Approx(ref.coefficients[j]).epsilon(1e-6));
  }
}

TEST_CASE("quasi-complete separation stays finite under the default ridge") {
  // A binary covariate carried only by (some) external patients.
  std::vector<PatientRecord> recs;
  for (int i = 0; i < 40; ++i) recs.push_back({true, i % 2, {0.0}});
  for (int i = 0; i < 20; ++i) recs.push_back({false, i % 2, {0.0}});
  for (int i = 0; i < 20; ++i) recs.push_back({false, i % 2, {1.0}});
  const Dataset data = Dataset::create(std::move(recs), 1);

  const PropensityModel model = fit_propensity(data);  // ridge 1e-4
  CHECK(std::isfinite(model.intercept));
  CHECK(std::isfinite(model.coefficients[0]));
  const auto scores = predict_scores(model, data);
  for (std::size_t i = 60; i < 80; ++i) {
    CHECK(scores[i] > 0.0);
    CHECK(scores[i] < 0.01);  // flagged patients pushed to the boundary
  }
  // Same optimum as the independent optimizer for this penalized problem.
  const testutil::IrlsRef ref = testutil::irls_logistic_ref(data, 1e-4);
  REQUIRE(ref.ok);
  CHECK(model.coefficients[0] ==
        doctest::Approx(ref.coefficients[0]).epsilon(1e-4));
}

TEST_CASE("scores are invariant to affine covariate transforms") {
  const Dataset data = testutil::gaussian_dataset(150, 150, 2, 0.5, 321);
  Dataset scaled = data;
  for (auto& r : scaled.records) {
    r.covariates[0] = 3.7 * r.covariates[0] - 12.0;
    r.covariates[1] = -0.25 * r.covariates[1] + 4.0;
  }
  const auto s1 = predict_scores(fit_propensity(data), data);
  const auto s2 = predict_scores(fit_propensity(scaled), scaled);
  for (std::size_t i = 0; i < s1.size(); ++i)
    CHECK(s1[i] == doctest::Approx(s2[i]).epsilon(1e-8));
}

TEST_CASE("degenerate inputs") {
  // Constant covariate: sd fallback keeps the fit finite.
  std::vector<PatientRecord> recs;
  for (int i = 0; i < 30; ++i) recs.push_back({i < 15, 0, {2.5}});
  const Dataset constant = Dataset::create(std::move(recs), 1);
  const PropensityModel m = fit_propensity(constant);
  CHECK(std::isfinite(m.coefficients[0]));
  CHECK(m.covariate_sds[0] == 1.0);

  // Single-arm data cannot be scored.
  std::vector<PatientRecord> trial_only;
  for (int i = 0; i < 10; ++i) trial_only.push_back({true, 0, {}});
  CHECK_THROWS_AS(fit_propensity(Dataset::create(trial_only, 0)), InputError);
}

TEST_CASE("predict_scores checks dimensions and stays inside (0,1)") {
  const Dataset data = testutil::gaussian_dataset(50, 50, 2, 0.0, 99);
  PropensityModel model = fit_propensity(data);
  for (double s : predict_scores(model, data)) {
    CHECK(s > 0.0);
    CHECK(s < 1.0);
  }
  const Dataset wrong = testutil::gaussian_dataset(20, 20, 3, 0.0, 100);
  CHECK_THROWS_AS(predict_scores(model, wrong), InputError);
}

TEST_CASE("weight formulas per scheme") {
  const std::vector<double> scores = {0.5, 0.25, 0.8};
  const std::vector<bool> trial = {false, false, false};

  auto w = compute_weights(scores, trial, {WeightVariant::kATTrial, true});
  CHECK(w[0] == doctest::Approx(1.0));          // odds 1 capped at 1
  CHECK(w[1] == doctest::Approx(1.0 / 3.0));    // odds 1/3
  CHECK(w[2] == doctest::Approx(1.0));          // odds 4 capped

  w = compute_weights(scores, trial, {WeightVariant::kATTrial, false});
  CHECK(w[2] == doctest::Approx(4.0));

  w = compute_weights(scores, trial, {WeightVariant::kATE, false});
  CHECK(w[0] == doctest::Approx(2.0));          // 1 / (1 - 0.5)
  CHECK(w[1] == doctest::Approx(4.0 / 3.0));
  CHECK(w[2] == doctest::Approx(5.0));

  w = compute_weights(scores, trial, {WeightVariant::kATExternal, true});
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == doctest::Approx(1.0));

  const std::vector<bool> in_trial = {true, true, true};
  w = compute_weights(scores, in_trial, {WeightVariant::kATE, true});
  CHECK(w[0] == doctest::Approx(2.0));   // trial ATE weight 1/score, uncapped
  CHECK(w[1] == doctest::Approx(4.0));
  w = compute_weights(scores, in_trial, {WeightVariant::kATExternal, true});
  CHECK(w[1] == doctest::Approx(3.0));   // (1 - 0.25) / 0.25
}

TEST_CASE("ATT-capped weights: trial at 1, external in [0,1], monotone") {
  Rng rng(777);
  std::vector<double> scores;
  std::vector<bool> trial;
  for (int i = 0; i < 500; ++i) {
    scores.push_back(0.001 + 0.998 * rng.uniform01());
    trial.push_back(i % 2 == 0);
  }
  const auto w = compute_weights(scores, trial, WeightScheme{});
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (trial[i]) {
      CHECK(w[i] == 1.0);
    } else {
      CHECK(w[i] >= 0.0);
      CHECK(w[i] <= 1.0);
    }
  }
  // Monotone nondecreasing in the score.
  double prev = -1.0;
  for (double s = 0.01; s < 1.0; s += 0.01) {
    const auto one = compute_weights({s}, {false}, WeightScheme{});
    CHECK(one[0] >= prev);
    prev = one[0];
  }
}

TEST_CASE("weights reject scores on the boundary") {
  CHECK_THROWS_AS(compute_weights({0.0}, {false}, WeightScheme{}), InputError);
  CHECK_THROWS_AS(compute_weights({1.0}, {false}, WeightScheme{}), InputError);
  CHECK_THROWS_AS(compute_weights({0.5, 0.5}, {false}, WeightScheme{}),
                  InputError);
}

TEST_CASE("weight floor zeroes small external weights only") {
  std::vector<double> w = {1.0, 0.005, 0.05, 0.005};
  const std::vector<bool> trial = {true, false, false, true};
  const std::size_t zeroed = apply_weight_floor(w, trial, 0.01);
  CHECK(zeroed == 1);
  CHECK(w[0] == 1.0);   // trial untouched
  CHECK(w[1] == 0.0);
  CHECK(w[2] == 0.05);
  CHECK(w[3] == 0.005);  // trial untouched even below the floor
}

TEST_CASE("standardized mean differences") {
  // Trial {1,2,3}, external {2,3,4}: unit sds, shift of exactly +1.
  std::vector<PatientRecord> recs;
  for (double v : {1.0, 2.0, 3.0}) recs.push_back({true, 0, {v}});
  for (double v : {2.0, 3.0, 4.0}) recs.push_back({false, 0, {v}});
  const Dataset data = Dataset::create(std::move(recs), 1);

  const std::vector<double> unit(6, 1.0);
  CHECK(standardized_mean_diff(data, unit)[0] == doctest::Approx(1.0));

  // Downweighting the high external value pulls the difference down.
  const std::vector<double> w = {1.0, 1.0, 1.0, 1.0, 1.0, 0.1};
  CHECK(standardized_mean_diff(data, w)[0] < 1.0);

  // Identical groups balance exactly.
  std::vector<PatientRecord> same;
  for (double v : {1.0, 2.0, 3.0}) {
    same.push_back({true, 0, {v}});
    same.push_back({false, 0, {v}});
  }
  const Dataset ident = Dataset::create(std::move(same), 1);
  CHECK(standardized_mean_diff(ident, std::vector<double>(6, 1.0))[0] ==
        doctest::Approx(0.0));

  // All-zero external weight: diagnostic unavailable.
  std::vector<double> dead = {1.0, 1.0, 1.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(standardized_mean_diff(data, dead), InputError);
}

TEST_CASE("ATT-capped weighting shrinks covariate imbalance") {
  const Dataset data = testutil::gaussian_dataset(400, 400, 5, 0.4, 20240815);
  const PropensityModel model = fit_propensity(data);
  const WeightedDataset wd = weight_dataset(data, model, WeightScheme{});

  const auto raw = standardized_mean_diff(data, std::vector<double>(800, 1.0));
  const auto wtd = standardized_mean_diff(data, wd.weights);
  for (int j = 0; j < 5; ++j) CHECK(std::fabs(wtd[j]) < std::fabs(raw[j]));

  // Double safeguard: the capped external weights sum below N_e, so the
  // effective prior sample size delta * sum(w) never exceeds delta * N_e.
  double ext_w = 0.0;
  for (std::size_t i = 0; i < data.records.size(); ++i)
    if (!data.records[i].in_trial) ext_w += wd.weights[i];
  CHECK(ext_w > 0.0);
  CHECK(ext_w <= 400.0);
}
