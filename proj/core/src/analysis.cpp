#include "propp/analysis.hpp"

#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "propp/borrowing.hpp"
#include "propp/rng.hpp"

namespace propp {

namespace {

using nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";

struct ParsedMethod {
  enum Kind { kIgnore, kPool, kMpp, kPropp, kFixed, kWang } kind = kPropp;
  double param = 0.0;  // delta for kFixed, borrow fraction for kWang
};

ParsedMethod parse_method(const std::string& method) {
  auto parse_param = [&](const std::string& text, const char* what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(),
                                           text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw InputError("method '" + method + "': cannot parse " + what + " '" +
                       text + "'");
    return v;
  };

  if (method == "ignore") return {ParsedMethod::kIgnore, 0.0};
  if (method == "pool") return {ParsedMethod::kPool, 0.0};
  if (method == "mpp") return {ParsedMethod::kMpp, 0.0};
  if (method == "propp") return {ParsedMethod::kPropp, 0.0};
  if (method.rfind("fixed:", 0) == 0) {
    const double d = parse_param(method.substr(6), "delta");
    if (!(d >= 0.0 && d <= 1.0))
      throw InputError("method '" + method + "': delta must lie in [0, 1]");
    return {ParsedMethod::kFixed, d};
  }
  if (method.rfind("wang:", 0) == 0) {
    const double f = parse_param(method.substr(5), "borrow fraction");
    if (!(f > 0.0 && f <= 1.0))
      throw InputError("method '" + method +
                       "': borrow fraction must lie in (0, 1]");
    return {ParsedMethod::kWang, f};
  }
  throw InputError(
      "unknown method '" + method +
      "'; expected ignore|pool|mpp|propp|fixed:<delta>|wang:<fraction>");
}

std::string scheme_name(const WeightScheme& s) {
  switch (s.variant) {
    case WeightVariant::kATE: return "ate";
    case WeightVariant::kATTrial: return "att";
    case WeightVariant::kATExternal: return "ate-ext";
  }
  return "?";
}

json summary_json(const PosteriorSummary& s) {
  json j;
  j["mean"] = s.mean;
  j["sd"] = s.sd;
  j["q025"] = s.q025;
  j["q975"] = s.q975;
  if (s.delta_mean) j["delta_mean"] = *s.delta_mean;
  if (s.n_samples) j["n_samples"] = *s.n_samples;
  return j;
}

json propensity_json(const Dataset& data, const PropensityModel& model,
                     const WeightedDataset& wd, std::size_t n_floored,
                     const std::vector<std::string>& covariate_names) {
  json j;
  j["converged"] = model.converged;
  j["iterations"] = model.iterations;

  constexpr int kBins = 20;
  std::vector<int> trial_hist(kBins, 0), external_hist(kBins, 0);
  json edges = json::array();
  for (int b = 0; b <= kBins; ++b)
    edges.push_back(static_cast<double>(b) / kBins);
  for (std::size_t i = 0; i < wd.scores.size(); ++i) {
    int b = static_cast<int>(wd.scores[i] * kBins);
    b = std::min(b, kBins - 1);
    (data.records[i].in_trial ? trial_hist : external_hist)[b] += 1;
  }
  j["score_histogram"] = {{"edges", edges},
                          {"trial", trial_hist},
                          {"external", external_hist}};

  const std::vector<double> unit(data.size(), 1.0);
  const auto smd_raw = standardized_mean_diff(data, unit);
  const auto smd_wtd = standardized_mean_diff(data, wd.weights);
  json smd = json::array();
  for (std::size_t jx = 0; jx < covariate_names.size(); ++jx)
    smd.push_back({{"covariate", covariate_names[jx]},
                   {"unweighted", smd_raw[jx]},
                   {"weighted", smd_wtd[jx]}});
  j["smd"] = smd;

  double sum_external = 0.0;
  std::size_t n_zero = 0;
  for (std::size_t i = 0; i < wd.weights.size(); ++i) {
    if (data.records[i].in_trial) continue;
    sum_external += wd.weights[i];
    if (wd.weights[i] == 0.0) ++n_zero;
  }
  j["weights"] = {{"sum_external", sum_external},
                  {"zero_external", n_zero},
                  {"floored", n_floored}};
  return j;
}

json sampler_json(const SamplerStats& stats) {
  json j;
  j["proposals"] = stats.proposals;
  j["accepted"] = stats.accepted;
  j["acceptance_rate"] =
      stats.proposals ? static_cast<double>(stats.accepted) / stats.proposals
                      : 0.0;
  return j;
}

json wang_json(const WangFit& fit) {
  json strata = json::array();
  for (const auto& st : fit.strata)
    strata.push_back({{"n_trial", st.n_trial},
                      {"n_external", st.n_external},
                      {"responders_trial", st.s1_trial},
                      {"responders_external", st.s1_external},
                      {"overlap", st.overlap},
                      {"delta", st.delta}});
  json j;
  j["strata"] = strata;
  j["trimmed_external"] = fit.n_trimmed;
  j["borrow_target"] = fit.borrow_target;
  j["borrowed"] = fit.borrowed;
  return j;
}

}  // namespace

void validate_method_string(const std::string& method) {
  parse_method(method);
}

std::string run_analysis_document(const LoadedDataset& data,
                                  const AnalysisConfig& cfg,
                                  const std::string& data_label) {
  const ParsedMethod method = parse_method(cfg.method);
  data.dataset.validate();
  if (cfg.n_samples == 0)
    throw InputError("analysis: need at least one posterior sample");

  json doc;
  doc["tool"] = {{"name", "propp"}, {"version", kToolVersion}};
  doc["data"] = {{"source", data_label},
                 {"n_trial", data.dataset.n_trial()},
                 {"n_external", data.dataset.n_external()},
                 {"covariates", data.covariate_names}};
  doc["config"] = {{"method", cfg.method},
                   {"weight_scheme", scheme_name(cfg.scheme)},
                   {"cap", cfg.scheme.capped},
                   {"delta_prior", {cfg.delta_prior.alpha, cfg.delta_prior.beta}},
                   {"samples", cfg.n_samples},
                   {"seed", cfg.seed},
                   {"ridge", cfg.ridge},
                   {"weight_floor", cfg.weight_floor}};

  const DeltaPrior prior{cfg.delta_prior};
  switch (method.kind) {
    case ParsedMethod::kIgnore:
      doc["result"] = summary_json(fit_ignore(data.dataset));
      break;
    case ParsedMethod::kPool:
      doc["result"] = summary_json(fit_pooled(data.dataset));
      break;
    case ParsedMethod::kFixed:
      doc["result"] =
          summary_json(fit_fixed_power(data.dataset, method.param));
      break;
    case ParsedMethod::kMpp: {
      const SampledFit fit =
          fit_mpp(data.dataset, prior, cfg.n_samples, cfg.seed);
      doc["result"] = summary_json(fit.summary);
      doc["sampler"] = sampler_json(fit.stats);
      break;
    }
    case ParsedMethod::kPropp: {
      const PropensityModel model =
          fit_propensity(data.dataset, cfg.ridge);
      WeightedDataset wd;
      wd.dataset = data.dataset;
      wd.scores = predict_scores(model, data.dataset);
      const std::vector<bool> z = trial_indicators(data.dataset);
      wd.weights = compute_weights(wd.scores, z, cfg.scheme);
      const std::size_t n_floored =
          apply_weight_floor(wd.weights, z, cfg.weight_floor);
      const SampledFit fit = fit_propp(wd, prior, cfg.n_samples, cfg.seed);
      doc["result"] = summary_json(fit.summary);
      doc["sampler"] = sampler_json(fit.stats);
      doc["propensity"] = propensity_json(data.dataset, model, wd, n_floored,
                                          data.covariate_names);
      break;
    }
    case ParsedMethod::kWang: {
      const PropensityModel model =
          fit_propensity(data.dataset, cfg.ridge);
      WeightedDataset wd;
      wd.dataset = data.dataset;
      wd.scores = predict_scores(model, data.dataset);
      const std::vector<bool> z = trial_indicators(data.dataset);
      wd.weights = compute_weights(wd.scores, z, cfg.scheme);
      const std::size_t n_floored =
          apply_weight_floor(wd.weights, z, cfg.weight_floor);
      const WangFit fit =
          fit_wang_detailed(data.dataset, wd.scores, 5, method.param, cfg.seed);
      doc["result"] = summary_json(fit.summary);
      doc["stratification"] = wang_json(fit);
      doc["propensity"] = propensity_json(data.dataset, model, wd, n_floored,
                                          data.covariate_names);
      break;
    }
  }
  return doc.dump(2) + "\n";
}

}  // namespace propp
