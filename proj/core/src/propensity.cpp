#include "propp/propensity.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "propp/special_functions.hpp"

namespace propp {

namespace {

// log(1 + e^x) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// Cholesky solve of the SPD system H x = b, in place.  Returns false if a
// pivot fails, i.e. H was not positive definite.
bool solve_spd(std::vector<double>& h, std::vector<double>& b, int m) {
  for (int j = 0; j < m; ++j) {
    double d = h[j * m + j];
    for (int p = 0; p < j; ++p) d -= h[j * m + p] * h[j * m + p];
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    h[j * m + j] = d;
    for (int i = j + 1; i < m; ++i) {
      double s = h[i * m + j];
      for (int p = 0; p < j; ++p) s -= h[i * m + p] * h[j * m + p];
      h[i * m + j] = s / d;
    }
  }
  for (int i = 0; i < m; ++i) {  // L y = b
    double s = b[i];
    for (int p = 0; p < i; ++p) s -= h[i * m + p] * b[p];
    b[i] = s / h[i * m + i];
  }
  for (int i = m - 1; i >= 0; --i) {  // L' x = y
    double s = b[i];
    for (int p = i + 1; p < m; ++p) s -= h[p * m + i] * b[p];
    b[i] = s / h[i * m + i];
  }
  return true;
}

struct Standardizer {
  std::vector<double> means, sds;
};

Standardizer standardize_stats(const Dataset& data) {
  const int k = data.k;
  const double n = static_cast<double>(data.size());
  Standardizer s{std::vector<double>(k, 0.0), std::vector<double>(k, 0.0)};
  for (const auto& r : data.records)
    for (int j = 0; j < k; ++j) s.means[j] += r.covariates[j];
  for (int j = 0; j < k; ++j) s.means[j] /= n;
  for (const auto& r : data.records)
    for (int j = 0; j < k; ++j) {
      const double c = r.covariates[j] - s.means[j];
      s.sds[j] += c * c;
    }
  for (int j = 0; j < k; ++j) {
    s.sds[j] = std::sqrt(s.sds[j] / n);
    if (s.sds[j] == 0.0) s.sds[j] = 1.0;  // constant column: center only
  }
  return s;
}

}  // namespace

std::vector<bool> trial_indicators(const Dataset& data) {
  std::vector<bool> z(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) z[i] = data.records[i].in_trial;
  return z;
}

PropensityModel fit_propensity(const Dataset& data, double ridge, double tol,
                               int max_iter) {
  if (!(ridge >= 0.0) || !(tol > 0.0) || max_iter < 1)
    throw InputError("fit_propensity: invalid ridge/tol/max_iter");
  data.validate();
  const std::size_t n = data.size();
  if (data.n_trial() == 0 || data.n_external() == 0)
    throw InputError("fit_propensity: needs patients in both arms");

  const int k = data.k;
  const int m = k + 1;  // intercept + slopes
  const Standardizer st = standardize_stats(data);

  // Row-major standardized design with leading intercept column.
  std::vector<double> design(n * m);
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = data.records[i];
    design[i * m] = 1.0;
    for (int j = 0; j < k; ++j)
      design[i * m + 1 + j] = (r.covariates[j] - st.means[j]) / st.sds[j];
    z[i] = r.in_trial ? 1.0 : 0.0;
  }

  auto penalized_loglik = [&](const std::vector<double>& beta) {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double eta = 0.0;
      for (int j = 0; j < m; ++j) eta += design[i * m + j] * beta[j];
      ll += z[i] * eta - softplus(eta);
    }
    for (int j = 1; j < m; ++j) ll -= 0.5 * ridge * beta[j] * beta[j];
    return ll;
  };

  std::vector<double> beta(m, 0.0);
  double ll = penalized_loglik(beta);
  bool converged = false;
  int iterations = 0;

  std::vector<double> grad(m), hess(m * m), step(m), trial_beta(m), p(n);
  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double eta = 0.0;
      for (int j = 0; j < m; ++j) eta += design[i * m + j] * beta[j];
      p[i] = expit(eta);
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(hess.begin(), hess.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double resid = z[i] - p[i];
      const double w = p[i] * (1.0 - p[i]);
      for (int a = 0; a < m; ++a) {
        grad[a] += design[i * m + a] * resid;
        for (int b = 0; b <= a; ++b)
          hess[a * m + b] += w * design[i * m + a] * design[i * m + b];
      }
    }
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) hess[a * m + b] = hess[b * m + a];
    for (int j = 1; j < m; ++j) {
      grad[j] -= ridge * beta[j];
      hess[j * m + j] += ridge;
    }

    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::fabs(g));
    if (gmax < tol) {
      converged = true;
      break;
    }

    step = grad;
    if (!solve_spd(hess, step, m))
      throw InputError(
          "fit_propensity: singular information matrix; increase ridge");

    // Backtrack until the penalized likelihood does not decrease.
    double t = 1.0;
    double new_ll = ll;
    for (int h = 0; h < 40; ++h) {
      for (int j = 0; j < m; ++j) trial_beta[j] = beta[j] + t * step[j];
      new_ll = penalized_loglik(trial_beta);
      if (new_ll >= ll - 1e-12) break;
      t *= 0.5;
    }
    beta = trial_beta;
    ll = new_ll;
    ++iterations;
  }
  if (!converged) {
    // Final gradient check in case the last update landed on the optimum.
    double gmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double eta = 0.0;
      for (int j = 0; j < m; ++j) eta += design[i * m + j] * beta[j];
      p[i] = expit(eta);
    }
    std::vector<double> g(m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (int a = 0; a < m; ++a) g[a] += design[i * m + a] * (z[i] - p[i]);
    for (int j = 1; j < m; ++j) g[j] -= ridge * beta[j];
    for (double v : g) gmax = std::max(gmax, std::fabs(v));
    converged = gmax < tol;
  }

  PropensityModel model;
  model.intercept = beta[0];
  model.coefficients.assign(beta.begin() + 1, beta.end());
  model.covariate_means = st.means;
  model.covariate_sds = st.sds;
  model.ridge = ridge;
  model.converged = converged;
  model.iterations = iterations;
  return model;
}

std::vector<double> predict_scores(const PropensityModel& model,
                                   const Dataset& data) {
  const int k = data.k;
  if (model.coefficients.size() != static_cast<std::size_t>(k) ||
      model.covariate_means.size() != static_cast<std::size_t>(k) ||
      model.covariate_sds.size() != static_cast<std::size_t>(k))
    throw InputError("predict_scores: model dimension " +
                     std::to_string(model.coefficients.size()) +
                     " does not match dataset k=" + std::to_string(k));

  constexpr double kClamp = 1e-12;  // keep scores inside the open interval
  std::vector<double> scores(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    double eta = model.intercept;
    for (int j = 0; j < k; ++j)
      eta += model.coefficients[j] *
             (data.records[i].covariates[j] - model.covariate_means[j]) /
             model.covariate_sds[j];
    scores[i] = std::min(1.0 - kClamp, std::max(kClamp, expit(eta)));
  }
  return scores;
}

std::vector<double> compute_weights(const std::vector<double>& scores,
                                    const std::vector<bool>& in_trial,
                                    const WeightScheme& scheme) {
  if (scores.size() != in_trial.size())
    throw InputError("compute_weights: scores and arm indicators differ in length");
  std::vector<double> w(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double lam = scores[i];
    if (!(lam > 0.0 && lam < 1.0))
      throw InputError("compute_weights: scores must lie strictly in (0, 1)");
    double wi = 0.0;
    switch (scheme.variant) {
      case WeightVariant::kATE:
        wi = in_trial[i] ? 1.0 / lam : 1.0 / (1.0 - lam);
        break;
      case WeightVariant::kATTrial:
        wi = in_trial[i] ? 1.0 : lam / (1.0 - lam);
        break;
      case WeightVariant::kATExternal:
        wi = in_trial[i] ? (1.0 - lam) / lam : 1.0;
        break;
    }
    if (scheme.capped && !in_trial[i]) wi = std::min(1.0, wi);
    w[i] = wi;
  }
  return w;
}

std::size_t apply_weight_floor(std::vector<double>& weights,
                               const std::vector<bool>& in_trial,
                               double floor) {
  if (weights.size() != in_trial.size())
    throw InputError("apply_weight_floor: weights and arm indicators differ in length");
  if (!(floor >= 0.0) || floor > 1.0)
    throw InputError("apply_weight_floor: floor must lie in [0, 1]");
  std::size_t zeroed = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!in_trial[i] && weights[i] < floor && weights[i] != 0.0) {
      weights[i] = 0.0;
      ++zeroed;
    }
  }
  return zeroed;
}

std::vector<double> standardized_mean_diff(const Dataset& data,
                                           const std::vector<double>& weights) {
  if (weights.size() != data.size())
    throw InputError("standardized_mean_diff: weight vector length mismatch");

  double wt = 0.0, we = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    (data.records[i].in_trial ? wt : we) += weights[i];
  if (!(wt > 0.0) || !(we > 0.0))
    throw InputError(
        "standardized_mean_diff: an arm has zero total weight; diagnostic unavailable");

  const int k = data.k;
  std::vector<double> smd(k, 0.0);
  for (int j = 0; j < k; ++j) {
    double mt = 0.0, me = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double wx = weights[i] * data.records[i].covariates[j];
      (data.records[i].in_trial ? mt : me) += wx;
    }
    mt /= wt;
    me /= we;

    // Pooled unweighted sd, so the denominator is stable across schemes.
    double st = 0.0, se = 0.0, mt0 = 0.0, me0 = 0.0;
    std::size_t nt = 0, ne = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.records[i].in_trial) {
        mt0 += data.records[i].covariates[j];
        ++nt;
      } else {
        me0 += data.records[i].covariates[j];
        ++ne;
      }
    }
    mt0 /= static_cast<double>(nt);
    me0 /= static_cast<double>(ne);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double c = data.records[i].covariates[j];
      if (data.records[i].in_trial)
        st += (c - mt0) * (c - mt0);
      else
        se += (c - me0) * (c - me0);
    }
    const double vt = nt > 1 ? st / static_cast<double>(nt - 1) : 0.0;
    const double ve = ne > 1 ? se / static_cast<double>(ne - 1) : 0.0;
    const double denom = std::sqrt(0.5 * (vt + ve));
    smd[j] = denom > 0.0 ? (me - mt) / denom : 0.0;
  }
  return smd;
}

WeightedDataset weight_dataset(const Dataset& data,
                               const PropensityModel& model,
                               const WeightScheme& scheme,
                               double weight_floor) {
  WeightedDataset wd;
  wd.scores = predict_scores(model, data);
  const std::vector<bool> z = trial_indicators(data);
  wd.weights = compute_weights(wd.scores, z, scheme);
  apply_weight_floor(wd.weights, z, weight_floor);
  wd.dataset = data;
  return wd;
}

}  // namespace propp
