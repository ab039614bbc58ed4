#include "pppks/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pppks/errors.hpp"

namespace pppks {
namespace {

// Sorted CDF values may wobble by rounding where P(a, x) switches between
// its series and continued-fraction branches.
constexpr double kMonotoneSlack = 1e-12;

void check_unit(double u, std::size_t i, const char* where) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError(std::string(where) + ": CDF value " + std::to_string(u) + " at position " +
                      std::to_string(i) + " is outside [0, 1]");
  }
}

// Largest step-point gap between the empirical CDF i/n and sorted values.
double sup_gap_sorted(std::span<const double> sorted_u) {
  const double n = static_cast<double>(sorted_u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_u.size(); ++i) {
    const double f = sorted_u[i];
    const double upper = static_cast<double>(i + 1) / n - f;
    const double lower = f - static_cast<double>(i) / n;
    d = std::max({d, std::fabs(upper), std::fabs(lower)});
  }
  return d;
}

}  // namespace

std::string_view to_string(StatisticKind k) {
  switch (k) {
    case StatisticKind::ModifiedKS: return "ks";
    case StatisticKind::ChiSquared: return "chisq";
    case StatisticKind::Score: return "score";
    case StatisticKind::PitKS: return "pit_ks";
  }
  return "?";
}

StatisticKind parse_statistic_kind(std::string_view s) {
  if (s == "ks") return StatisticKind::ModifiedKS;
  if (s == "chisq") return StatisticKind::ChiSquared;
  if (s == "score") return StatisticKind::Score;
  if (s == "pit_ks") return StatisticKind::PitKS;
  throw ConfigError("statistics", "unknown statistic '" + std::string(s) +
                                      "' (expected ks | chisq | score | pit_ks)");
}

double ks_distance_to_uniform(std::span<const double> u) {
  if (u.empty()) throw DomainError("ks_distance_to_uniform: empty sample");
  std::vector<double> sorted(u.begin(), u.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) check_unit(sorted[i], i, "ks_distance_to_uniform");
  std::sort(sorted.begin(), sorted.end());
  return sup_gap_sorted(sorted);
}

double modified_ks(std::span<const double> y, const CdfFn& fitted_cdf) {
  if (y.empty()) throw DomainError("modified_ks: empty sample");
  std::vector<double> f(y.begin(), y.end());
  std::stable_sort(f.begin(), f.end());
  double prev = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = fitted_cdf(f[i]);
    check_unit(v, i, "modified_ks");
    if (v < prev - kMonotoneSlack) {
      throw DomainError("modified_ks: fitted CDF decreases on the sorted sample at position " +
                        std::to_string(i));
    }
    prev = std::max(prev, v);
    f[i] = v;
  }
  return std::sqrt(static_cast<double>(f.size())) * sup_gap_sorted(f);
}

double chi_squared_stat(std::span<const double> y, const GammaParams& est) {
  if (y.empty()) throw DomainError("chi_squared_stat: empty sample");
  if (!est.valid()) throw DomainError("chi_squared_stat: invalid gamma parameters");
  const double mean = est.alpha / est.beta;
  const double var = est.alpha / (est.beta * est.beta);
  double acc = 0.0;
  for (double v : y) acc += (v - mean) * (v - mean);
  return acc / var / static_cast<double>(y.size());
}

double score_stat(std::span<const double> y, std::span<const double> x, const GammaParams& est) {
  if (x.size() != y.size()) {
    throw DomainError("score_stat: " + std::to_string(x.size()) + " covariates for " +
                      std::to_string(y.size()) + " observations");
  }
  if (!est.valid()) throw DomainError("score_stat: invalid gamma parameters");
  double sxy = 0.0;
  double sx = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sxy += x[i] * y[i];
    sx += x[i];
  }
  return est.beta * est.beta / est.alpha * sxy - est.beta * sx;
}

double pit_ks(std::span<const double> y, const IndexedCdfFn& per_obs_cdf) {
  if (y.empty()) throw DomainError("pit_ks: empty sample");
  std::vector<double> u(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    u[i] = per_obs_cdf(i, y[i]);
    check_unit(u[i], i, "pit_ks");
  }
  std::sort(u.begin(), u.end());
  return std::sqrt(static_cast<double>(u.size())) * sup_gap_sorted(u);
}

}  // namespace pppks
