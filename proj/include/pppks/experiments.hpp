#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pppks/models.hpp"
#include "pppks/ppp.hpp"
#include "pppks/statistics.hpp"

namespace pppks {

enum class Scenario { NullCalibration, Power, Contiguity };

std::string_view to_string(Scenario s);

struct ExperimentConfig {
  Scenario scenario = Scenario::NullCalibration;
  std::size_t n = 100;
  std::size_t replications = 500;
  PriorSpec prior = PriorSpec::good();
  std::vector<StatisticKind> statistics{StatisticKind::ModifiedKS};
  /// Data-generating model. GLM covariates are redrawn every replication.
  ModelSpec data_model = GammaModel{{2.0, 5.0}};
  /// Estimator, MCMC settings and m_draws; ppp.statistic is unused.
  PppConfig ppp;
  std::uint64_t master_seed = 20240601;
  unsigned parallelism = 1;

  void validate() const;
};

struct ExperimentRow {
  std::size_t replication = 0;
  StatisticKind statistic = StatisticKind::ModifiedKS;
  bool ok = false;
  double ppp = 0.0;
  std::optional<double> two_sided_p;
  double t_obs = 0.0;
  GammaParams estimate;
  double acceptance_rate = 0.0;
  std::string error;
};

struct StatisticSummary {
  StatisticKind statistic = StatisticKind::ModifiedKS;
  std::size_t used = 0;
  std::size_t excluded = 0;
  double uniformity_ks_distance = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  /// Rejection rates at kRejectionLevels, using the statistic's sidedness.
  std::vector<double> rejection_rates;
};

inline constexpr double kRejectionLevels[] = {0.01, 0.05, 0.10};

struct ExperimentResult {
  /// Ordered by (replication, statistic position in the config).
  std::vector<ExperimentRow> rows;
  std::vector<StatisticSummary> summary;

  /// p-values of the successful rows for one statistic, replication order.
  std::vector<double> ppp_values(StatisticKind k) const;
  const StatisticSummary& summary_for(StatisticKind k) const;
};

/// Replications of data generation from cfg.data_model followed by ppp
/// estimation for every requested statistic. Replication r uses the stream
/// derive_seed(master_seed, r), so results do not depend on parallelism.
/// Failures are recorded in their rows and excluded from the summary.
/// `progress(done, total)` is called after every finished replication,
/// serialized across workers.
using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

ExperimentResult run_replications(const ExperimentConfig& cfg, const ProgressFn& progress = {});

/// Requires the gamma null model as the data-generating model.
ExperimentResult run_null_calibration(const ExperimentConfig& cfg, const ProgressFn& progress = {});

/// Data from an alternative (or the null, as a reference row); the analysis
/// always fits the gamma model.
ExperimentResult run_power(const ExperimentConfig& cfg, const ProgressFn& progress = {});

struct ContiguityReport {
  std::size_t n = 0;
  double c = 0.0;
  std::size_t replications = 0;
  GammaParams theta0;
  GammaParams theta_n;
  /// Two-sample KS distance between the statistic samples under the two laws.
  double distance = 0.0;
  /// 99% quantile of that distance when the two laws are equal.
  double band99 = 0.0;
};

/// Modified KS statistic (MLE plug-in) simulated under theta0 = (2, 5) and
/// theta0 + c (1, 1) / sqrt(n); reports the distance between the two laws.
ContiguityReport run_contiguity_check(std::size_t n, double c, std::size_t replications,
                                      std::uint64_t seed, unsigned parallelism = 1);

/// Unscaled sup distance between the empirical CDF of `ppp_values` and U(0,1).
double uniformity_ks_distance(std::span<const double> ppp_values);

/// Fraction with p <= level, or 2 min(p, 1 - p) <= level when two-sided.
double rejection_rate(std::span<const double> ppp_values, double level, bool two_sided);

double two_sample_ks_distance(std::span<const double> a, std::span<const double> b);

/// Limiting Kolmogorov distribution P(K <= x).
double kolmogorov_cdf(double x);
double kolmogorov_quantile(double p);

/// Asymptotic level-`alpha` critical value of the two-sample KS distance.
double two_sample_ks_critical(std::size_t m, std::size_t n, double alpha);

/// Runs `count` index-keyed jobs on `workers` threads.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& job);

}  // namespace pppks
