#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pppks/estimation.hpp"
#include "pppks/mcmc.hpp"
#include "pppks/models.hpp"
#include "pppks/random.hpp"
#include "pppks/statistics.hpp"

namespace pppks {

struct PppConfig {
  EstimatorKind estimator = EstimatorKind::MLE;
  StatisticKind statistic = StatisticKind::ModifiedKS;
  McmcSettings mcmc;
  /// Chains run on each predictive dataset when estimator = PosteriorMean.
  McmcSettings predictive_refit_mcmc = McmcSettings::refit_default();
  /// Posterior draws used; unset means every retained draw.
  std::optional<std::size_t> m_draws;

  std::size_t resolved_m_draws() const { return m_draws.value_or(mcmc.retained()); }
  /// Includes the Monte Carlo floor m_draws >= 100.
  void validate() const;
};

inline constexpr std::size_t kMinReportedDraws = 100;

struct PppResult {
  double p_value = 0.0;
  double t_obs = 0.0;
  std::vector<double> t_replicates;
  std::size_t m_draws = 0;
  /// 2 min(p, 1 - p); present for two-sided statistics only.
  std::optional<double> two_sided_p;
  /// Plug-in estimate on the observed data.
  GammaParams estimate;
  double acceptance_rate = 0.0;
};

/// A plug-in estimator. `fitted` is the posterior chain for the observed
/// dataset and null for predictive datasets.
using PlugInEstimator =
    std::function<GammaParams(const Dataset& d, const ChainOutput* fitted, RandomStream& rng)>;

/// A discrepancy evaluated at a plug-in estimate. `covariates` is empty
/// unless the caller supplied one per observation.
struct Statistic {
  std::string name;
  bool two_sided = false;
  std::function<double(const Dataset& d, std::span<const double> covariates, const GammaParams& est)> eval;
};

PlugInEstimator make_estimator(EstimatorKind kind, const PriorSpec& pr, const McmcSettings& refit);
Statistic make_statistic(StatisticKind kind);

double two_sided(double p);

/// p-value from replicate statistics: #{t_rep >= t_obs} / m.
double ppp_from_replicates(double t_obs, std::span<const double> t_replicates);

/// Evenly spaced subset of `m` retained draws (all of them when m equals the
/// chain length).
std::vector<GammaParams> select_draws(const ChainOutput& chain, std::size_t m);

/// Intermediate state of one estimate, for diagnostics and oracles.
struct PppTrace {
  ChainOutput chain;
  std::vector<GammaParams> draws;
};

/// Core Monte Carlo engine shared by every statistic: one chain on the
/// observed data, one predictive dataset per selected draw, the same
/// estimator applied to the observed and to every predictive dataset.
/// Replicate m draws from an independent substream keyed by m.
std::vector<PppResult> estimate_ppp_with(const Dataset& observed, std::span<const double> covariates,
                                         const PriorSpec& pr, const McmcSettings& mcmc,
                                         std::size_t m_draws, const PlugInEstimator& estimator,
                                         std::span<const Statistic> statistics, RandomStream& rng,
                                         PppTrace* trace = nullptr);

/// Posterior predictive p-values for several statistics sharing one chain
/// and one set of predictive datasets. cfg.statistic is ignored.
std::vector<PppResult> estimate_ppp(const Dataset& observed, const PriorSpec& pr, const PppConfig& cfg,
                                    std::span<const StatisticKind> statistics, RandomStream& rng,
                                    std::span<const double> covariates = {},
                                    PppTrace* trace = nullptr);

PppResult estimate_ppp(const Dataset& observed, const PriorSpec& pr, const PppConfig& cfg,
                       RandomStream& rng, std::span<const double> covariates = {});

}  // namespace pppks
