#include "pppks/ppp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pppks/errors.hpp"

namespace pppks {

void PppConfig::validate() const {
  mcmc.validate();
  if (estimator == EstimatorKind::PosteriorMean) predictive_refit_mcmc.validate();
  const std::size_t m = resolved_m_draws();
  if (m < kMinReportedDraws) {
    throw ConfigError("m_draws", "must be >= " + std::to_string(kMinReportedDraws) + ", got " +
                                     std::to_string(m));
  }
  if (m > mcmc.retained()) {
    throw ConfigError("m_draws", "exceeds the " + std::to_string(mcmc.retained()) +
                                     " retained posterior draws");
  }
}

PlugInEstimator make_estimator(EstimatorKind kind, const PriorSpec& pr, const McmcSettings& refit) {
  if (kind == EstimatorKind::MLE) {
    return [](const Dataset& d, const ChainOutput*, RandomStream&) { return gamma_mle(d); };
  }
  return [pr, refit](const Dataset& d, const ChainOutput* fitted, RandomStream& rng) {
    if (fitted != nullptr) return posterior_mean(*fitted);
    return posterior_mean(run_chain(d, pr, refit, rng));
  };
}

Statistic make_statistic(StatisticKind kind) {
  Statistic s;
  s.name = std::string(to_string(kind));
  s.two_sided = is_two_sided(kind);
  switch (kind) {
    case StatisticKind::ModifiedKS:
      s.eval = [](const Dataset& d, std::span<const double>, const GammaParams& est) {
        return modified_ks(d.values(), [&est](double y) { return gamma_cdf(est, y); });
      };
      break;
    case StatisticKind::ChiSquared:
      s.eval = [](const Dataset& d, std::span<const double>, const GammaParams& est) {
        return chi_squared_stat(d.values(), est);
      };
      break;
    case StatisticKind::Score:
      s.eval = [](const Dataset& d, std::span<const double> x, const GammaParams& est) {
        return score_stat(d.values(), x, est);
      };
      break;
    case StatisticKind::PitKS:
      s.eval = [](const Dataset& d, std::span<const double>, const GammaParams& est) {
        const ModelSpec fitted = GammaModel{est};
        return pit_ks(d.values(), [&fitted](std::size_t i, double y) { return model_cdf(fitted, i, y); });
      };
      break;
  }
  return s;
}

double two_sided(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("two_sided: p must lie in [0, 1], got " + std::to_string(p));
  return std::clamp(2.0 * std::min(p, 1.0 - p), 0.0, 1.0);
}

double ppp_from_replicates(double t_obs, std::span<const double> t_replicates) {
  if (t_replicates.empty()) throw DomainError("ppp_from_replicates: no replicates");
  const auto hits = std::count_if(t_replicates.begin(), t_replicates.end(),
                                  [t_obs](double t) { return t >= t_obs; });
  return static_cast<double>(hits) / static_cast<double>(t_replicates.size());
}

std::vector<GammaParams> select_draws(const ChainOutput& chain, std::size_t m) {
  const std::size_t len = chain.draws.size();
  if (m == 0 || m > len) {
    throw ConfigError("m_draws", "requested " + std::to_string(m) + " draws from a chain of " +
                                     std::to_string(len));
  }
  std::vector<GammaParams> out(m);
  for (std::size_t k = 0; k < m; ++k) out[k] = chain.draws[k * len / m];
  return out;
}

std::vector<PppResult> estimate_ppp_with(const Dataset& observed, std::span<const double> covariates,
                                         const PriorSpec& pr, const McmcSettings& mcmc,
                                         std::size_t m_draws, const PlugInEstimator& estimator,
                                         std::span<const Statistic> statistics, RandomStream& rng,
                                         PppTrace* trace) {
  if (statistics.empty()) throw ConfigError("statistics", "at least one statistic required");
  if (!covariates.empty() && covariates.size() != observed.size()) {
    throw DomainError("estimate_ppp: " + std::to_string(covariates.size()) + " covariates for " +
                      std::to_string(observed.size()) + " observations");
  }
  const std::uint64_t base = rng.next_u64();
  RandomStream chain_rng(derive_seed(base, 0));
  const ChainOutput chain = run_chain(observed, pr, mcmc, chain_rng);
  const auto draws = select_draws(chain, m_draws);

  RandomStream obs_rng(derive_seed(base, 1));
  const GammaParams est_obs = estimator(observed, &chain, obs_rng);

  std::vector<PppResult> results(statistics.size());
  for (std::size_t k = 0; k < statistics.size(); ++k) {
    results[k].t_obs = statistics[k].eval(observed, covariates, est_obs);
    results[k].t_replicates.resize(draws.size());
    results[k].m_draws = draws.size();
    results[k].estimate = est_obs;
    results[k].acceptance_rate = chain.acceptance_rate;
  }

  const std::size_t n = observed.size();
  for (std::size_t m = 0; m < draws.size(); ++m) {
    RandomStream rep_rng(derive_seed(base, m + 2));
    const Dataset replicate = sample_dataset(GammaModel{draws[m]}, n, rep_rng);
    GammaParams est;
    try {
      est = estimator(replicate, nullptr, rep_rng);
    } catch (const DegenerateDataError& e) {
      throw NumericalError("estimate_ppp: predictive dataset " + std::to_string(m) +
                           " (alpha=" + std::to_string(draws[m].alpha) + ", beta=" +
                           std::to_string(draws[m].beta) + ") is degenerate: " + e.what());
    }
    for (std::size_t k = 0; k < statistics.size(); ++k) {
      results[k].t_replicates[m] = statistics[k].eval(replicate, covariates, est);
    }
  }

  for (std::size_t k = 0; k < statistics.size(); ++k) {
    auto& r = results[k];
    r.p_value = ppp_from_replicates(r.t_obs, r.t_replicates);
    if (statistics[k].two_sided) r.two_sided_p = two_sided(r.p_value);
  }
  if (trace != nullptr) {
    trace->chain = chain;
    trace->draws = draws;
  }
  return results;
}

std::vector<PppResult> estimate_ppp(const Dataset& observed, const PriorSpec& pr, const PppConfig& cfg,
                                    std::span<const StatisticKind> statistics, RandomStream& rng,
                                    std::span<const double> covariates, PppTrace* trace) {
  cfg.validate();
  std::vector<Statistic> stats;
  stats.reserve(statistics.size());
  for (auto kind : statistics) {
    if (needs_covariates(kind) && covariates.size() != observed.size()) {
      throw ConfigError("statistics", "the score statistic needs one covariate per observation");
    }
    stats.push_back(make_statistic(kind));
  }
  const auto estimator = make_estimator(cfg.estimator, pr, cfg.predictive_refit_mcmc);
  return estimate_ppp_with(observed, covariates, pr, cfg.mcmc, cfg.resolved_m_draws(), estimator, stats, rng, trace);
}

PppResult estimate_ppp(const Dataset& observed, const PriorSpec& pr, const PppConfig& cfg,
                       RandomStream& rng, std::span<const double> covariates) {
  const StatisticKind kinds[] = {cfg.statistic};
  return std::move(estimate_ppp(observed, pr, cfg, kinds, rng, covariates).front());
}

}  // namespace pppks
