#include "pppks/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "pppks/errors.hpp"
#include "pppks/estimation.hpp"

namespace pppks {

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::NullCalibration: return "null_calibration";
    case Scenario::Power: return "power";
    case Scenario::Contiguity: return "contiguity";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (n < 2) throw ConfigError("n", "sample size must be >= 2");
  if (replications < 1) throw ConfigError("replications", "must be >= 1");
  if (statistics.empty()) throw ConfigError("statistics", "at least one statistic required");
  if (parallelism < 1) throw ConfigError("parallelism", "must be >= 1");
  try {
    prior.validate();
    pppks::validate(data_model);
  } catch (const DomainError& e) {
    throw ConfigError("prior/data_model", e.what());
  }
  ppp.validate();
}

std::vector<double> ExperimentResult::ppp_values(StatisticKind k) const {
  std::vector<double> out;
  for (const auto& r : rows)
    if (r.statistic == k && r.ok) out.push_back(r.ppp);
  return out;
}

const StatisticSummary& ExperimentResult::summary_for(StatisticKind k) const {
  for (const auto& s : summary)
    if (s.statistic == k) return s;
  throw std::out_of_range("no summary for statistic " + std::string(to_string(k)));
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& job) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            job(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

ExperimentResult run_replications(const ExperimentConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  std::mutex progress_mutex;
  std::size_t done = 0;
  const std::size_t k = cfg.statistics.size();
  ExperimentResult result;
  result.rows.resize(cfg.replications * k);

  parallel_for(cfg.replications, cfg.parallelism, [&](std::size_t r) {
    RandomStream rng(derive_seed(cfg.master_seed, r));
    // Covariates are always drawn first so every model consumes the stream
    // the same way; the score statistic uses them under any data model.
    auto covariates = draw_glm_covariates(cfg.n, rng);
    ModelSpec model = cfg.data_model;
    if (auto* glm = std::get_if<GammaGlmModel>(&model)) glm->covariates = covariates;

    auto* rows = &result.rows[r * k];
    for (std::size_t j = 0; j < k; ++j) {
      rows[j].replication = r;
      rows[j].statistic = cfg.statistics[j];
    }
    try {
      const Dataset data = sample_dataset(model, cfg.n, rng);
      const auto res = estimate_ppp(data, cfg.prior, cfg.ppp, cfg.statistics, rng, covariates);
      for (std::size_t j = 0; j < k; ++j) {
        rows[j].ok = true;
        rows[j].ppp = res[j].p_value;
        rows[j].two_sided_p = res[j].two_sided_p;
        rows[j].t_obs = res[j].t_obs;
        rows[j].estimate = res[j].estimate;
        rows[j].acceptance_rate = res[j].acceptance_rate;
      }
    } catch (const std::exception& e) {
      for (std::size_t j = 0; j < k; ++j) rows[j].error = e.what();
    }
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(++done, cfg.replications);
    }
  });

  for (std::size_t j = 0; j < k; ++j) {
    StatisticSummary s;
    s.statistic = cfg.statistics[j];
    const auto values = result.ppp_values(s.statistic);
    s.used = values.size();
    s.excluded = cfg.replications - values.size();
    if (!values.empty()) {
      s.uniformity_ks_distance = uniformity_ks_distance(values);
      double sum = 0.0;
      for (double v : values) sum += v;
      s.mean = sum / static_cast<double>(values.size());
      double ss = 0.0;
      for (double v : values) ss += (v - s.mean) * (v - s.mean);
      s.variance = values.size() > 1 ? ss / static_cast<double>(values.size() - 1) : 0.0;
      for (double level : kRejectionLevels)
        s.rejection_rates.push_back(rejection_rate(values, level, is_two_sided(s.statistic)));
    }
    result.summary.push_back(std::move(s));
  }
  return result;
}

ExperimentResult run_null_calibration(const ExperimentConfig& cfg, const ProgressFn& progress) {
  if (!std::holds_alternative<GammaModel>(cfg.data_model)) {
    throw ConfigError("data_model", "null calibration requires the gamma model, got " + family_name(cfg.data_model));
  }
  return run_replications(cfg, progress);
}

ExperimentResult run_power(const ExperimentConfig& cfg, const ProgressFn& progress) {
  return run_replications(cfg, progress);
}

ContiguityReport run_contiguity_check(std::size_t n, double c, std::size_t replications,
                                      std::uint64_t seed, unsigned parallelism) {
  if (n < 100) throw ConfigError("n", "contiguity check needs n >= 100");
  if (replications < 1) throw ConfigError("replications", "must be >= 1");
  ContiguityReport rep;
  rep.n = n;
  rep.c = c;
  rep.replications = replications;
  rep.theta0 = {2.0, 5.0};
  const double shift = c / std::sqrt(static_cast<double>(n));
  rep.theta_n = {rep.theta0.alpha + shift, rep.theta0.beta + shift};

  std::vector<double> t0(replications), tn(replications);
  auto ks_mle = [n](const GammaParams& truth, RandomStream& rng) {
    const Dataset d = sample_dataset(GammaModel{truth}, n, rng);
    const GammaParams est = gamma_mle(d);
    return modified_ks(d.values(), [&est](double y) { return gamma_cdf(est, y); });
  };
  parallel_for(replications, parallelism, [&](std::size_t r) {
    RandomStream a(derive_seed(seed, 2 * r));
    RandomStream b(derive_seed(seed, 2 * r + 1));
    t0[r] = ks_mle(rep.theta0, a);
    tn[r] = ks_mle(rep.theta_n, b);
  });
  rep.distance = two_sample_ks_distance(t0, tn);
  rep.band99 = two_sample_ks_critical(replications, replications, 0.01);
  return rep;
}

double uniformity_ks_distance(std::span<const double> ppp_values) {
  return ks_distance_to_uniform(ppp_values);
}

double rejection_rate(std::span<const double> ppp_values, double level, bool is_two_sided_test) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("rejection_rate: level must lie in (0, 1)");
  if (ppp_values.empty()) throw DomainError("rejection_rate: no p-values");
  std::size_t hits = 0;
  for (double p : ppp_values) {
    const double q = is_two_sided_test ? two_sided(p) : p;
    if (q <= level) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(ppp_values.size());
}

double two_sample_ks_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("two_sample_ks_distance: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double kolmogorov_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x < 1.0) {
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * x * x);
    double sum = 0.0;
    for (int k = 1; k < 50; ++k) {
      const double odd = 2.0 * k - 1.0;
      sum += std::exp(-odd * odd * c);
    }
    return std::sqrt(2.0 * std::numbers::pi) / x * sum;
  }
  double sum = 0.0;
  for (int k = 1; k < 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return 1.0 - 2.0 * sum;
}

double kolmogorov_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("kolmogorov_quantile: p must lie in (0, 1)");
  double lo = 0.05, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (kolmogorov_cdf(mid) < p) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double two_sample_ks_critical(std::size_t m, std::size_t n, double alpha) {
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  return kolmogorov_quantile(1.0 - alpha) * std::sqrt((md + nd) / (md * nd));
}

}  // namespace pppks
