#include "pppks/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pppks/errors.hpp"
#include "pppks/estimation.hpp"
#include "pppks/specfun.hpp"

namespace pppks {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kOptimalScale2d = 1.6829;  // 2.38 / sqrt(2)

// Lower-triangular Cholesky factor of a 2x2 covariance, with jitter.
Mat2 cholesky2(double vxx, double vxy, double vyy) {
  const double jitter = 1e-10;
  vxx += jitter;
  vyy += jitter;
  const double l11 = std::sqrt(vxx);
  const double l21 = vxy / l11;
  const double r = vyy - l21 * l21;
  const double l22 = std::sqrt(std::max(r, jitter));
  return {{{l11, 0.0}, {l21, l22}}};
}

struct LogTarget {
  const GammaSufficientStats& stats;
  const PriorSpec& prior;

  // Density of u = (ln alpha, ln beta) includes the Jacobian alpha * beta.
  double operator()(double u1, double u2) const {
    const GammaParams p{std::exp(u1), std::exp(u2)};
    const double lp = log_posterior(stats, prior, p);
    return std::isfinite(lp) ? lp + u1 + u2 : kNegInf;
  }
};

}  // namespace

void McmcSettings::validate() const {
  if (thin == 0) throw ConfigError("thin", "must be >= 1");
  if (retained() < 1) throw ConfigError("iterations", "iterations / thin must be >= 1");
  if (!std::isfinite(initial_step) || initial_step <= 0.0)
    throw ConfigError("initial_step", "must be > 0");
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0))
    throw ConfigError("target_acceptance", "must lie in (0, 1)");
}

McmcSettings McmcSettings::refit_default() {
  McmcSettings s;
  s.burn_in = 500;
  s.iterations = 1000;
  s.thin = 2;
  return s;
}

double log_posterior(const GammaSufficientStats& s, const PriorSpec& pr, const GammaParams& p) {
  if (!p.valid()) return kNegInf;
  const double n = static_cast<double>(s.n);
  const double loglik = n * (p.alpha * std::log(p.beta) - specfun::log_gamma(p.alpha)) +
                        (p.alpha - 1.0) * s.sum_log - p.beta * s.sum;
  return loglik + prior_log_pdf(pr, p);
}

double log_posterior(const Dataset& d, const PriorSpec& pr, const GammaParams& p) {
  return log_posterior(GammaSufficientStats::of(d.values()), pr, p);
}

ChainOutput run_chain(const Dataset& d, const PriorSpec& pr, const McmcSettings& s, RandomStream& rng) {
  s.validate();
  pr.validate();
  const auto stats = GammaSufficientStats::of(d.values());
  const LogTarget target{stats, pr};

  GammaParams init = pr.mean();
  if (stats.n >= 2) {
    try {
      init = gamma_mle(stats);
    } catch (const DegenerateDataError&) {
    } catch (const NumericalError&) {
    }
  }
  double u1 = std::log(init.alpha);
  double u2 = std::log(init.beta);
  double cur = target(u1, u2);
  if (!std::isfinite(cur)) {
    throw NumericalError("run_chain: log posterior is not finite at the initial point (alpha=" +
                         std::to_string(init.alpha) + ", beta=" + std::to_string(init.beta) + ")");
  }

  Mat2 chol{{{1.0, 0.0}, {0.0, 1.0}}};
  double log_scale = std::log(s.initial_step);

  // Covariance window: draws from [burn_in/4, burn_in/2) feed the proposal
  // used for the second half of burn-in.
  const bool cov_phase = s.adapt && s.adapt_covariance && s.burn_in >= 200;
  const std::size_t window_lo = s.burn_in / 4;
  const std::size_t switch_at = s.burn_in / 2;
  double m1 = 0, m2 = 0, c11 = 0, c12 = 0, c22 = 0;
  std::size_t wn = 0;
  std::size_t rm_clock = 0;

  double last_acc_prob = 0.0;
  auto step = [&](bool adapting) -> bool {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    const double scale = std::exp(log_scale);
    const double p1 = u1 + scale * chol[0][0] * z1;
    const double p2 = u2 + scale * (chol[1][0] * z1 + chol[1][1] * z2);
    const double prop = target(p1, p2);
    const double log_ratio = prop - cur;
    const bool accept = std::isfinite(prop) && std::log(rng.uniform()) < log_ratio;
    if (accept) {
      u1 = p1;
      u2 = p2;
      cur = prop;
    }
    last_acc_prob = std::isfinite(prop) ? std::exp(std::min(0.0, log_ratio)) : 0.0;
    if (adapting) {
      ++rm_clock;
      log_scale += (last_acc_prob - s.target_acceptance) / std::pow(static_cast<double>(rm_clock) + 1.0, 0.6);
    }
    return accept;
  };

  for (std::size_t it = 0; it < s.burn_in; ++it) {
    if (cov_phase && it == switch_at && wn >= 20) {
      const double denom = static_cast<double>(wn - 1);
      chol = cholesky2(c11 / denom, c12 / denom, c22 / denom);
      log_scale = std::log(kOptimalScale2d);
      rm_clock = 0;
    }
    step(s.adapt);
    if (cov_phase && it >= window_lo && it < switch_at) {
      // Welford update of the (u1, u2) covariance.
      ++wn;
      const double d1 = u1 - m1;
      const double d2 = u2 - m2;
      m1 += d1 / static_cast<double>(wn);
      m2 += d2 / static_cast<double>(wn);
      c11 += d1 * (u1 - m1);
      c12 += d1 * (u2 - m2);
      c22 += d2 * (u2 - m2);
    }
  }

  ChainOutput out;
  out.settings_used = s;
  out.final_step = std::exp(log_scale);
  out.draws.reserve(s.retained());
  std::size_t accepted = 0;
  double acc_prob_sum = 0.0;
  for (std::size_t it = 0; it < s.iterations; ++it) {
    if (step(false)) ++accepted;
    acc_prob_sum += last_acc_prob;
    if ((it + 1) % s.thin == 0) out.draws.push_back({std::exp(u1), std::exp(u2)});
  }
  const double iters = static_cast<double>(s.iterations);
  out.acceptance_rate = static_cast<double>(accepted) / iters;
  out.mean_acceptance_probability = acc_prob_sum / iters;
  return out;
}

}  // namespace pppks
