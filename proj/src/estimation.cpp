#include "pppks/estimation.hpp"

#include <cmath>
#include <string>

#include "pppks/errors.hpp"
#include "pppks/mcmc.hpp"
#include "pppks/specfun.hpp"

namespace pppks {
namespace {

constexpr double kDegenerateDispersion = 1e-12;
constexpr double kBracketLo = 1e-8;
constexpr double kBracketHi = 1e13;

// d/da [ln(a) - psi(a)] = 1/a - psi'(a) < 0.
double log_minus_digamma_deriv(double a) {
  if (a < 10.0) return 1.0 / a - specfun::trigamma(a);
  const double inv = 1.0 / a;
  const double inv2 = inv * inv;
  return -inv2 * (0.5 + inv * (1.0 / 6 - inv2 * (1.0 / 30 - inv2 * (1.0 / 42 - inv2 / 30))));
}

}  // namespace

std::string_view to_string(EstimatorKind k) {
  return k == EstimatorKind::MLE ? "mle" : "posterior_mean";
}

EstimatorKind parse_estimator_kind(std::string_view s) {
  if (s == "mle") return EstimatorKind::MLE;
  if (s == "posterior_mean") return EstimatorKind::PosteriorMean;
  throw ConfigError("estimator", "unknown estimator '" + std::string(s) + "' (expected mle | posterior_mean)");
}

double log_minus_digamma(double a) {
  if (!std::isfinite(a) || a <= 0.0) throw DomainError("log_minus_digamma: a must be > 0");
  if (a < 10.0) return std::log(a) - specfun::digamma(a);
  const double inv = 1.0 / a;
  const double inv2 = inv * inv;
  return 0.5 * inv +
         inv2 * (1.0 / 12 -
                 inv2 * (1.0 / 120 -
                         inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12))))));
}

GammaParams gamma_mle(const Dataset& d) { return gamma_mle(GammaSufficientStats::of(d.values())); }

GammaParams gamma_mle(const GammaSufficientStats& s) {
  if (s.n < 2) {
    throw DomainError("gamma_mle: need at least 2 observations, got " + std::to_string(s.n));
  }
  const double ybar = s.mean();
  if (!std::isfinite(ybar) || !std::isfinite(s.sum_log)) {
    throw NumericalError("gamma_mle: sufficient statistics overflow");
  }
  const double disp = std::log(ybar) - s.mean_log();
  if (!(disp > kDegenerateDispersion)) {
    throw DegenerateDataError("gamma_mle: data has no dispersion (ln mean - mean ln = " +
                              std::to_string(disp) + "); the shape MLE diverges");
  }

  // Root of f(a) = ln(a) - psi(a) - disp; f is strictly decreasing.
  auto f = [disp](double a) { return log_minus_digamma(a) - disp; };
  double lo = kBracketLo;
  double hi = kBracketHi;
  double a = (3.0 - disp + std::sqrt((disp - 3.0) * (disp - 3.0) + 24.0 * disp)) / (12.0 * disp);
  if (!(a > lo && a < hi)) a = std::sqrt(lo * hi);

  for (int iter = 0; iter < 200; ++iter) {
    const double fa = f(a);
    if (fa == 0.0) break;
    if (fa > 0.0) lo = a; else hi = a;
    double next = a - fa / log_minus_digamma_deriv(a);
    if (!(next > lo && next < hi)) next = std::sqrt(lo * hi);  // bisect in log space
    const bool done = std::fabs(next - a) <= 1e-15 * a;
    a = next;
    if (done) break;
  }
  return {a, a / ybar};
}

GammaParams posterior_mean(const ChainOutput& chain) {
  if (chain.draws.empty()) throw NumericalError("posterior_mean: chain has no retained draws");
  double sa = 0.0;
  double sb = 0.0;
  for (const auto& d : chain.draws) {
    sa += d.alpha;
    sb += d.beta;
  }
  const double m = static_cast<double>(chain.draws.size());
  return {sa / m, sb / m};
}

}  // namespace pppks
