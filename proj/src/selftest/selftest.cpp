#include "selftest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "oracles.hpp"
#include "pppks/estimation.hpp"
#include "pppks/mcmc.hpp"
#include "pppks/ppp.hpp"
#include "pppks/specfun.hpp"
#include "pppks/statistics.hpp"

namespace pppks::selftest {
namespace {

class Recorder {
 public:
  Recorder(std::string group, const Options& opt) : opt_(opt) { result_.group = std::move(group); }

  void expect(std::string name, double error, double tolerance) {
    const double tol = tolerance * opt_.tolerance_scale;
    result_.checks.push_back({std::move(name), error, tol, std::isfinite(error) && error <= tol});
  }

  /// Largest error over a sweep, reported as one check.
  template <class F>
  void sweep(std::string name, std::size_t count, double tolerance, F&& error_at) {
    double worst = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double e = error_at(i);
      if (!(e <= worst)) worst = e;  // NaN propagates
    }
    expect(std::move(name), worst, tolerance);
  }

  GroupResult take() { return std::move(result_); }

 private:
  const Options& opt_;
  GroupResult result_;
};

double log_grid(std::size_t i, std::size_t count, double lo, double hi) {
  const double t = static_cast<double>(i) / static_cast<double>(count - 1);
  return std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
}

}  // namespace

bool GroupResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

GroupResult special_functions(const Options& opt) {
  Recorder r("special functions", opt);
  r.expect("log_gamma(5) = ln 24", std::fabs(specfun::log_gamma(5.0) - std::log(24.0)), 1e-12);
  r.sweep("log_gamma vs std::lgamma on [1e-3, 1e6]", 400, 1e-12, [](std::size_t i) {
    const double x = log_grid(i, 400, 1e-3, 1e6);
    const double ref = std::lgamma(x);
    return std::fabs(specfun::log_gamma(x) - ref) / std::max(1.0, std::fabs(ref));
  });
  r.expect("digamma(1) = -euler_gamma",
           std::fabs(specfun::digamma(1.0) + static_cast<double>(oracle::euler_gamma())), 1e-10);
  r.sweep("digamma vs recurrence oracle on [1e-3, 1e6]", 400, 1e-10, [](std::size_t i) {
    const double x = log_grid(i, 400, 1e-3, 1e6);
    return static_cast<double>(std::fabs(specfun::digamma(x) - oracle::digamma(x)));
  });
  r.sweep("trigamma vs series oracle on [1e-3, 1e6]", 400, 1e-8, [](std::size_t i) {
    const double x = log_grid(i, 400, 1e-3, 1e6);
    return static_cast<double>(std::fabs(specfun::trigamma(x) - oracle::trigamma(x)));
  });
  r.expect("trigamma(1) = pi^2/6",
           std::fabs(specfun::trigamma(1.0) - std::numbers::pi * std::numbers::pi / 6.0), 1e-8);
  r.sweep("P(1/2, x) vs erf series", 200, 1e-12, [](std::size_t i) {
    const double x = 9.0 * static_cast<double>(i + 1) / 200.0;
    return static_cast<double>(
        std::fabs(specfun::reg_lower_incomplete_gamma(0.5, x) - oracle::erf_series(std::sqrt(x))));
  });
  r.expect("P(1, 1) = 1 - 1/e", std::fabs(specfun::reg_lower_incomplete_gamma(1.0, 1.0) - (1.0 - std::exp(-1.0))),
           1e-12);
  r.sweep("series vs continued fraction near x = a + 1", 6 * 40, 1e-12, [](std::size_t i) {
    constexpr double shapes[] = {0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
    const double a = shapes[i / 40];
    const double x = (a + 1.0) * (0.5 + 1.5 * static_cast<double>(i % 40) / 39.0);
    return std::fabs(specfun::incomplete_gamma_series(a, x) - specfun::incomplete_gamma_continued_fraction(a, x));
  });
  r.sweep("normal_cdf vs erf series on [-4, 4]", 161, 1e-12, [](std::size_t i) {
    const double z = -4.0 + 0.05 * static_cast<double>(i);
    const long double ref = 0.5L + 0.5L * oracle::erf_series(z / std::numbers::sqrt2);
    return static_cast<double>(std::fabs(specfun::normal_cdf(z) - ref));
  });
  return r.take();
}

GroupResult mle_grid(const Options& opt) {
  Recorder r("gamma MLE vs grid search", opt);
  RandomStream rng(0x5eed0001);
  r.sweep("100 random datasets, n in [3, 20]", 100, 1e-5, [&](std::size_t) {
    const std::size_t n = 3 + rng.next_u64() % 18;
    const double alpha = 0.5 + 4.5 * rng.uniform();
    const double beta = 0.5 + 9.5 * rng.uniform();
    const Dataset d = sample_dataset(GammaModel{{alpha, beta}}, n, rng);
    const GammaParams newton = gamma_mle(d);
    const GammaParams grid = oracle::gamma_mle_grid(d.values());
    return std::max(std::fabs(newton.alpha - grid.alpha) / std::max(1.0, grid.alpha),
                    std::fabs(newton.beta - grid.beta) / std::max(1.0, grid.beta));
  });
  return r.take();
}

GroupResult mcmc_quadrature(const Options& opt) {
  Recorder r("MCMC vs quadrature", opt);
  RandomStream data_rng(0x5eed0002);
  const Dataset d = sample_dataset(GammaModel{{2.0, 5.0}}, 20, data_rng);
  const PriorSpec pr = PriorSpec::good();
  McmcSettings s;
  s.burn_in = 5000;
  s.iterations = 1'000'000;
  s.thin = 5;
  RandomStream chain_rng(0x5eed0003);
  const GammaParams chain_mean = posterior_mean(run_chain(d, pr, s, chain_rng));
  const GammaParams quad = oracle::posterior_mean_quadrature(d, pr, 0.05, 15.0, 1500);
  r.expect("posterior mean alpha", std::fabs(chain_mean.alpha - quad.alpha), 0.02);
  r.expect("posterior mean beta", std::fabs(chain_mean.beta - quad.beta), 0.02);
  return r.take();
}

GroupResult statistic_enumeration(const Options& opt) {
  Recorder r("statistic enumeration", opt);
  auto exp1 = [](double y) { return 1.0 - std::exp(-y); };
  const double one_point[] = {std::log(2.0)};
  r.expect("KS single point at the median", std::fabs(modified_ks(one_point, exp1) - 0.5), 1e-12);
  const double two_points[] = {0.5, 1.5};
  r.expect("KS two points vs Exp(1)",
           std::fabs(modified_ks(two_points, exp1) - std::sqrt(2.0) * (1.0 - std::exp(-0.5))), 1e-12);
  const double u_mid[] = {0.5};
  r.expect("PIT KS single midpoint",
           std::fabs(pit_ks(u_mid, [](std::size_t, double u) { return u; }) - 0.5), 1e-12);
  const double u_two[] = {0.2, 0.9};
  r.expect("PIT KS {0.2, 0.9}",
           std::fabs(pit_ks(u_two, [](std::size_t, double u) { return u; }) - std::sqrt(2.0) * 0.4), 1e-12);
  const double chi_data[] = {1.0, 2.0};
  r.expect("chi-squared hand evaluation", std::fabs(chi_squared_stat(chi_data, {2.0, 2.0}) - 1.0), 1e-12);
  const double ones[] = {1.0, 1.0};
  r.expect("score hand evaluation", std::fabs(score_stat(chi_data, ones, {1.0, 1.0}) - 1.0), 1e-12);

  RandomStream rng(0x5eed0004);
  r.sweep("KS vs dense-grid oracle, 50 datasets", 50, 1e-9, [&](std::size_t) {
    const std::size_t n = 5 + rng.next_u64() % 46;
    const Dataset d = sample_dataset(GammaModel{{2.0, 5.0}}, n, rng);
    const GammaParams est = gamma_mle(d);
    auto cdf = [&est](double y) { return gamma_cdf(est, y); };
    return std::fabs(modified_ks(d.values(), cdf) - oracle::modified_ks_dense(d.values(), cdf));
  });
  return r.take();
}

GroupResult ppp_large_m(const Options& opt) {
  Recorder r("ppp vs large-M oracle", opt);
  RandomStream data_rng(0x5eed0105);
  const Dataset d = sample_dataset(GammaModel{{2.0, 5.0}}, 20, data_rng);
  const PriorSpec pr = PriorSpec::good();
  PppConfig cfg;
  RandomStream rng(0x5eed0106);
  PppTrace trace;
  const StatisticKind kinds[] = {StatisticKind::ModifiedKS};
  const PppResult res = estimate_ppp(d, pr, cfg, kinds, rng, {}, &trace).front();
  const double oracle_p =
      oracle::ppp_large_m(d, trace.draws, 100000, make_estimator(EstimatorKind::MLE, pr, cfg.predictive_refit_mcmc),
                          make_statistic(StatisticKind::ModifiedKS), res.t_obs, 0x5eed0107);
  const double m = static_cast<double>(res.m_draws);
  r.expect("p-value within 2 Monte Carlo SE", std::fabs(res.p_value - oracle_p),
           2.0 * std::sqrt(oracle_p * (1.0 - oracle_p) / m));
  return r.take();
}

std::vector<GroupResult> run_all(const Options& opt) {
  return {special_functions(opt), mle_grid(opt), mcmc_quadrature(opt), statistic_enumeration(opt),
          ppp_large_m(opt)};
}

}  // namespace pppks::selftest
