#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "pppks/errors.hpp"
#include "pppks/ppp.hpp"
#include "selftest.hpp"

using namespace pppks;

namespace {

McmcSettings short_chain() {
  McmcSettings s;
  s.burn_in = 200;
  s.iterations = 500;
  s.thin = 1;
  return s;
}

Dataset null_data(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed);
  return sample_dataset(GammaModel{{2.0, 5.0}}, n, rng);
}

Statistic constant_statistic(double value) {
  return Statistic{"const", false, [value](const Dataset&, std::span<const double>, const GammaParams&) { return value; }};
}

PlugInEstimator mle() { return make_estimator(EstimatorKind::MLE, PriorSpec::good(), McmcSettings::refit_default()); }

}  // namespace

TEST_SUITE("ppp") {

TEST_CASE("two_sided examples") {
  CHECK(two_sided(0.5) == 1.0);
  CHECK(two_sided(0.01) == doctest::Approx(0.02));
  CHECK(two_sided(0.99) == doctest::Approx(0.02));
  CHECK(two_sided(0.0) == 0.0);
  CHECK(two_sided(1.0) == 0.0);
  CHECK_THROWS_AS(two_sided(1.5), DomainError);
  CHECK_THROWS_AS(two_sided(std::nan("")), DomainError);
}

TEST_CASE("ppp_from_replicates counts ties as exceedances") {
  const double reps[] = {0.1, 0.2, 0.2, 0.4};
  CHECK(ppp_from_replicates(0.2, reps) == 0.75);
  CHECK(ppp_from_replicates(0.5, reps) == 0.0);
  CHECK(ppp_from_replicates(0.0, reps) == 1.0);
  CHECK_THROWS_AS(ppp_from_replicates(0.0, std::span<const double>{}), DomainError);
}

TEST_CASE("constant statistic gives p = 1") {
  const Dataset d = null_data(20, 501);
  const Statistic stats[] = {constant_statistic(3.0)};
  RandomStream rng(1);
  const auto r = estimate_ppp_with(d, {}, PriorSpec::good(), short_chain(), 100, mle(), stats, rng);
  CHECK(r[0].p_value == 1.0);
  CHECK(r[0].t_replicates.size() == 100);
}

TEST_CASE("an observed statistic above every replicate gives p = 0") {
  const Dataset d = null_data(20, 502);
  const Statistic stats[] = {Statistic{"obs", false, [&d](const Dataset& x, std::span<const double>, const GammaParams&) {
    return &x == &d ? 1e300 : 0.0;
  }}};
  RandomStream rng(2);
  CHECK(estimate_ppp_with(d, {}, PriorSpec::good(), short_chain(), 100, mle(), stats, rng)[0].p_value == 0.0);
}

TEST_CASE("p-values sit on the 1/m lattice") {
  const Dataset d = null_data(30, 503);
  const StatisticKind kinds[] = {StatisticKind::ModifiedKS, StatisticKind::ChiSquared, StatisticKind::PitKS};
  PppConfig cfg;
  cfg.mcmc = short_chain();
  cfg.m_draws = 125;
  RandomStream rng(3);
  for (const auto& r : estimate_ppp(d, PriorSpec::good(), cfg, kinds, rng)) {
    CHECK(r.m_draws == 125);
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
    const double scaled = r.p_value * 125.0;
    CHECK(scaled == std::round(scaled));
  }
}

TEST_CASE("p is non-increasing in the observed statistic") {
  const Dataset d = null_data(25, 504);
  double previous = 2.0;
  for (double t : {0.0, 0.3, 0.6, 0.9, 1.2, 5.0}) {
    const Statistic stats[] = {Statistic{"shift", false, [&d, t](const Dataset& x, std::span<const double>, const GammaParams& est) {
      if (&x == &d) return t;
      return modified_ks(x.values(), [&est](double y) { return gamma_cdf(est, y); });
    }}};
    RandomStream rng(4);
    const double p = estimate_ppp_with(d, {}, PriorSpec::good(), short_chain(), 100, mle(), stats, rng)[0].p_value;
    CHECK(p <= previous);
    previous = p;
  }
}

TEST_CASE("the estimator runs once on the observed data and once per replicate") {
  const Dataset d = null_data(15, 505);
  std::size_t observed_calls = 0, predictive_calls = 0;
  PlugInEstimator marker = [&](const Dataset& x, const ChainOutput* fitted, RandomStream&) {
    (fitted != nullptr ? observed_calls : predictive_calls)++;
    return gamma_mle(x);
  };
  const Statistic stats[] = {make_statistic(StatisticKind::ModifiedKS), make_statistic(StatisticKind::ChiSquared)};
  RandomStream rng(5);
  estimate_ppp_with(d, {}, PriorSpec::good(), short_chain(), 150, marker, stats, rng);
  CHECK(observed_calls == 1);
  CHECK(predictive_calls == 150);
}

TEST_CASE("estimates are bit-identical for the same seed") {
  const Dataset d = null_data(40, 506);
  PppConfig cfg;
  cfg.mcmc = short_chain();
  RandomStream a(77), b(77), c(78);
  const auto ra = estimate_ppp(d, PriorSpec::good(), cfg, a);
  const auto rb = estimate_ppp(d, PriorSpec::good(), cfg, b);
  const auto rc = estimate_ppp(d, PriorSpec::good(), cfg, c);
  CHECK(ra.p_value == rb.p_value);
  CHECK(ra.t_replicates == rb.t_replicates);
  CHECK(ra.t_replicates != rc.t_replicates);
}

TEST_CASE("statistics share one chain and one set of predictive datasets") {
  const Dataset d = null_data(40, 507);
  PppConfig cfg;
  cfg.mcmc = short_chain();
  const StatisticKind both[] = {StatisticKind::ChiSquared, StatisticKind::ModifiedKS};
  RandomStream a(9), b(9);
  const auto joint = estimate_ppp(d, PriorSpec::good(), cfg, both, a);
  cfg.statistic = StatisticKind::ModifiedKS;
  const auto alone = estimate_ppp(d, PriorSpec::good(), cfg, b);
  CHECK(joint[1].t_replicates == alone.t_replicates);
  CHECK(joint[1].p_value == alone.p_value);
}

TEST_CASE("two_sided_p is reported for the chi-squared statistic only") {
  const Dataset d = null_data(20, 508);
  PppConfig cfg;
  cfg.mcmc = short_chain();
  const StatisticKind kinds[] = {StatisticKind::ModifiedKS, StatisticKind::ChiSquared};
  RandomStream rng(10);
  const auto r = estimate_ppp(d, PriorSpec::good(), cfg, kinds, rng);
  CHECK_FALSE(r[0].two_sided_p.has_value());
  REQUIRE(r[1].two_sided_p.has_value());
  CHECK(*r[1].two_sided_p == two_sided(r[1].p_value));
}

TEST_CASE("configuration errors") {
  const Dataset d = null_data(20, 509);
  PppConfig cfg;
  cfg.mcmc = short_chain();
  RandomStream rng(11);
  cfg.m_draws = 99;
  CHECK_THROWS_AS(estimate_ppp(d, PriorSpec::good(), cfg, rng), ConfigError);
  cfg.m_draws = 501;
  CHECK_THROWS_AS(estimate_ppp(d, PriorSpec::good(), cfg, rng), ConfigError);
  cfg.m_draws.reset();
  CHECK(cfg.resolved_m_draws() == 500);
  cfg.statistic = StatisticKind::Score;
  CHECK_THROWS_AS(estimate_ppp(d, PriorSpec::good(), cfg, rng), ConfigError);
  const std::vector<double> x(20, 1.0);
  CHECK_NOTHROW(estimate_ppp(d, PriorSpec::good(), cfg, rng, x));
}

TEST_CASE("select_draws spaces draws evenly") {
  ChainOutput chain;
  for (int i = 0; i < 10; ++i) chain.draws.push_back({1.0 + i, 1.0});
  const auto all = select_draws(chain, 10);
  CHECK(all.size() == 10);
  CHECK(all[9].alpha == 10.0);
  const auto half = select_draws(chain, 5);
  CHECK(half[1].alpha == 3.0);
  CHECK_THROWS_AS(select_draws(chain, 11), ConfigError);
}

TEST_CASE("a degenerate predictive dataset aborts the estimate") {
  const Dataset d = null_data(20, 510);
  PlugInEstimator fragile = [](const Dataset& x, const ChainOutput* fitted, RandomStream&) -> GammaParams {
    if (fitted == nullptr) throw DegenerateDataError("all observations equal");
    return gamma_mle(x);
  };
  const Statistic stats[] = {make_statistic(StatisticKind::ModifiedKS)};
  RandomStream rng(12);
  CHECK_THROWS_AS(estimate_ppp_with(d, {}, PriorSpec::good(), short_chain(), 100, fragile, stats, rng), NumericalError);
}

TEST_CASE("posterior-mean plug-in refits predictive datasets") {
  const Dataset d = null_data(15, 511);
  PppConfig cfg;
  cfg.mcmc = short_chain();
  cfg.estimator = EstimatorKind::PosteriorMean;
  cfg.predictive_refit_mcmc.burn_in = 100;
  cfg.predictive_refit_mcmc.iterations = 200;
  cfg.m_draws = 100;
  RandomStream rng(13);
  PppTrace trace;
  const StatisticKind kinds[] = {StatisticKind::ModifiedKS};
  const auto r = estimate_ppp(d, PriorSpec::bad(), cfg, kinds, rng, {}, &trace);
  CHECK(r[0].estimate.alpha == doctest::Approx(posterior_mean(trace.chain).alpha));
  CHECK(trace.draws.size() == 100);
}

TEST_CASE("selftest large-M group passes") {
  const auto group = selftest::ppp_large_m();
  for (const auto& c : group.checks) {
    CAPTURE(c.name);
    CHECK(c.passed);
  }
}

}  // TEST_SUITE
