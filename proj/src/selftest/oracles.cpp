#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pppks::oracle {

long double euler_gamma() {
  constexpr long N = 200000;
  long double h = 0.0L;
  for (long k = N; k >= 1; --k) h += 1.0L / static_cast<long double>(k);
  const long double n = N;
  return h - std::log(n) - 1.0L / (2.0L * n) + 1.0L / (12.0L * n * n) - 1.0L / (120.0L * n * n * n * n);
}

long double digamma(double x) {
  long double z = x;
  long double shift = 0.0L;
  while (z < 60.0L) {
    shift += 1.0L / z;
    z += 1.0L;
  }
  const long double z2 = z * z;
  long double asym = std::log(z) - 1.0L / (2.0L * z) - 1.0L / (12.0L * z2) + 1.0L / (120.0L * z2 * z2) -
                     1.0L / (252.0L * z2 * z2 * z2) + 1.0L / (240.0L * z2 * z2 * z2 * z2);
  return asym - shift;
}

long double trigamma(double x) {
  constexpr int N = 2000;
  long double sum = 0.0L;
  for (int k = N - 1; k >= 0; --k) {
    const long double t = static_cast<long double>(x) + k;
    sum += 1.0L / (t * t);
  }
  const long double t = static_cast<long double>(x) + N;
  // sum_{k>=N} 1/(x+k)^2 by Euler-Maclaurin.
  sum += 1.0L / t + 1.0L / (2.0L * t * t) + 1.0L / (6.0L * t * t * t) - 1.0L / (30.0L * t * t * t * t * t);
  return sum;
}

long double erf_series(double z) {
  const long double zz = z;
  long double term = zz;  // z^(2k+1) / k!
  long double sum = zz;
  for (int k = 1; k < 200; ++k) {
    term *= -zz * zz / k;
    const long double add = term / (2 * k + 1);
    sum += add;
    if (std::fabs(add) < 1e-22L) break;
  }
  return 2.0L / std::sqrt(std::numbers::pi_v<long double>) * sum;
}

double simpson(const std::function<double(double)>& f, double lo, double hi, std::size_t panels) {
  if (panels % 2 != 0) ++panels;
  const double h = (hi - lo) / static_cast<double>(panels);
  double s = f(lo) + f(hi);
  for (std::size_t i = 1; i < panels; ++i) s += f(lo + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double gamma_cdf_quadrature(const GammaParams& p, double y) {
  const double log_norm = p.alpha * std::log(p.beta) - std::lgamma(p.alpha);
  auto density = [&](double t) {
    if (t <= 0.0) return p.alpha == 1.0 ? std::exp(log_norm) : 0.0;
    return std::exp(log_norm + (p.alpha - 1.0) * std::log(t) - p.beta * t);
  };
  return simpson(density, 0.0, y, 200000);
}

GammaParams gamma_mle_grid(std::span<const double> y, double tol) {
  double sum = 0.0, sum_log = 0.0;
  for (double v : y) {
    sum += v;
    sum_log += std::log(v);
  }
  const double n = static_cast<double>(y.size());
  const double ybar = sum / n;
  const double mlog = sum_log / n;
  auto profile = [&](double a) { return a * std::log(a / ybar) - std::lgamma(a) + (a - 1.0) * mlog - a; };

  double lo = std::log(1e-3), hi = std::log(1e7);
  constexpr int kPoints = 400;
  while (std::exp(hi) - std::exp(lo) > tol) {
    const double step = (hi - lo) / kPoints;
    int best = 0;
    double best_v = -INFINITY;
    for (int i = 0; i <= kPoints; ++i) {
      const double v = profile(std::exp(lo + step * i));
      if (v > best_v) {
        best_v = v;
        best = i;
      }
    }
    const double new_lo = lo + step * std::max(best - 1, 0);
    const double new_hi = lo + step * std::min(best + 1, kPoints);
    if (new_hi - new_lo >= hi - lo) break;
    lo = new_lo;
    hi = new_hi;
  }
  const double a = std::exp(0.5 * (lo + hi));
  return {a, a / ybar};
}

double modified_ks_dense(std::span<const double> y, const std::function<double(double)>& cdf,
                         std::size_t grid_points) {
  const double n = static_cast<double>(y.size());
  auto count_le = [&](double t) {
    return static_cast<double>(std::count_if(y.begin(), y.end(), [t](double v) { return v <= t; }));
  };
  auto count_lt = [&](double t) {
    return static_cast<double>(std::count_if(y.begin(), y.end(), [t](double v) { return v < t; }));
  };
  const auto [mn, mx] = std::minmax_element(y.begin(), y.end());
  const double lo = *mn * 0.5;
  const double hi = *mx * 1.5;
  double sup = 0.0;
  for (std::size_t i = 0; i <= grid_points; ++i) {
    const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points);
    sup = std::max(sup, std::fabs(count_le(t) / n - cdf(t)));
  }
  for (double v : y) {
    const double f = cdf(v);
    sup = std::max({sup, std::fabs(count_le(v) / n - f), std::fabs(count_lt(v) / n - f)});
  }
  return std::sqrt(n) * sup;
}

GammaParams posterior_mean_quadrature(const Dataset& d, const PriorSpec& pr, double lo, double hi,
                                      std::size_t grid) {
  double sum = 0.0, sum_log = 0.0;
  for (double v : d.values()) {
    sum += v;
    sum_log += std::log(v);
  }
  const double n = static_cast<double>(d.size());
  const double sd = std::sqrt(pr.alpha.variance);
  const double log_trunc = std::log(0.5 * std::erfc(-pr.alpha.mean / sd / std::numbers::sqrt2));
  auto log_post = [&](double a, double b) {
    const double ll = n * (a * std::log(b) - std::lgamma(a)) + (a - 1.0) * sum_log - b * sum;
    const double za = (a - pr.alpha.mean) / sd;
    const double lpa = -0.5 * za * za - log_trunc;
    const double lpb = (pr.beta.shape - 1.0) * std::log(b) - pr.beta.rate * b;
    return ll + lpa + lpb;
  };
  const double h = (hi - lo) / static_cast<double>(grid - 1);
  std::vector<double> lp(grid * grid);
  double mx = -INFINITY;
  for (std::size_t i = 0; i < grid; ++i)
    for (std::size_t j = 0; j < grid; ++j) {
      const double v = log_post(lo + h * static_cast<double>(i), lo + h * static_cast<double>(j));
      lp[i * grid + j] = v;
      mx = std::max(mx, v);
    }
  double z = 0.0, ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < grid; ++i)
    for (std::size_t j = 0; j < grid; ++j) {
      const double wi = (i == 0 || i == grid - 1) ? 0.5 : 1.0;
      const double wj = (j == 0 || j == grid - 1) ? 0.5 : 1.0;
      const double w = wi * wj * std::exp(lp[i * grid + j] - mx);
      z += w;
      ma += w * (lo + h * static_cast<double>(i));
      mb += w * (lo + h * static_cast<double>(j));
    }
  return {ma / z, mb / z};
}

double ppp_large_m(const Dataset& observed, std::span<const GammaParams> draws, std::size_t m,
                   const PlugInEstimator& estimator, const Statistic& statistic, double t_obs,
                   std::uint64_t seed) {
  if (draws.empty()) throw std::invalid_argument("ppp_large_m: no draws");
  std::size_t hits = 0;
  for (std::size_t j = 0; j < m; ++j) {
    RandomStream rng(derive_seed(seed, j));
    const Dataset rep = sample_dataset(GammaModel{draws[j % draws.size()]}, observed.size(), rng);
    const GammaParams est = estimator(rep, nullptr, rng);
    if (statistic.eval(rep, {}, est) >= t_obs) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(m);
}

}  // namespace pppks::oracle
