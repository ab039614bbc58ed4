#pragma once

// Independent reference computations used by the unit tests, the acceptance
// suite and `pppks selftest`. Nothing here calls the routine it checks.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pppks/mcmc.hpp"
#include "pppks/models.hpp"
#include "pppks/ppp.hpp"

namespace pppks::oracle {

/// Euler-Mascheroni constant from H_N - ln N with Euler-Maclaurin terms.
long double euler_gamma();

/// psi(x): shift to x + K >= 60 by downward recurrence from the asymptotic
/// series, in long double.
long double digamma(double x);

/// psi'(x): direct sum of 1/(x+k)^2 plus an Euler-Maclaurin tail.
long double trigamma(double x);

/// erf(z) by Maclaurin series (|z| <= 3).
long double erf_series(double z);

/// Composite Simpson integral of f over [lo, hi] with `panels` (even) panels.
double simpson(const std::function<double(double)>& f, double lo, double hi, std::size_t panels);

/// Gamma CDF by Simpson quadrature of the density.
double gamma_cdf_quadrature(const GammaParams& p, double y);

/// Gamma MLE by maximizing the profile log-likelihood over a log-spaced
/// alpha grid, refining the bracket until its width is below `tol`.
GammaParams gamma_mle_grid(std::span<const double> y, double tol = 1e-7);

/// sup_y |F_n(y) - F(y)| scaled by sqrt(n): brute-force count over a dense
/// grid plus both one-sided limits at each data point. No sorting.
double modified_ks_dense(std::span<const double> y, const std::function<double(double)>& cdf,
                         std::size_t grid_points = 100000);

/// Posterior mean of (alpha, beta) by 2-D trapezoid quadrature of the
/// unnormalized posterior on [lo, hi]^2.
GammaParams posterior_mean_quadrature(const Dataset& d, const PriorSpec& pr, double lo, double hi,
                                      std::size_t grid);

/// Large-M p-value: predictive replicates cycle through `draws`; total `m`.
double ppp_large_m(const Dataset& observed, std::span<const GammaParams> draws, std::size_t m,
                   const PlugInEstimator& estimator, const Statistic& statistic, double t_obs,
                   std::uint64_t seed);

}  // namespace pppks::oracle
