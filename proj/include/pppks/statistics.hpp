#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>

#include "pppks/models.hpp"

namespace pppks {

enum class StatisticKind { ModifiedKS, ChiSquared, Score, PitKS };

std::string_view to_string(StatisticKind k);
StatisticKind parse_statistic_kind(std::string_view s);

/// Chi-squared discrepancies in either direction count as evidence; the
/// others are one-sided (large = discrepant).
constexpr bool is_two_sided(StatisticKind k) { return k == StatisticKind::ChiSquared; }
constexpr bool needs_covariates(StatisticKind k) { return k == StatisticKind::Score; }

using CdfFn = std::function<double(double)>;
using IndexedCdfFn = std::function<double(std::size_t, double)>;

/// sup_u |F_n(u) - u| for the empirical CDF F_n of `u` (unscaled). Values
/// must lie in [0, 1].
double ks_distance_to_uniform(std::span<const double> u);

/// sqrt(n) sup_y |P_n(y) - F(y)|, evaluated at the order statistics.
/// Throws DomainError if F leaves [0, 1] or decreases on the sorted sample.
double modified_ks(std::span<const double> y, const CdfFn& fitted_cdf);

/// (1/n) sum (y_i - a/b)^2 / (a / b^2).
double chi_squared_stat(std::span<const double> y, const GammaParams& est);

/// Score for theta at theta = 0 in the gamma GLM:
/// (b^2 / a) sum x_i y_i - b sum x_i.
double score_stat(std::span<const double> y, std::span<const double> x, const GammaParams& est);

/// KS statistic of the probability integral transforms u_i = F_i(y_i)
/// against Uniform(0, 1), scaled by sqrt(n).
double pit_ks(std::span<const double> y, const IndexedCdfFn& per_obs_cdf);

}  // namespace pppks
