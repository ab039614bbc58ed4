#pragma once

#include <string_view>

#include "pppks/models.hpp"

namespace pppks {

struct ChainOutput;

enum class EstimatorKind { MLE, PosteriorMean };

std::string_view to_string(EstimatorKind k);
EstimatorKind parse_estimator_kind(std::string_view s);

/// Gamma maximum likelihood estimate. Solves ln(a) - psi(a) = ln(mean y) -
/// mean(ln y) by safeguarded Newton, then beta = alpha / mean y.
/// Throws DomainError for n < 2 and DegenerateDataError when the dispersion
/// statistic is at or below 1e-12.
GammaParams gamma_mle(const Dataset& d);
GammaParams gamma_mle(const GammaSufficientStats& s);

/// Componentwise mean of the retained draws.
GammaParams posterior_mean(const ChainOutput& chain);

/// ln(a) - psi(a), evaluated without cancellation for large a.
double log_minus_digamma(double a);

}  // namespace pppks
