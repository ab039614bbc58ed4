#pragma once

// Scalar special functions. Every function rejects non-finite input and
// arguments outside its domain with pppks::DomainError.

namespace pppks::specfun {

/// ln Gamma(x), x > 0.
double log_gamma(double x);

/// Digamma psi(x) = d/dx ln Gamma(x), x > 0.
double digamma(double x);

/// Trigamma psi'(x), x > 0.
double trigamma(double x);

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
/// Series below x = a + 1, continued fraction above.
double reg_lower_incomplete_gamma(double a, double x);

/// 1 - P(a, x), computed without cancellation in the upper tail.
double reg_upper_incomplete_gamma(double a, double x);

/// The two evaluation routes for P(a, x), exposed for cross-checking. Both
/// are valid for any x >= 0 given enough terms; each is only fast on its side
/// of the split.
double incomplete_gamma_series(double a, double x);
double incomplete_gamma_continued_fraction(double a, double x);

/// Standard normal CDF.
double normal_cdf(double z);

/// ln Phi(z), accurate in the far lower tail.
double log_normal_cdf(double z);

}  // namespace pppks::specfun
