#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pppks/random.hpp"

namespace pppks {

/// Gamma(shape alpha, rate beta).
struct GammaParams {
  double alpha = 1.0;
  double beta = 1.0;

  bool valid() const noexcept;
  friend bool operator==(const GammaParams&, const GammaParams&) = default;
};

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

struct GammaModel {
  GammaParams params;
};

/// CDF 1 - exp(-(y/scale)^shape).
struct WeibullModel {
  double shape = 1.0;
  double scale = 1.0;
};

/// exp(N(mu, sigma^2)).
struct LognormalModel {
  double mu = 0.0;
  double sigma = 1.0;
};

/// Y_i | x_i ~ Gamma(alpha0, alpha0 / (x_i theta0 + alpha0 / beta0)), so that
/// E[Y_i] = x_i theta0 + alpha0 / beta0. theta0 = 0 recovers the gamma model.
struct GammaGlmModel {
  double alpha0 = 2.0;
  double beta0 = 5.0;
  double theta0 = 0.5;
  std::vector<double> covariates;

  double rate(std::size_t i) const;
};

using ModelSpec = std::variant<GammaModel, WeibullModel, LognormalModel, GammaGlmModel>;

std::string family_name(const ModelSpec& m);

/// Throws DomainError if any parameter is non-positive or non-finite.
void validate(const ModelSpec& m);

/// Normal(mean, variance) truncated to (0, inf).
struct TruncatedNormalPrior {
  double mean = 0.0;
  double variance = 1.0;
};

/// Gamma(shape, rate).
struct GammaPrior {
  double shape = 1.0;
  double rate = 1.0;
};

/// Independent priors on (alpha, beta).
struct PriorSpec {
  TruncatedNormalPrior alpha;
  GammaPrior beta;

  /// TN(2.5, 16, 0, inf) x Gamma(1, 1): loosely centred on (2, 5).
  static PriorSpec good();
  /// TN(1, 0.5, 0, inf) x Gamma(3, 1.25): puts (2, 5) near the prior tails.
  static PriorSpec bad();

  void validate() const;
  GammaParams mean() const;
};

/// Observations with positive finite support.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<double> observations);

  std::size_t size() const noexcept { return obs_.size(); }
  std::span<const double> values() const noexcept { return obs_; }
  double operator[](std::size_t i) const { return obs_[i]; }

 private:
  std::vector<double> obs_;
};

/// (n, sum y, sum ln y): everything the gamma likelihood needs.
struct GammaSufficientStats {
  std::size_t n = 0;
  double sum = 0.0;
  double sum_log = 0.0;

  static GammaSufficientStats of(std::span<const double> y);
  double mean() const { return sum / static_cast<double>(n); }
  double mean_log() const { return sum_log / static_cast<double>(n); }
};

double gamma_log_pdf(const GammaParams& p, double y);
double gamma_cdf(const GammaParams& p, double y);

/// Family CDF of observation i. Only GammaGlmModel depends on i.
double model_cdf(const ModelSpec& m, std::size_t i, double y);

double sample_gamma(RandomStream& rng, double shape, double rate);
double sample_truncated_normal(RandomStream& rng, const TruncatedNormalPrior& tn);

/// n independent draws. A GammaGlmModel must carry at least n covariates.
Dataset sample_dataset(const ModelSpec& m, std::size_t n, RandomStream& rng);

/// Covariates x_i ~ Lognormal(0.5, 1) for the GLM alternative.
std::vector<double> draw_glm_covariates(std::size_t n, RandomStream& rng);

/// Per-observation score (d/d alpha, d/d beta) of the gamma log density.
Vec2 gamma_score(const GammaParams& p, double y);

/// [[psi'(alpha), -1/beta], [-1/beta, alpha/beta^2]].
Mat2 gamma_fisher_info(const GammaParams& p);

/// Log prior density; -inf outside alpha > 0, beta > 0.
double prior_log_pdf(const PriorSpec& pr, const GammaParams& p);

/// Central finite-difference gradient of gamma_cdf(p, y) in (alpha, beta).
Vec2 cdf_param_grad_fd(const GammaParams& p, double y, double h);

/// y-uniform bounds on |dP/d alpha| and |dP/d beta|:
/// |psi(alpha)| + alpha and alpha^alpha e^-alpha / (Gamma(alpha) beta).
Vec2 cdf_param_grad_bounds(const GammaParams& p);

}  // namespace pppks
