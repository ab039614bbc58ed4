#include "pppks/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pppks/errors.hpp"
#include "pppks/specfun.hpp"

namespace pppks {
namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void require_params(const GammaParams& p, const char* where) {
  if (!p.valid()) {
    throw DomainError(std::string(where) + ": gamma parameters must be finite and > 0 (alpha=" +
                      std::to_string(p.alpha) + ", beta=" + std::to_string(p.beta) + ")");
  }
}

void require_support(double y, const char* where) {
  if (!std::isfinite(y) || y < 0.0) {
    throw DomainError(std::string(where) + ": y must be finite and >= 0, got " + std::to_string(y));
  }
}

void require_positive_obs(double y, const char* where) {
  if (!positive_finite(y)) {
    throw DomainError(std::string(where) + ": y must be finite and > 0, got " + std::to_string(y));
  }
}

}  // namespace

bool GammaParams::valid() const noexcept { return positive_finite(alpha) && positive_finite(beta); }

double GammaGlmModel::rate(std::size_t i) const {
  if (i >= covariates.size()) {
    throw std::out_of_range("GammaGlmModel: observation index " + std::to_string(i) +
                            " out of range (" + std::to_string(covariates.size()) + " covariates)");
  }
  return alpha0 / (covariates[i] * theta0 + alpha0 / beta0);
}

std::string family_name(const ModelSpec& m) {
  struct Visitor {
    std::string operator()(const GammaModel&) const { return "gamma"; }
    std::string operator()(const WeibullModel&) const { return "weibull"; }
    std::string operator()(const LognormalModel&) const { return "lognormal"; }
    std::string operator()(const GammaGlmModel&) const { return "gamma_glm"; }
  };
  return std::visit(Visitor{}, m);
}

void validate(const ModelSpec& m) {
  struct Visitor {
    void operator()(const GammaModel& g) const { require_params(g.params, "gamma model"); }
    void operator()(const WeibullModel& w) const {
      if (!positive_finite(w.shape) || !positive_finite(w.scale))
        throw DomainError("weibull model: shape and scale must be > 0");
    }
    void operator()(const LognormalModel& l) const {
      if (!std::isfinite(l.mu) || !positive_finite(l.sigma))
        throw DomainError("lognormal model: mu must be finite and sigma > 0");
    }
    void operator()(const GammaGlmModel& g) const {
      if (!positive_finite(g.alpha0) || !positive_finite(g.beta0) || !std::isfinite(g.theta0) ||
          g.theta0 < 0.0)
        throw DomainError("gamma_glm model: alpha0, beta0 must be > 0 and theta0 >= 0");
      for (double x : g.covariates)
        if (!positive_finite(x)) throw DomainError("gamma_glm model: covariates must be > 0");
    }
  };
  std::visit(Visitor{}, m);
}

PriorSpec PriorSpec::good() { return {{2.5, 16.0}, {1.0, 1.0}}; }
PriorSpec PriorSpec::bad() { return {{1.0, 0.5}, {3.0, 1.25}}; }

void PriorSpec::validate() const {
  if (!std::isfinite(alpha.mean)) throw DomainError("alpha prior: mean must be finite");
  if (!positive_finite(alpha.variance)) throw DomainError("alpha prior: variance must be > 0");
  if (!positive_finite(beta.shape) || !positive_finite(beta.rate))
    throw DomainError("beta prior: shape and rate must be > 0");
}

GammaParams PriorSpec::mean() const {
  const double sd = std::sqrt(alpha.variance);
  const double z = alpha.mean / sd;
  const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return {alpha.mean + sd * phi / specfun::normal_cdf(z), beta.shape / beta.rate};
}

Dataset::Dataset(std::vector<double> observations) : obs_(std::move(observations)) {
  if (obs_.empty()) throw DomainError("dataset: at least one observation required");
  for (std::size_t i = 0; i < obs_.size(); ++i) {
    if (!positive_finite(obs_[i])) {
      throw DomainError("dataset: observation " + std::to_string(i) +
                        " must be finite and > 0, got " + std::to_string(obs_[i]));
    }
  }
}

GammaSufficientStats GammaSufficientStats::of(std::span<const double> y) {
  // Summing in sorted order makes the result independent of data order.
  std::vector<double> sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end());
  GammaSufficientStats s;
  s.n = y.size();
  for (double v : sorted) {
    s.sum += v;
    s.sum_log += std::log(v);
  }
  return s;
}

double gamma_log_pdf(const GammaParams& p, double y) {
  require_params(p, "gamma_log_pdf");
  require_positive_obs(y, "gamma_log_pdf");
  return p.alpha * std::log(p.beta) - specfun::log_gamma(p.alpha) + (p.alpha - 1.0) * std::log(y) -
         p.beta * y;
}

double gamma_cdf(const GammaParams& p, double y) {
  require_params(p, "gamma_cdf");
  require_support(y, "gamma_cdf");
  return specfun::reg_lower_incomplete_gamma(p.alpha, p.beta * y);
}

double model_cdf(const ModelSpec& m, std::size_t i, double y) {
  require_support(y, "model_cdf");
  struct Visitor {
    std::size_t i;
    double y;
    double operator()(const GammaModel& g) const { return gamma_cdf(g.params, y); }
    double operator()(const WeibullModel& w) const {
      return -std::expm1(-std::pow(y / w.scale, w.shape));
    }
    double operator()(const LognormalModel& l) const {
      if (y == 0.0) return 0.0;
      return specfun::normal_cdf((std::log(y) - l.mu) / l.sigma);
    }
    double operator()(const GammaGlmModel& g) const {
      return gamma_cdf({g.alpha0, g.rate(i)}, y);
    }
  };
  return std::visit(Visitor{i, y}, m);
}

// Marsaglia-Tsang squeeze; shapes below 1 are boosted by G(a+1) U^(1/a).
double sample_gamma(RandomStream& rng, double shape, double rate) {
  if (shape < 1.0) {
    const double u = rng.uniform();
    return sample_gamma(rng, shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double sample_truncated_normal(RandomStream& rng, const TruncatedNormalPrior& tn) {
  const double sd = std::sqrt(tn.variance);
  for (;;) {
    const double v = tn.mean + sd * rng.normal();
    if (v > 0.0) return v;
  }
}

Dataset sample_dataset(const ModelSpec& m, std::size_t n, RandomStream& rng) {
  if (n == 0) throw DomainError("sample_dataset: n must be >= 1");
  validate(m);
  std::vector<double> y(n);
  struct Visitor {
    std::vector<double>& y;
    RandomStream& rng;
    void operator()(const GammaModel& g) {
      for (auto& v : y) v = sample_gamma(rng, g.params.alpha, g.params.beta);
    }
    void operator()(const WeibullModel& w) {
      for (auto& v : y) v = w.scale * std::pow(-std::log(rng.uniform()), 1.0 / w.shape);
    }
    void operator()(const LognormalModel& l) {
      for (auto& v : y) v = std::exp(l.mu + l.sigma * rng.normal());
    }
    void operator()(const GammaGlmModel& g) {
      if (g.covariates.size() < y.size()) {
        throw DomainError("sample_dataset: gamma_glm model has " +
                          std::to_string(g.covariates.size()) + " covariates, need " +
                          std::to_string(y.size()));
      }
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = sample_gamma(rng, g.alpha0, g.rate(i));
    }
  };
  std::visit(Visitor{y, rng}, m);
  // Underflow to 0 is possible for tiny shapes; keep the support strictly positive.
  for (auto& v : y) v = std::max(v, std::numeric_limits<double>::min());
  return Dataset(std::move(y));
}

std::vector<double> draw_glm_covariates(std::size_t n, RandomStream& rng) {
  std::vector<double> x(n);
  for (auto& v : x) v = std::exp(0.5 + rng.normal());
  return x;
}

Vec2 gamma_score(const GammaParams& p, double y) {
  require_params(p, "gamma_score");
  require_positive_obs(y, "gamma_score");
  return {std::log(p.beta) - specfun::digamma(p.alpha) + std::log(y), p.alpha / p.beta - y};
}

Mat2 gamma_fisher_info(const GammaParams& p) {
  require_params(p, "gamma_fisher_info");
  const double off = -1.0 / p.beta;
  return {{{specfun::trigamma(p.alpha), off}, {off, p.alpha / (p.beta * p.beta)}}};
}

double prior_log_pdf(const PriorSpec& pr, const GammaParams& p) {
  if (!(p.alpha > 0.0) || !(p.beta > 0.0) || !std::isfinite(p.alpha) || !std::isfinite(p.beta)) {
    return -std::numeric_limits<double>::infinity();
  }
  const double sd = std::sqrt(pr.alpha.variance);
  const double z = (p.alpha - pr.alpha.mean) / sd;
  const double log_tn = -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi) -
                        specfun::log_normal_cdf(pr.alpha.mean / sd);
  const double a = pr.beta.shape;
  const double b = pr.beta.rate;
  const double log_g = a * std::log(b) - specfun::log_gamma(a) + (a - 1.0) * std::log(p.beta) - b * p.beta;
  return log_tn + log_g;
}

Vec2 cdf_param_grad_fd(const GammaParams& p, double y, double h) {
  require_params(p, "cdf_param_grad_fd");
  require_positive_obs(y, "cdf_param_grad_fd");
  if (!positive_finite(h) || h >= p.alpha || h >= p.beta) {
    throw DomainError("cdf_param_grad_fd: step must be > 0 and keep alpha - h, beta - h > 0");
  }
  const double da = (gamma_cdf({p.alpha + h, p.beta}, y) - gamma_cdf({p.alpha - h, p.beta}, y)) / (2.0 * h);
  const double db = (gamma_cdf({p.alpha, p.beta + h}, y) - gamma_cdf({p.alpha, p.beta - h}, y)) / (2.0 * h);
  return {da, db};
}

Vec2 cdf_param_grad_bounds(const GammaParams& p) {
  require_params(p, "cdf_param_grad_bounds");
  const double a = p.alpha;
  const double db = std::exp(a * std::log(a) - a - specfun::log_gamma(a)) / p.beta;
  return {std::fabs(specfun::digamma(a)) + a, db};
}

}  // namespace pppks
