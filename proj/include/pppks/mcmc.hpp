#pragma once

#include <cstddef>
#include <vector>

#include "pppks/models.hpp"
#include "pppks/random.hpp"

namespace pppks {

struct McmcSettings {
  std::size_t burn_in = 1000;
  std::size_t iterations = 5000;
  std::size_t thin = 5;
  /// Isotropic proposal scale on (ln alpha, ln beta) at the start of burn-in.
  double initial_step = 0.1;
  /// Robbins-Monro step-size control during burn-in.
  bool adapt = true;
  double target_acceptance = 0.3;
  /// Replace the isotropic proposal with the empirical covariance of early
  /// burn-in draws halfway through burn-in. Requires adapt.
  bool adapt_covariance = true;

  std::size_t retained() const { return thin == 0 ? 0 : iterations / thin; }
  /// Throws ConfigError naming the offending field.
  void validate() const;

  /// 500 burn-in, 1000 iterations, thin 2: used to refit predictive datasets.
  static McmcSettings refit_default();

  friend bool operator==(const McmcSettings&, const McmcSettings&) = default;
};

struct ChainOutput {
  std::vector<GammaParams> draws;
  /// Post-burn-in acceptance rate.
  double acceptance_rate = 0.0;
  /// Post-burn-in average of min(1, Metropolis ratio).
  double mean_acceptance_probability = 0.0;
  McmcSettings settings_used;
  /// Frozen proposal scale after burn-in.
  double final_step = 0.0;
};

/// Unnormalized log posterior: sum_i gamma_log_pdf(p, y_i) + prior_log_pdf.
/// -inf off the support; never throws for alpha, beta <= 0.
double log_posterior(const Dataset& d, const PriorSpec& pr, const GammaParams& p);
double log_posterior(const GammaSufficientStats& s, const PriorSpec& pr, const GammaParams& p);

/// Random-walk Metropolis on (ln alpha, ln beta). Starts at the MLE when it
/// exists, otherwise at the prior mean. Adaptation happens only during
/// burn-in; the retained draws come from a fixed kernel.
ChainOutput run_chain(const Dataset& d, const PriorSpec& pr, const McmcSettings& s, RandomStream& rng);

}  // namespace pppks
