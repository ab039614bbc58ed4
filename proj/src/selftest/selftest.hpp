#pragma once

#include <string>
#include <vector>

namespace pppks::selftest {

struct Options {
  /// Multiplies every tolerance. 0 turns the suite into a tripwire that must
  /// fail; used to check that failures propagate to the exit status.
  double tolerance_scale = 1.0;
};

struct Check {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct GroupResult {
  std::string group;
  std::vector<Check> checks;
  bool passed() const;
};

GroupResult special_functions(const Options& opt = {});
/// Newton MLE vs grid-search oracle on 100 random datasets with n in [3, 20].
GroupResult mle_grid(const Options& opt = {});
/// Long-chain posterior mean vs 2-D quadrature on a fixed n = 20 dataset.
GroupResult mcmc_quadrature(const Options& opt = {});
/// Step-point enumeration examples and the dense-grid KS oracle on 50 datasets.
GroupResult statistic_enumeration(const Options& opt = {});
/// estimate_ppp vs a 10^5-replicate oracle on one fixed configuration.
GroupResult ppp_large_m(const Options& opt = {});

std::vector<GroupResult> run_all(const Options& opt = {});

}  // namespace pppks::selftest
