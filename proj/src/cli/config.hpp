#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pppks/experiments.hpp"

namespace pppks::cli {

using nlohmann::json;

/// Single-dataset run.
struct PppRunConfig {
  PriorSpec prior = PriorSpec::good();
  PppConfig ppp;
  std::vector<StatisticKind> statistics{StatisticKind::ModifiedKS};
  std::uint64_t seed = 1;
  /// Data and covariate files; relative paths resolve against the config file.
  std::string data;
  std::string covariates;
};

/// One (prior, estimator, n) cell of a null-calibration grid.
struct CalibrationCell {
  std::string prior_name;
  PriorSpec prior;
  EstimatorKind estimator = EstimatorKind::MLE;
  std::size_t n = 0;

  std::string label() const;
};

struct CalibrationRunConfig {
  std::vector<std::pair<std::string, PriorSpec>> priors{{"good", PriorSpec::good()}};
  std::vector<EstimatorKind> estimators{EstimatorKind::MLE};
  std::vector<std::size_t> sample_sizes{100};
  std::size_t replications = 500;
  std::vector<StatisticKind> statistics{StatisticKind::ModifiedKS};
  GammaParams truth{2.0, 5.0};
  McmcSettings mcmc;
  McmcSettings predictive_refit_mcmc = McmcSettings::refit_default();
  std::size_t m_draws = 500;
  std::uint64_t seed = 20240601;

  /// Grid in prior-major, then estimator, then sample-size order.
  std::vector<CalibrationCell> cells() const;
  ExperimentConfig experiment(const CalibrationCell& cell, std::size_t index) const;
};

struct PowerRunConfig {
  std::vector<ModelSpec> data_models;
  std::size_t n = 100;
  std::size_t replications = 300;
  std::string prior_name = "good";
  PriorSpec prior = PriorSpec::good();
  EstimatorKind estimator = EstimatorKind::MLE;
  std::vector<StatisticKind> statistics{StatisticKind::ModifiedKS, StatisticKind::ChiSquared,
                                        StatisticKind::Score};
  McmcSettings mcmc;
  McmcSettings predictive_refit_mcmc = McmcSettings::refit_default();
  std::size_t m_draws = 500;
  std::uint64_t seed = 20240601;

  PowerRunConfig();
  ExperimentConfig experiment(std::size_t model_index) const;
};

/// Reads a JSON document; throws ConfigError when missing or malformed.
json load_json(const std::filesystem::path& path);

/// Parsers reject unknown keys and name the offending field in ConfigError.
PppRunConfig parse_ppp_config(const json& j);
CalibrationRunConfig parse_calibration_config(const json& j);
PowerRunConfig parse_power_config(const json& j);

/// Resolved form: every field explicit, defaults applied.
json to_json(const PppRunConfig& c);
json to_json(const CalibrationRunConfig& c);
json to_json(const PowerRunConfig& c);

json to_json(const McmcSettings& s);
json to_json(const PriorSpec& p);
json to_json(const ModelSpec& m);
std::string model_label(const ModelSpec& m);

}  // namespace pppks::cli
