#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "pppks/errors.hpp"

namespace pppks::cli {

namespace {

// Typed access to one JSON object; remembers which keys were read so that
// leftovers can be reported as unknown.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "config" : path_, "expected a JSON object");
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double real(const std::string& key, double fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) throw ConfigError(name(key), "expected a number");
    return v->get<double>();
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    return as_count(*v, name(key));
  }

  bool flag(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) throw ConfigError(name(key), "expected true or false");
    return v->get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) throw ConfigError(name(key), "expected a string");
    return v->get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(name(it.key()), "unknown key");
    }
  }

  static std::uint64_t as_count(const json& v, const std::string& field) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
      if (v.get<std::int64_t>() < 0) throw ConfigError(field, "must be non-negative");
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    throw ConfigError(field, "expected a non-negative integer");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

McmcSettings parse_mcmc(const json* j, const std::string& path, McmcSettings s) {
  if (j == nullptr) return s;
  Fields f(*j, path);
  s.burn_in = f.count("burn_in", s.burn_in);
  s.iterations = f.count("iterations", s.iterations);
  s.thin = f.count("thin", s.thin);
  s.initial_step = f.real("initial_step", s.initial_step);
  s.adapt = f.flag("adapt", s.adapt);
  s.target_acceptance = f.real("target_acceptance", s.target_acceptance);
  s.adapt_covariance = f.flag("adapt_covariance", s.adapt_covariance);
  f.finish();
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(path + "." + e.field(), e.what());
  }
  return s;
}

// A prior is either "good", "bad" or an explicit object.
std::pair<std::string, PriorSpec> parse_prior(const json& j, const std::string& path) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "good") return {s, PriorSpec::good()};
    if (s == "bad") return {s, PriorSpec::bad()};
    throw ConfigError(path, "unknown prior '" + s + "' (expected good, bad or an object)");
  }
  Fields f(j, path);
  PriorSpec p;
  const std::string label = f.text("name", "custom");
  const json* a = f.find("alpha");
  const json* b = f.find("beta");
  if (a == nullptr) throw ConfigError(f.name("alpha"), "missing");
  if (b == nullptr) throw ConfigError(f.name("beta"), "missing");
  Fields fa(*a, f.name("alpha"));
  if (fa.text("family", "truncated_normal") != "truncated_normal")
    throw ConfigError(fa.name("family"), "alpha prior must be truncated_normal");
  p.alpha.mean = fa.real("mean", p.alpha.mean);
  p.alpha.variance = fa.real("variance", p.alpha.variance);
  fa.finish();
  Fields fb(*b, f.name("beta"));
  if (fb.text("family", "gamma") != "gamma") throw ConfigError(fb.name("family"), "beta prior must be gamma");
  p.beta.shape = fb.real("shape", p.beta.shape);
  p.beta.rate = fb.real("rate", p.beta.rate);
  fb.finish();
  f.finish();
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  return {label, p};
}

ModelSpec parse_model(const json& j, const std::string& path) {
  Fields f(j, path);
  const std::string family = f.text("family", "");
  ModelSpec m;
  if (family == "gamma") {
    GammaModel g;
    g.params.alpha = f.real("alpha", 2.0);
    g.params.beta = f.real("beta", 5.0);
    m = g;
  } else if (family == "weibull") {
    WeibullModel w;
    w.shape = f.real("shape", 2.0);
    w.scale = f.real("scale", 0.2);
    m = w;
  } else if (family == "lognormal") {
    LognormalModel l;
    l.mu = f.real("mu", 0.0);
    l.sigma = f.real("sigma", 0.5);
    m = l;
  } else if (family == "gamma_glm") {
    GammaGlmModel g;
    g.alpha0 = f.real("alpha0", 2.0);
    g.beta0 = f.real("beta0", 5.0);
    g.theta0 = f.real("theta0", 0.5);
    m = g;
  } else {
    throw ConfigError(f.name("family"), "expected gamma, weibull, lognormal or gamma_glm, got '" + family + "'");
  }
  f.finish();
  try {
    if (!std::holds_alternative<GammaGlmModel>(m)) validate(m);
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  if (auto* g = std::get_if<GammaGlmModel>(&m); g != nullptr && !(g->alpha0 > 0 && g->beta0 > 0 && std::isfinite(g->theta0)))
    throw ConfigError(path, "gamma_glm needs alpha0 > 0, beta0 > 0 and a finite theta0");
  return m;
}

template <class T, class Parse>
std::vector<T> parse_list(const json* j, const std::string& path, std::vector<T> fallback, Parse parse) {
  if (j == nullptr) return fallback;
  if (!j->is_array() || j->empty()) throw ConfigError(path, "expected a non-empty array");
  std::vector<T> out;
  for (std::size_t i = 0; i < j->size(); ++i) out.push_back(parse((*j)[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<StatisticKind> parse_statistics(const json* j, const std::string& path,
                                            std::vector<StatisticKind> fallback) {
  auto out = parse_list(j, path, std::move(fallback), [](const json& v, const std::string& p) {
    if (!v.is_string()) throw ConfigError(p, "expected a statistic name");
    try {
      return parse_statistic_kind(v.get<std::string>());
    } catch (const ConfigError& e) {
      throw ConfigError(p, e.what());
    }
  });
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t k = 0; k < i; ++k)
      if (out[i] == out[k]) throw ConfigError(path, "duplicate statistic " + std::string(to_string(out[i])));
  return out;
}

EstimatorKind parse_estimator(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected an estimator name");
  try {
    return parse_estimator_kind(v.get<std::string>());
  } catch (const ConfigError& e) {
    throw ConfigError(path, e.what());
  }
}

void check_scenario(Fields& f, const std::string& expected) {
  const std::string s = f.text("scenario", expected);
  if (s != expected) throw ConfigError(f.name("scenario"), "expected '" + expected + "', got '" + s + "'");
}

void check_ppp(const PppConfig& p) {
  try {
    p.validate();
  } catch (const ConfigError& e) {
    const std::string field = e.field() == "m_draws" ? e.field() : "mcmc." + e.field();
    throw ConfigError(field, e.what());
  }
}

json statistics_json(const std::vector<StatisticKind>& s) {
  json out = json::array();
  for (auto k : s) out.push_back(std::string(to_string(k)));
  return out;
}

}  // namespace

std::string CalibrationCell::label() const {
  return prior_name + "_" + std::string(to_string(estimator)) + "_n" + std::to_string(n);
}

std::vector<CalibrationCell> CalibrationRunConfig::cells() const {
  std::vector<CalibrationCell> out;
  for (const auto& [name, prior] : priors)
    for (auto est : estimators)
      for (auto n : sample_sizes) out.push_back({name, prior, est, n});
  return out;
}

ExperimentConfig CalibrationRunConfig::experiment(const CalibrationCell& cell, std::size_t index) const {
  ExperimentConfig e;
  e.scenario = Scenario::NullCalibration;
  e.n = cell.n;
  e.replications = replications;
  e.prior = cell.prior;
  e.statistics = statistics;
  e.data_model = GammaModel{truth};
  e.ppp.estimator = cell.estimator;
  e.ppp.mcmc = mcmc;
  e.ppp.predictive_refit_mcmc = predictive_refit_mcmc;
  e.ppp.m_draws = m_draws;
  e.master_seed = derive_seed(seed, index);
  return e;
}

PowerRunConfig::PowerRunConfig()
    : data_models{GammaModel{{2.0, 5.0}}, GammaGlmModel{2.0, 5.0, 0.5, {}}, WeibullModel{2.0, 0.2},
                  LognormalModel{0.0, 0.5}} {}

ExperimentConfig PowerRunConfig::experiment(std::size_t model_index) const {
  ExperimentConfig e;
  e.scenario = Scenario::Power;
  e.n = n;
  e.replications = replications;
  e.prior = prior;
  e.statistics = statistics;
  e.data_model = data_models.at(model_index);
  e.ppp.estimator = estimator;
  e.ppp.mcmc = mcmc;
  e.ppp.predictive_refit_mcmc = predictive_refit_mcmc;
  e.ppp.m_draws = m_draws;
  e.master_seed = derive_seed(seed, model_index);
  return e;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("config", path.string() + " is not valid JSON: " + e.what());
  }
}

PppRunConfig parse_ppp_config(const json& j) {
  Fields f(j, "");
  PppRunConfig c;
  check_scenario(f, "ppp");
  if (const json* p = f.find("prior")) c.prior = parse_prior(*p, "prior").second;
  if (const json* e = f.find("estimator")) c.ppp.estimator = parse_estimator(*e, "estimator");
  c.statistics = parse_statistics(f.find("statistics"), "statistics", c.statistics);
  c.ppp.mcmc = parse_mcmc(f.find("mcmc"), "mcmc", c.ppp.mcmc);
  c.ppp.predictive_refit_mcmc =
      parse_mcmc(f.find("predictive_refit_mcmc"), "predictive_refit_mcmc", c.ppp.predictive_refit_mcmc);
  c.ppp.m_draws = f.count("m_draws", c.ppp.mcmc.retained());
  c.seed = f.count("seed", c.seed);
  c.data = f.text("data", "");
  c.covariates = f.text("covariates", "");
  f.finish();
  check_ppp(c.ppp);
  return c;
}

CalibrationRunConfig parse_calibration_config(const json& j) {
  Fields f(j, "");
  CalibrationRunConfig c;
  check_scenario(f, "null_calibration");
  if (const json* g = f.find("grid")) {
    Fields fg(*g, "grid");
    c.priors = parse_list(fg.find("priors"), "grid.priors", c.priors, parse_prior);
    c.estimators = parse_list(fg.find("estimators"), "grid.estimators", c.estimators, parse_estimator);
    c.sample_sizes = parse_list(fg.find("sample_sizes"), "grid.sample_sizes", c.sample_sizes,
                                [](const json& v, const std::string& p) {
                                  const auto n = Fields::as_count(v, p);
                                  if (n < 2) throw ConfigError(p, "sample size must be >= 2");
                                  return static_cast<std::size_t>(n);
                                });
    fg.finish();
    for (std::size_t i = 0; i < c.priors.size(); ++i)
      for (std::size_t k = 0; k < i; ++k)
        if (c.priors[i].first == c.priors[k].first)
          throw ConfigError("grid.priors", "duplicate prior name " + c.priors[i].first);
  }
  c.replications = f.count("replications", c.replications);
  if (c.replications < 1) throw ConfigError("replications", "must be >= 1");
  c.statistics = parse_statistics(f.find("statistics"), "statistics", c.statistics);
  for (auto k : c.statistics)
    if (needs_covariates(k)) throw ConfigError("statistics", "the score statistic needs covariates; use the power command");
  if (const json* t = f.find("truth")) {
    Fields ft(*t, "truth");
    c.truth.alpha = ft.real("alpha", c.truth.alpha);
    c.truth.beta = ft.real("beta", c.truth.beta);
    ft.finish();
    if (!c.truth.valid()) throw ConfigError("truth", "alpha and beta must be positive and finite");
  }
  c.mcmc = parse_mcmc(f.find("mcmc"), "mcmc", c.mcmc);
  c.predictive_refit_mcmc = parse_mcmc(f.find("predictive_refit_mcmc"), "predictive_refit_mcmc", c.predictive_refit_mcmc);
  c.m_draws = f.count("m_draws", c.m_draws);
  c.seed = f.count("seed", c.seed);
  f.finish();
  for (const auto& cell : c.cells()) check_ppp(c.experiment(cell, 0).ppp);
  return c;
}

PowerRunConfig parse_power_config(const json& j) {
  Fields f(j, "");
  PowerRunConfig c;
  check_scenario(f, "power");
  c.data_models = parse_list(f.find("data_models"), "data_models", c.data_models, parse_model);
  c.n = f.count("n", c.n);
  if (c.n < 2) throw ConfigError("n", "sample size must be >= 2");
  c.replications = f.count("replications", c.replications);
  if (c.replications < 1) throw ConfigError("replications", "must be >= 1");
  if (const json* p = f.find("prior")) std::tie(c.prior_name, c.prior) = parse_prior(*p, "prior");
  if (const json* e = f.find("estimator")) c.estimator = parse_estimator(*e, "estimator");
  c.statistics = parse_statistics(f.find("statistics"), "statistics", c.statistics);
  c.mcmc = parse_mcmc(f.find("mcmc"), "mcmc", c.mcmc);
  c.predictive_refit_mcmc = parse_mcmc(f.find("predictive_refit_mcmc"), "predictive_refit_mcmc", c.predictive_refit_mcmc);
  c.m_draws = f.count("m_draws", c.m_draws);
  c.seed = f.count("seed", c.seed);
  f.finish();
  check_ppp(c.experiment(0).ppp);
  return c;
}

json to_json(const McmcSettings& s) {
  return {{"burn_in", s.burn_in},
          {"iterations", s.iterations},
          {"thin", s.thin},
          {"initial_step", s.initial_step},
          {"adapt", s.adapt},
          {"target_acceptance", s.target_acceptance},
          {"adapt_covariance", s.adapt_covariance}};
}

json to_json(const PriorSpec& p) {
  return {{"alpha", {{"family", "truncated_normal"}, {"mean", p.alpha.mean}, {"variance", p.alpha.variance}}},
          {"beta", {{"family", "gamma"}, {"shape", p.beta.shape}, {"rate", p.beta.rate}}}};
}

json to_json(const ModelSpec& m) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GammaModel>) {
          return {{"family", "gamma"}, {"alpha", v.params.alpha}, {"beta", v.params.beta}};
        } else if constexpr (std::is_same_v<T, WeibullModel>) {
          return {{"family", "weibull"}, {"shape", v.shape}, {"scale", v.scale}};
        } else if constexpr (std::is_same_v<T, LognormalModel>) {
          return {{"family", "lognormal"}, {"mu", v.mu}, {"sigma", v.sigma}};
        } else {
          return {{"family", "gamma_glm"}, {"alpha0", v.alpha0}, {"beta0", v.beta0}, {"theta0", v.theta0}};
        }
      },
      m);
}

std::string model_label(const ModelSpec& m) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GammaModel>) return "gamma";
        else if constexpr (std::is_same_v<T, WeibullModel>) return "weibull";
        else if constexpr (std::is_same_v<T, LognormalModel>) return "lognormal";
        else return "gamma_glm";
      },
      m);
}

json to_json(const PppRunConfig& c) {
  json j = {{"scenario", "ppp"},
            {"prior", to_json(c.prior)},
            {"estimator", std::string(to_string(c.ppp.estimator))},
            {"statistics", statistics_json(c.statistics)},
            {"mcmc", to_json(c.ppp.mcmc)},
            {"predictive_refit_mcmc", to_json(c.ppp.predictive_refit_mcmc)},
            {"m_draws", c.ppp.resolved_m_draws()},
            {"seed", c.seed},
            {"data", c.data},
            {"covariates", c.covariates}};
  return j;
}

json to_json(const CalibrationRunConfig& c) {
  json priors = json::array();
  for (const auto& [name, p] : c.priors) {
    json pj = to_json(p);
    pj["name"] = name;
    priors.push_back(pj);
  }
  json estimators = json::array();
  for (auto e : c.estimators) estimators.push_back(std::string(to_string(e)));
  return {{"scenario", "null_calibration"},
          {"grid", {{"priors", priors}, {"estimators", estimators}, {"sample_sizes", c.sample_sizes}}},
          {"replications", c.replications},
          {"statistics", statistics_json(c.statistics)},
          {"truth", {{"alpha", c.truth.alpha}, {"beta", c.truth.beta}}},
          {"mcmc", to_json(c.mcmc)},
          {"predictive_refit_mcmc", to_json(c.predictive_refit_mcmc)},
          {"m_draws", c.m_draws},
          {"seed", c.seed}};
}

json to_json(const PowerRunConfig& c) {
  json models = json::array();
  for (const auto& m : c.data_models) models.push_back(to_json(m));
  json prior = to_json(c.prior);
  prior["name"] = c.prior_name;
  return {{"scenario", "power"},
          {"data_models", models},
          {"n", c.n},
          {"replications", c.replications},
          {"prior", prior},
          {"estimator", std::string(to_string(c.estimator))},
          {"statistics", statistics_json(c.statistics)},
          {"mcmc", to_json(c.mcmc)},
          {"predictive_refit_mcmc", to_json(c.predictive_refit_mcmc)},
          {"m_draws", c.m_draws},
          {"seed", c.seed}};
}

}  // namespace pppks::cli
