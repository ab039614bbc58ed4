#include "commands.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "config.hpp"
#include "output.hpp"
#include "pppks/errors.hpp"
#include "selftest.hpp"

namespace pppks::cli {

namespace {

// Maps library exceptions to exit codes; everything else is a plain failure.
template <class F>
int guarded(const char* command, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << command << ": config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << command << ": data error: " << e.what() << '\n';
    return kExitData;
  } catch (const DegenerateDataError& e) {
    std::cerr << command << ": data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    std::cerr << command << ": numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DomainError& e) {
    std::cerr << command << ": numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << command << ": " << e.what() << '\n';
    return kExitFailure;
  }
}

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

CsvTable rows_table(const ExperimentResult& r, std::optional<StatisticKind> only) {
  CsvTable t({"replication", "statistic", "ok", "ppp", "two_sided_p", "t_obs", "alpha_hat", "beta_hat",
              "acceptance_rate", "error"});
  for (const auto& row : r.rows) {
    if (only && row.statistic != *only) continue;
    if (row.ok) {
      t.add({std::to_string(row.replication), std::string(to_string(row.statistic)), "1", format_number(row.ppp),
             optional_number(row.two_sided_p), format_number(row.t_obs), format_number(row.estimate.alpha),
             format_number(row.estimate.beta), format_number(row.acceptance_rate), ""});
    } else {
      t.add({std::to_string(row.replication), std::string(to_string(row.statistic)), "0", "", "", "", "", "", "",
             row.error});
    }
  }
  return t;
}

json summary_json(const StatisticSummary& s) {
  json rates = json::object();
  for (std::size_t i = 0; i < s.rejection_rates.size(); ++i) rates[format_number(kRejectionLevels[i])] = s.rejection_rates[i];
  return {{"statistic", std::string(to_string(s.statistic))},
          {"used", s.used},
          {"excluded", s.excluded},
          {"uniformity_ks_distance", s.uniformity_ks_distance},
          {"mean", s.mean},
          {"variance", s.variance},
          {"rejection_rates", rates}};
}

ProgressFn progress_printer(const std::string& label) {
  return [label](std::size_t done, std::size_t total) {
    const std::size_t step = std::max<std::size_t>(1, total / 10);
    if (done % step == 0 || done == total) std::cerr << "  " << label << ": " << done << "/" << total << '\n';
  };
}

std::filesystem::path resolve_relative(const std::filesystem::path& base_file, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = base_file.parent_path() / path;
  return path;
}

}  // namespace

std::vector<double> read_observations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file " + path.string());
  std::vector<double> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const char* b = line.data() + first;
    const char* e = line.data() + last + 1;
    double v = 0.0;
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e) {
      throw DataError(path.string() + " line " + std::to_string(lineno) + ": not a number: '" +
                      std::string(b, e) + "'");
    }
    if (!std::isfinite(v)) throw DataError(path.string() + " line " + std::to_string(lineno) + ": value is not finite");
    out.push_back(v);
  }
  if (out.empty()) throw DataError(path.string() + ": no observations");
  return out;
}

unsigned resolve_workers(std::optional<unsigned> flag) {
  if (flag) {
    if (*flag < 1) throw ConfigError("workers", "must be >= 1");
    return *flag;
  }
  if (const char* env = std::getenv("PPPKS_WORKERS"); env != nullptr && *env != '\0') {
    unsigned v = 0;
    const char* end = env + std::strlen(env);
    const auto res = std::from_chars(env, end, v);
    if (res.ec != std::errc() || res.ptr != end || v < 1)
      throw ConfigError("PPPKS_WORKERS", std::string("expected a positive integer, got '") + env + "'");
    return v;
  }
  return 1;
}

int cmd_ppp(const CommonOptions& opt, const std::optional<std::filesystem::path>& data_path) {
  return guarded("ppp", [&] {
    const std::string started = utc_timestamp();
    const unsigned workers = resolve_workers(opt.workers);
    PppRunConfig cfg = parse_ppp_config(load_json(opt.config));
    if (opt.seed) cfg.seed = *opt.seed;
    if (data_path) cfg.data = data_path->string();
    if (cfg.data.empty()) throw ConfigError("data", "no data file given (config key or --data)");
    // Paths from the config file are relative to it; --data is relative to the working directory.
    const auto data_file = data_path ? *data_path : resolve_relative(opt.config, cfg.data);

    const auto y = read_observations(data_file);
    for (std::size_t i = 0; i < y.size(); ++i)
      if (!(y[i] > 0.0)) throw DataError(data_file.string() + ": observation " + std::to_string(i + 1) + " is not positive");
    if (y.size() < 2) throw DataError(data_file.string() + ": need at least 2 observations");
    std::vector<double> x;
    if (!cfg.covariates.empty()) {
      x = read_observations(resolve_relative(opt.config, cfg.covariates));
      if (x.size() != y.size())
        throw DataError("covariates: " + std::to_string(x.size()) + " values for " + std::to_string(y.size()) + " observations");
    }
    for (auto k : cfg.statistics)
      if (needs_covariates(k) && x.empty()) throw ConfigError("covariates", "the score statistic needs a covariate file");

    const Dataset data(y);
    std::cerr << "ppp: n=" << y.size() << ", " << cfg.ppp.resolved_m_draws() << " posterior draws\n";
    RandomStream rng(cfg.seed);
    PppTrace trace;
    const auto results = estimate_ppp(data, cfg.prior, cfg.ppp, cfg.statistics, rng, x, &trace);

    OutputDir out(opt.out);
    json stats = json::array();
    for (const auto& r : results) {
      json s = {{"statistic", std::string(to_string(cfg.statistics[&r - results.data()]))},
                {"p_value", r.p_value},
                {"t_obs", r.t_obs},
                {"m_draws", r.m_draws}};
      s["two_sided_p"] = r.two_sided_p ? json(*r.two_sided_p) : json(nullptr);
      stats.push_back(s);
    }
    const json result = {{"n", y.size()},
                         {"estimator", std::string(to_string(cfg.ppp.estimator))},
                         {"estimate", {{"alpha", results[0].estimate.alpha}, {"beta", results[0].estimate.beta}}},
                         {"acceptance_rate", results[0].acceptance_rate},
                         {"results", stats}};
    out.write("result.json", result.dump(2) + "\n");

    std::vector<std::string> header{"draw", "alpha", "beta"};
    for (auto k : cfg.statistics) header.push_back("t_" + std::string(to_string(k)));
    CsvTable reps(header);
    for (std::size_t m = 0; m < trace.draws.size(); ++m) {
      std::vector<std::string> row{std::to_string(m), format_number(trace.draws[m].alpha),
                                   format_number(trace.draws[m].beta)};
      for (const auto& r : results) row.push_back(format_number(r.t_replicates[m]));
      reps.add(std::move(row));
    }
    out.write("replicates.csv", reps.str());
    out.write_manifest("ppp", to_json(cfg), started, workers);
    for (const auto& s : stats) std::cerr << "ppp: " << s["statistic"].get<std::string>() << " p=" << s["p_value"] << '\n';
    return int(kExitOk);
  });
}

int cmd_calibration(const CommonOptions& opt) {
  return guarded("calibration", [&] {
    const std::string started = utc_timestamp();
    const unsigned workers = resolve_workers(opt.workers);
    CalibrationRunConfig cfg = parse_calibration_config(load_json(opt.config));
    if (opt.seed) cfg.seed = *opt.seed;
    const auto cells = cfg.cells();

    OutputDir out(opt.out);
    json cell_summaries = json::array();
    bool empty_cell = false;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& cell = cells[i];
      std::cerr << "calibration: cell " << i + 1 << "/" << cells.size() << " " << cell.label() << '\n';
      ExperimentConfig e = cfg.experiment(cell, i);
      e.parallelism = workers;
      const auto res = run_null_calibration(e, progress_printer(cell.label()));

      out.write("calibration_" + cell.label() + ".csv", rows_table(res, std::nullopt).str());
      json per_stat = json::array();
      for (const auto& s : res.summary) {
        per_stat.push_back(summary_json(s));
        empty_cell = empty_cell || s.used == 0;
        if (!opt.no_plots) {
          const auto values = res.ppp_values(s.statistic);
          const std::string stat(to_string(s.statistic));
          out.write("hist_" + cell.label() + "_" + stat + ".svg",
                    svg_histogram(values, cell.label() + " " + stat + " (n=" + std::to_string(cell.n) + ")"));
        }
      }
      cell_summaries.push_back({{"label", cell.label()},
                                {"prior", cell.prior_name},
                                {"estimator", std::string(to_string(cell.estimator))},
                                {"n", cell.n},
                                {"replications", cfg.replications},
                                {"statistics", per_stat}});
    }
    out.write("summary.json", json{{"cells", cell_summaries}}.dump(2) + "\n");
    out.write_manifest("calibration", to_json(cfg), started, workers);
    if (empty_cell) {
      std::cerr << "calibration: numerical failure: every replication failed in at least one cell\n";
      return int(kExitNumerical);
    }
    return int(kExitOk);
  });
}

int cmd_power(const CommonOptions& opt) {
  return guarded("power", [&] {
    const std::string started = utc_timestamp();
    const unsigned workers = resolve_workers(opt.workers);
    PowerRunConfig cfg = parse_power_config(load_json(opt.config));
    if (opt.seed) cfg.seed = *opt.seed;

    // File labels per data model, made unique when a family repeats.
    std::vector<std::string> labels;
    std::map<std::string, int> seen;
    for (const auto& m : cfg.data_models) {
      const std::string base = model_label(m);
      const int k = ++seen[base];
      labels.push_back(k == 1 ? base : base + "_" + std::to_string(k));
    }

    OutputDir out(opt.out);
    CsvTable table({"data_model", "statistic", "used", "excluded", "reject_0.01", "reject_0.05", "reject_0.1"});
    json models = json::array();
    bool empty_cell = false;
    for (std::size_t i = 0; i < cfg.data_models.size(); ++i) {
      std::cerr << "power: model " << i + 1 << "/" << cfg.data_models.size() << " " << labels[i] << '\n';
      ExperimentConfig e = cfg.experiment(i);
      e.parallelism = workers;
      const auto res = run_power(e, progress_printer(labels[i]));
      json per_stat = json::array();
      for (const auto& s : res.summary) {
        const std::string stat(to_string(s.statistic));
        out.write("power_" + labels[i] + "_" + stat + ".csv", rows_table(res, s.statistic).str());
        if (!opt.no_plots)
          out.write("hist_" + labels[i] + "_" + stat + ".svg",
                    svg_histogram(res.ppp_values(s.statistic), labels[i] + " " + stat));
        std::vector<std::string> row{labels[i], stat, std::to_string(s.used), std::to_string(s.excluded)};
        for (std::size_t l = 0; l < 3; ++l)
          row.push_back(s.used ? format_number(s.rejection_rates[l]) : "");
        table.add(std::move(row));
        per_stat.push_back(summary_json(s));
        empty_cell = empty_cell || s.used == 0;
      }
      models.push_back({{"label", labels[i]}, {"data_model", to_json(cfg.data_models[i])}, {"statistics", per_stat}});
    }
    out.write("rejection_table.csv", table.str());
    out.write("summary.json", json{{"data_models", models}}.dump(2) + "\n");
    out.write_manifest("power", to_json(cfg), started, workers);
    if (empty_cell) {
      std::cerr << "power: numerical failure: every replication failed for at least one data model\n";
      return int(kExitNumerical);
    }
    return int(kExitOk);
  });
}

int cmd_selftest(const std::optional<std::filesystem::path>& out_dir, double tolerance_scale) {
  return guarded("selftest", [&] {
    const std::string started = utc_timestamp();
    selftest::Options opt;
    opt.tolerance_scale = tolerance_scale;
    const auto groups = selftest::run_all(opt);
    bool all = true;
    json report = json::array();
    for (const auto& g : groups) {
      all = all && g.passed();
      std::cout << (g.passed() ? "PASS " : "FAIL ") << g.group << " (" << g.checks.size() << " checks)\n";
      json checks = json::array();
      for (const auto& c : g.checks) {
        if (!c.passed) std::cout << "  failed: " << c.name << " error=" << c.error << " tolerance=" << c.tolerance << '\n';
        checks.push_back({{"name", c.name}, {"error", c.error}, {"tolerance", c.tolerance}, {"passed", c.passed}});
      }
      report.push_back({{"group", g.group}, {"passed", g.passed()}, {"checks", checks}});
    }
    if (out_dir) {
      OutputDir out(*out_dir);
      out.write("selftest.json", report.dump(2) + "\n");
      out.write_manifest("selftest", json{{"tolerance_scale", tolerance_scale}}, started, 1);
    }
    return all ? int(kExitOk) : int(kExitFailure);
  });
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Posterior predictive p-values for the gamma model"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  CommonOptions common;
  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> selftest_out;
  bool corrupt = false;

  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON configuration file")->required();
    sub->add_option("--out", common.out, "output directory")->required();
    sub->add_option("--seed", common.seed, "override the configured seed");
    sub->add_option("--workers", common.workers, "worker threads (default: PPPKS_WORKERS or 1)");
    sub->add_flag("--no-plots", common.no_plots, "skip SVG histograms");
  };
  auto* ppp = app.add_subcommand("ppp", "posterior predictive p-value for one dataset");
  add_common(ppp);
  ppp->add_option("--data", data, "data file, one observation per line (overrides the config)");
  auto* cal = app.add_subcommand("calibration", "null calibration study");
  add_common(cal);
  auto* pow = app.add_subcommand("power", "power study under alternative models");
  add_common(pow);
  auto* st = app.add_subcommand("selftest", "oracle self-test suites");
  st->add_option("--out", selftest_out, "optional directory for a JSON report");
  st->add_flag("--corrupt-tolerance", corrupt)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? int(kExitOk) : int(kExitConfig);
  }

  if (*ppp) return cmd_ppp(common, data);
  if (*cal) return cmd_calibration(common);
  if (*pow) return cmd_power(common);
  return cmd_selftest(selftest_out, corrupt ? 0.0 : 1.0);
}

}  // namespace pppks::cli
