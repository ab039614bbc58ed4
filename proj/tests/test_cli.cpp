#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"
#include "output.hpp"
#include "pppks/errors.hpp"

using namespace pppks;
using namespace pppks::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("pppks_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path file(const std::string& name, const std::string& contents) const {
    std::ofstream(path / name, std::ios::binary) << contents;
    return path / name;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "pppks");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < s.size()) {
    const auto end = s.find("\r\n", start);
    out.push_back(s.substr(start, end - start));
    start = end + 2;
  }
  return out;
}

const char* kSmallChain = R"("mcmc": {"burn_in": 200, "iterations": 500, "thin": 1})";

std::string demo_data() {
  RandomStream rng(901);
  const Dataset d = sample_dataset(GammaModel{{2.0, 5.0}}, 25, rng);
  std::string out = "# gamma sample\n";
  for (double y : d.values()) out += format_number(y) + "\n";
  return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("format_number round-trips and ignores the locale") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123, -2.5}) CHECK(std::stod(format_number(v)) == v);
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("CSV quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CsvTable t({"x", "y"});
  t.add({"1", "two, three"});
  CHECK(t.str() == "x,y\r\n1,\"two, three\"\r\n");
  CHECK_THROWS(t.add({"only one"}));
}

TEST_CASE("histogram bins") {
  const double v[] = {0.0, 0.04, 0.05, 0.5, 0.99, 1.0};
  const auto c = histogram_counts(v, 20);
  CHECK(c.size() == 20);
  CHECK(c[0] == 2);
  CHECK(c[1] == 1);
  CHECK(c[10] == 1);
  CHECK(c[19] == 2);
  const std::string svg = svg_histogram(v, "t < 1");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("t &lt; 1") != std::string::npos);
  std::size_t bins = 0;
  for (auto pos = svg.find("class=\"bin\""); pos != std::string::npos; pos = svg.find("class=\"bin\"", pos + 1)) ++bins;
  CHECK(bins == 20);
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("read_observations") {
  TempDir t;
  const auto v = read_observations(t.file("d.txt", "1.5\n\n  2e-3 \r\n# note\n4 # trailing\n"));
  REQUIRE(v.size() == 3);
  CHECK(v[1] == 2e-3);
  CHECK_THROWS_AS(read_observations(t.file("bad.txt", "1.0\nabc\n")), DataError);
  CHECK_THROWS_AS(read_observations(t.file("comma.txt", "1,5\n")), DataError);
  CHECK_THROWS_AS(read_observations(t.file("empty.txt", "\n# nothing\n")), DataError);
  CHECK_THROWS_AS(read_observations(t.path / "missing.txt"), DataError);
}

TEST_CASE("worker resolution") {
  ::unsetenv("PPPKS_WORKERS");
  CHECK(resolve_workers(std::nullopt) == 1);
  CHECK(resolve_workers(4u) == 4);
  CHECK_THROWS_AS(resolve_workers(0u), ConfigError);
  ::setenv("PPPKS_WORKERS", "3", 1);
  CHECK(resolve_workers(std::nullopt) == 3);
  CHECK(resolve_workers(2u) == 2);
  ::setenv("PPPKS_WORKERS", "many", 1);
  CHECK_THROWS_AS(resolve_workers(std::nullopt), ConfigError);
  ::unsetenv("PPPKS_WORKERS");
}

TEST_CASE("config parsing names the offending field") {
  auto field_of = [](auto parse, const char* text) -> std::string {
    try {
      parse(json::parse(text));
    } catch (const ConfigError& e) {
      return e.field();
    }
    return "";
  };
  CHECK(field_of(parse_ppp_config, R"({"mcmc": {"thin": 0}})") == "mcmc.thin");
  CHECK(field_of(parse_ppp_config, R"({"m_draws": 10})") == "m_draws");
  CHECK(field_of(parse_ppp_config, R"({"estimator": "median"})") == "estimator");
  CHECK(field_of(parse_ppp_config, R"({"statistics": ["ks", "nope"]})") == "statistics[1]");
  CHECK(field_of(parse_ppp_config, R"({"colour": 1})") == "colour");
  CHECK(field_of(parse_ppp_config, R"({"prior": {"alpha": {"mean": 1, "variance": -1}, "beta": {}}})") == "prior");
  CHECK(field_of(parse_calibration_config, R"({"scenario": "power"})") == "scenario");
  CHECK(field_of(parse_calibration_config, R"({"grid": {"sample_sizes": [1]}})") == "grid.sample_sizes[0]");
  CHECK(field_of(parse_calibration_config, R"({"replications": -3})") == "replications");
  CHECK(field_of(parse_power_config, R"({"data_models": [{"family": "cauchy"}]})") == "data_models[0].family");
  CHECK(field_of(parse_power_config, R"({"data_models": [{"family": "weibull", "shape": -1}]})") == "data_models[0]");
}

TEST_CASE("resolved configs are explicit and stable") {
  const auto cal = parse_calibration_config(json::parse(R"({"grid": {"priors": ["good", "bad"]}})"));
  const json resolved = to_json(cal);
  CHECK(resolved["grid"]["priors"][1]["alpha"]["variance"] == 0.5);
  CHECK(resolved["mcmc"]["burn_in"] == 1000);
  CHECK(resolved["m_draws"] == 500);
  CHECK(to_json(parse_calibration_config(resolved)) == resolved);
  CHECK(cal.cells().size() == 2);

  const auto power = parse_power_config(json::parse("{}"));
  CHECK(power.data_models.size() == 4);
  CHECK(to_json(parse_power_config(to_json(power))) == to_json(power));
  const auto ppp = parse_ppp_config(json::parse("{}"));
  CHECK(to_json(ppp)["m_draws"] == 1000);
  CHECK(to_json(parse_ppp_config(to_json(ppp))) == to_json(ppp));
}

TEST_CASE("figure grid has sixteen cells") {
  const auto cal = parse_calibration_config(json::parse(
      R"({"grid": {"priors": ["good", "bad"], "estimators": ["mle", "posterior_mean"], "sample_sizes": [10, 20, 100, 500]}})"));
  const auto cells = cal.cells();
  CHECK(cells.size() == 16);
  CHECK(cells[0].label() == "good_mle_n10");
  CHECK(cells[15].label() == "bad_posterior_mean_n500");
  CHECK(cal.experiment(cells[3], 3).master_seed != cal.experiment(cells[4], 4).master_seed);
}

TEST_CASE("ppp command exit codes") {
  TempDir t;
  const auto data = t.file("data.txt", demo_data());
  const auto cfg = t.file("ppp.json", std::string("{") + kSmallChain + R"(, "m_draws": 100, "data": "data.txt"})");
  const std::string out = (t.path / "out").string();
  CHECK(run_args({"ppp", "--config", (t.path / "missing.json").string(), "--out", out}) == kExitConfig);
  CHECK(run_args({"ppp", "--config", t.file("broken.json", "{").string(), "--out", out}) == kExitConfig);
  CHECK(run_args({"ppp", "--out", out}) == kExitConfig);
  CHECK(run_args({"ppp", "--config", t.file("m.json", R"({"m_draws": 5})").string(), "--out", out}) == kExitConfig);
  CHECK(run_args({"ppp", "--config", cfg.string(), "--out", out, "--data", t.file("neg.txt", "1\n-2\n").string()}) == kExitData);
  CHECK(run_args({"ppp", "--config", cfg.string(), "--out", out, "--data", t.file("txt.txt", "1\nx\n").string()}) == kExitData);
  CHECK(run_args({"ppp", "--config", cfg.string(), "--out", out, "--data", t.file("same.txt", "2\n2\n2\n").string()}) == kExitData);
  CHECK(run_args({"ppp", "--config", cfg.string(), "--out", out, "--data", (t.path / "nofile.txt").string()}) == kExitData);
  const auto score = t.file("score.json", std::string("{") + kSmallChain + R"(, "m_draws": 100, "data": "data.txt", "statistics": ["score"]})");
  CHECK(run_args({"ppp", "--config", score.string(), "--out", out}) == kExitConfig);
  CHECK(run_args({"ppp", "--config", cfg.string(), "--out", out, "--workers", "0"}) == kExitConfig);
}

TEST_CASE("ppp command writes results and a manifest") {
  TempDir t;
  t.file("data.txt", demo_data());
  t.file("x.txt", demo_data());
  const auto cfg = t.file("ppp.json", std::string("{") + kSmallChain +
                                           R"(, "m_draws": 100, "data": "data.txt", "covariates": "x.txt",
                                              "statistics": ["ks", "chisq", "score"], "seed": 3})");
  const auto a = t.path / "a", b = t.path / "b", c = t.path / "c";
  REQUIRE(run_args({"ppp", "--config", cfg.string(), "--out", a.string()}) == kExitOk);
  REQUIRE(run_args({"ppp", "--config", cfg.string(), "--out", b.string()}) == kExitOk);
  REQUIRE(run_args({"ppp", "--config", cfg.string(), "--out", c.string(), "--seed", "4"}) == kExitOk);

  const json result = json::parse(slurp(a / "result.json"));
  REQUIRE(result["results"].size() == 3);
  for (const auto& r : result["results"]) {
    CHECK(r["p_value"].get<double>() >= 0.0);
    CHECK(r["p_value"].get<double>() <= 1.0);
    CHECK(r["m_draws"] == 100);
  }
  CHECK(result["results"][1]["two_sided_p"].is_number());
  CHECK(result["results"][0]["two_sided_p"].is_null());
  const auto lines = split_lines(slurp(a / "replicates.csv"));
  CHECK(lines.size() == 101);
  CHECK(lines[0] == "draw,alpha,beta,t_ks,t_chisq,t_score");

  CHECK(slurp(a / "result.json") == slurp(b / "result.json"));
  CHECK(slurp(a / "replicates.csv") == slurp(b / "replicates.csv"));
  CHECK(slurp(a / "replicates.csv") != slurp(c / "replicates.csv"));

  const json manifest = json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["tool_version"] == "0.1.0");
  CHECK(manifest["config_digest"] == config_digest(manifest["resolved_config"]));
  CHECK(manifest["resolved_config"]["seed"] == 3);
  CHECK(manifest["files"].size() == 2);
  CHECK(json::parse(slurp(c / "manifest.json"))["resolved_config"]["seed"] == 4);
  CHECK(manifest["config_digest"] != json::parse(slurp(c / "manifest.json"))["config_digest"]);
}

TEST_CASE("calibration command outputs") {
  TempDir t;
  const auto cfg = t.file("cal.json", std::string(R"({"scenario": "null_calibration",
      "grid": {"priors": ["good", "bad"], "estimators": ["mle"], "sample_sizes": [10, 30]},
      "replications": 8, "m_draws": 100, )") + kSmallChain + "}");
  const auto out = t.path / "out";
  REQUIRE(run_args({"calibration", "--config", cfg.string(), "--out", out.string(), "--workers", "2"}) == kExitOk);
  std::size_t csv = 0, svg = 0, manifests = 0;
  for (const auto& e : fs::directory_iterator(out)) {
    csv += e.path().extension() == ".csv";
    svg += e.path().extension() == ".svg";
    manifests += e.path().filename() == "manifest.json";
  }
  CHECK(csv == 4);
  CHECK(svg == 4);
  CHECK(manifests == 1);
  const auto lines = split_lines(slurp(out / "calibration_bad_mle_n30.csv"));
  CHECK(lines.size() == 9);
  CHECK(lines[0] == "replication,statistic,ok,ppp,two_sided_p,t_obs,alpha_hat,beta_hat,acceptance_rate,error");
  const json summary = json::parse(slurp(out / "summary.json"));
  REQUIRE(summary["cells"].size() == 4);
  for (const auto& c : summary["cells"]) CHECK(c["statistics"][0]["uniformity_ks_distance"].is_number());
  const std::string hist = slurp(out / "hist_good_mle_n10_ks.svg");
  CHECK(hist.rfind("<?xml", 0) == 0);

  const auto quiet = t.path / "quiet";
  REQUIRE(run_args({"calibration", "--config", cfg.string(), "--out", quiet.string(), "--no-plots"}) == kExitOk);
  for (const auto& e : fs::directory_iterator(quiet)) {
    CHECK(e.path().extension() != ".svg");
    if (e.path().extension() == ".csv") CHECK(slurp(e.path()) == slurp(out / e.path().filename()));
  }
  CHECK(run_args({"calibration", "--config", t.file("p.json", R"({"scenario": "power"})").string(), "--out",
                  quiet.string()}) == kExitConfig);
}

TEST_CASE("power command rejection table") {
  TempDir t;
  const auto cfg = t.file("power.json", std::string(R"({"scenario": "power", "n": 30, "replications": 6,
      "m_draws": 100, )") + kSmallChain + "}");
  const auto out = t.path / "out";
  REQUIRE(run_args({"power", "--config", cfg.string(), "--out", out.string(), "--no-plots"}) == kExitOk);
  const auto lines = split_lines(slurp(out / "rejection_table.csv"));
  REQUIRE(lines.size() == 13);
  CHECK(lines[0] == "data_model,statistic,used,excluded,reject_0.01,reject_0.05,reject_0.1");
  const std::regex row(R"([a-z_]+,(ks|chisq|score),6,0,[0-9.e-]+,[0-9.e-]+,[0-9.e-]+)");
  for (std::size_t i = 1; i < lines.size(); ++i) CHECK(std::regex_match(lines[i], row));
  CHECK(fs::exists(out / "power_gamma_glm_score.csv"));
  CHECK(fs::exists(out / "power_weibull_chisq.csv"));
}

TEST_CASE("bundled demo config runs") {
  TempDir t;
  const fs::path dir = PPPKS_CONFIG_DIR;
  REQUIRE(run_args({"ppp", "--config", (dir / "demo_ppp.json").string(), "--out", t.path.string()}) == kExitOk);
  const json result = json::parse(slurp(t.path / "result.json"));
  for (const auto& r : result["results"]) {
    CHECK(r["p_value"].get<double>() >= 0.0);
    CHECK(r["p_value"].get<double>() <= 1.0);
  }
  CHECK(split_lines(slurp(t.path / "replicates.csv")).size() == 1001);
  for (const char* name : {"calibration_quick.json", "calibration_grid.json", "power.json"}) {
    CAPTURE(name);
    const json j = load_json(dir / name);
    if (j["scenario"] == "power") {
      CHECK(parse_power_config(j).data_models.size() == 4);
    } else {
      CHECK_NOTHROW(parse_calibration_config(j));
    }
  }
  CHECK(parse_calibration_config(load_json(dir / "calibration_grid.json")).cells().size() == 16);
}

TEST_CASE("selftest exit codes") {
  CHECK(cmd_selftest(std::nullopt, 0.0) == kExitFailure);
}

}  // TEST_SUITE
