#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "becca/cli.hpp"
#include "becca/csv.hpp"
#include "becca/diagnostics.hpp"
#include "becca/evaluation.hpp"

using namespace becca;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("becca_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "becca");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) { return read_file(p.string()); }

}  // namespace

TEST_CASE("simulate writes the data, truth and manifest") {
  const fs::path out = fresh_dir("simulate");
  REQUIRE(run({"simulate", "--n", "100", "--p", "50", "--q", "10", "--seed", "4", "--out", out.string()}) == 0);
  const CsvTable data = parse_csv(slurp(out / "data.csv"));
  CHECK(data.header.size() == 51);
  CHECK(data.rows.size() == 100);
  CHECK(parse_csv(slurp(out / "truth.csv")).rows.size() == 50);

  const fs::path replay = fresh_dir("simulate_replay");
  REQUIRE(run({"simulate", "--config", (out / "manifest.toml").string(), "--out", replay.string()}) == 0);
  CHECK(slurp(out / "data.csv") == slurp(replay / "data.csv"));
  CHECK(slurp(out / "truth.csv") == slurp(replay / "truth.csv"));
}

TEST_CASE("invalid configuration fails before writing anything") {
  const fs::path out = fresh_dir("invalid");
  CHECK(run({"simulate", "--p", "5", "--q", "6", "--out", out.string()}) == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK(run({"cv", "--folds", "1", "--data", "nowhere.csv", "--out", out.string()}) == 2);
  CHECK(run({"fit", "--model", "probit", "--out", out.string()}) == 2);
  CHECK(run({"fit", "--chains", "many", "--out", out.string()}) == 2);
  CHECK_FALSE(fs::exists(out));

  const fs::path cfg = fresh_dir("invalid_cfg");
  fs::create_directories(cfg);
  std::ofstream(cfg / "run.toml") << "n=30\nno_such_key=1\n";
  CHECK(run({"simulate", "--config", (cfg / "run.toml").string(), "--out", out.string()}) == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("missing data file is a data error") {
  const fs::path out = fresh_dir("nodata");
  CHECK(run({"fit", "--data", (out / "absent.csv").string(), "--out", out.string(), "--warmup", "100",
             "--draws", "10"}) == 3);
}

TEST_CASE("environment overrides the config file but not the command line") {
  const fs::path out = fresh_dir("env");
  fs::create_directories(out);
  std::ofstream(out / "run.toml") << "n=30\np=4\nq=2\n";
  ::setenv("BECCA_N", "12", 1);
  REQUIRE(run({"simulate", "--config", (out / "run.toml").string(), "--out", (out / "a").string()}) == 0);
  CHECK(parse_csv(slurp(out / "a" / "data.csv")).rows.size() == 12);
  REQUIRE(run({"simulate", "--config", (out / "run.toml").string(), "--n", "9", "--out", (out / "b").string()}) == 0);
  CHECK(parse_csv(slurp(out / "b" / "data.csv")).rows.size() == 9);
  ::unsetenv("BECCA_N");
  REQUIRE(run({"simulate", "--config", (out / "run.toml").string(), "--out", (out / "c").string()}) == 0);
  CHECK(parse_csv(slurp(out / "c" / "data.csv")).rows.size() == 30);
}

TEST_CASE("fit, select and the draw file") {
  const fs::path out = fresh_dir("fit");
  REQUIRE(run({"simulate", "--n", "50", "--p", "5", "--q", "2", "--seed", "2", "--out", out.string()}) == 0);
  const std::string data = (out / "data.csv").string();
  const std::vector<std::string> common{"--data", data, "--warmup", "300", "--draws", "200", "--chains", "2"};

  std::vector<std::string> fit_args{"fit", "--out", (out / "fit").string(), "--trace", "beta[1],g", "--select", "true"};
  fit_args.insert(fit_args.end(), common.begin(), common.end());
  REQUIRE(run(fit_args) == 0);
  const fs::path dir = out / "fit" / "becca";
  const CsvTable draws = parse_csv(slurp(dir / "draws.csv"));
  CHECK(draws.rows.size() == 2 * 200);
  CHECK(parse_csv(slurp(dir / "trace.csv")).rows.size() == 2 * 2 * 200);
  CHECK(fs::exists(dir / "diagnostics.txt"));
  CHECK(fs::exists(dir / "sampler.csv"));
  CHECK(fs::exists(out / "fit" / "config.toml"));

  // Reproducible from the resolved config.
  REQUIRE(run({"fit", "--config", (out / "fit" / "config.toml").string(), "--out", (out / "refit").string()}) == 0);
  CHECK(slurp(dir / "draws.csv") == slurp(out / "refit" / "becca" / "draws.csv"));

  // Selection from the draw file agrees with medians recomputed here.
  REQUIRE(run({"select", "--draws-file", (dir / "draws.csv").string(), "--out", (out / "sel").string()}) == 0);
  const CsvTable sel = parse_csv(slurp(out / "sel" / "selection.csv"));
  const MatrixXd values = numeric_columns(draws);
  for (Index j = 0; j < 5; ++j) {
    const auto col = std::find(draws.header.begin(), draws.header.end(), "gamma[" + std::to_string(j + 1) + "]") -
                     draws.header.begin();
    const double median = quantile(values.col(col), 0.5);
    CHECK(std::stod(sel.rows[j][1]) == doctest::Approx(median).epsilon(1e-12));
    CHECK(sel.rows[j][2] == (median > 0.5 ? "1" : "0"));
  }
  const CsvTable heat = parse_csv(slurp(out / "sel" / "heatmap.csv"));
  CHECK(heat.rows.size() <= 100);
  CHECK(heat.header.size() == 6);
  for (size_t i = 1; i < heat.rows.size(); ++i) CHECK(std::stod(heat.rows[i - 1][5]) >= std::stod(heat.rows[i][5]));

  std::vector<std::string> dl_args{"fit", "--prior", "dl", "--select", "true", "--out", (out / "dl").string()};
  dl_args.insert(dl_args.end(), common.begin(), common.end());
  CHECK(run(dl_args) == 2);
  CHECK(run({"select", "--prior", "dl", "--draws-file", (dir / "draws.csv").string(), "--out",
             (out / "dlsel").string()}) == 2);
}

TEST_CASE("cv on a data file") {
  const fs::path out = fresh_dir("cv");
  REQUIRE(run({"simulate", "--model", "logistic", "--n", "60", "--p", "4", "--q", "2", "--out", out.string()}) == 0);
  REQUIRE(run({"cv", "--model", "logistic", "--prior", "becca", "--data", (out / "data.csv").string(), "--folds",
               "3", "--warmup", "150", "--draws", "100", "--chains", "2", "--out", (out / "cv").string()}) == 0);
  const CsvTable t = parse_csv(slurp(out / "cv" / "table.csv"));
  REQUIRE(t.rows.size() == 5);
  CHECK(t.rows[0][0] == "acc");
  CHECK(t.rows[4][0] == "f1");
}

TEST_CASE("marginal curves") {
  const fs::path out = fresh_dir("marginal");
  REQUIRE(run({"marginal", "--gamma-points", "19", "--beta-points", "10", "--out", out.string()}) == 0);
  const CsvTable gamma = parse_csv(slurp(out / "marginal_gamma.csv"));
  CHECK(gamma.header == std::vector<std::string>{"x", "density", "prior", "status"});
  std::vector<double> becca, ref;
  for (const auto& row : gamma.rows) {
    CHECK(row[3] == "ok");
    (row[2] == "becca" ? becca : ref).push_back(std::stod(row[1]));
  }
  REQUIRE(becca.size() == 19);
  REQUIRE(ref.size() == 19);
  for (size_t i = 0; i < 19; ++i) CHECK(becca[i] == doctest::Approx(becca[18 - i]).epsilon(1e-6));
  CHECK(ref[9] == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-12));

  const CsvTable logit = parse_csv(slurp(out / "marginal_logit_gamma.csv"));
  double trapezoid = 0.0, prev_x = 0.0, prev_y = 0.0;
  bool first = true;
  for (const auto& row : logit.rows) {
    if (row[2] != "becca") continue;
    const double x = std::stod(row[0]), y = std::stod(row[1]);
    if (!first) trapezoid += 0.5 * (x - prev_x) * (y + prev_y);
    first = false;
    prev_x = x;
    prev_y = y;
  }
  CHECK(trapezoid == doctest::Approx(1.0).epsilon(0.01));

  const CsvTable beta = parse_csv(slurp(out / "marginal_beta.csv"));
  CHECK(beta.rows.size() == 30);
  for (size_t i = 0; i < 10; ++i)
    CHECK(std::stod(beta.rows[i][1]) == doctest::Approx(std::stod(beta.rows[9 - i][1])).epsilon(1e-6));
}
