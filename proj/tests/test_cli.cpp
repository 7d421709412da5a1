#include "rset/cli.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "rset/confidence.hpp"
#include "rset/distance.hpp"
#include "rset/io.hpp"
#include "rset/levelset.hpp"
#include "rset/meanset.hpp"
#include "rset/models.hpp"
#include "rset/parallel.hpp"
#include "rset/regress.hpp"

using namespace rset;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const char* tag) {
  fs::path dir = fs::temp_directory_path() / (std::string("rset-cli-") + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("rset");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

// Runs the CLI with stdout redirected to a file and returns what it printed.
std::string run_capture(const std::vector<std::string>& args, int& code) {
  fs::path out = fs::temp_directory_path() / "rset-cli-stdout.txt";
  std::fflush(stdout);
  int saved = dup(1);
  FILE* f = std::freopen(out.string().c_str(), "w", stdout);
  REQUIRE(f != nullptr);
  code = run_cli(args);
  std::fflush(stdout);
  dup2(saved, 1);
  close(saved);
  std::ifstream in(out);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::string domain_arg(const GridDomain& d) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d,%d", d.x0, d.y0, d.h, d.nx, d.ny);
  return buf;
}

BinaryMask disc_mask(const GridDomain& d, double r) {
  BinaryMask mask(d, false);
  for (int j = 0; j < d.ny; ++j)
    for (int i = 0; i < d.nx; ++i) {
      Point p = coord_of(d, i, j);
      if (std::hypot(p.x, p.y) <= r) mask.set(i, j, true);
    }
  return mask;
}

}  // namespace

TEST_CASE("odf command writes the oriented distance field") {
  fs::path dir = fresh_dir("odf");
  GridDomain d{-1.0, -1.0, 0.125, 17, 17};
  BinaryMask mask = disc_mask(d, 0.5);
  write_mask_pgm(mask, (dir / "mask.pgm").string());
  int code = run_cli({"odf", "--mask", (dir / "mask.pgm").string(), "--domain", domain_arg(d),
                      "--out", (dir / "out").string()});
  CHECK(code == 0);
  ScalarField got = read_field_csv((dir / "out" / "odf.csv").string());
  ScalarField want = oriented_distance(mask);
  CHECK(got.values() == want.values());
}

TEST_CASE("hausdorff command prints the distance") {
  fs::path dir = fresh_dir("haus");
  GridDomain d{0.0, 0.0, 0.5, 12, 9};
  BinaryMask a = disc_mask(d, 2.0);
  write_mask_pgm(a, (dir / "a.pgm").string());
  write_mask_pgm(a, (dir / "b.pgm").string());
  int code = -1;
  std::string text = run_capture(
      {"hausdorff", "--a", (dir / "a.pgm").string(), "--b", (dir / "b.pgm").string(), "--domain",
       domain_arg(d)},
      code);
  CHECK(code == 0);
  CHECK(text == "0\n");

  BinaryMask b(d, false);
  b.set(0, 0, true);
  write_mask_pgm(b, (dir / "b.pgm").string());
  text = run_capture({"hausdorff", "--a", (dir / "a.pgm").string(), "--b",
                      (dir / "b.pgm").string(), "--domain", domain_arg(d)},
                     code);
  CHECK(code == 0);
  CHECK(std::stod(text) == hausdorff(a, b));
}

TEST_CASE("levelset command writes masks and a consistency report") {
  fs::path dir = fresh_dir("lvl");
  GridDomain d{0.0, 0.0, 0.25, 15, 11};
  ScalarField f(d);
  for (int j = 0; j < d.ny; ++j)
    for (int i = 0; i < d.nx; ++i) {
      Point p = coord_of(d, i, j);
      f.set(i, j, std::hypot(p.x - 1.5, p.y - 1.25) - 0.8);
    }
  write_field_csv(f, (dir / "field.csv").string());
  int code = run_cli({"levelset", "--field", (dir / "field.csv").string(), "--p", "0", "--p2",
                      "0.4", "--tol", "0.125", "--out", (dir / "out").string()});
  CHECK(code == 0);
  BinaryMask sub = read_mask_pgm((dir / "out" / "sublevel.pgm").string(), d);
  BinaryMask bnd = read_mask_pgm((dir / "out" / "boundary.pgm").string(), d);
  BinaryMask band = read_mask_pgm((dir / "out" / "band.pgm").string(), d);
  CHECK(sub == sublevel_set(f, 0.0));
  CHECK(bnd == level_boundary(f, 0.0, 0.125));
  CHECK(band == level_band(f, LevelSpec{0.0, 0.4, 0.125}));
  nlohmann::json j = nlohmann::json::parse(slurp(dir / "out" / "consistency.json"));
  CHECK(j.contains("p"));
  CHECK(j.contains("p2"));
  CHECK(j["p"]["satisfied_A"].is_boolean());
}

TEST_CASE("simulate, mean and ci commands chain into a pipeline") {
  fs::path dir = fresh_dir("pipe");
  RandomSetModel model;
  model.kind = ModelKind::disc_random_radius;
  std::ofstream(dir / "model.json") << model_to_json(model);
  GridDomain d{-1.25, -1.25, 0.125, 21, 21};

  int code = run_cli({"simulate", "--model", (dir / "model.json").string(), "--n", "30", "--seed",
                      "212", "--domain", domain_arg(d), "--out", (dir / "stack").string()});
  CHECK(code == 0);
  SampleStack stack = read_stack((dir / "stack").string());
  REQUIRE(stack.fields.size() == 30);
  SampleStack direct = sample_stack(model, d, 30, 212);
  for (int i = 0; i < 30; ++i) CHECK(stack.fields[i].values() == direct.fields[i].values());

  code = run_cli({"mean", "--stack", (dir / "stack").string(), "--tol", "0.13", "--out",
                  (dir / "mean").string()});
  CHECK(code == 0);
  ScalarField mean = read_field_csv((dir / "mean" / "mean_odf.csv").string());
  CHECK(mean.values() == mean_odf(stack).values());
  BinaryMask mset = read_mask_pgm((dir / "mean" / "mean_set.pgm").string(), d);
  CHECK(mset == empirical_mean_set(stack));
  BinaryMask mbnd = read_mask_pgm((dir / "mean" / "mean_boundary.pgm").string(), d);
  CHECK(mbnd == empirical_mean_boundary(stack, 0.13));

  code = run_cli({"ci-boundary", "--stack", (dir / "stack").string(), "--alpha", "0.1",
                  "--replicates", "200", "--seed", "5", "--out", (dir / "ci").string()});
  CHECK(code == 0);
  QuantileReport report = quantile_report_from_json(slurp(dir / "ci" / "quantiles.json"));
  CHECK(report.replicates == 200);
  BinaryMask region = read_mask_pgm((dir / "ci" / "ci_mean_boundary.pgm").string(), d);
  BinaryMask window(d, true);
  CHECK(region == ci_mean_boundary(stack, report.q2, window));

  // Same seed, same bytes; a different seed moves the quantiles.
  code = run_cli({"ci-boundary", "--stack", (dir / "stack").string(), "--alpha", "0.1",
                  "--replicates", "200", "--seed", "5", "--out", (dir / "ci2").string()});
  CHECK(code == 0);
  CHECK(slurp(dir / "ci2" / "quantiles.json") == slurp(dir / "ci" / "quantiles.json"));
  code = run_cli({"ci-boundary", "--stack", (dir / "stack").string(), "--alpha", "0.1",
                  "--replicates", "200", "--seed", "6", "--out", (dir / "ci3").string()});
  CHECK(code == 0);
  CHECK(slurp(dir / "ci3" / "quantiles.json") != slurp(dir / "ci" / "quantiles.json"));

  // ci-mean with an explicit window mask restricted to the right half.
  BinaryMask half(d, false);
  for (int j = 0; j < d.ny; ++j)
    for (int i = d.nx / 2; i < d.nx; ++i) half.set(i, j, true);
  write_mask_pgm(half, (dir / "win.pgm").string());
  code = run_cli({"ci-mean", "--stack", (dir / "stack").string(), "--seed", "5", "--window",
                  (dir / "win.pgm").string(), "--out", (dir / "cim").string()});
  CHECK(code == 0);
  QuantileReport wreport = quantile_report_from_json(slurp(dir / "cim" / "quantiles.json"));
  CHECK(wreport.window_id == "231 of 21x21 cells");
  BinaryMask wregion = read_mask_pgm((dir / "cim" / "ci_mean_set.pgm").string(), d);
  CHECK(wregion == ci_mean_set(stack, wreport.q1, half));
}

TEST_CASE("ci-levelset command consumes a saved quantile report") {
  fs::path dir = fresh_dir("cilvl");
  GridDomain d{0.0, 0.0, 0.2, 16, 6};
  ScalarField f(d);
  for (int j = 0; j < d.ny; ++j)
    for (int i = 0; i < d.nx; ++i) f.set(i, j, 0.3 * coord_of(d, i, j).x - 0.4);
  write_field_csv(f, (dir / "field.csv").string());
  QuantileReport report;
  report.alpha = 0.05;
  report.q1 = 0.8;
  report.q2 = 1.1;
  report.q21 = -0.9;
  report.q22 = 1.3;
  report.se_q2 = 0.05;
  report.replicates = 500;
  report.seed = 1;
  report.window_id = "test";
  std::ofstream(dir / "q.json") << quantile_report_to_json(report);

  int code = run_cli({"ci-levelset", "--field", (dir / "field.csv").string(), "--n", "25", "--p",
                      "0", "--quantiles", (dir / "q.json").string(), "--out",
                      (dir / "sub").string()});
  CHECK(code == 0);
  BinaryMask window(d, true);
  CHECK(read_mask_pgm((dir / "sub" / "ci_levelset.pgm").string(), d) ==
        ci_sublevel(f, 25, 0.0, 0.8, window));

  code = run_cli({"ci-levelset", "--field", (dir / "field.csv").string(), "--n", "25", "--p",
                  "-0.1", "--p2", "0.1", "--quantiles", (dir / "q.json").string(), "--out",
                  (dir / "band").string()});
  CHECK(code == 0);
  CHECK(read_mask_pgm((dir / "band" / "ci_levelset.pgm").string(), d) ==
        ci_band(f, 25, -0.1, 0.1, 1.1, window));

  code = run_cli({"ci-levelset", "--field", (dir / "field.csv").string(), "--n", "25", "--p",
                  "0", "--boundary", "--asym", "--quantiles", (dir / "q.json").string(), "--out",
                  (dir / "asym").string()});
  CHECK(code == 0);
  CHECK(read_mask_pgm((dir / "asym" / "ci_levelset.pgm").string(), d) ==
        ci_band_asym(f, 25, 0.0, 0.0, -0.9, 1.3, window));
}

TEST_CASE("coverage command writes a rate and a JSON summary") {
  fs::path dir = fresh_dir("cov");
  RandomSetModel model;
  model.kind = ModelKind::disc_random_radius;
  std::ofstream(dir / "model.json") << model_to_json(model);
  GridDomain d{-1.0, -1.0, 0.2, 11, 11};
  int code = -1;
  std::string text = run_capture(
      {"coverage", "--model", (dir / "model.json").string(), "--n", "25", "--trials", "10",
       "--replicates", "80", "--seed", "31", "--domain", domain_arg(d), "--target", "set",
       "--out", dir.string()},
      code);
  CHECK(code == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(dir / "coverage.json"));
  double rate = j["coverage"].get<double>();
  CHECK(std::stod(text) == rate);
  CHECK(rate >= 0.0);
  CHECK(rate <= 1.0);
  CHECK(j["trials"] == 10);
  CHECK(j["target"] == "set");
  double direct = coverage_experiment(model, d, 25, 10, 0.05, 80, 31, CoverageTarget::mean_set);
  CHECK(rate == direct);

  // Fixed quantiles skip the bootstrap: a huge q1 covers every trial.
  QuantileReport wide;
  wide.alpha = 0.05;
  wide.q1 = 100.0;
  wide.q2 = 100.0;
  wide.q21 = -100.0;
  wide.q22 = 100.0;
  wide.se_q2 = 0.0;
  wide.replicates = 1;
  wide.seed = 0;
  wide.window_id = "fixed";
  std::ofstream(dir / "wide.json") << quantile_report_to_json(wide);
  text = run_capture({"coverage", "--model", (dir / "model.json").string(), "--n", "10",
                      "--trials", "6", "--seed", "31", "--domain", domain_arg(d),
                      "--exact-quantiles", (dir / "wide.json").string(), "--out",
                      (dir / "wide").string()},
                     code);
  CHECK(code == 0);
  CHECK(std::stod(text) == 1.0);
}

TEST_CASE("regress command fits, maps and thresholds") {
  fs::path dir = fresh_dir("reg");
  FeatureMap fmap;
  fmap.dims = 2;
  fmap.terms = {{FeatureKind::constant, -1, -1},
                {FeatureKind::log_coord, 0, -1},
                {FeatureKind::log_coord, 1, -1}};
  std::ofstream(dir / "fmap.json") << feature_map_to_json(fmap);
  std::string data = std::string(TEST_DATA_DIR) + "/trees.csv";
  GridDomain d{5.0, 50.0, 1.25, 17, 41};
  int code = run_cli({"regress", "--data", data, "--fmap", (dir / "fmap.json").string(),
                      "--covariates", "girth,height", "--response", "volume", "--log-response",
                      "--level", "3.0", "--domain", domain_arg(d), "--draws", "500", "--seed",
                      "3", "--out", (dir / "out").string()});
  CHECK(code == 0);

  nlohmann::json fit = nlohmann::json::parse(slurp(dir / "out" / "fit.json"));
  CHECK(fit["n"] == 31);
  CHECK(fit["beta"][0].get<double>() == doctest::Approx(-6.6316).epsilon(0.001));
  CHECK(fit["beta"][1].get<double>() == doctest::Approx(1.9826).epsilon(0.001));
  CHECK(fit["sigma"].size() == 3);

  QuantileReport report = quantile_report_from_json(slurp(dir / "out" / "quantiles.json"));
  CHECK(report.q1 > 0.0);
  ScalarField field = read_field_csv((dir / "out" / "field.csv").string());
  CHECK(field.domain().nx == 17);
  BinaryMask estimate = read_mask_pgm((dir / "out" / "estimate.pgm").string(), d);
  BinaryMask region = read_mask_pgm((dir / "out" / "region.pgm").string(), d);
  CHECK(estimate.count_true() > 0);
  CHECK(region.count_true() > estimate.count_true());
  for (std::size_t k = 0; k < d.cell_count(); ++k)
    if (estimate[k]) CHECK(region[k]);

  // The estimate is the plain sublevel set of the predicted field.
  CHECK(estimate == sublevel_set(field, 3.0));
}

TEST_CASE("exit codes separate usage errors from data errors") {
  fs::path dir = fresh_dir("exit");
  GridDomain d{0.0, 0.0, 0.5, 4, 4};

  // Unknown subcommand and missing required options are usage errors.
  CHECK(run_cli({"frobnicate"}) == 1);
  CHECK(run_cli({"odf", "--mask", "x.pgm"}) == 1);
  CHECK(run_cli({"odf", "--mask", "x.pgm", "--domain", "1,2,3"}) == 1);

  // Unreadable input files and degenerate data are data errors.
  CHECK(run_cli({"odf", "--mask", (dir / "missing.pgm").string(), "--domain", domain_arg(d),
                 "--out", dir.string()}) == 2);
  BinaryMask empty(d, false);
  write_mask_pgm(empty, (dir / "empty.pgm").string());
  CHECK(run_cli({"hausdorff", "--a", (dir / "empty.pgm").string(), "--b",
                 (dir / "empty.pgm").string(), "--domain", domain_arg(d)}) == 2);

  ScalarField f(d);
  write_field_csv(f, (dir / "f.csv").string());
  CHECK(run_cli({"levelset", "--field", (dir / "f.csv").string(), "--p", "1", "--p2", "0",
                 "--out", dir.string()}) == 2);

  // A missing model file is a data error, a malformed domain string a usage one.
  CHECK(run_cli({"simulate", "--model", (dir / "nope.json").string(), "--n", "3", "--seed", "1",
                 "--domain", domain_arg(d), "--out", dir.string()}) == 2);
  RandomSetModel model;
  model.kind = ModelKind::disc_random_radius;
  std::ofstream(dir / "model.json") << model_to_json(model);
  CHECK(run_cli({"simulate", "--model", (dir / "model.json").string(), "--n", "3", "--seed", "1",
                 "--domain", "bad", "--out", dir.string()}) == 1);
}

TEST_CASE("thread flag leaves results unchanged") {
  fs::path dir = fresh_dir("thr");
  RandomSetModel model;
  model.kind = ModelKind::interval_random_centre;
  std::ofstream(dir / "model.json") << model_to_json(model);
  GridDomain d{-2.0, 0.0, 0.125, 33, 1};
  for (const char* threads : {"1", "4"}) {
    int code = run_cli({"--threads", threads, "simulate", "--model",
                        (dir / "model.json").string(), "--n", "40", "--seed", "77", "--domain",
                        domain_arg(d), "--out", (dir / (std::string("s") + threads)).string()});
    CHECK(code == 0);
    code = run_cli({"--threads", threads, "ci-mean", "--stack",
                    (dir / (std::string("s") + threads)).string(), "--seed", "11",
                    "--replicates", "150", "--out", (dir / (std::string("c") + threads)).string()});
    CHECK(code == 0);
  }
  for (int i = 0; i < 40; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "b%05d.csv", i);
    CHECK(slurp(dir / "s1" / name) == slurp(dir / "s4" / name));
  }
  CHECK(slurp(dir / "c1" / "quantiles.json") == slurp(dir / "c4" / "quantiles.json"));
  set_thread_count(1);
}
