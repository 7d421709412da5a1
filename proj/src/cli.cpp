#include "rset/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rset/confidence.hpp"
#include "rset/distance.hpp"
#include "rset/error.hpp"
#include "rset/io.hpp"
#include "rset/levelset.hpp"
#include "rset/meanset.hpp"
#include "rset/models.hpp"
#include "rset/parallel.hpp"
#include "rset/regress.hpp"

namespace rset {
namespace {

GridDomain parse_domain(const std::string& spec) {
  GridDomain d;
  char trailing;
  if (std::sscanf(spec.c_str(), "%lf,%lf,%lf,%d,%d%c", &d.x0, &d.y0, &d.h, &d.nx, &d.ny,
                  &trailing) != 5)
    fail(Errc::bad_usage, "--domain expects x0,y0,h,nx,ny, got \"" + spec + "\"");
  d.validate();
  return d;
}

BinaryMask load_window(const std::string& spec, const GridDomain& domain) {
  if (spec == "full") return BinaryMask(domain, true);
  return read_mask_pgm(spec, domain);
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(Errc::io_error, "cannot create output directory " + dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot open " + path + " for writing");
  out << content;
  if (!out) fail(Errc::io_error, "short write to " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json consistency_json(const ConsistencyReport& report) {
  nlohmann::json j;
  j["satisfied_A"] = report.satisfied_A;
  j["satisfied_B"] = report.satisfied_B;
  auto cells = [](const std::vector<std::pair<int, int>>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [i, jj] : v) arr.push_back({i, jj});
    return arr;
  };
  j["condA_violations"] = cells(report.condA_violations);
  j["condB_violations"] = cells(report.condB_violations);
  return j;
}

std::string fit_json(const FittedModel& model) {
  nlohmann::json j;
  j["beta"] = model.beta;
  j["sigma2"] = model.sigma2;
  nlohmann::json rows = nlohmann::json::array();
  const auto m = model.beta.size();
  for (std::size_t r = 0; r < m; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < m; ++c) row.push_back(model.sigma[r * m + c]);
    rows.push_back(row);
  }
  j["sigma"] = rows;
  j["n"] = model.n;
  return j.dump(2);
}

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Level sets, expected sets and expected boundaries of random closed sets:\n"
               "estimation and simultaneous confidence regions on pixel grids."};
  app.require_subcommand(1);

  int threads = 1;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();

  std::string domain_spec, out_dir = ".", window_spec = "full";
  std::string mask_path, path_a, path_b, field_path, stack_dir, model_path, quantiles_path;
  std::string data_path, fmap_path, covariates_csv, response_name, target_name = "set";
  double alpha = 0.05, level_p = 0.0, level_p2 = 0.0, tol = 0.0;
  int n = 0, trials = 100, replicates = 1000, draws = 2000, sign = 1;
  std::uint64_t seed = 0;
  bool asym = false, boundary_band = false, log_response = false;

  CLI::App* odf = app.add_subcommand("odf", "Oriented distance field of a PGM mask");
  odf->add_option("--mask", mask_path, "Input mask (PGM)")->required();
  odf->add_option("--domain", domain_spec, "x0,y0,h,nx,ny of the mask")->required();
  odf->add_option("--out", out_dir, "Output directory")->capture_default_str();

  CLI::App* haus = app.add_subcommand("hausdorff", "Hausdorff distance between two masks");
  haus->add_option("--a", path_a, "First mask (PGM)")->required();
  haus->add_option("--b", path_b, "Second mask (PGM)")->required();
  haus->add_option("--domain", domain_spec, "x0,y0,h,nx,ny of both masks")->required();

  CLI::App* lvl = app.add_subcommand("levelset", "Level sets of a scalar field");
  lvl->add_option("--field", field_path, "Input field (CSV)")->required();
  lvl->add_option("--p", level_p, "Level value")->required();
  lvl->add_option("--p2", level_p2, "Upper level of a band");
  lvl->add_option("--tol", tol, "Boundary tolerance")->capture_default_str();
  lvl->add_option("--out", out_dir, "Output directory")->capture_default_str();

  CLI::App* mean = app.add_subcommand("mean", "Mean ODF, mean set and mean boundary of a stack");
  mean->add_option("--stack", stack_dir, "Stack directory")->required();
  mean->add_option("--tol", tol, "Boundary tolerance")->capture_default_str();
  mean->add_option("--out", out_dir, "Output directory")->capture_default_str();

  auto add_ci_common = [&](CLI::App* sub) {
    sub->add_option("--stack", stack_dir, "Stack directory")->required();
    sub->add_option("--alpha", alpha, "Miss probability")->capture_default_str();
    sub->add_option("--replicates", replicates, "Bootstrap replicates")->capture_default_str();
    sub->add_option("--seed", seed, "Random seed")->required();
    sub->add_option("--window", window_spec, "Window mask (PGM) or \"full\"")
        ->capture_default_str();
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
  };
  CLI::App* cimean = app.add_subcommand("ci-mean", "Confidence region for the expected set");
  add_ci_common(cimean);
  CLI::App* cibound =
      app.add_subcommand("ci-boundary", "Confidence region for the expected boundary");
  add_ci_common(cibound);

  CLI::App* cilvl = app.add_subcommand("ci-levelset", "Confidence region for a level set");
  cilvl->add_option("--field", field_path, "Estimated field (CSV)")->required();
  cilvl->add_option("--n", n, "Sample size behind the field")->required();
  cilvl->add_option("--p", level_p, "Level value")->required();
  cilvl->add_option("--p2", level_p2, "Upper level of a band");
  cilvl->add_option("--quantiles", quantiles_path, "QuantileReport JSON")->required();
  cilvl->add_flag("--asym", asym, "Use the asymmetric quantile pair q21/q22");
  cilvl->add_flag("--boundary", boundary_band, "Two-sided region around {f = p}");
  cilvl->add_option("--window", window_spec, "Window mask (PGM) or \"full\"")
      ->capture_default_str();
  cilvl->add_option("--out", out_dir, "Output directory")->capture_default_str();

  CLI::App* sim = app.add_subcommand("simulate", "Sample a stack of ODFs from a model");
  sim->add_option("--model", model_path, "Model config (JSON)")->required();
  sim->add_option("--n", n, "Sample count")->required();
  sim->add_option("--seed", seed, "Random seed")->required();
  sim->add_option("--domain", domain_spec, "x0,y0,h,nx,ny of the grid")->required();
  sim->add_option("--out", out_dir, "Stack directory to create")->required();

  CLI::App* cov = app.add_subcommand("coverage", "Coverage rate of the confidence construction");
  cov->add_option("--model", model_path, "Model config (JSON)")->required();
  cov->add_option("--n", n, "Sample count per trial")->required();
  cov->add_option("--trials", trials, "Trial count")->capture_default_str();
  cov->add_option("--alpha", alpha, "Miss probability")->capture_default_str();
  cov->add_option("--replicates", replicates, "Bootstrap replicates")->capture_default_str();
  cov->add_option("--seed", seed, "Random seed")->required();
  cov->add_option("--domain", domain_spec, "x0,y0,h,nx,ny of the grid")->required();
  cov->add_option("--target", target_name, "set or boundary")
      ->check(CLI::IsMember({"set", "boundary"}))
      ->capture_default_str();
  cov->add_option("--exact-quantiles", quantiles_path,
                  "QuantileReport JSON reused in every trial (skips the bootstrap)");
  cov->add_option("--window", window_spec, "Window mask (PGM) or \"full\"")
      ->capture_default_str();
  cov->add_option("--out", out_dir, "Output directory")->capture_default_str();

  CLI::App* reg = app.add_subcommand("regress", "Covariate region from a normal linear model");
  reg->add_option("--data", data_path, "Data table (CSV with header)")->required();
  reg->add_option("--fmap", fmap_path, "Feature map (JSON)")->required();
  reg->add_option("--covariates", covariates_csv, "Comma-separated covariate columns")
      ->required();
  reg->add_option("--response", response_name, "Response column")->required();
  reg->add_flag("--log-response", log_response, "Fit the log of the response");
  reg->add_option("--level", level_p, "Response level defining the region")->required();
  reg->add_option("--domain", domain_spec, "x0,y0,h,nx,ny of the covariate grid")->required();
  reg->add_option("--alpha", alpha, "Miss probability")->capture_default_str();
  reg->add_option("--draws", draws, "Gaussian field draws")->capture_default_str();
  reg->add_option("--seed", seed, "Random seed")->required();
  reg->add_option("--sign", sign, "+1 or -1 field orientation")->capture_default_str();
  reg->add_option("--window", window_spec, "Window mask (PGM) or \"full\"")
      ->capture_default_str();
  reg->add_option("--out", out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    set_thread_count(threads);
    if (odf->parsed()) {
      GridDomain domain = parse_domain(domain_spec);
      BinaryMask mask = read_mask_pgm(mask_path, domain);
      ensure_dir(out_dir);
      write_field_csv(oriented_distance(mask), join(out_dir, "odf.csv"));
    } else if (haus->parsed()) {
      GridDomain domain = parse_domain(domain_spec);
      BinaryMask a = read_mask_pgm(path_a, domain);
      BinaryMask b = read_mask_pgm(path_b, domain);
      std::printf("%.17g\n", hausdorff(a, b));
    } else if (lvl->parsed()) {
      ScalarField field = read_field_csv(field_path);
      ensure_dir(out_dir);
      nlohmann::json consistency;
      write_mask_pgm(sublevel_set(field, level_p), join(out_dir, "sublevel.pgm"));
      write_mask_pgm(level_boundary(field, level_p, tol), join(out_dir, "boundary.pgm"));
      consistency["p"] = consistency_json(check_consistency(field, level_p, tol));
      if (lvl->count("--p2") > 0) {
        LevelSpec spec{level_p, level_p2, tol};
        spec.validate();
        write_mask_pgm(level_band(field, spec), join(out_dir, "band.pgm"));
        consistency["p2"] = consistency_json(check_consistency(field, level_p2, tol));
      }
      write_text(join(out_dir, "consistency.json"), consistency.dump(2));
    } else if (mean->parsed()) {
      SampleStack stack = read_stack(stack_dir);
      ensure_dir(out_dir);
      write_field_csv(mean_odf(stack), join(out_dir, "mean_odf.csv"));
      write_mask_pgm(empirical_mean_set(stack), join(out_dir, "mean_set.pgm"));
      write_mask_pgm(empirical_mean_boundary(stack, tol), join(out_dir, "mean_boundary.pgm"));
    } else if (cimean->parsed() || cibound->parsed()) {
      SampleStack stack = read_stack(stack_dir);
      BinaryMask window = load_window(window_spec, stack.domain());
      QuantileReport report = bootstrap_quantiles(stack, window, alpha, replicates, seed);
      ensure_dir(out_dir);
      write_text(join(out_dir, "quantiles.json"), quantile_report_to_json(report));
      if (cimean->parsed())
        write_mask_pgm(ci_mean_set(stack, report.q1, window), join(out_dir, "ci_mean_set.pgm"));
      else
        write_mask_pgm(ci_mean_boundary(stack, report.q2, window),
                       join(out_dir, "ci_mean_boundary.pgm"));
    } else if (cilvl->parsed()) {
      ScalarField field = read_field_csv(field_path);
      BinaryMask window = load_window(window_spec, field.domain());
      QuantileReport report = quantile_report_from_json(read_text(quantiles_path));
      bool band = cilvl->count("--p2") > 0 || boundary_band;
      double p2 = cilvl->count("--p2") > 0 ? level_p2 : level_p;
      BinaryMask region =
          !band ? ci_sublevel(field, n, level_p, report.q1, window)
          : asym ? ci_band_asym(field, n, level_p, p2, report.q21, report.q22, window)
                 : ci_band(field, n, level_p, p2, report.q2, window);
      ensure_dir(out_dir);
      write_mask_pgm(region, join(out_dir, "ci_levelset.pgm"));
    } else if (sim->parsed()) {
      RandomSetModel model = model_from_json_file(model_path);
      GridDomain domain = parse_domain(domain_spec);
      write_stack(sample_stack(model, domain, n, seed), out_dir);
    } else if (cov->parsed()) {
      RandomSetModel model = model_from_json_file(model_path);
      GridDomain domain = parse_domain(domain_spec);
      CoverageTarget target =
          target_name == "set" ? CoverageTarget::mean_set : CoverageTarget::mean_boundary;
      BinaryMask window = load_window(window_spec, domain);
      QuantileReport exact;
      bool have_exact = cov->count("--exact-quantiles") > 0;
      if (have_exact) exact = quantile_report_from_json(read_text(quantiles_path));
      double rate = coverage_experiment(model, domain, n, trials, alpha, replicates, seed,
                                        target, &window, have_exact ? &exact : nullptr);
      nlohmann::json j;
      j["coverage"] = rate;
      j["n"] = n;
      j["trials"] = trials;
      j["alpha"] = alpha;
      j["replicates"] = replicates;
      j["seed"] = seed;
      j["target"] = target_name;
      ensure_dir(out_dir);
      write_text(join(out_dir, "coverage.json"), j.dump(2));
      std::printf("%.17g\n", rate);
    } else if (reg->parsed()) {
      Dataset data = read_csv(data_path);
      FeatureMap fmap = feature_map_from_json(read_text(fmap_path));
      std::vector<std::vector<double>> rows = data.select(split_names(covariates_csv));
      std::vector<double> response = data.column(response_name);
      if (log_response) {
        for (double& v : response) {
          if (!(v > 0.0))
            fail(Errc::bad_input, "--log-response needs positive responses, got " +
                                      std::to_string(v) + " in column " + response_name);
          v = std::log(v);
        }
      }
      FittedModel model = ols_fit(rows, response, fmap);
      GridDomain domain = parse_domain(domain_spec);
      BinaryMask window = load_window(window_spec, domain);
      QuantileReport report =
          gaussian_field_quantiles(model, fmap, window, alpha, draws, seed);
      ScalarField field = predict_field(model, fmap, domain, sign);
      ensure_dir(out_dir);
      write_text(join(out_dir, "fit.json"), fit_json(model));
      write_text(join(out_dir, "quantiles.json"), quantile_report_to_json(report));
      write_field_csv(field, join(out_dir, "field.csv"));
      write_mask_pgm(ci_sublevel(field, model.n, level_p, 0.0, window),
                     join(out_dir, "estimate.pgm"));
      write_mask_pgm(covariate_region(model, fmap, domain, level_p, report.q1, window, sign),
                     join(out_dir, "region.pgm"));
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == Errc::bad_usage ? 1 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

}  // namespace rset
