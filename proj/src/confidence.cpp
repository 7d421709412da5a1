#include "rset/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "rset/error.hpp"
#include "rset/levelset.hpp"
#include "rset/parallel.hpp"

namespace rset {
namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(Errc::bad_input, "alpha must lie in (0,1)");
}

std::vector<std::size_t> window_cells(const BinaryMask& window) {
  std::vector<std::size_t> cells;
  for (std::size_t k = 0; k < window.domain().cell_count(); ++k)
    if (window[k]) cells.push_back(k);
  if (cells.empty()) fail(Errc::empty_window, "window mask has no cells");
  return cells;
}

std::string describe_window(const BinaryMask& window) {
  const GridDomain& d = window.domain();
  std::string size = std::to_string(d.nx) + "x" + std::to_string(d.ny);
  if (window.all()) return "full grid " + size;
  return std::to_string(window.count_true()) + " of " + size + " cells";
}

// Order statistic at 1-based index ceil(level*B); the tiny slack keeps an
// exact product like 0.95*2000 from rounding up to the next index.
double order_stat(const std::vector<double>& sorted, double level) {
  auto B = static_cast<double>(sorted.size());
  auto k = static_cast<long>(std::ceil(level * B - 1e-9));
  if (k < 1) k = 1;
  if (k > static_cast<long>(sorted.size())) k = static_cast<long>(sorted.size());
  return sorted[static_cast<std::size_t>(k - 1)];
}

// Binomial order-statistic standard error, with the density estimated from
// the order-statistic spacing around the quantile.
double quantile_se(const std::vector<double>& sorted, double level) {
  auto Bsz = static_cast<long>(sorted.size());
  if (Bsz < 2) return std::numeric_limits<double>::infinity();
  double B = static_cast<double>(Bsz);
  long w = std::lround(0.5 * std::sqrt(B));
  if (w < 1) w = 1;
  auto k = static_cast<long>(std::ceil(level * B - 1e-9));
  long lo = std::max<long>(1, k - w);
  long hi = std::min<long>(Bsz, k + w);
  if (hi <= lo) return std::numeric_limits<double>::infinity();
  double spread = sorted[static_cast<std::size_t>(hi - 1)] - sorted[static_cast<std::size_t>(lo - 1)];
  return std::sqrt(level * (1.0 - level) / B) * B * spread / static_cast<double>(hi - lo);
}

std::uint64_t hash_doubles(const double* data, std::size_t count) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &data[i], sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace

QuantileReport quantile_report_from_sups(std::vector<double> maxs, std::vector<double> absmaxs,
                                         std::vector<double> mins, double alpha,
                                         std::uint64_t seed, std::string window_id) {
  check_alpha(alpha);
  if (maxs.empty() || maxs.size() != absmaxs.size() || maxs.size() != mins.size())
    fail(Errc::bad_input, "sup vectors must be nonempty and equally long");
  QuantileReport report;
  report.alpha = alpha;
  report.replicates = static_cast<int>(maxs.size());
  report.seed = seed;
  report.window_id = std::move(window_id);
  std::sort(maxs.begin(), maxs.end());
  std::sort(absmaxs.begin(), absmaxs.end());
  std::sort(mins.begin(), mins.end());
  report.q1 = order_stat(maxs, 1.0 - alpha);
  report.q2 = order_stat(absmaxs, 1.0 - alpha);
  report.q21 = order_stat(mins, 0.5 * alpha);
  report.q22 = order_stat(maxs, 1.0 - 0.5 * alpha);
  report.se_q1 = quantile_se(maxs, 1.0 - alpha);
  report.se_q2 = quantile_se(absmaxs, 1.0 - alpha);
  report.se_q21 = quantile_se(mins, 0.5 * alpha);
  report.se_q22 = quantile_se(maxs, 1.0 - 0.5 * alpha);
  return report;
}

std::string quantile_report_to_json(const QuantileReport& report) {
  nlohmann::json j;
  j["alpha"] = report.alpha;
  j["q1"] = report.q1;
  j["q2"] = report.q2;
  j["q21"] = report.q21;
  j["q22"] = report.q22;
  j["replicates"] = report.replicates;
  auto se = [](double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  };
  j["se_q1"] = se(report.se_q1);
  j["se_q2"] = se(report.se_q2);
  j["se_q21"] = se(report.se_q21);
  j["se_q22"] = se(report.se_q22);
  j["seed"] = report.seed;
  j["window_id"] = report.window_id;
  return j.dump(2);
}

QuantileReport quantile_report_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::bad_input, std::string("quantile report is not valid JSON: ") + e.what());
  }
  QuantileReport report;
  try {
    report.alpha = j.at("alpha").get<double>();
    report.q1 = j.at("q1").get<double>();
    report.q2 = j.at("q2").get<double>();
    report.q21 = j.at("q21").get<double>();
    report.q22 = j.at("q22").get<double>();
    report.replicates = j.at("replicates").get<int>();
    auto se = [&](const char* key) {
      return j.at(key).is_null() ? std::numeric_limits<double>::infinity()
                                 : j.at(key).get<double>();
    };
    report.se_q1 = se("se_q1");
    report.se_q2 = se("se_q2");
    report.se_q21 = se("se_q21");
    report.se_q22 = se("se_q22");
    report.seed = j.at("seed").get<std::uint64_t>();
    report.window_id = j.at("window_id").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_input, std::string("quantile report is missing a field: ") + e.what());
  }
  check_alpha(report.alpha);
  if (report.replicates < 1) fail(Errc::bad_input, "quantile report has replicates < 1");
  return report;
}

QuantileReport bootstrap_quantiles(const SampleStack& stack, const BinaryMask& window,
                                   double alpha, int B, std::uint64_t seed) {
  stack.validate();
  check_alpha(alpha);
  if (stack.size() < 2) fail(Errc::stack_too_small, "bootstrap needs at least 2 fields");
  if (B < 1) fail(Errc::bad_input, "replicate count must be at least 1");
  require_same_domain(stack.domain(), window.domain(), "bootstrap window");
  const int n = stack.size();
  const std::vector<std::size_t> cells = window_cells(window);
  const std::size_t wn = cells.size();

  // Restrict every field to the window and collapse duplicates; replicate
  // fields only cost one evaluation per distinct field.
  std::vector<std::vector<double>> group_vals;
  std::vector<int> group_of(n);
  std::unordered_map<std::uint64_t, std::vector<int>> buckets;
  for (int i = 0; i < n; ++i) {
    std::vector<double> vals(wn);
    for (std::size_t k = 0; k < wn; ++k) vals[k] = stack.fields[i][cells[k]];
    std::uint64_t h = hash_doubles(vals.data(), wn);
    int group = -1;
    for (int g : buckets[h]) {
      if (group_vals[g] == vals) {
        group = g;
        break;
      }
    }
    if (group < 0) {
      group = static_cast<int>(group_vals.size());
      group_vals.push_back(std::move(vals));
      buckets[h].push_back(group);
    }
    group_of[i] = group;
  }
  const auto groups = static_cast<int>(group_vals.size());

  std::vector<double> mean_w(wn, 0.0);
  for (int i = 0; i < n; ++i)
    for (std::size_t k = 0; k < wn; ++k) mean_w[k] += group_vals[group_of[i]][k];
  for (std::size_t k = 0; k < wn; ++k) mean_w[k] /= n;

  const double sqrtn = std::sqrt(static_cast<double>(n));
  std::vector<double> maxs(B), absmaxs(B), mins(B);
  parallel_for(static_cast<std::size_t>(B), [&](std::size_t slot) {
    Rng rng(seed, stream_index(StreamClass::bootstrap, slot + 1));
    std::vector<int> count(groups, 0);
    for (int i = 0; i < n; ++i) ++count[group_of[rng.below(static_cast<std::uint64_t>(n))]];
    std::vector<double> acc(wn, 0.0);
    for (int g = 0; g < groups; ++g) {
      if (count[g] == 0) continue;
      double c = static_cast<double>(count[g]);
      const std::vector<double>& vals = group_vals[g];
      for (std::size_t k = 0; k < wn; ++k) acc[k] += c * vals[k];
    }
    double hi = -std::numeric_limits<double>::infinity();
    double hi_abs = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < wn; ++k) {
      double z = sqrtn * (acc[k] / n - mean_w[k]);
      hi = std::max(hi, z);
      hi_abs = std::max(hi_abs, std::abs(z));
      lo = std::min(lo, z);
    }
    maxs[slot] = hi;
    absmaxs[slot] = hi_abs;
    mins[slot] = lo;
  });
  return quantile_report_from_sups(std::move(maxs), std::move(absmaxs), std::move(mins), alpha, seed,
                          describe_window(window));
}

QuantileReport mc_sup_quantile(const FluctuationSampler& sampler, const BinaryMask& window,
                               double alpha, int S, std::uint64_t seed) {
  check_alpha(alpha);
  if (S < 1) fail(Errc::bad_input, "draw count must be at least 1");
  if (!sampler) fail(Errc::bad_input, "fluctuation sampler is empty");
  const GridDomain& d = window.domain();
  const std::vector<std::size_t> cells = window_cells(window);
  std::vector<Point> pts(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    int i = static_cast<int>(cells[k] % d.nx);
    int j = static_cast<int>(cells[k] / d.nx);
    pts[k] = coord_of(d, i, j);
  }
  std::vector<double> maxs(S), absmaxs(S), mins(S);
  parallel_for(static_cast<std::size_t>(S), [&](std::size_t slot) {
    Rng rng(seed, stream_index(StreamClass::limit_draw, slot + 1));
    FieldDraw field = sampler(rng);
    double hi = -std::numeric_limits<double>::infinity();
    double hi_abs = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (const Point& p : pts) {
      double z = field(p.x, p.y);
      hi = std::max(hi, z);
      hi_abs = std::max(hi_abs, std::abs(z));
      lo = std::min(lo, z);
    }
    maxs[slot] = hi;
    absmaxs[slot] = hi_abs;
    mins[slot] = lo;
  });
  return quantile_report_from_sups(std::move(maxs), std::move(absmaxs), std::move(mins), alpha, seed,
                          describe_window(window));
}

namespace {

BinaryMask masked_band(const ScalarField& fhat, double lo, double hi,
                       const BinaryMask& window) {
  require_same_domain(fhat.domain(), window.domain(), "confidence window");
  if (!window.any()) fail(Errc::empty_window, "window mask has no cells");
  BinaryMask out(fhat.domain());
  for (std::size_t k = 0; k < fhat.domain().cell_count(); ++k)
    out.set_index(k, window[k] && lo <= fhat[k] && fhat[k] <= hi);
  return out;
}

double check_n(int n) {
  if (n < 1) fail(Errc::bad_input, "sample size must be at least 1");
  return std::sqrt(static_cast<double>(n));
}

}  // namespace

BinaryMask ci_sublevel(const ScalarField& fhat, int n, double p, double q1,
                       const BinaryMask& window) {
  double sqrtn = check_n(n);
  return masked_band(fhat, -std::numeric_limits<double>::infinity(), p + q1 / sqrtn, window);
}

BinaryMask ci_band(const ScalarField& fhat, int n, double p1, double p2, double q2,
                   const BinaryMask& window) {
  if (!(p1 <= p2)) fail(Errc::bad_input, "level range has p1 > p2");
  double sqrtn = check_n(n);
  return masked_band(fhat, p1 - q2 / sqrtn, p2 + q2 / sqrtn, window);
}

BinaryMask ci_band_asym(const ScalarField& fhat, int n, double p1, double p2, double q21,
                        double q22, const BinaryMask& window) {
  if (!(p1 <= p2)) fail(Errc::bad_input, "level range has p1 > p2");
  double sqrtn = check_n(n);
  return masked_band(fhat, p1 + q21 / sqrtn, p2 + q22 / sqrtn, window);
}

BinaryMask ci_mean_set(const SampleStack& stack, double q1, const BinaryMask& window) {
  ScalarField mean = mean_odf(stack);
  double sqrtn = std::sqrt(static_cast<double>(stack.size()));
  return masked_band(mean, -std::numeric_limits<double>::infinity(), q1 / sqrtn, window);
}

BinaryMask ci_mean_boundary(const SampleStack& stack, double q2, const BinaryMask& window) {
  ScalarField mean = mean_odf(stack);
  double sqrtn = std::sqrt(static_cast<double>(stack.size()));
  return masked_band(mean, -q2 / sqrtn, q2 / sqrtn, window);
}

double coverage_experiment(const RandomSetModel& model, const GridDomain& domain, int n,
                           int trials, double alpha, int B, std::uint64_t seed,
                           CoverageTarget target, const BinaryMask* window,
                           const QuantileReport* exact_quantiles) {
  model.validate();
  domain.validate();
  check_alpha(alpha);
  if (n < 1) fail(Errc::bad_input, "sample size must be at least 1");
  if (trials < 1) fail(Errc::bad_input, "trial count must be at least 1");
  if (!exact_quantiles && B < 1) fail(Errc::bad_input, "replicate count must be at least 1");

  BinaryMask full;
  if (!window) {
    full = BinaryMask(domain, true);
    window = &full;
  }
  require_same_domain(domain, window->domain(), "coverage window");
  if (!window->any()) fail(Errc::empty_window, "window mask has no cells");

  ScalarField truth_field = estimand_field(model, domain);
  BinaryMask truth = target == CoverageTarget::mean_set
                         ? sublevel_set(truth_field, 0.0)
                         : level_boundary(truth_field, 0.0, 0.0, true);
  std::vector<std::size_t> truth_cells;
  for (std::size_t k = 0; k < domain.cell_count(); ++k)
    if (truth[k]) truth_cells.push_back(k);
  if (truth_cells.empty()) return 1.0;
  for (std::size_t k : truth_cells)
    if (!(*window)[k]) return 0.0;  // the CI mask lives inside the window

  std::vector<Point> truth_pts(truth_cells.size());
  for (std::size_t k = 0; k < truth_cells.size(); ++k) {
    int i = static_cast<int>(truth_cells[k] % domain.nx);
    int j = static_cast<int>(truth_cells[k] / domain.nx);
    truth_pts[k] = coord_of(domain, i, j);
  }

  const double sqrtn = std::sqrt(static_cast<double>(n));
  const bool plugin_centre = model.kind == ModelKind::disc_random_centre_square;
  std::vector<std::size_t> wcells;
  if (plugin_centre && !exact_quantiles) wcells = window_cells(*window);

  std::vector<std::uint8_t> covered(trials, 0);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    std::uint64_t tseed = Rng(seed, stream_index(StreamClass::trial, t + 1)).next_u64();
    if (plugin_centre) {
      // Estimand is the fixed disc; the plug-in estimator recentres it at the
      // mean of the simulated centres.
      std::vector<Point> centres(n);
      double ux = 0.0, uy = 0.0;
      for (int i = 0; i < n; ++i) {
        Rng ri(tseed, stream_index(StreamClass::sample, static_cast<std::uint64_t>(i)));
        ModelDraw d = draw_latent(model, ri);
        centres[i] = {d.a, d.b};
        ux += d.a;
        uy += d.b;
      }
      ux /= n;
      uy /= n;
      double q1, q2;
      if (exact_quantiles) {
        q1 = exact_quantiles->q1;
        q2 = exact_quantiles->q2;
      } else {
        const GridDomain& d = domain;
        std::vector<double> maxs(B), absmaxs(B), mins(B);
        for (int b = 1; b <= B; ++b) {
          Rng rb(tseed, stream_index(StreamClass::bootstrap, static_cast<std::uint64_t>(b)));
          double sx = 0.0, sy = 0.0;
          for (int i = 0; i < n; ++i) {
            const Point& c = centres[rb.below(static_cast<std::uint64_t>(n))];
            sx += c.x;
            sy += c.y;
          }
          sx /= n;
          sy /= n;
          double hi = -std::numeric_limits<double>::infinity();
          double hi_abs = 0.0;
          double lo = std::numeric_limits<double>::infinity();
          for (std::size_t k : wcells) {
            int ci = static_cast<int>(k % d.nx);
            int cj = static_cast<int>(k / d.nx);
            Point p = coord_of(d, ci, cj);
            double z = sqrtn * (std::hypot(p.x - sx, p.y - sy) - std::hypot(p.x - ux, p.y - uy));
            hi = std::max(hi, z);
            hi_abs = std::max(hi_abs, std::abs(z));
            lo = std::min(lo, z);
          }
          maxs[b - 1] = hi;
          absmaxs[b - 1] = hi_abs;
          mins[b - 1] = lo;
        }
        std::sort(maxs.begin(), maxs.end());
        std::sort(absmaxs.begin(), absmaxs.end());
        q1 = order_stat(maxs, 1.0 - alpha);
        q2 = order_stat(absmaxs, 1.0 - alpha);
      }
      double radius = model.param("r", 1.0);
      double cut = (target == CoverageTarget::mean_set ? q1 : q2) / sqrtn;
      bool ok = true;
      for (const Point& p : truth_pts) {
        double fh = std::hypot(p.x - ux, p.y - uy) - radius;
        bool inside = target == CoverageTarget::mean_set ? fh <= cut : std::abs(fh) <= cut;
        if (!inside) {
          ok = false;
          break;
        }
      }
      covered[t] = ok ? 1 : 0;
      return;
    }
    if (exact_quantiles && has_analytic_odf(model.kind)) {
      // Fixed quantiles need the mean ODF only on the truth cells.
      std::vector<ModelDraw> draws(n);
      for (int i = 0; i < n; ++i) {
        Rng ri(tseed, stream_index(StreamClass::sample, static_cast<std::uint64_t>(i)));
        draws[i] = draw_latent(model, ri);
      }
      double cut = (target == CoverageTarget::mean_set ? exact_quantiles->q1
                                                       : exact_quantiles->q2) /
                   sqrtn;
      bool ok = true;
      for (const Point& p : truth_pts) {
        double acc = 0.0;
        for (const ModelDraw& dr : draws) acc += odf_value(model, dr, p.x, p.y);
        double bbar = acc / n;
        bool inside = target == CoverageTarget::mean_set ? bbar <= cut : std::abs(bbar) <= cut;
        if (!inside) {
          ok = false;
          break;
        }
      }
      covered[t] = ok ? 1 : 0;
      return;
    }
    SampleStack stack = sample_stack(model, domain, n, tseed);
    double q1, q2;
    if (exact_quantiles) {
      q1 = exact_quantiles->q1;
      q2 = exact_quantiles->q2;
    } else {
      QuantileReport qr = bootstrap_quantiles(stack, *window, alpha, B, tseed);
      q1 = qr.q1;
      q2 = qr.q2;
    }
    BinaryMask ci = target == CoverageTarget::mean_set
                        ? ci_mean_set(stack, q1, *window)
                        : ci_mean_boundary(stack, q2, *window);
    bool ok = true;
    for (std::size_t k : truth_cells) {
      if (!ci[k]) {
        ok = false;
        break;
      }
    }
    covered[t] = ok ? 1 : 0;
  });

  std::size_t hits = 0;
  for (std::uint8_t c : covered) hits += c;
  return static_cast<double>(hits) / static_cast<double>(trials);
}

double empirical_fluctuation_cov(const SampleStack& stack, int ia, int ja, int ib, int jb) {
  stack.validate();
  if (stack.size() < 2) fail(Errc::stack_too_small, "covariance needs at least 2 fields");
  const GridDomain& d = stack.domain();
  if (ia < 0 || ia >= d.nx || ja < 0 || ja >= d.ny || ib < 0 || ib >= d.nx || jb < 0 ||
      jb >= d.ny)
    fail(Errc::bad_input, "covariance cell outside the grid");
  std::size_t ka = d.index(ia, ja);
  std::size_t kb = d.index(ib, jb);
  const int n = stack.size();
  double ma = 0.0, mb = 0.0;
  for (const ScalarField& f : stack.fields) {
    ma += f[ka];
    mb += f[kb];
  }
  ma /= n;
  mb /= n;
  double acc = 0.0;
  for (const ScalarField& f : stack.fields) acc += (f[ka] - ma) * (f[kb] - mb);
  return acc / (n - 1);
}

}  // namespace rset
