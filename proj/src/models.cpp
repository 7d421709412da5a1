#include "rset/models.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "rset/distance.hpp"
#include "rset/error.hpp"
#include "rset/parallel.hpp"
#include "rset/quadrature.hpp"

namespace rset {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct KindEntry {
  ModelKind kind;
  const char* name;
};

const KindEntry kKinds[] = {
    {ModelKind::disc_random_radius, "disc_random_radius"},
    {ModelKind::disc_random_centre_1d_offset, "disc_random_centre_1d_offset"},
    {ModelKind::disc_random_centre_square, "disc_random_centre_square"},
    {ModelKind::interval_random_centre, "interval_random_centre"},
    {ModelKind::half_plane_angle, "half_plane_angle"},
    {ModelKind::set_or_boundary, "set_or_boundary"},
    {ModelKind::missing_timbit, "missing_timbit"},
    {ModelKind::blinking_square, "blinking_square"},
    {ModelKind::flashing_discs, "flashing_discs"},
    {ModelKind::flashing_discs_reverse, "flashing_discs_reverse"},
    {ModelKind::pacman_random_radius, "pacman_random_radius"},
};

// Exact ODF of an axis-aligned rectangle.
double box_odf(double x, double y, double xlo, double xhi, double ylo, double yhi) {
  double dx = std::max(xlo - x, x - xhi);
  double dy = std::max(ylo - y, y - yhi);
  double outside = std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
  return outside + std::min(std::max(dx, dy), 0.0);
}

// ODF of the 1-D interval [0,1].
double unit_interval_odf(double x) {
  if (x < 0.0) return -x;
  if (x > 1.0) return x - 1.0;
  return -std::min(x, 1.0 - x);
}

// ODF of the two-point set {0,1}; the complement is dense, so it is the
// plain distance.
double endpoint_pair_odf(double x) { return std::min(std::abs(x), std::abs(x - 1.0)); }

// ODF of the disc of radius r minus the open quadrant {x1 > 0, x2 > 0}.
double pacman_odf(double x, double y, double r) {
  if (x > 0.0 && y > 0.0) {
    double e1 = x <= r ? y : std::hypot(x - r, y);
    double e2 = y <= r ? x : std::hypot(x, y - r);
    return std::min(e1, e2);
  }
  double rho = std::hypot(x, y);
  if (rho <= r) {
    double corner = std::hypot(std::min(x, 0.0), std::min(y, 0.0));
    return -std::min(r - rho, corner);
  }
  return rho - r;
}

// ODF of the donut {0.5 <= |x| <= 1} as a function of |x|.
double donut_odf(double rho) { return rho <= 0.75 ? 0.5 - rho : rho - 1.0; }

double expected_abs_uniform(double x, double lo, double hi) {
  // E|x - T| for T ~ U[lo, hi].
  if (x <= lo) return 0.5 * (lo + hi) - x;
  if (x >= hi) return x - 0.5 * (lo + hi);
  return ((x - lo) * (x - lo) + (hi - x) * (hi - x)) / (2.0 * (hi - lo));
}

// Antiderivative of sqrt(t^2 + c^2) in t. The |c| keeps it valid for c < 0,
// where asinh(t/c) would flip the sign of its derivative.
double sqrt_quad_antideriv(double t, double c) {
  if (c == 0.0) return 0.5 * t * std::abs(t);
  return 0.5 * (t * std::hypot(t, c) + c * c * std::asinh(t / std::abs(c)));
}

void require_planar(const RandomSetModel& model, const GridDomain& domain) {
  if (is_one_dimensional(model.kind)) {
    if (domain.ny != 1)
      fail(Errc::unsupported_domain,
           std::string(kind_name(model.kind)) + " is one-dimensional; grid must have ny == 1");
  } else if (domain.ny == 1) {
    fail(Errc::unsupported_domain,
         std::string(kind_name(model.kind)) + " is planar; grid must have ny > 1");
  }
}

double prob_param(const RandomSetModel& model) {
  double p = model.param("p", 0.5);
  if (!(p >= 0.0 && p <= 1.0)) fail(Errc::bad_input, "probability p must lie in [0,1]");
  return p;
}

struct UniformRange {
  double lo, hi;
};

UniformRange range_param(const RandomSetModel& model, double dlo, double dhi,
                         const char* lo_name = "lo", const char* hi_name = "hi") {
  UniformRange r{model.param(lo_name, dlo), model.param(hi_name, dhi)};
  if (!(r.lo <= r.hi)) fail(Errc::bad_input, "parameter range has lo > hi");
  return r;
}

BinaryMask rasterize(const RandomSetModel& model, const ModelDraw& draw,
                     const GridDomain& domain) {
  BinaryMask mask(domain);
  auto fill = [&](auto&& inside) {
    for (int j = 0; j < domain.ny; ++j) {
      double y = domain.y0 + j * domain.h;
      for (int i = 0; i < domain.nx; ++i) {
        double x = domain.x0 + i * domain.h;
        mask.set_index(domain.index(i, j), inside(x, y));
      }
    }
  };
  switch (model.kind) {
    case ModelKind::set_or_boundary: {
      if (draw.a != 0.0) {
        fill([](double x, double) { return 0.0 <= x && x <= 1.0; });
      } else {
        // The two-point set {0,1} almost never hits a cell centre, so it is
        // rasterized as the nearest cell to each point.
        for (double pt : {0.0, 1.0}) {
          long i = std::lround((pt - domain.x0) / domain.h);
          if (i >= 0 && i < domain.nx) mask.set_index(domain.index(static_cast<int>(i), 0), true);
        }
      }
      break;
    }
    case ModelKind::missing_timbit: {
      if (draw.a != 0.0) {
        fill([](double x, double y) { return std::hypot(x, y) <= 1.0; });
      } else {
        fill([](double x, double y) {
          double rho = std::hypot(x, y);
          return 0.5 <= rho && rho <= 1.0;
        });
      }
      break;
    }
    case ModelKind::blinking_square: {
      if (draw.a != 0.0) {
        fill([](double x, double y) { return 0.0 <= x && x <= 3.0 && 0.0 <= y && y <= 1.0; });
      } else {
        fill([](double x, double y) {
          bool in_x = (0.0 <= x && x <= 1.0) || (2.0 <= x && x <= 3.0);
          return in_x && 0.0 <= y && y <= 1.0;
        });
      }
      break;
    }
    case ModelKind::flashing_discs: {
      double r = model.param("r", 1.0);
      double cx = draw.a != 0.0 ? 0.0 : model.param("a", 2.0);
      fill([&](double x, double y) { return std::hypot(x - cx, y) <= r; });
      break;
    }
    case ModelKind::flashing_discs_reverse: {
      double r = model.param("r", 1.0);
      double cx = draw.a != 0.0 ? 0.0 : model.param("a", 2.0);
      fill([&](double x, double y) { return std::hypot(x - cx, y) >= r; });
      break;
    }
    default:
      fail(Errc::unsupported_model,
           std::string("no rasterizer for analytic model ") + kind_name(model.kind));
  }
  return mask;
}

}  // namespace

const char* kind_name(ModelKind kind) {
  for (const auto& e : kKinds)
    if (e.kind == kind) return e.name;
  fail(Errc::bad_input, "unknown model kind");
}

ModelKind kind_from_name(const std::string& name) {
  for (const auto& e : kKinds)
    if (name == e.name) return e.kind;
  fail(Errc::bad_input, "unknown model kind \"" + name + "\"");
}

double RandomSetModel::param(const std::string& name, double fallback) const {
  auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

void RandomSetModel::validate() const {
  for (const auto& [name, value] : params) {
    if (!std::isfinite(value)) fail(Errc::bad_input, "parameter \"" + name + "\" is not finite");
  }
  switch (kind) {
    case ModelKind::disc_random_radius:
    case ModelKind::pacman_random_radius: {
      UniformRange r = range_param(*this, 0.0, 1.0);
      if (r.lo < 0.0) fail(Errc::bad_input, "radius range must be nonnegative");
      break;
    }
    case ModelKind::disc_random_centre_1d_offset: {
      range_param(*this, 0.0, 2.0);
      if (!(param("r", 1.0) > 0.0)) fail(Errc::bad_input, "radius r must be positive");
      break;
    }
    case ModelKind::disc_random_centre_square: {
      if (!(param("r", 1.0) > 0.0)) fail(Errc::bad_input, "radius r must be positive");
      if (!(param("w", 1.0) > 0.0)) fail(Errc::bad_input, "half-width w must be positive");
      break;
    }
    case ModelKind::interval_random_centre: {
      range_param(*this, -1.0, 1.0);
      if (!(param("len", 1.0) > 0.0)) fail(Errc::bad_input, "half-length len must be positive");
      break;
    }
    case ModelKind::half_plane_angle: {
      double a = param("a", 0.0), b = param("b", kPi);
      if (!(b - a > 0.0 && b - a < 2.0 * kPi))
        fail(Errc::bad_input, "half_plane_angle needs 0 < b - a < 2*pi");
      break;
    }
    case ModelKind::set_or_boundary:
    case ModelKind::missing_timbit:
    case ModelKind::blinking_square:
      prob_param(*this);
      break;
    case ModelKind::flashing_discs:
    case ModelKind::flashing_discs_reverse:
      prob_param(*this);
      if (!(param("r", 1.0) > 0.0)) fail(Errc::bad_input, "radius r must be positive");
      break;
  }
}

RandomSetModel model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::bad_input, std::string("model config is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind"))
    fail(Errc::bad_input, "model config needs an object with a \"kind\" field");
  RandomSetModel model;
  model.kind = kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("params")) {
    for (const auto& [name, value] : j.at("params").items()) {
      if (!value.is_number()) fail(Errc::bad_input, "parameter \"" + name + "\" must be a number");
      model.params[name] = value.get<double>();
    }
  }
  if (j.contains("seed")) model.seed = j.at("seed").get<std::uint64_t>();
  model.validate();
  return model;
}

RandomSetModel model_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open model config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

std::string model_to_json(const RandomSetModel& model) {
  nlohmann::json j;
  j["kind"] = kind_name(model.kind);
  j["params"] = nlohmann::json::object();
  for (const auto& [name, value] : model.params) j["params"][name] = value;
  j["seed"] = model.seed;
  return j.dump(2);
}

bool is_one_dimensional(ModelKind kind) {
  return kind == ModelKind::interval_random_centre || kind == ModelKind::set_or_boundary;
}

bool has_analytic_odf(ModelKind kind) {
  switch (kind) {
    case ModelKind::disc_random_radius:
    case ModelKind::disc_random_centre_1d_offset:
    case ModelKind::disc_random_centre_square:
    case ModelKind::interval_random_centre:
    case ModelKind::half_plane_angle:
    case ModelKind::pacman_random_radius:
      return true;
    default:
      return false;
  }
}

ModelDraw draw_latent(const RandomSetModel& model, Rng& rng) {
  ModelDraw draw;
  switch (model.kind) {
    case ModelKind::disc_random_radius:
    case ModelKind::pacman_random_radius: {
      UniformRange r = range_param(model, 0.0, 1.0);
      draw.a = rng.uniform(r.lo, r.hi);
      break;
    }
    case ModelKind::disc_random_centre_1d_offset: {
      UniformRange r = range_param(model, 0.0, 2.0);
      draw.a = rng.uniform(r.lo, r.hi);
      break;
    }
    case ModelKind::disc_random_centre_square: {
      double w = model.param("w", 1.0);
      draw.a = rng.uniform(-w, w);
      draw.b = rng.uniform(-w, w);
      break;
    }
    case ModelKind::interval_random_centre: {
      UniformRange r = range_param(model, -1.0, 1.0);
      draw.a = rng.uniform(r.lo, r.hi);
      break;
    }
    case ModelKind::half_plane_angle:
      draw.a = rng.uniform(model.param("a", 0.0), model.param("b", kPi));
      break;
    case ModelKind::set_or_boundary:
    case ModelKind::missing_timbit:
    case ModelKind::blinking_square:
    case ModelKind::flashing_discs:
    case ModelKind::flashing_discs_reverse:
      draw.a = rng.uniform01() < prob_param(model) ? 1.0 : 0.0;
      break;
  }
  return draw;
}

double odf_value(const RandomSetModel& model, const ModelDraw& draw, double x, double y) {
  switch (model.kind) {
    case ModelKind::disc_random_radius:
      return std::hypot(x, y) - draw.a;
    case ModelKind::disc_random_centre_1d_offset:
      return std::hypot(x - draw.a, y) - model.param("r", 1.0);
    case ModelKind::disc_random_centre_square:
      return std::hypot(x - draw.a, y - draw.b) - model.param("r", 1.0);
    case ModelKind::interval_random_centre:
      return std::abs(x - draw.a) - model.param("len", 1.0);
    case ModelKind::half_plane_angle:
      return x * std::sin(draw.a) - y * std::cos(draw.a);
    case ModelKind::pacman_random_radius:
      return pacman_odf(x, y, draw.a);
    default:
      fail(Errc::unsupported_model,
           std::string(kind_name(model.kind)) + " has no closed-form sample ODF");
  }
}

ScalarField sample_odf(const RandomSetModel& model, const GridDomain& domain, Rng& rng) {
  model.validate();
  require_planar(model, domain);
  ModelDraw draw = draw_latent(model, rng);
  if (!has_analytic_odf(model.kind)) return oriented_distance(rasterize(model, draw, domain));
  ScalarField field(domain);
  for (int j = 0; j < domain.ny; ++j) {
    double y = domain.y0 + j * domain.h;
    for (int i = 0; i < domain.nx; ++i)
      field[domain.index(i, j)] = odf_value(model, draw, domain.x0 + i * domain.h, y);
  }
  return field;
}

SampleStack sample_stack(const RandomSetModel& model, const GridDomain& domain, int n,
                         std::uint64_t seed) {
  if (n < 1) fail(Errc::bad_input, "sample count must be at least 1");
  model.validate();
  require_planar(model, domain);
  SampleStack stack;
  stack.fields.reserve(n);
  for (int i = 0; i < n; ++i) stack.fields.emplace_back(domain);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    Rng rng(seed, stream_index(StreamClass::sample, i));
    stack.fields[i] = sample_odf(model, domain, rng);
  });
  return stack;
}

ScalarField expected_odf(const RandomSetModel& model, const GridDomain& domain) {
  model.validate();
  require_planar(model, domain);
  ScalarField field(domain);
  auto fill = [&](auto&& value) {
    parallel_for(static_cast<std::size_t>(domain.ny), [&](std::size_t j) {
      double y = domain.y0 + static_cast<double>(j) * domain.h;
      for (int i = 0; i < domain.nx; ++i) {
        double x = domain.x0 + i * domain.h;
        field[domain.index(i, static_cast<int>(j))] = value(x, y);
      }
    });
  };
  switch (model.kind) {
    case ModelKind::disc_random_radius: {
      UniformRange r = range_param(model, 0.0, 1.0);
      double mu = 0.5 * (r.lo + r.hi);
      fill([mu](double x, double y) { return std::hypot(x, y) - mu; });
      break;
    }
    case ModelKind::disc_random_centre_1d_offset: {
      UniformRange r = range_param(model, 0.0, 2.0);
      double radius = model.param("r", 1.0);
      fill([&](double x, double y) {
        if (r.lo == r.hi) return std::hypot(x - r.lo, y) - radius;
        double total = integrate(
            [&](double t) { return std::hypot(x - t, y); }, r.lo, r.hi);
        return total / (r.hi - r.lo) - radius;
      });
      break;
    }
    case ModelKind::disc_random_centre_square: {
      double w = model.param("w", 1.0);
      double radius = model.param("r", 1.0);
      // E|x - U| over the square: the inner coordinate integrates in closed
      // form, the outer one adaptively.
      fill([&](double x, double y) {
        double outer = integrate(
            [&](double v) {
              double c = y - v;
              return sqrt_quad_antideriv(x + w, c) - sqrt_quad_antideriv(x - w, c);
            },
            -w, w);
        return outer / (4.0 * w * w) - radius;
      });
      break;
    }
    case ModelKind::interval_random_centre: {
      UniformRange r = range_param(model, -1.0, 1.0);
      double len = model.param("len", 1.0);
      fill([&](double x, double) { return expected_abs_uniform(x, r.lo, r.hi) - len; });
      break;
    }
    case ModelKind::half_plane_angle: {
      double a = model.param("a", 0.0), b = model.param("b", kPi);
      double scale = 2.0 / (b - a) * std::sin(0.5 * (b - a));
      double mid = 0.5 * (a + b);
      double sm = std::sin(mid), cm = std::cos(mid);
      fill([=](double x, double y) { return scale * (x * sm - y * cm); });
      break;
    }
    case ModelKind::set_or_boundary: {
      double p = prob_param(model);
      fill([p](double x, double) {
        return p * unit_interval_odf(x) + (1.0 - p) * endpoint_pair_odf(x);
      });
      break;
    }
    case ModelKind::missing_timbit: {
      double p = prob_param(model);
      fill([p](double x, double y) {
        double rho = std::hypot(x, y);
        return p * (rho - 1.0) + (1.0 - p) * donut_odf(rho);
      });
      break;
    }
    case ModelKind::blinking_square: {
      double p = prob_param(model);
      fill([p](double x, double y) {
        double whole = box_odf(x, y, 0.0, 3.0, 0.0, 1.0);
        double split = std::min(box_odf(x, y, 0.0, 1.0, 0.0, 1.0),
                                box_odf(x, y, 2.0, 3.0, 0.0, 1.0));
        return p * whole + (1.0 - p) * split;
      });
      break;
    }
    case ModelKind::flashing_discs: {
      double p = prob_param(model);
      double r = model.param("r", 1.0), a = model.param("a", 2.0);
      fill([=](double x, double y) {
        return p * (std::hypot(x, y) - r) + (1.0 - p) * (std::hypot(x - a, y) - r);
      });
      break;
    }
    case ModelKind::flashing_discs_reverse: {
      double p = prob_param(model);
      double r = model.param("r", 1.0), a = model.param("a", 2.0);
      fill([=](double x, double y) {
        return p * (r - std::hypot(x, y)) + (1.0 - p) * (r - std::hypot(x - a, y));
      });
      break;
    }
    case ModelKind::pacman_random_radius: {
      UniformRange r = range_param(model, 0.0, 1.0);
      fill([&](double x, double y) {
        if (r.lo == r.hi) return pacman_odf(x, y, r.lo);
        // The integrand has kinks where the nearest-feature case changes;
        // splitting there keeps the adaptive rule fast.
        double cuts[3] = {x, y, std::hypot(x, y)};
        double pieces[5];
        int np = 0;
        pieces[np++] = r.lo;
        for (double c : cuts)
          if (c > r.lo && c < r.hi) pieces[np++] = c;
        pieces[np++] = r.hi;
        for (int s = 1; s < np; ++s) {
          double key = pieces[s];
          int t = s - 1;
          for (; t >= 0 && pieces[t] > key; --t) pieces[t + 1] = pieces[t];
          pieces[t + 1] = key;
        }
        double total = 0.0;
        for (int s = 0; s + 1 < np; ++s)
          total += integrate([&](double rr) { return pacman_odf(x, y, rr); }, pieces[s],
                             pieces[s + 1]);
        return total / (r.hi - r.lo);
      });
      break;
    }
  }
  return field;
}

ScalarField estimand_field(const RandomSetModel& model, const GridDomain& domain) {
  if (model.kind == ModelKind::disc_random_centre_square) {
    model.validate();
    double radius = model.param("r", 1.0);
    ScalarField field(domain);
    for (int j = 0; j < domain.ny; ++j) {
      double y = domain.y0 + j * domain.h;
      for (int i = 0; i < domain.nx; ++i)
        field[domain.index(i, j)] = std::hypot(domain.x0 + i * domain.h, y) - radius;
    }
    return field;
  }
  return expected_odf(model, domain);
}

bool has_limit_sampler(ModelKind kind) {
  switch (kind) {
    case ModelKind::disc_random_radius:
    case ModelKind::disc_random_centre_square:
    case ModelKind::half_plane_angle:
    case ModelKind::set_or_boundary:
      return true;
    default:
      return false;
  }
}

FluctuationSampler limit_fluctuation_sampler(const RandomSetModel& model) {
  model.validate();
  switch (model.kind) {
    case ModelKind::disc_random_radius: {
      UniformRange r = range_param(model, 0.0, 1.0);
      double sd = (r.hi - r.lo) / std::sqrt(12.0);
      return [sd](Rng& rng) -> FieldDraw {
        double v = -sd * rng.normal();
        return [v](double, double) { return v; };
      };
    }
    case ModelKind::disc_random_centre_square: {
      // Z(x) = -x . Z0 / |x| with Z0 the Gaussian limit of the mean centre;
      // at the origin the field takes the supremum value |Z0|.
      double sd = model.param("w", 1.0) / std::sqrt(3.0);
      return [sd](Rng& rng) -> FieldDraw {
        double z1 = sd * rng.normal();
        double z2 = sd * rng.normal();
        return [z1, z2](double x, double y) {
          double rho = std::hypot(x, y);
          if (rho == 0.0) return std::hypot(z1, z2);
          return -(x * z1 + y * z2) / rho;
        };
      };
    }
    case ModelKind::half_plane_angle: {
      // Z(x) = x1 Z1 - x2 Z2 with (Z1, Z2) spread as the second-moment
      // matrix of (sin T, cos T); for T ~ U[0, pi] that matrix is I/2.
      double a = model.param("a", 0.0), b = model.param("b", kPi);
      double len = b - a;
      double m11 = 0.5 - (std::sin(2.0 * b) - std::sin(2.0 * a)) / (4.0 * len);
      double m22 = 1.0 - m11;
      double m12 = (std::cos(2.0 * a) - std::cos(2.0 * b)) / (4.0 * len);
      double l11 = std::sqrt(m11);
      double l21 = l11 > 0.0 ? m12 / l11 : 0.0;
      double l22 = std::sqrt(std::max(m22 - l21 * l21, 0.0));
      return [=](Rng& rng) -> FieldDraw {
        double g1 = rng.normal(), g2 = rng.normal();
        double z1 = l11 * g1;
        double z2 = l21 * g1 + l22 * g2;
        return [z1, z2](double x, double y) { return x * z1 - y * z2; };
      };
    }
    case ModelKind::set_or_boundary: {
      double p = prob_param(model);
      double sd = std::sqrt(p * (1.0 - p));
      return [sd](Rng& rng) -> FieldDraw {
        double g = sd * rng.normal();
        return [g](double x, double) {
          return g * (unit_interval_odf(x) - endpoint_pair_odf(x));
        };
      };
    }
    default:
      fail(Errc::unsupported_model,
           std::string(kind_name(model.kind)) + " has no closed-form fluctuation limit");
  }
}

}  // namespace rset
