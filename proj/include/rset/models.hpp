#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "rset/grid.hpp"
#include "rset/meanset.hpp"
#include "rset/rng.hpp"

namespace rset {

enum class ModelKind {
  disc_random_radius,
  disc_random_centre_1d_offset,
  disc_random_centre_square,
  interval_random_centre,
  half_plane_angle,
  set_or_boundary,
  missing_timbit,
  blinking_square,
  flashing_discs,
  flashing_discs_reverse,
  pacman_random_radius,
};

const char* kind_name(ModelKind kind);
ModelKind kind_from_name(const std::string& name);

// A seedable generative model for random closed sets. Parameters are named
// reals with per-kind defaults:
//   disc_random_radius           lo=0, hi=1      disc {|x| <= R}, R ~ U[lo,hi]
//   disc_random_centre_1d_offset r=1, lo=0, hi=2 disc of radius r at (T,0), T ~ U[lo,hi]
//   disc_random_centre_square    r=1, w=1        disc of radius r at U ~ U[-w,w]^2
//   interval_random_centre       len=1, lo=-1, hi=1  {|x-T| <= len}, T ~ U[lo,hi]  (1-D)
//   half_plane_angle             a=0, b=pi       {x2 >= x1 tan(T)}, T ~ U[a,b], 0 < b-a < 2pi
//   set_or_boundary              p=0.5           [0,1] with prob p, else {0,1}   (1-D)
//   missing_timbit               p=0.5           disc {|x|<=1} with prob p, else donut {0.5<=|x|<=1}
//   blinking_square              p=0.5           [0,3]x[0,1] with prob p, else it loses its middle third
//   flashing_discs               r=1, a=2, p=0.5 disc of radius r at origin with prob p, else at (a,0)
//   flashing_discs_reverse       r=1, a=2, p=0.5 complements of the flashing discs
//   pacman_random_radius         lo=0, hi=1      disc of radius R ~ U[lo,hi] minus the open
//                                                quadrant {x1 > 0, x2 > 0}
struct RandomSetModel {
  ModelKind kind = ModelKind::disc_random_radius;
  std::map<std::string, double> params;
  std::uint64_t seed = 0;

  double param(const std::string& name, double fallback) const;
  void validate() const;
};

// JSON form: {"kind": "...", "params": {...}, "seed": ...}.
RandomSetModel model_from_json(const std::string& text);
RandomSetModel model_from_json_file(const std::string& path);
std::string model_to_json(const RandomSetModel& model);

// Whether the model lives on the line (requires ny == 1) or in the plane.
bool is_one_dimensional(ModelKind kind);

// Whether sample_odf evaluates a closed-form ODF directly instead of
// rasterizing the set and running the distance transform.
bool has_analytic_odf(ModelKind kind);

// The scalar randomness behind one realization; at most two slots are used.
struct ModelDraw {
  double a = 0.0;
  double b = 0.0;
};

ModelDraw draw_latent(const RandomSetModel& model, Rng& rng);

// Closed-form ODF value at a point for a given draw (analytic kinds only).
double odf_value(const RandomSetModel& model, const ModelDraw& draw, double x, double y);

ScalarField sample_odf(const RandomSetModel& model, const GridDomain& domain, Rng& rng);

// n IID realizations; sample i is generated from a substream of seed keyed by
// i alone, so stacks are reproducible under any parallel schedule.
SampleStack sample_stack(const RandomSetModel& model, const GridDomain& domain, int n,
                         std::uint64_t seed);

// The deterministic field whose level sets coverage experiments target. This
// is the expected ODF except for disc_random_centre_square, whose published
// estimand is the distance to the disc at the mean centre, |x| - r.
ScalarField estimand_field(const RandomSetModel& model, const GridDomain& domain);

// One draw of a limiting fluctuation field, evaluable at any point.
using FieldDraw = std::function<double(double x, double y)>;
// Draws fluctuation fields; each call consumes randomness from the stream.
using FluctuationSampler = std::function<FieldDraw(Rng&)>;

// Models whose limiting fluctuation field has a known finite-dimensional
// form: disc_random_radius, disc_random_centre_square, half_plane_angle,
// set_or_boundary.
bool has_limit_sampler(ModelKind kind);
FluctuationSampler limit_fluctuation_sampler(const RandomSetModel& model);

// Substream salts: every consumer of (seed, index) randomness shifts its
// index into a distinct band so that, e.g., bootstrap replicate b never
// shares an engine state with sample b of the same seed.
enum class StreamClass : std::uint64_t {
  sample = 1,
  bootstrap = 2,
  limit_draw = 3,
  trial = 4,
  regression = 5,
};

inline std::uint64_t stream_index(StreamClass cls, std::uint64_t index) {
  return (static_cast<std::uint64_t>(cls) << 48) | index;
}

}  // namespace rset
