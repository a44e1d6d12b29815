#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "limner/types.hpp"

namespace limner::synth {

class SynthError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Seeded generator with platform-independent uniform and normal draws
/// (std:: distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal(double mean = 0.0, double sd = 1.0);
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

struct GroundPoint {
  double x_m = 0.0;  // lateral, positive right
  double z_m = 0.0;  // depth in front of the camera
};

/// Level pinhole camera at height camera_height_m over a flat ground plane,
/// looking along +z. The horizon sits at image row horizon_y_px.
struct SyntheticScene {
  std::string id = "synthetic";
  std::optional<int> year;
  double camera_height_m = 5.0;
  double focal_px = 1000.0;
  int width = 1000;
  int height = 750;
  double horizon_y_px = 250.0;
  double figure_height_m = 1.65;
  std::vector<GroundPoint> figure_positions;
  /// Direction toward the sun, measured in the ground plane from the viewing
  /// direction (+z) toward +x. 90 = sun to the right, parallel to the picture.
  double sun_azimuth_deg = 90.0;
  double sun_elevation_deg = 40.0;
  bool shadows = true;
};

/// Figure height over camera height.
double true_slope(const SyntheticScene& scene);

/// Vanishing angle the shadows converge to, under the focal = width
/// assumption used by the fit.
double true_theta_deg(const SyntheticScene& scene);

/// Exact projection of heads, feet and shadow tips. Throws SynthError if any
/// point falls outside the image or a shadow tip lies behind the camera.
AnnotationDocument render_annotations(const SyntheticScene& scene);

struct FigureSampling {
  int n_figures = 12;
  double z_min_m = 0.0;  // 0 = nearest depth that keeps feet in frame
  double z_max_m = 80.0;
  double lateral_margin = 0.1;  // fraction of the half-width kept free
  int max_attempts = 10000;
};

/// Draws figure positions until every figure (and its shadow) projects
/// inside the image.
std::vector<GroundPoint> sample_figures(const SyntheticScene& scene, const FigureSampling& sampling, Rng& rng);

// --- eye model ---------------------------------------------------------------

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

Vec3 operator+(Vec3 a, Vec3 b);
Vec3 operator-(Vec3 a, Vec3 b);
Vec3 operator*(double s, Vec3 v);
double dot(Vec3 a, Vec3 b);
double norm(Vec3 v);
Vec3 normalized(Vec3 v);
/// Angle between two vectors, accurate for small angles.
double angle_between(Vec3 a, Vec3 b);

/// Face frame: x to the viewer's right, y up, z toward the viewer. The viewer
/// is frontal and orthographic, i.e. looks along -z from z = +infinity.
struct LightSource {
  bool at_infinity = false;
  Vec3 position;   // finite light
  Vec3 direction;  // toward the light, used when at_infinity
};

struct EyeGeometry {
  Vec3 left_centre;   // viewer's left (smaller x)
  Vec3 right_centre;
  double radius = 12.0;
};

/// Maps face-frame (x, y) to image pixels: px = origin + scale * (x, -y).
struct OrthoProjection {
  double scale_px = 1.0;
  Point origin;
};

/// Point on the sphere where the light mirrors toward the viewer. Finite
/// lights are solved by bisection on the reflection condition to 1e-12 rad.
/// Throws SynthError when the light is not in front of the eye.
Vec3 specular_point(Vec3 centre, double radius, const LightSource& light);

/// Pupil = projected sphere centre; highlight = projected specular point.
EyelightPair render_eyelights(const LightSource& light, const EyeGeometry& eyes, const OrthoProjection& proj);

// --- corpus generation --------------------------------------------------------

/// Writes index.json, one annotation document per painting, and truth.json
/// (true slope, theta and interocular deltas) to `out_dir`. Spec format is
/// documented in the README. Throws SynthError for an invalid spec.
void write_synthetic_corpus(const nlohmann::json& spec, const std::filesystem::path& out_dir);

}  // namespace limner::synth
