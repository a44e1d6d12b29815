#include "limner/synth.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "limner/corpus.hpp"
#include "limner/document.hpp"
#include "limner/eyelight.hpp"

namespace limner::synth {

using nlohmann::json;

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

void check_scene(const SyntheticScene& s) {
  if (!(s.camera_height_m > 0.0)) throw SynthError(s.id + ": camera_height_m must be positive");
  if (!(s.focal_px > 0.0)) throw SynthError(s.id + ": focal_px must be positive");
  if (s.width <= 0 || s.height <= 0) throw SynthError(s.id + ": image size must be positive");
  if (!(s.figure_height_m > 0.0)) throw SynthError(s.id + ": figure_height_m must be positive");
  if (!(s.horizon_y_px >= 0.0 && s.horizon_y_px < s.height)) {
    throw SynthError(s.id + ": horizon must lie inside the image");
  }
  if (s.shadows && !(s.sun_elevation_deg > 0.0 && s.sun_elevation_deg < 90.0)) {
    throw SynthError(s.id + ": sun elevation must lie in (0, 90)");
  }
}

struct Projector {
  const SyntheticScene& s;

  Point project(double x, double y, double z) const {
    return {0.5 * s.width + s.focal_px * x / z, s.horizon_y_px + s.focal_px * (s.camera_height_m - y) / z};
  }
  bool inside(Point p) const { return p.x >= 0.0 && p.x <= s.width && p.y >= 0.0 && p.y <= s.height; }

  GroundPoint shadow_tip(GroundPoint g) const {
    const double len = s.figure_height_m / std::tan(s.sun_elevation_deg * kDegToRad);
    const double az = s.sun_azimuth_deg * kDegToRad;
    return {g.x_m - len * std::sin(az), g.z_m - len * std::cos(az)};
  }

  // Returns an error message, or empty if the figure renders in frame.
  std::string check(GroundPoint g) const {
    if (!(g.z_m > 0.0)) return "figure behind the camera";
    if (!inside(project(g.x_m, 0.0, g.z_m)) || !inside(project(g.x_m, s.figure_height_m, g.z_m))) {
      return "figure projects outside the image";
    }
    if (s.shadows) {
      const auto tip = shadow_tip(g);
      if (!(tip.z_m > 1e-6)) return "shadow tip behind the camera";
      if (!inside(project(tip.x_m, 0.0, tip.z_m))) return "shadow tip projects outside the image";
    }
    return {};
  }
};

// --- spec parsing ----------------------------------------------------------

void require_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw SynthError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.contains(k)) throw SynthError(where + ": unknown field '" + k + "'");
  }
}

double get_real(const json& j, const char* key, const std::string& where, std::optional<double> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw SynthError(where + "." + key + ": missing");
  }
  if (!j[key].is_number()) throw SynthError(where + "." + key + ": expected a number");
  return j[key].get<double>();
}

int get_int(const json& j, const char* key, const std::string& where, std::optional<int> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw SynthError(where + "." + key + ": missing");
  }
  if (!j[key].is_number_integer()) throw SynthError(where + "." + key + ": expected an integer");
  return j[key].get<int>();
}

Vec3 get_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number()) {
    throw SynthError(where + ": expected [x, y, z]");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

struct FaceSpec {
  int count = 0;
  LightSource light;
  PoseGaze category = PoseGaze::LeftFacingFrontGazing;
  double size_px = 80.0;
};

}  // namespace

// --- Rng -----------------------------------------------------------------------

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal(double mean, double sd) {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return mean + sd * z;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  return mean + sd * r * std::cos(a);
}

// --- scene ---------------------------------------------------------------------

double true_slope(const SyntheticScene& scene) { return scene.figure_height_m / scene.camera_height_m; }

double true_theta_deg(const SyntheticScene& scene) {
  const double az = scene.sun_azimuth_deg * kDegToRad;
  const double s = std::sin(az);
  const double c = std::cos(az);
  if (std::fabs(c) < 1e-15) return 90.0;
  double t = std::atan(scene.focal_px * s / (scene.width * c)) * kRadToDeg;
  if (t <= -90.0) t += 180.0;
  return t;
}

AnnotationDocument render_annotations(const SyntheticScene& scene) {
  check_scene(scene);
  if (scene.figure_positions.empty()) throw SynthError(scene.id + ": no figures");
  const Projector proj{scene};

  AnnotationDocument doc;
  doc.meta.id = scene.id;
  doc.meta.title = "Synthetic scene " + scene.id;
  doc.meta.year = scene.year;
  doc.meta.width_px = scene.width;
  doc.meta.height_px = scene.height;
  doc.horizon = HorizonAnnotation{scene.horizon_y_px};
  for (std::size_t i = 0; i < scene.figure_positions.size(); ++i) {
    const auto& g = scene.figure_positions[i];
    if (auto err = proj.check(g); !err.empty()) {
      throw SynthError(scene.id + ": figure " + std::to_string(i) + ": " + err);
    }
    FigureAnnotation f;
    f.foot = proj.project(g.x_m, 0.0, g.z_m);
    f.head = proj.project(g.x_m, scene.figure_height_m, g.z_m);
    if (scene.shadows) {
      const auto tip = proj.shadow_tip(g);
      f.shadow_end = proj.project(tip.x_m, 0.0, tip.z_m);
    }
    doc.figures.push_back(f);
  }
  validate_document(doc);
  return doc;
}

std::vector<GroundPoint> sample_figures(const SyntheticScene& scene, const FigureSampling& sampling, Rng& rng) {
  check_scene(scene);
  if (sampling.n_figures < 1) throw SynthError(scene.id + ": n_figures must be >= 1");
  const Projector proj{scene};
  // Feet rows between just below the horizon and the bottom edge.
  const double below = scene.height - scene.horizon_y_px;
  const double z_near = std::max(sampling.z_min_m, scene.focal_px * scene.camera_height_m / (below - 1.0));
  const double z_far = sampling.z_max_m;
  if (!(z_far > z_near)) throw SynthError(scene.id + ": empty depth range for figures");
  const double half = 0.5 * scene.width * (1.0 - sampling.lateral_margin);

  std::vector<GroundPoint> out;
  int attempts = 0;
  while (static_cast<int>(out.size()) < sampling.n_figures) {
    if (++attempts > sampling.max_attempts) {
      throw SynthError(scene.id + ": could not place figures inside the image");
    }
    // Uniform in inverse depth spreads figures evenly over image rows.
    const double inv = rng.uniform(1.0 / z_far, 1.0 / z_near);
    const double z = 1.0 / inv;
    const double u = rng.uniform(-half, half);
    const GroundPoint g{u * z / scene.focal_px, z};
    if (proj.check(g).empty()) out.push_back(g);
  }
  return out;
}

// --- eye model -------------------------------------------------------------------

Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
Vec3 normalized(Vec3 v) { return (1.0 / norm(v)) * v; }

double angle_between(Vec3 a, Vec3 b) {
  const Vec3 c{a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
  return std::atan2(norm(c), dot(a, b));
}

Vec3 specular_point(Vec3 centre, double radius, const LightSource& light) {
  if (!(radius > 0.0)) throw SynthError("eye radius must be positive");
  const Vec3 view{0.0, 0.0, 1.0};
  if (light.at_infinity) {
    const double len = norm(light.direction);
    if (!(len > 0.0)) throw SynthError("light direction must be non-zero");
    const Vec3 l = (1.0 / len) * light.direction;
    if (!(dot(l, view) > 0.0)) throw SynthError("light behind the head: no visible reflection");
    return centre + radius * normalized(l + view);
  }
  const Vec3 d = light.position - centre;
  if (!(norm(d) > radius)) throw SynthError("light inside the eye");
  if (!(dot(d, view) > 0.0)) throw SynthError("light behind the head: no visible reflection");
  const Vec3 perp = d - dot(d, view) * view;
  const double perp_len = norm(perp);
  if (perp_len == 0.0) return centre + radius * view;
  const Vec3 w = (1.0 / perp_len) * perp;
  const double beta = angle_between(view, d);

  // Normal at angle alpha from the view axis, in the plane of view and light.
  // The mirror condition angle(n, to_light) == angle(n, view) == alpha is
  // positive at alpha = 0 and negative at alpha = beta.
  const auto normal_at = [&](double a) { return std::cos(a) * view + std::sin(a) * w; };
  const auto mismatch = [&](double a) {
    const Vec3 n = normal_at(a);
    return angle_between(n, light.position - (centre + radius * n)) - a;
  };
  double lo = 0.0;
  double hi = beta;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mismatch(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return centre + radius * normal_at(0.5 * (lo + hi));
}

EyelightPair render_eyelights(const LightSource& light, const EyeGeometry& eyes, const OrthoProjection& proj) {
  if (!(eyes.left_centre.x < eyes.right_centre.x)) throw SynthError("left eye must have the smaller x");
  if (!(norm(eyes.right_centre - eyes.left_centre) > 2.0 * eyes.radius)) throw SynthError("eyes intersect");
  const auto to_px = [&](Vec3 p) {
    return Point{proj.origin.x + proj.scale_px * p.x, proj.origin.y - proj.scale_px * p.y};
  };
  const Vec3 ql = specular_point(eyes.left_centre, eyes.radius, light);
  const Vec3 qr = specular_point(eyes.right_centre, eyes.radius, light);
  EyelightPair pair{to_px(eyes.left_centre), to_px(ql), to_px(eyes.right_centre), to_px(qr)};
  if (pair.left_highlight == pair.left_pupil || pair.right_highlight == pair.right_pupil) {
    throw SynthError("light on the view axis: highlight coincides with pupil");
  }
  return pair;
}

// --- corpus --------------------------------------------------------------------

void write_synthetic_corpus(const json& spec, const std::filesystem::path& out_dir) {
  require_keys(spec, "spec", {"seed", "paintings"});
  if (!spec.contains("paintings") || !spec["paintings"].is_array() || spec["paintings"].empty()) {
    throw SynthError("spec.paintings: expected a non-empty array");
  }
  std::uint64_t seed = 0;
  if (spec.contains("seed")) {
    if (!spec["seed"].is_number_unsigned() && !spec["seed"].is_number_integer()) {
      throw SynthError("spec.seed: expected an integer");
    }
    seed = spec["seed"].get<std::uint64_t>();
  }

  std::vector<AnnotationDocument> docs;
  json truth = json::array();
  std::set<std::string> ids;
  for (std::size_t pi = 0; pi < spec["paintings"].size(); ++pi) {
    const auto& p = spec["paintings"][pi];
    const std::string where = "paintings[" + std::to_string(pi) + "]";
    require_keys(p, where,
                 {"id", "title", "year", "width", "height", "horizon_y", "focal_px", "camera_height_m",
                  "figure_height_m", "figures", "figure_positions", "sun_azimuth_deg", "sun_elevation_deg",
                  "shadows", "faces"});
    SyntheticScene scene;
    if (!p.contains("id") || !p["id"].is_string() || p["id"].get<std::string>().empty()) {
      throw SynthError(where + ".id: expected a non-empty string");
    }
    scene.id = p["id"].get<std::string>();
    if (!ids.insert(scene.id).second) throw SynthError(where + ".id: duplicate '" + scene.id + "'");
    if (p.contains("year") && !p["year"].is_null()) scene.year = get_int(p, "year", where);
    scene.width = get_int(p, "width", where, 1200);
    scene.height = get_int(p, "height", where, 800);
    scene.horizon_y_px = get_real(p, "horizon_y", where, 0.3 * scene.height);
    scene.focal_px = get_real(p, "focal_px", where, static_cast<double>(scene.width));
    scene.camera_height_m = get_real(p, "camera_height_m", where);
    scene.figure_height_m = get_real(p, "figure_height_m", where, 1.65);
    scene.sun_azimuth_deg = get_real(p, "sun_azimuth_deg", where, 90.0);
    scene.sun_elevation_deg = get_real(p, "sun_elevation_deg", where, 40.0);
    if (p.contains("shadows")) {
      if (!p["shadows"].is_boolean()) throw SynthError(where + ".shadows: expected a boolean");
      scene.shadows = p["shadows"].get<bool>();
    }
    check_scene(scene);

    Rng rng(seed ^ (0x9E3779B97F4A7C15ULL * (pi + 1)));
    if (p.contains("figure_positions")) {
      const auto& fp = p["figure_positions"];
      if (!fp.is_array()) throw SynthError(where + ".figure_positions: expected an array");
      for (const auto& g : fp) {
        if (!g.is_array() || g.size() != 2 || !g[0].is_number() || !g[1].is_number()) {
          throw SynthError(where + ".figure_positions: expected [x_m, z_m] pairs");
        }
        scene.figure_positions.push_back({g[0].get<double>(), g[1].get<double>()});
      }
    } else {
      FigureSampling sampling;
      sampling.n_figures = get_int(p, "figures", where, 0);
      if (sampling.n_figures < 1) throw SynthError(where + ": figure list is empty");
      scene.figure_positions = sample_figures(scene, sampling, rng);
    }
    if (scene.figure_positions.empty()) throw SynthError(where + ": figure list is empty");

    AnnotationDocument doc;
    try {
      doc = render_annotations(scene);
    } catch (const SynthError& e) {
      throw SynthError(where + ": " + e.what());
    }
    if (p.contains("title")) {
      if (!p["title"].is_string()) throw SynthError(where + ".title: expected a string");
      doc.meta.title = p["title"].get<std::string>();
    }

    json deltas = json::array();
    if (p.contains("faces")) {
      const auto& fj = p["faces"];
      const std::string fw = where + ".faces";
      require_keys(fj, fw, {"count", "light", "category", "size_px"});
      FaceSpec fs;
      fs.count = get_int(fj, "count", fw);
      fs.size_px = get_real(fj, "size_px", fw, 80.0);
      if (fs.count < 0) throw SynthError(fw + ".count: must be >= 0");
      if (!(fs.size_px >= 8.0) || fs.size_px > std::min(scene.width, scene.height)) {
        throw SynthError(fw + ".size_px: out of range");
      }
      if (fj.contains("category")) {
        if (!fj["category"].is_string()) throw SynthError(fw + ".category: expected a string");
        auto c = pose_gaze_from_code(fj["category"].get<std::string>());
        if (!c) throw SynthError(fw + ".category: unknown value");
        fs.category = *c;
      }
      if (!fj.contains("light")) throw SynthError(fw + ".light: missing");
      const auto& lj = fj["light"];
      require_keys(lj, fw + ".light", {"position", "direction"});
      if (lj.contains("position") == lj.contains("direction")) {
        throw SynthError(fw + ".light: give exactly one of position or direction");
      }
      if (lj.contains("position")) {
        fs.light.position = get_vec3(lj["position"], fw + ".light.position");
      } else {
        fs.light.at_infinity = true;
        fs.light.direction = get_vec3(lj["direction"], fw + ".light.direction");
      }

      for (int k = 0; k < fs.count; ++k) {
        FaceAnnotation face;
        face.category = fs.category;
        face.bbox = {rng.uniform(0.0, scene.width - fs.size_px), rng.uniform(0.0, scene.height - fs.size_px),
                     fs.size_px, fs.size_px};
        // Face frame in millimetres; a 160 mm wide face fills the box.
        const double half_iod = rng.uniform(28.0, 34.0);
        EyeGeometry eyes{{-half_iod, 0.0, 0.0}, {half_iod, 0.0, 0.0}, rng.uniform(11.0, 13.0)};
        const OrthoProjection proj{fs.size_px / 160.0,
                                   {face.bbox.x + 0.5 * fs.size_px, face.bbox.y + 0.5 * fs.size_px}};
        try {
          face.eyelights = render_eyelights(fs.light, eyes, proj);
        } catch (const SynthError& e) {
          throw SynthError(fw + ": " + e.what());
        }
        const auto rec = eyelight::interocular_delta(*face.eyelights);
        deltas.push_back(rec ? json(rec->delta_deg) : json(nullptr));
        doc.faces.push_back(face);
      }
    }
    validate_document(doc);

    truth.push_back(json{{"id", scene.id},
                         {"true_slope", true_slope(scene)},
                         {"true_theta_deg", scene.shadows ? json(true_theta_deg(scene)) : json(nullptr)},
                         {"true_deltas_deg", std::move(deltas)}});
    docs.push_back(std::move(doc));
  }

  std::filesystem::create_directories(out_dir);
  CorpusIndex index;
  index.root = out_dir;
  for (const auto& doc : docs) {
    const auto file = doc.meta.id + ".json";
    save_document(doc, out_dir / file);
    index.entries.push_back({doc.meta.id, "", file, doc.meta.year});
  }
  write_corpus_index(index);
  write_file_atomic(out_dir / "truth.json", json{{"seed", seed}, {"paintings", truth}}.dump(2) + "\n");
}

}  // namespace limner::synth
