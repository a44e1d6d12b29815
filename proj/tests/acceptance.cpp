// Acceptance checks, one line per criterion. Exit status is nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "fixtures.hpp"
#include "generators.hpp"
#include "limner/document.hpp"
#include "limner/eyelight.hpp"
#include "limner/faces.hpp"
#include "limner/perspective.hpp"
#include "limner/shadowfit.hpp"
#include "limner/stats.hpp"
#include "limner/synth.hpp"

using namespace limner;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

int failures = 0;

template <typename F>
void criterion(const char* name, F&& body) {
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  if (!o.pass) ++failures;
  std::printf("%s %s%s%s\n", o.pass ? "PASS" : "FAIL", name, o.detail.empty() ? "" : " : ", o.detail.c_str());
  std::fflush(stdout);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

synth::SyntheticScene pinhole_scene(double camera_height, std::uint64_t seed) {
  synth::SyntheticScene s;
  s.camera_height_m = camera_height;
  s.width = 1600;
  s.height = 1000;
  s.focal_px = 1600;
  s.horizon_y_px = 300;
  s.shadows = false;
  synth::Rng rng(seed);
  s.figure_positions = synth::sample_figures(s, {}, rng);
  return s;
}

void pinhole(Outcome& o) {
  const auto t0 = Clock::now();
  for (int k = 0; k < 10; ++k) {
    const double camera = 3.0 + 6.0 * k / 9.0;
    const auto r = perspective::size_gradient(synth::render_annotations(pinhole_scene(camera, 10 + k)));
    const double err = std::fabs(r.regression.slope - 1.65 / camera);
    o.require(err <= 1e-6, "noiseless slope error " + num(err) + " at H=" + num(camera));
  }
  int covered = 0;
  for (int k = 0; k < 100; ++k) {
    const double camera = 3.0 + 6.0 * (k % 10) / 9.0;
    const auto scene = pinhole_scene(camera, 500 + k);
    auto doc = synth::render_annotations(scene);
    synth::Rng noise(9000 + k);
    const double sigma = 0.01 * scene.height;
    for (auto& f : doc.figures) {
      f.head.y += noise.normal(0.0, sigma);
      f.foot.y += noise.normal(0.0, sigma);
    }
    const auto ci = perspective::size_gradient(doc).regression.slope_ci95;
    const double truth = 1.65 / camera;
    if (ci.lo <= truth && truth <= ci.hi) ++covered;
  }
  o.require(covered >= 90, "noisy coverage " + std::to_string(covered) + "/100");
  const double dt = seconds_since(t0);
  o.require(dt < 5.0, "took " + num(dt) + " s");
  if (o.pass) o.detail = "coverage " + std::to_string(covered) + "/100, " + num(dt) + " s";
}

void arithmetic(Outcome& o) {
  const double a = perspective::viewpoint_height(0.17).metres;
  const double b = perspective::viewpoint_height(0.57).metres;
  o.require(std::fabs(a - 9.71) <= 0.01, "0.17 -> " + num(a));
  o.require(std::fabs(b - 2.90) <= 0.01, "0.57 -> " + num(b));
  const double la = perspective::viewpoint_height(0.17).lengths;
  const double lb = perspective::viewpoint_height(0.57).lengths;
  o.require(la < 6.0 && lb > 1.7, "lengths " + num(lb) + ".." + num(la));
  if (o.pass) o.detail = num(a) + " m, " + num(b) + " m";
}

AnnotationDocument shadow_scene(double theta, std::uint64_t seed) {
  synth::SyntheticScene s;
  s.width = 1200;
  s.height = 900;
  s.focal_px = 1200;
  s.horizon_y_px = 250;
  s.camera_height_m = 6;
  s.sun_azimuth_deg = theta;
  s.sun_elevation_deg = 35;
  synth::Rng rng(seed);
  synth::FigureSampling fs;
  fs.n_figures = 10;
  fs.z_max_m = 60;
  s.figure_positions = synth::sample_figures(s, fs, rng);
  return synth::render_annotations(s);
}

void shadow(Outcome& o) {
  double worst_time = 0.0;
  for (double theta : {-80.0, -45.0, 0.0, 30.0, 90.0}) {
    const auto doc = shadow_scene(theta, 3);
    const auto t0 = Clock::now();
    const auto r = shadowfit::fit_shadow_vanishing(doc);
    worst_time = std::max(worst_time, seconds_since(t0));
    const double d = std::fmod(std::fabs(r.theta_deg - theta), 180.0);
    const double gap = std::min(d, 180.0 - d);
    o.require(r.n_segments >= 10, "segments " + std::to_string(r.n_segments));
    o.require(gap <= 0.5, "theta " + num(theta) + " fitted " + num(r.theta_deg));
    const shadowfit::ShadowProblem p(doc);
    for (double g : shadowfit::theta_grid()) {
      o.require(p.cost(g) >= r.cost, "grid point " + num(g) + " beats optimizer at theta " + num(theta));
    }
  }
  o.require(worst_time < 2.0, "slowest fit " + num(worst_time) + " s");
  if (o.pass) o.detail = "slowest fit " + num(worst_time) + " s";
}

void statistics(Outcome& o) {
  const double p = stats::student_t_two_sided_p(-3.197, 317);
  const double p_cdf = 2.0 * stats::student_t_cdf(-3.197, 317);
  o.require(std::fabs(p - 0.002) <= 0.0005, "p = " + num(p));
  o.require(std::fabs(p - p_cdf) <= 1e-12, "tail and cdf disagree");
  synth::Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(-100, 100), b = rng.uniform(-5, 5);
    const int n = 3 + static_cast<int>(rng.uniform(0, 40));
    std::vector<double> xs(n), ys(n);
    for (int k = 0; k < n; ++k) {
      xs[k] = rng.uniform(-50, 50);
      ys[k] = a + b * xs[k];
    }
    const auto r = stats::ols(xs, ys);
    o.require(std::fabs(r.slope - b) <= 1e-9 && std::fabs(r.intercept - a) <= 1e-9, "ols inexact");
  }
  for (int i = 0; i < 2000; ++i) {
    const double t = rng.uniform(-30, 30);
    const int df = 1 + static_cast<int>(rng.uniform(0, 500));
    const double s = stats::student_t_cdf(t, df) + stats::student_t_cdf(-t, df);
    o.require(std::fabs(s - 1.0) <= 1e-12, "symmetry off at t=" + num(t) + " df=" + std::to_string(df));
  }
  if (o.pass) o.detail = "p = " + num(p);
}

void eyelights(Outcome& o) {
  synth::Rng rng(2024);
  int negative = 0;
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(28, 34);
    const synth::EyeGeometry eyes{{-a, 0, 0}, {a, 0, 0}, rng.uniform(11, 13)};
    synth::LightSource light;
    light.position = {rng.uniform(-100, 100), rng.uniform(50, 2000), rng.uniform(100, 3000)};
    const auto rec = eyelight::interocular_delta(synth::render_eyelights(light, eyes, {1.0, {500, 500}}));
    if (rec && rec->delta_deg < 0.0) ++negative;
  }
  o.require(negative == 100, "negative deltas " + std::to_string(negative) + "/100");
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(28, 34);
    const synth::EyeGeometry eyes{{-a, 0, 0}, {a, 0, 0}, rng.uniform(11, 13)};
    synth::LightSource light;
    light.at_infinity = true;
    light.direction = {rng.uniform(-1, 1), rng.uniform(0.05, 1), rng.uniform(0.2, 1)};
    const auto rec = eyelight::interocular_delta(synth::render_eyelights(light, eyes, {1.0, {500, 500}}));
    o.require(rec.has_value(), "infinite light gave no delta");
    if (rec) worst = std::max(worst, std::fabs(rec->delta_deg));
  }
  o.require(worst < 1e-9, "|delta| at infinity " + num(worst));
  for (int i = 0; i < 10000; ++i) {
    const Point p{rng.uniform(-500, 500), rng.uniform(-500, 500)};
    const Point q{rng.uniform(-500, 500), rng.uniform(-500, 500)};
    const double t = eyelight::tilt_angle(p, q);
    const double m = eyelight::tilt_angle({-p.x, p.y}, {-q.x, q.y});
    const double err = std::fabs(t) == 180.0 ? std::fabs(m - 180.0) : std::fabs(m + t);
    o.require(err <= 1e-12, "mirror error " + num(err));
  }
  if (o.pass) o.detail = "max |delta| at infinity " + num(worst);
}

void proportions(Outcome& o) {
  double worst_pct = 0.0, worst_prop = 0.0;
  for (int c = 0; c < 1000; ++c) {
    synth::Rng rng(70000 + c);
    const double widths[] = {1, 5, 10, 15, 30, 45, 60, 90};
    const double w = widths[static_cast<int>(rng.uniform(0, 8))];
    std::vector<double> angles(1 + static_cast<int>(rng.uniform(0, 300)));
    for (auto& a : angles) a = rng.uniform() < 0.1 ? 15.0 * std::round(rng.uniform(-12, 12)) : rng.uniform(-180, 180);
    const auto h = eyelight::histogram(angles, w);
    worst_pct = std::max(worst_pct, std::fabs(std::accumulate(h.percentages.begin(), h.percentages.end(), 0.0) - 100.0));

    std::vector<AnnotationDocument> docs(1 + static_cast<int>(rng.uniform(0, 8)));
    for (std::size_t d = 0; d < docs.size(); ++d) {
      docs[d] = testing::blank_document("d" + std::to_string(d));
      docs[d].meta.year = 1400 + static_cast<int>(rng.uniform(0, 500));
      const int n = 1 + static_cast<int>(rng.uniform(0, 12));
      for (int f = 0; f < n; ++f) {
        docs[d].faces.push_back({{0, 0, 10, 10}, kLabelledPoseGaze[static_cast<int>(rng.uniform(0, 5))], std::nullopt});
      }
    }
    const auto table = faces::category_time_table(docs, 1 + static_cast<int>(rng.uniform(0, 100)));
    for (const auto& bin : table.bins) {
      if (bin.n == 0) continue;
      worst_prop = std::max(worst_prop, std::fabs(std::accumulate(bin.proportions.begin(), bin.proportions.end(), 0.0) - 1.0));
    }
  }
  o.require(worst_pct <= 1e-9, "percentage sum off by " + num(worst_pct));
  o.require(worst_prop <= 1e-9, "proportion sum off by " + num(worst_prop));
  if (o.pass) o.detail = "max deviations " + num(worst_pct) + ", " + num(worst_prop);
}

image::Image noise_image(synth::Rng& rng, int w, int h) {
  auto img = image::make_image(w, h);
  for (auto& v : img.rgb) v = static_cast<std::uint8_t>(rng.next() & 0xff);
  return img;
}

void averaging(Outcome& o) {
  synth::Rng rng(5);
  const auto img = noise_image(rng, 64, 48);
  const std::vector<image::Image> copies(25, img);
  const auto avg = faces::average_images(copies, {64, 48}).to_srgb8();
  int worst = 0;
  for (std::size_t i = 0; i < img.rgb.size(); ++i) worst = std::max(worst, std::abs(avg.rgb[i] - img.rgb[i]));
  o.require(worst <= 1, "idempotence off by " + std::to_string(worst) + " grey levels");

  std::vector<image::Image> set;
  for (int i = 0; i < 30; ++i) set.push_back(noise_image(rng, 40 + i, 30 + (i * 7) % 20));
  const auto a = faces::average_images(set, {32, 32});
  std::reverse(set.begin(), set.end());
  std::swap(set[3], set[17]);
  const auto b = faces::average_images(set, {32, 32});
  double diff = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) diff = std::max(diff, std::fabs(a.pixels[i] - b.pixels[i]));
  o.require(diff <= 1e-9, "permutation changed the mean by " + num(diff));

  // 4000 paintings of mixed size streamed into a 256x256 average.
  std::vector<image::Image> pool;
  for (int i = 0; i < 16; ++i) pool.push_back(noise_image(rng, 300 + 17 * i, 220 + 13 * i));
  const auto t0 = Clock::now();
  faces::Averager averager({256, 256});
  for (int i = 0; i < 4000; ++i) averager.add(pool[i % pool.size()]);
  const auto big = averager.result();
  const double dt = seconds_since(t0);
  o.require(big.n_images == 4000, "averaged " + std::to_string(big.n_images) + " images");
  o.require(dt < 300.0, "4000-image average took " + num(dt) + " s");
  if (o.pass) o.detail = "4000 images in " + num(dt) + " s";
}

void round_trip(Outcome& o) {
  synth::Rng rng(31337);
  int kept = 0, rejected = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto doc = testing::random_document(rng, i);
    const auto back = parse_document(serialize_document(doc));
    if (back == doc && serialize_document(back) == serialize_document(doc)) ++kept;
  }
  for (int i = 0; i < 1000; ++i) {
    const auto doc = testing::random_document(rng, i);
    const auto m = testing::mutate_document(doc, rng);
    std::string got = "accepted";
    try {
      parse_document(m.bytes);
    } catch (const DocumentError& e) {
      got = std::string(e.error_class());
    }
    if (got == m.expected_class) {
      ++rejected;
    } else {
      o.require(false, m.description + ": expected " + m.expected_class + ", got " + got);
    }
  }
  o.require(kept == 1000, "round trips " + std::to_string(kept) + "/1000");
  if (o.pass) o.detail = std::to_string(kept) + " round trips, " + std::to_string(rejected) + " rejections";
}

}  // namespace

int main() {
  criterion("pinhole oracle", pinhole);
  criterion("viewpoint arithmetic", arithmetic);
  criterion("shadow-fit oracle", shadow);
  criterion("statistical kernel", statistics);
  criterion("eyelight oracle", eyelights);
  criterion("histogram and proportion invariants", proportions);
  criterion("averaging", averaging);
  criterion("round trip and validation", round_trip);
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
