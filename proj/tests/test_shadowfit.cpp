#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "limner/shadowfit.hpp"
#include "limner/synth.hpp"

namespace limner::shadowfit {
namespace {

using testing::blank_document;

double angle_gap(double a, double b) {
  const double d = std::fmod(std::fabs(a - b), 180.0);
  return std::min(d, 180.0 - d);
}

AnnotationDocument shadow_scene(double theta, std::uint64_t seed, int n = 12) {
  synth::SyntheticScene s;
  s.id = "theta";
  s.width = 1200;
  s.height = 900;
  s.focal_px = 1200;
  s.horizon_y_px = 250;
  s.camera_height_m = 6;
  s.sun_azimuth_deg = theta;
  s.sun_elevation_deg = 35;
  synth::Rng rng(seed);
  synth::FigureSampling fs;
  fs.n_figures = n;
  fs.z_max_m = 60;
  s.figure_positions = synth::sample_figures(s, fs, rng);
  return synth::render_annotations(s);
}

TEST(ShadowFit, WrapTheta) {
  EXPECT_DOUBLE_EQ(wrap_theta(90.0), 90.0);
  EXPECT_DOUBLE_EQ(wrap_theta(-90.0), 90.0);
  EXPECT_DOUBLE_EQ(wrap_theta(100.0), -80.0);
  EXPECT_DOUBLE_EQ(wrap_theta(-100.0), 80.0);
  EXPECT_DOUBLE_EQ(wrap_theta(270.0), 90.0);
  EXPECT_DOUBLE_EQ(wrap_theta(0.0), 0.0);
  EXPECT_DOUBLE_EQ(wrap_theta(45.0), 45.0);
}

TEST(ShadowFit, VanishingX) {
  const auto meta = blank_document("v", 1000, 500).meta;
  EXPECT_DOUBLE_EQ(vanishing_x(0.0, meta), 500.0);
  EXPECT_NEAR(vanishing_x(45.0, meta), 1500.0, 1e-9);
  EXPECT_NEAR(vanishing_x(-45.0, meta, 200.0), 300.0, 1e-9);
  EXPECT_TRUE(std::isinf(vanishing_x(90.0, meta)));
  EXPECT_LT(vanishing_x(-90.0, meta), 0.0);
}

TEST(ShadowFit, ModelDirection) {
  const auto meta = blank_document("v", 1000, 500).meta;
  const HorizonAnnotation h{100};
  const auto d = model_direction({500, 400}, 0.0, h, meta);
  EXPECT_NEAR(d.x, 0.0, 1e-15);
  EXPECT_NEAR(d.y, -1.0, 1e-15);
  const auto inf = model_direction({500, 400}, 90.0, h, meta);
  EXPECT_EQ(inf.x, 1.0);
  EXPECT_EQ(inf.y, 0.0);
  EXPECT_THROW(model_direction({500, 100}, 0.0, h, meta), AnalysisError);
  // Near 90 the direction approaches the horizontal limit continuously.
  const auto near = model_direction({500, 400}, 89.9999, h, meta);
  EXPECT_NEAR(near.x, 1.0, 1e-6);
}

TEST(ShadowFit, CostVanishesAtTruthAndIsPeriodic) {
  const auto doc = shadow_scene(30.0, 1);
  const ShadowProblem p(doc);
  EXPECT_NEAR(p.cost(30.0), 0.0, 1e-12);
  EXPECT_GT(p.cost(0.0), 1e-3);
  for (double t = -89.0; t < 90.0; t += 7.3) EXPECT_NEAR(p.cost(t), p.cost(t + 180.0), 1e-12);
  for (double a : p.alignments(30.0)) EXPECT_NEAR(a, 1.0, 1e-12);
}

TEST(ShadowFit, RecoversKnownAngles) {
  for (double theta : {-80.0, -45.0, 0.0, 30.0, 90.0}) {
    const auto r = fit_shadow_vanishing(shadow_scene(theta, 7, 10));
    EXPECT_LT(angle_gap(r.theta_deg, theta), 0.01) << theta;
    EXPECT_LT(r.cost, 1e-6);
    EXPECT_EQ(r.n_segments, 10);
    EXPECT_GT(r.theta_deg, -90.0);
    EXPECT_LE(r.theta_deg, 90.0);
  }
}

TEST(ShadowFit, RandomAnglesRecovered) {
  synth::Rng rng(31);
  for (int i = 0; i < 40; ++i) {
    const double theta = rng.uniform(-89.5, 89.5);
    const auto r = fit_shadow_vanishing(shadow_scene(theta, 100 + i));
    EXPECT_LT(angle_gap(r.theta_deg, theta), 0.01) << theta;
  }
}

TEST(ShadowFit, OptimizerBeatsFineBruteForce) {
  synth::Rng rng(8);
  for (int i = 0; i < 10; ++i) {
    auto doc = shadow_scene(rng.uniform(-85, 85), 200 + i);
    for (auto& f : doc.figures) {
      f.shadow_end->x += rng.normal(0.0, 4.0);
      f.shadow_end->y += rng.normal(0.0, 4.0);
    }
    const auto r = fit_shadow_vanishing(doc);
    const ShadowProblem p(doc);
    for (int k = -9000; k <= 9000; ++k) {
      ASSERT_GE(p.cost(k * 0.01), r.cost - 1e-12) << "theta " << k * 0.01;
    }
  }
}

TEST(ShadowFit, ParallelMatchesReference) {
  const auto doc = shadow_scene(-12.5, 4);
  ShadowFitOptions serial;
  serial.parallel = false;
  const auto a = fit_shadow_vanishing(doc);
  const auto b = fit_shadow_vanishing(doc, serial);
  EXPECT_EQ(a.theta_deg, b.theta_deg);
  EXPECT_EQ(a.cost, b.cost);
  EXPECT_EQ(a.per_segment_deviation_deg, b.per_segment_deviation_deg);
}

TEST(ShadowFit, AbsSineCostAgreesOnExactData) {
  ShadowFitOptions opts;
  opts.cost = CostForm::AbsSine;
  const auto r = fit_shadow_vanishing(shadow_scene(52.0, 2), opts);
  EXPECT_LT(angle_gap(r.theta_deg, 52.0), 0.01);
}

TEST(ShadowFit, FocalOptionChangesTheAngleScale) {
  const auto doc = shadow_scene(30.0, 3);
  ShadowFitOptions opts;
  opts.focal_px = 600.0;  // half the width: same vanishing point at a larger angle
  const auto r = fit_shadow_vanishing(doc, opts);
  const double expected = std::atan(2.0 * std::tan(30.0 * M_PI / 180.0)) * 180.0 / M_PI;
  EXPECT_LT(angle_gap(r.theta_deg, expected), 0.01);
}

TEST(ShadowFit, DeviationsReportedPerSegment) {
  auto doc = shadow_scene(10.0, 5, 6);
  doc.figures[2].shadow_end.reset();
  const auto r = fit_shadow_vanishing(doc);
  EXPECT_EQ(r.n_segments, 5);
  EXPECT_EQ(r.figure_index, (std::vector<int>{0, 1, 3, 4, 5}));
  for (double d : r.per_segment_deviation_deg) EXPECT_LT(d, 0.05);
}

TEST(ShadowFit, Preconditions) {
  auto doc = blank_document();
  doc.figures = {{{1, 1}, {1, 10}, Point{5, 12}}, {{2, 1}, {2, 20}, Point{6, 30}}};
  EXPECT_THROW(fit_shadow_vanishing(doc), AnalysisError);
  doc.horizon = HorizonAnnotation{0};
  doc.figures[1].shadow_end.reset();
  EXPECT_THROW(fit_shadow_vanishing(doc), AnalysisError);
  EXPECT_EQ(theta_grid().size(), 1801u);
  EXPECT_EQ(theta_grid().front(), -90.0);
  EXPECT_EQ(theta_grid().back(), 90.0);
}

TEST(ShadowFit, AngleCostCorrelation) {
  std::vector<ShadowFitReport> reps(4);
  const double angles[] = {5, -20, 40, 80};
  const double costs[] = {0.01, 0.02, 0.04, 0.08};
  for (int i = 0; i < 4; ++i) {
    reps[i].theta_deg = angles[i];
    reps[i].cost = costs[i];
  }
  const auto c = angle_cost_correlation(reps);
  EXPECT_NEAR(c.r, stats::pearson(std::vector<double>{5, 20, 40, 80}, std::vector<double>{0.01, 0.02, 0.04, 0.08}).r, 1e-15);
  reps.pop_back();
  reps.pop_back();
  EXPECT_THROW(angle_cost_correlation(reps), stats::DegenerateInput);
}

}  // namespace
}  // namespace limner::shadowfit
