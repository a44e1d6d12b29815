#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "limner/faces.hpp"
#include "limner/synth.hpp"

namespace limner::faces {
namespace {

using testing::blank_document;
using testing::TempDir;

image::Image noise_image(int w, int h, std::uint64_t seed) {
  synth::Rng rng(seed);
  auto img = image::make_image(w, h);
  for (auto& v : img.rgb) v = static_cast<std::uint8_t>(rng.next() & 0xFF);
  return img;
}

FaceAnnotation face(PoseGaze c, BBox b = {0, 0, 10, 10}) { return {b, c, std::nullopt}; }

TEST(Categories, ProportionsPerBin) {
  auto a = blank_document("a");
  a.meta.year = 1701;
  a.faces = {face(PoseGaze::LeftFacingFrontGazing), face(PoseGaze::LeftFacingFrontGazing),
             face(PoseGaze::RightFacingRightGazing), face(PoseGaze::Other)};
  auto b = blank_document("b");
  b.meta.year = 1760;
  b.faces = {face(PoseGaze::FrontFacingFrontGazing)};
  auto c = blank_document("c");
  c.faces = {face(PoseGaze::LeftFacingLeftGazing), face(PoseGaze::Other)};
  const std::vector<AnnotationDocument> docs{a, b, c};
  const auto t = category_time_table(docs, 25);
  ASSERT_EQ(t.bins.size(), 2u);
  EXPECT_EQ(t.bins[0].year_start, 1700);
  EXPECT_EQ(t.bins[0].year_end, 1724);
  EXPECT_EQ(t.bins[0].n, 3);
  EXPECT_NEAR(t.bins[0].proportions[1], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(t.bins[0].proportions[4], 1.0 / 3.0, 1e-15);
  EXPECT_EQ(t.bins[1].year_start, 1750);
  EXPECT_EQ(t.bins[1].proportions[2], 1.0);
  EXPECT_EQ(t.n_faces, 7);
  EXPECT_EQ(t.n_other, 2);
  EXPECT_NEAR(t.other_rate, 2.0 / 7.0, 1e-15);
}

TEST(Categories, NegativeYearsBinDownward) {
  auto a = blank_document("a");
  a.meta.year = -5;
  a.faces = {face(PoseGaze::FrontFacingFrontGazing)};
  const std::vector<AnnotationDocument> docs{a};
  EXPECT_EQ(category_time_table(docs, 25).bins[0].year_start, -25);
}

TEST(Categories, RandomCorporaSumToOne) {
  synth::Rng rng(55);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<AnnotationDocument> docs;
    for (int d = 0; d < 1 + trial % 15; ++d) {
      auto doc = blank_document("d" + std::to_string(d));
      doc.meta.year = 1400 + static_cast<int>(rng.uniform(0, 500));
      for (int f = 0; f < 1 + static_cast<int>(rng.uniform(0, 8)); ++f) {
        doc.faces.push_back(face(kLabelledPoseGaze[static_cast<int>(rng.uniform(0, 5))]));
      }
      docs.push_back(doc);
    }
    const auto t = category_time_table(docs, 1 + static_cast<int>(rng.uniform(0, 50)));
    for (const auto& b : t.bins) {
      EXPECT_NEAR(std::accumulate(b.proportions.begin(), b.proportions.end(), 0.0), 1.0, 1e-9);
      EXPECT_EQ(std::accumulate(b.counts.begin(), b.counts.end(), 0), b.n);
    }
  }
}

TEST(Categories, Errors) {
  auto a = blank_document("a");
  a.faces = {face(PoseGaze::FrontFacingFrontGazing)};
  const std::vector<AnnotationDocument> undated{a};
  EXPECT_THROW(category_time_table(undated, 25), AnalysisError);
  EXPECT_THROW(category_time_table(undated, 0), AnalysisError);
}

TEST(Average, IdempotentOnCopies) {
  const auto img = noise_image(40, 30, 1);
  const std::vector<image::Image> copies(25, img);
  const auto avg = average_images(copies, {40, 30}).to_srgb8();
  for (std::size_t i = 0; i < img.rgb.size(); ++i) EXPECT_LE(std::abs(avg.rgb[i] - img.rgb[i]), 1);
  EXPECT_EQ(average_images(std::vector<image::Image>{img}, {40, 30}).to_srgb8(), img);
}

TEST(Average, PermutationInvariant) {
  std::vector<image::Image> imgs;
  for (int i = 0; i < 37; ++i) imgs.push_back(noise_image(12 + i % 5, 9 + i % 3, 10 + i));
  const auto a = average_images(imgs, {16, 16});
  synth::Rng rng(3);
  for (int k = 0; k < 5; ++k) {
    for (std::size_t i = imgs.size() - 1; i > 0; --i) {
      std::swap(imgs[i], imgs[static_cast<std::size_t>(rng.uniform(0, static_cast<double>(i + 1)))]);
    }
    const auto b = average_images(imgs, {16, 16});
    for (std::size_t i = 0; i < a.pixels.size(); ++i) EXPECT_NEAR(a.pixels[i], b.pixels[i], 1e-9);
  }
}

TEST(Average, ParallelMatchesReference) {
  std::vector<image::Image> imgs;
  for (int i = 0; i < 70; ++i) imgs.push_back(noise_image(20 + i, 15 + i / 2, 200 + i));
  const auto a = average_images(imgs, {24, 18});
  const auto b = average_images_reference(imgs, {24, 18});
  EXPECT_EQ(a.pixels, b.pixels);
  EXPECT_EQ(a.n_images, 70u);
}

TEST(Average, MeanIsTakenInLinearLight) {
  const std::vector<image::Image> imgs{image::make_image(2, 2, 0), image::make_image(2, 2, 255)};
  const auto avg = average_images(imgs, {2, 2});
  EXPECT_NEAR(avg.pixels[0], 0.5, 1e-7);
  EXPECT_EQ(avg.to_srgb8().rgb[0], 188);
}

TEST(Average, Errors) {
  EXPECT_THROW(average_images(std::vector<image::Image>{}, {4, 4}), AnalysisError);
  EXPECT_THROW(Averager({0, 4}), AnalysisError);
  Averager empty({4, 4});
  EXPECT_THROW(empty.result(), AnalysisError);
}

class FaceCorpus : public ::testing::Test {
 protected:
  void SetUp() override {
    painting = noise_image(64, 48, 77);
    image::write_png(dir / "p.png", painting);
    auto doc = blank_document("p", 64, 48);
    doc.meta.image_path = "p.png";
    doc.faces = {face(PoseGaze::LeftFacingFrontGazing, {8, 8, 16, 16}),
                 face(PoseGaze::RightFacingFrontGazing, {30, 20, 20, 20}),
                 face(PoseGaze::Other, {0, 0, 4, 4})};
    docs = {doc};
  }
  TempDir dir;
  image::Image painting;
  std::vector<AnnotationDocument> docs;
};

TEST_F(FaceCorpus, SingleFaceEqualsResampledCrop) {
  const auto avg = average_faces_by_category(docs, dir.path(), {PoseGaze::LeftFacingFrontGazing}, {16, 16});
  EXPECT_EQ(avg.n_images, 1u);
  const auto crop = image::resample_linear(painting, {8, 8, 16, 16}, 16, 16);
  for (std::size_t i = 0; i < crop.size(); ++i) EXPECT_EQ(avg.pixels[i], std::clamp<double>(crop[i], 0.0, 1.0));
  const auto png = avg.to_srgb8();
  EXPECT_EQ(png.at(3, 4, 1), painting.at(11, 12, 1));
}

TEST_F(FaceCorpus, LeftAndRightDiffer) {
  const auto l = average_faces_by_category(docs, dir.path(), {PoseGaze::LeftFacingFrontGazing}, {16, 16});
  const auto r = average_faces_by_category(docs, dir.path(), {PoseGaze::RightFacingFrontGazing}, {16, 16});
  double ss = 0.0;
  for (std::size_t i = 0; i < l.pixels.size(); ++i) ss += (l.pixels[i] - r.pixels[i]) * (l.pixels[i] - r.pixels[i]);
  EXPECT_GT(std::sqrt(ss / l.pixels.size()), 0.0);
  const auto both = average_faces_by_category(
      docs, dir.path(), {PoseGaze::LeftFacingFrontGazing, PoseGaze::RightFacingFrontGazing}, {16, 16});
  EXPECT_EQ(both.n_images, 2u);
}

TEST_F(FaceCorpus, BoxesFollowImageResolution) {
  // Annotated at half the stored resolution.
  docs[0].meta.width_px = 32;
  docs[0].meta.height_px = 24;
  docs[0].faces[0].bbox = {4, 4, 8, 8};
  const auto avg = average_faces_by_category(docs, dir.path(), {PoseGaze::LeftFacingFrontGazing}, {16, 16});
  const auto crop = image::resample_linear(painting, {8, 8, 16, 16}, 16, 16);
  for (std::size_t i = 0; i < crop.size(); ++i) EXPECT_FLOAT_EQ(static_cast<float>(avg.pixels[i]), crop[i]);
}

TEST_F(FaceCorpus, EmptySelectionAndMissingImage) {
  EXPECT_THROW(average_faces_by_category(docs, dir.path(), {PoseGaze::LeftFacingLeftGazing}), AnalysisError);
  docs[0].meta.image_path.clear();
  EXPECT_THROW(average_faces_by_category(docs, dir.path(), {PoseGaze::LeftFacingFrontGazing}), AnalysisError);
  EXPECT_THROW(average_paintings(docs, dir.path()), AnalysisError);
}

TEST_F(FaceCorpus, WholePaintings) {
  const auto avg = average_paintings(docs, dir.path(), {64, 48});
  EXPECT_EQ(avg.to_srgb8(), painting);
}

}  // namespace
}  // namespace limner::faces
