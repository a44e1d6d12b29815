#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "generators.hpp"
#include "limner/document.hpp"

namespace limner {
namespace {

using nlohmann::json;
using testing::blank_document;
using testing::TempDir;

AnnotationDocument sample() {
  auto doc = blank_document("canaletto-01", 1000, 700);
  doc.meta.year = 1730;
  doc.meta.image_path = "images/c01.jpg";
  doc.horizon = HorizonAnnotation{300.5};
  doc.figures.push_back({{100, 400}, {100, 460}, Point{140, 470}});
  doc.figures.push_back({{500, 350}, {502, 380}, std::nullopt});
  doc.faces.push_back({{10, 10, 40, 50}, PoseGaze::LeftFacingFrontGazing,
                       EyelightPair{{20, 30}, {21, 29}, {35, 30}, {36, 29.5}}});
  doc.faces.push_back({{100, 100, 30, 30}, PoseGaze::Other, std::nullopt});
  return doc;
}

std::string error_class_of(std::string_view bytes) {
  try {
    parse_document(bytes);
  } catch (const DocumentError& e) {
    return std::string(e.error_class());
  } catch (...) {
    return "foreign";
  }
  return "none";
}

TEST(PoseGaze, CodesRoundTrip) {
  for (auto p : kAllPoseGaze) EXPECT_EQ(pose_gaze_from_code(to_code(p)), p);
  EXPECT_EQ(to_code(PoseGaze::LeftFacingLeftGazing), "LL");
  EXPECT_EQ(to_code(PoseGaze::Other), "OTHER");
  EXPECT_FALSE(pose_gaze_from_code("ll"));
}

TEST(Document, CanonicalLayout) {
  const auto j = to_json(sample());
  EXPECT_EQ(j["version"], 1);
  EXPECT_EQ(j["meta"]["id"], "canaletto-01");
  EXPECT_EQ(j["horizon"]["y_h"], 300.5);
  EXPECT_TRUE(j["figures"][1]["shadow_end"].is_null());
  EXPECT_EQ(j["faces"][0]["category"], "LF");
  EXPECT_TRUE(j["faces"][1]["eyelights"].is_null());
  const auto text = serialize_document(sample());
  EXPECT_EQ(text.back(), '\n');
  EXPECT_LT(text.find("\"faces\""), text.find("\"figures\""));
}

TEST(Document, RoundTripPreservesEverything) {
  const auto doc = sample();
  const auto text = serialize_document(doc);
  const auto back = parse_document(text);
  EXPECT_EQ(back, doc);
  EXPECT_EQ(serialize_document(back), text);
}

TEST(Document, NullYearAndNoHorizon) {
  auto doc = blank_document();
  const auto back = parse_document(serialize_document(doc));
  EXPECT_FALSE(back.meta.year);
  EXPECT_FALSE(back.horizon);
}

TEST(Document, SaveAndLoadFile) {
  TempDir dir;
  const auto path = dir / "doc.json";
  save_document(sample(), path);
  EXPECT_EQ(load_document(path), sample());
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
    EXPECT_EQ(e.path().filename(), "doc.json");  // no temp leftovers
  }
}

TEST(Document, SaveRejectsInvalidAndLeavesFileUntouched) {
  TempDir dir;
  const auto path = dir / "doc.json";
  save_document(sample(), path);
  const auto before = read_file(path);
  auto bad = sample();
  bad.figures[0].foot.y = 10;
  EXPECT_THROW(save_document(bad, path), InvariantError);
  EXPECT_EQ(read_file(path), before);
}

TEST(Document, LoadMissingFileIsIoError) {
  TempDir dir;
  EXPECT_THROW(load_document(dir / "nope.json"), IoError);
}

TEST(Document, ErrorClasses) {
  EXPECT_EQ(error_class_of("{"), "parse");
  EXPECT_EQ(error_class_of("[]"), "schema");
  EXPECT_EQ(error_class_of("42"), "schema");
  auto j = to_json(sample());
  j["figures"][0]["head"].erase("x");
  EXPECT_EQ(error_class_of(j.dump()), "schema");
  j = to_json(sample());
  j["meta"]["year"] = 1730.5;
  EXPECT_EQ(error_class_of(j.dump()), "schema");
  j = to_json(sample());
  j["figures"][0]["foot"]["y"] = 100;
  EXPECT_EQ(error_class_of(j.dump()), "invariant");
}

TEST(Document, InvariantMessagesNameTheElement) {
  auto doc = sample();
  doc.figures[1].foot.y = doc.figures[1].head.y;
  try {
    validate_document(doc);
    FAIL();
  } catch (const InvariantError& e) {
    EXPECT_NE(std::string(e.what()).find("figures[1]"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("below"), std::string::npos);
  }
}

TEST(Document, PointsOnTheImageEdgeAreValid) {
  auto doc = blank_document("edge", 100, 80);
  doc.horizon = HorizonAnnotation{0};
  doc.figures.push_back({{0, 0}, {100, 80}, Point{0, 80}});
  doc.faces.push_back({{0, 0, 100, 80}, PoseGaze::FrontFacingFrontGazing, std::nullopt});
  EXPECT_NO_THROW(validate_document(doc));
  doc.figures[0].foot.x = 100.0001;
  EXPECT_THROW(validate_document(doc), InvariantError);
}

TEST(Document, NonFiniteCoordinatesRejected) {
  auto doc = sample();
  doc.figures[0].head.x = NAN;
  EXPECT_THROW(validate_document(doc), InvariantError);
}

TEST(Document, EyelightPairJson) {
  const EyelightPair e{{1, 2}, {3, 4}, {5, 6}, {7, 8}};
  EXPECT_EQ(eyelight_pair_from_json(to_json(e)), e);
  auto j = to_json(e);
  j.erase("left_pupil");
  EXPECT_THROW(eyelight_pair_from_json(j), SchemaError);
}

TEST(DocumentProperty, RandomDocumentsRoundTrip) {
  synth::Rng rng(2024);
  for (int i = 0; i < 300; ++i) {
    const auto doc = testing::random_document(rng, i);
    ASSERT_NO_THROW(validate_document(doc));
    const auto text = serialize_document(doc);
    const auto back = parse_document(text);
    ASSERT_EQ(back, doc) << text;
    ASSERT_EQ(serialize_document(back), text);
  }
}

TEST(DocumentProperty, MutationsFailWithTheirClass) {
  synth::Rng rng(99);
  for (int i = 0; i < 300; ++i) {
    const auto doc = testing::random_document(rng, i);
    const auto m = testing::mutate_document(doc, rng);
    ASSERT_EQ(error_class_of(m.bytes), m.expected_class) << m.description;
  }
}

TEST(AtomicWrite, ReplacesContent) {
  TempDir dir;
  const auto path = dir / "f.txt";
  write_file_atomic(path, "one");
  write_file_atomic(path, "two");
  EXPECT_EQ(read_file(path), "two");
  EXPECT_THROW(write_file_atomic(dir / "missing" / "f.txt", "x"), IoError);
}

}  // namespace
}  // namespace limner
