#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace limner {

/// Pixel coordinates, origin top-left, x rightward, y downward.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }

struct PaintingMeta {
  std::string id;
  std::string title;
  std::optional<int> year;
  std::int64_t width_px = 0;
  std::int64_t height_px = 0;
  std::string image_path;

  friend bool operator==(const PaintingMeta&, const PaintingMeta&) = default;
};

/// Horizontal horizon line y = y_h. Tilted horizons are not modelled.
struct HorizonAnnotation {
  double y_h = 0.0;

  friend bool operator==(const HorizonAnnotation&, const HorizonAnnotation&) = default;
};

/// Head-to-foot body line with an optional foot-to-shadow-tip leg.
struct FigureAnnotation {
  Point head;
  Point foot;
  std::optional<Point> shadow_end;

  friend bool operator==(const FigureAnnotation&, const FigureAnnotation&) = default;
};

enum class PoseGaze {
  LeftFacingLeftGazing,
  LeftFacingFrontGazing,
  FrontFacingFrontGazing,
  RightFacingFrontGazing,
  RightFacingRightGazing,
  Other,
};

inline constexpr PoseGaze kAllPoseGaze[] = {
    PoseGaze::LeftFacingLeftGazing,   PoseGaze::LeftFacingFrontGazing,
    PoseGaze::FrontFacingFrontGazing, PoseGaze::RightFacingFrontGazing,
    PoseGaze::RightFacingRightGazing, PoseGaze::Other,
};

/// The five lateral/frontal classes, i.e. everything except Other.
inline constexpr PoseGaze kLabelledPoseGaze[] = {
    PoseGaze::LeftFacingLeftGazing,   PoseGaze::LeftFacingFrontGazing,
    PoseGaze::FrontFacingFrontGazing, PoseGaze::RightFacingFrontGazing,
    PoseGaze::RightFacingRightGazing,
};

/// "LL", "LF", "FF", "RF", "RR", "OTHER".
std::string_view to_code(PoseGaze p);
std::optional<PoseGaze> pose_gaze_from_code(std::string_view code);

/// Pupil and highlight centres for both eyes. Left/right are in the viewer's
/// frame: the left eye is the one with the smaller x.
struct EyelightPair {
  Point left_pupil;
  Point left_highlight;
  Point right_pupil;
  Point right_highlight;

  friend bool operator==(const EyelightPair&, const EyelightPair&) = default;
};

struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct FaceAnnotation {
  BBox bbox;
  PoseGaze category = PoseGaze::Other;
  std::optional<EyelightPair> eyelights;

  friend bool operator==(const FaceAnnotation&, const FaceAnnotation&) = default;
};

struct AnnotationDocument {
  PaintingMeta meta;
  std::optional<HorizonAnnotation> horizon;
  std::vector<FigureAnnotation> figures;
  std::vector<FaceAnnotation> faces;

  friend bool operator==(const AnnotationDocument&, const AnnotationDocument&) = default;
};

inline constexpr int kSchemaVersion = 1;

}  // namespace limner
