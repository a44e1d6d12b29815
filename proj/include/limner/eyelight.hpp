#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "limner/error.hpp"
#include "limner/stats.hpp"
#include "limner/types.hpp"

namespace limner::eyelight {

/// Viewer-frame eye label (Left = smaller x in the image).
enum class Eye { Left, Right };

std::string_view to_string(Eye e);

struct TiltRecord {
  std::string painting_id;
  int face_index = 0;
  Eye eye = Eye::Left;
  double tilt_deg = 0.0;  // (-180, 180]
  std::optional<int> year;
};

/// Interocular difference in the sitter's anatomical frame:
/// delta = tilt(sitter's left eye) - tilt(sitter's right eye), where the
/// sitter's left eye is the viewer-right (larger x) one. Negative for a
/// finite light above the face midline.
struct InterocularRecord {
  std::string painting_id;
  int face_index = 0;
  double delta_deg = 0.0;
  double tilt_viewer_left_deg = 0.0;
  double tilt_viewer_right_deg = 0.0;
};

/// Direction of the pupil-to-highlight vector: atan2(w.x, -w.y) in degrees
/// with w = highlight - pupil in image coordinates (y down). 0 = highlight
/// straight above, negative = toward the viewer's left, 180 = straight below.
/// Throws AnalysisError when the points coincide.
double tilt_angle(Point pupil, Point highlight);

/// Wraps into (-180, 180].
double wrap_degrees(double deg);

/// Both eyes of every face carrying eyelights, in document then face order.
std::vector<TiltRecord> collect_tilts(std::span<const AnnotationDocument> docs);

/// Histogram over (-180, 180] with bins centred on multiples of the width;
/// bin c covers (c - w/2, c + w/2] and the 180 bin wraps around.
struct Histogram {
  double bin_width_deg = 15.0;
  std::vector<double> centres;
  std::vector<double> percentages;
  std::vector<int> counts;
  int n = 0;

  /// Percentage-weighted mean of the bin centres.
  double mean_deg() const;
};

/// Throws AnalysisError unless 0 < width <= 360 and 360 / width is integral.
std::vector<double> bin_centres(double bin_width_deg);
std::size_t bin_index(double angle_deg, double bin_width_deg);

Histogram histogram(std::span<const double> angles_deg, double bin_width_deg = 15.0);
Histogram corpus_histogram(std::span<const TiltRecord> records, double bin_width_deg = 15.0);

struct OverlayRow {
  double centre_deg = 0.0;
  double ours_pct = 0.0;
  double external_pct = 0.0;
  double difference_pct = 0.0;  // ours - external
};

struct OverlayTable {
  std::vector<OverlayRow> rows;
  double ours_mean_deg = 0.0;
  double external_mean_deg = 0.0;
  /// external mean - ours mean.
  double mean_gap_deg = 0.0;
};

/// Malformed external CSV or incompatible bin structure.
class ExternalDataError : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

/// External data uses the opposite sign convention: every angle is negated
/// before it is assigned to our bins. CSV columns: angle_deg,percentage.
OverlayTable compare_external_csv(const Histogram& ours, std::string_view csv_text);
OverlayTable compare_external(const Histogram& ours, const std::filesystem::path& external_csv);

struct TemporalRow {
  int year_start = 0;
  int year_end = 0;  // inclusive
  double mean_deg = 0.0;
  std::optional<double> sd_deg;  // absent when n == 1
  int n = 0;
};

struct TemporalResult {
  std::vector<TemporalRow> rows;
  std::vector<std::string> warnings;
};

/// Arithmetic mean and sample SD per year bin. Records without a year are
/// skipped; a warning is added when any |tilt| > 150 (wrap-sensitive data).
TemporalResult temporal_means(std::span<const TiltRecord> records, int bin_years = 25);

/// Viewer-frame tilts of both eyes and the sitter-frame delta, or nullopt if
/// either |tilt| >= 90 (light not from above).
std::optional<InterocularRecord> interocular_delta(const EyelightPair& pair);

struct InterocularResult {
  std::vector<InterocularRecord> records;
  int negative = 0;
  int positive = 0;
  /// Absent when the deltas cannot be tested (n < 2 or zero variance).
  std::optional<stats::TTestReport> ttest;
};

/// Throws AnalysisError if no face qualifies.
InterocularResult interocular_test(std::span<const AnnotationDocument> docs);

}  // namespace limner::eyelight
