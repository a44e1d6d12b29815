#pragma once

#include <optional>
#include <span>
#include <vector>

#include "limner/error.hpp"
#include "limner/stats.hpp"
#include "limner/types.hpp"

namespace limner::shadowfit {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Per-segment misfit term. The default reads "RMS of the inner products"
/// as RMS of (1 - |u.v|); AbsSine is sqrt(1 - (u.v)^2), kept as a swap-in.
enum class CostForm { OneMinusAbsDot, AbsSine };

struct ShadowFitOptions {
  /// Assumed focal distance in pixels; defaults to the painting width.
  std::optional<double> focal_px;
  CostForm cost = CostForm::OneMinusAbsDot;
  /// Use the OpenMP grid scan (the serial reference gives identical output).
  bool parallel = true;
};

struct ShadowFitReport {
  /// Vanishing angle in (-90, 90]; 0 = vanishing point at the image centre,
  /// 90 = point at infinity (shadows horizontal in the picture).
  double theta_deg = 0.0;
  double cost = 0.0;
  int n_segments = 0;
  std::vector<double> per_segment_deviation_deg;
  /// Index into doc.figures for each segment above.
  std::vector<int> figure_index;
};

inline constexpr double kGridStepDeg = 0.1;
inline constexpr double kRefineToleranceDeg = 0.001;

/// width/2 + focal * tan(theta); +-90 map to +-infinity.
double vanishing_x(double theta_deg, const PaintingMeta& meta,
                   std::optional<double> focal_px = std::nullopt);

/// Unit vector from the foot toward (vanishing_x(theta), y_h). At +-90 the
/// limit (+-1, 0) is returned. Throws AnalysisError if the foot sits on the
/// vanishing point.
Vec2 model_direction(Point foot, double theta_deg, const HorizonAnnotation& h,
                     const PaintingMeta& meta, std::optional<double> focal_px = std::nullopt);

/// Wraps any angle into (-90, 90]; the cost is 180-degree periodic.
double wrap_theta(double theta_deg);

/// Annotated shadow segments of one painting, reduced to what the cost needs.
class ShadowProblem {
 public:
  ShadowProblem(const AnnotationDocument& doc, const ShadowFitOptions& options = {});

  double cost(double theta_deg) const;
  /// |u.v| per segment at theta.
  std::vector<double> alignments(double theta_deg) const;

  int n_segments() const { return static_cast<int>(feet_.size()); }
  const std::vector<int>& figure_index() const { return figure_index_; }

 private:
  double abs_dot(std::size_t i, double theta_deg) const;

  std::vector<Point> feet_;
  std::vector<Vec2> dirs_;
  std::vector<int> figure_index_;
  double centre_x_ = 0.0;
  double focal_ = 0.0;
  double y_h_ = 0.0;
  CostForm form_ = CostForm::OneMinusAbsDot;
};

/// The 0.1-degree grid over [-90, 90] (1801 points).
std::vector<double> theta_grid();

/// Grid scan followed by golden-section refinement to 0.001 degrees.
ShadowFitReport fit_shadow_vanishing(const AnnotationDocument& doc,
                                     const ShadowFitOptions& options = {});

/// Pearson correlation of |theta| against cost over paintings.
stats::Correlation angle_cost_correlation(std::span<const ShadowFitReport> reports);

}  // namespace limner::shadowfit
