#pragma once

#include "limner/error.hpp"
#include "limner/stats.hpp"
#include "limner/types.hpp"

namespace limner::perspective {

inline constexpr double kDefaultHumanLengthM = 1.65;

struct ViewpointHeight {
  double lengths = 0.0;  // in figure lengths, 1 / slope
  double metres = 0.0;
};

struct SizeGradientResult {
  stats::RegressionReport regression;
  double viewpoint_height_lengths = 0.0;
  double viewpoint_height_m = 0.0;
  int n_figures = 0;
};

/// Vertical extent foot.y - head.y. Lean of the annotated line is ignored:
/// only vertical extents satisfy slope = figure height / camera height.
double figure_length(const FigureAnnotation& f);

/// foot.y - y_h; positive when the feet are below the horizon.
double distance_below_horizon(const FigureAnnotation& f, const HorizonAnnotation& h);

/// Throws AnalysisError for slope <= 0.
ViewpointHeight viewpoint_height(double slope, double human_length_m = kDefaultHumanLengthM);

/// Regresses figure length on distance below the horizon.
SizeGradientResult size_gradient(const AnnotationDocument& doc,
                                 double human_length_m = kDefaultHumanLengthM);

}  // namespace limner::perspective
