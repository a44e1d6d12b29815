#include "limner/perspective.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace limner::perspective {

double figure_length(const FigureAnnotation& f) { return f.foot.y - f.head.y; }

double distance_below_horizon(const FigureAnnotation& f, const HorizonAnnotation& h) {
  return f.foot.y - h.y_h;
}

ViewpointHeight viewpoint_height(double slope, double human_length_m) {
  if (!(slope > 0.0)) {
    throw AnalysisError("non-positive size-gradient slope " + std::to_string(slope) +
                        ": figures do not shrink toward the horizon");
  }
  if (!(human_length_m > 0.0)) throw AnalysisError("human length must be positive");
  const double lengths = 1.0 / slope;
  return {lengths, human_length_m * lengths};
}

SizeGradientResult size_gradient(const AnnotationDocument& doc, double human_length_m) {
  if (!doc.horizon) throw AnalysisError(doc.meta.id + ": no horizon annotated");
  if (doc.figures.size() < 3) {
    throw AnalysisError(doc.meta.id + ": need at least 3 figures, have " +
                        std::to_string(doc.figures.size()));
  }
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(doc.figures.size());
  ys.reserve(doc.figures.size());
  for (const auto& f : doc.figures) {
    xs.push_back(distance_below_horizon(f, *doc.horizon));
    ys.push_back(figure_length(f));
  }

  SizeGradientResult out;
  try {
    out.regression = stats::ols(xs, ys);
  } catch (const stats::DegenerateInput& e) {
    throw AnalysisError(doc.meta.id + ": " + e.what());
  }
  const auto h = viewpoint_height(out.regression.slope, human_length_m);
  out.viewpoint_height_lengths = h.lengths;
  out.viewpoint_height_m = h.metres;
  out.n_figures = static_cast<int>(doc.figures.size());
  return out;
}

}  // namespace limner::perspective
