#include "limner/shadowfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "limner/kernels.hpp"

namespace limner::shadowfit {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double focal_for(const PaintingMeta& meta, std::optional<double> focal_px) {
  const double f = focal_px.value_or(static_cast<double>(meta.width_px));
  if (!(f > 0.0) || !std::isfinite(f)) throw AnalysisError("focal distance must be positive");
  return f;
}

// Direction from `foot` toward the horizon point at angle theta. Returns a
// zero vector when the foot coincides with that point.
Vec2 direction_to_vp(Point foot, double theta_deg, double centre_x, double focal, double y_h) {
  if (std::fabs(theta_deg) >= 90.0) return {theta_deg > 0 ? 1.0 : -1.0, 0.0};
  const double xv = centre_x + focal * std::tan(theta_deg * kDegToRad);
  const double dx = xv - foot.x;
  const double dy = y_h - foot.y;
  const double len = std::hypot(dx, dy);
  if (len == 0.0) return {0.0, 0.0};
  return {dx / len, dy / len};
}

}  // namespace

double wrap_theta(double theta_deg) {
  double t = std::fmod(theta_deg, 180.0);
  if (t > 90.0) t -= 180.0;
  if (t <= -90.0) t += 180.0;
  return t;
}

double vanishing_x(double theta_deg, const PaintingMeta& meta, std::optional<double> focal_px) {
  if (theta_deg >= 90.0) return std::numeric_limits<double>::infinity();
  if (theta_deg <= -90.0) return -std::numeric_limits<double>::infinity();
  return 0.5 * static_cast<double>(meta.width_px) +
         focal_for(meta, focal_px) * std::tan(theta_deg * kDegToRad);
}

Vec2 model_direction(Point foot, double theta_deg, const HorizonAnnotation& h,
                     const PaintingMeta& meta, std::optional<double> focal_px) {
  const auto d = direction_to_vp(foot, theta_deg, 0.5 * static_cast<double>(meta.width_px),
                                 focal_for(meta, focal_px), h.y_h);
  if (d.x == 0.0 && d.y == 0.0) throw AnalysisError("foot coincides with the vanishing point");
  return d;
}

ShadowProblem::ShadowProblem(const AnnotationDocument& doc, const ShadowFitOptions& options)
    : centre_x_(0.5 * static_cast<double>(doc.meta.width_px)),
      focal_(focal_for(doc.meta, options.focal_px)),
      form_(options.cost) {
  if (!doc.horizon) throw AnalysisError(doc.meta.id + ": no horizon annotated");
  y_h_ = doc.horizon->y_h;
  for (std::size_t i = 0; i < doc.figures.size(); ++i) {
    const auto& f = doc.figures[i];
    if (!f.shadow_end) continue;
    const double dx = f.shadow_end->x - f.foot.x;
    const double dy = f.shadow_end->y - f.foot.y;
    const double len = std::hypot(dx, dy);
    if (len == 0.0) continue;
    feet_.push_back(f.foot);
    dirs_.push_back({dx / len, dy / len});
    figure_index_.push_back(static_cast<int>(i));
  }
  if (feet_.size() < 2) {
    throw AnalysisError(doc.meta.id + ": need at least 2 shadow segments, have " +
                        std::to_string(feet_.size()));
  }
}

double ShadowProblem::abs_dot(std::size_t i, double theta_deg) const {
  auto v = direction_to_vp(feet_[i], theta_deg, centre_x_, focal_, y_h_);
  // A foot on the horizon only ever sees horizontal model directions.
  if (v.x == 0.0 && v.y == 0.0) v = {1.0, 0.0};
  return std::min(1.0, std::fabs(dirs_[i].x * v.x + dirs_[i].y * v.y));
}

std::vector<double> ShadowProblem::alignments(double theta_deg) const {
  std::vector<double> out(feet_.size());
  for (std::size_t i = 0; i < feet_.size(); ++i) out[i] = abs_dot(i, theta_deg);
  return out;
}

double ShadowProblem::cost(double theta_deg) const {
  const double t = wrap_theta(theta_deg);
  double acc = 0.0;
  for (std::size_t i = 0; i < feet_.size(); ++i) {
    const double a = abs_dot(i, t);
    const double r = form_ == CostForm::OneMinusAbsDot ? 1.0 - a : std::sqrt(std::max(0.0, 1.0 - a * a));
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(feet_.size()));
}

std::vector<double> theta_grid() {
  const int steps = static_cast<int>(std::lround(180.0 / kGridStepDeg));
  std::vector<double> grid(steps + 1);
  for (int k = 0; k <= steps; ++k) grid[k] = -90.0 + kGridStepDeg * k;
  grid.back() = 90.0;
  return grid;
}

ShadowFitReport fit_shadow_vanishing(const AnnotationDocument& doc, const ShadowFitOptions& options) {
  const ShadowProblem problem(doc, options);
  const auto cost = [&problem](double t) { return problem.cost(t); };

  const auto grid = theta_grid();
  const auto costs = options.parallel ? kernels::grid_scan(cost, std::span<const double>(grid))
                                      : kernels::grid_scan_reference(cost, std::span<const double>(grid));
  const auto best = kernels::argmin(costs);

  // Golden-section on the bracket around the best grid point. Angles past
  // +-90 are evaluated wrapped, so a minimum straddling the limit is kept.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = grid[best] - kGridStepDeg;
  double b = grid[best] + kGridStepDeg;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = cost(c);
  double fd = cost(d);
  while (b - a > kRefineToleranceDeg) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = cost(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = cost(d);
    }
  }
  double theta = 0.5 * (a + b);
  double best_cost = cost(theta);
  if (!(best_cost <= costs[best])) {
    theta = grid[best];
    best_cost = costs[best];
  }

  ShadowFitReport report;
  report.theta_deg = wrap_theta(theta);
  report.cost = best_cost;
  report.n_segments = problem.n_segments();
  report.figure_index = problem.figure_index();
  for (double a_i : problem.alignments(report.theta_deg)) {
    report.per_segment_deviation_deg.push_back(std::acos(a_i) * kRadToDeg);
  }
  return report;
}

stats::Correlation angle_cost_correlation(std::span<const ShadowFitReport> reports) {
  if (reports.size() < 3) throw stats::DegenerateInput("angle_cost_correlation: need at least 3 paintings");
  std::vector<double> angles;
  std::vector<double> costs;
  for (const auto& r : reports) {
    angles.push_back(std::fabs(r.theta_deg));
    costs.push_back(r.cost);
  }
  return stats::pearson(angles, costs);
}

}  // namespace limner::shadowfit
