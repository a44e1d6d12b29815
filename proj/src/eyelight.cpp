#include "limner/eyelight.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "limner/document.hpp"

namespace limner::eyelight {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kCentreTolerance = 1e-6;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

std::string_view to_string(Eye e) { return e == Eye::Left ? "left" : "right"; }

double wrap_degrees(double deg) {
  double t = std::fmod(deg, 360.0);
  if (t > 180.0) t -= 360.0;
  if (t <= -180.0) t += 360.0;
  return t;
}

double tilt_angle(Point pupil, Point highlight) {
  const double wx = highlight.x - pupil.x;
  const double wy = highlight.y - pupil.y;
  if (wx == 0.0 && wy == 0.0) throw AnalysisError("highlight coincides with pupil");
  const double t = std::atan2(wx, -wy) * kRadToDeg;
  return t <= -180.0 ? t + 360.0 : t;
}

std::vector<TiltRecord> collect_tilts(std::span<const AnnotationDocument> docs) {
  std::vector<TiltRecord> out;
  for (const auto& doc : docs) {
    for (std::size_t i = 0; i < doc.faces.size(); ++i) {
      const auto& e = doc.faces[i].eyelights;
      if (!e) continue;
      const int idx = static_cast<int>(i);
      out.push_back({doc.meta.id, idx, Eye::Left, tilt_angle(e->left_pupil, e->left_highlight), doc.meta.year});
      out.push_back({doc.meta.id, idx, Eye::Right, tilt_angle(e->right_pupil, e->right_highlight), doc.meta.year});
    }
  }
  return out;
}

std::vector<double> bin_centres(double w) {
  if (!(w > 0.0) || w > 360.0) throw AnalysisError("bin width must lie in (0, 360]");
  const double k = 360.0 / w;
  if (std::fabs(k - std::round(k)) > 1e-9) {
    throw AnalysisError("bin width must divide 360 degrees");
  }
  const int bins = static_cast<int>(std::lround(k));
  std::vector<double> c(bins);
  for (int i = 0; i < bins; ++i) c[i] = -180.0 + (i + 1) * w;
  c.back() = 180.0;
  return c;
}

std::size_t bin_index(double angle_deg, double w) {
  const auto bins = static_cast<long>(std::lround(360.0 / w));
  const double t = wrap_degrees(angle_deg);
  double c = w * std::ceil(t / w - 0.5);
  if (c <= -180.0) c = 180.0;
  const long k = std::lround((c + 180.0) / w) - 1;
  return static_cast<std::size_t>(std::clamp(k, 0L, bins - 1));
}

double Histogram::mean_deg() const {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < centres.size(); ++i) {
    num += centres[i] * percentages[i];
    den += percentages[i];
  }
  return den > 0.0 ? num / den : 0.0;
}

Histogram histogram(std::span<const double> angles_deg, double w) {
  if (angles_deg.empty()) throw AnalysisError("histogram of an empty set");
  Histogram h;
  h.bin_width_deg = w;
  h.centres = bin_centres(w);
  h.counts.assign(h.centres.size(), 0);
  for (double a : angles_deg) ++h.counts[bin_index(a, w)];
  h.n = static_cast<int>(angles_deg.size());
  h.percentages.resize(h.counts.size());
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    h.percentages[i] = 100.0 * h.counts[i] / static_cast<double>(h.n);
  }
  return h;
}

Histogram corpus_histogram(std::span<const TiltRecord> records, double w) {
  std::vector<double> angles;
  angles.reserve(records.size());
  for (const auto& r : records) angles.push_back(r.tilt_deg);
  return histogram(angles, w);
}

OverlayTable compare_external_csv(const Histogram& ours, std::string_view csv_text) {
  const double w = ours.bin_width_deg;
  std::vector<double> ext(ours.centres.size(), 0.0);
  std::istringstream in{std::string(csv_text)};
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  double ext_num = 0.0;
  double ext_den = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto comma = t.find(',');
    if (comma == std::string_view::npos || t.find(',', comma + 1) != std::string_view::npos) {
      throw ExternalDataError("external CSV line " + std::to_string(line_no) + ": expected 2 columns");
    }
    const auto a = trim(t.substr(0, comma));
    const auto b = trim(t.substr(comma + 1));
    if (!header_seen) {
      if (a != "angle_deg" || b != "percentage") {
        throw ExternalDataError("external CSV: header must be 'angle_deg,percentage'");
      }
      header_seen = true;
      continue;
    }
    const auto angle = parse_real(a);
    const auto pct = parse_real(b);
    if (!angle || !pct || *pct < 0.0) {
      throw ExternalDataError("external CSV line " + std::to_string(line_no) + ": bad value");
    }
    const double inverted = wrap_degrees(-*angle);
    const auto k = bin_index(inverted, w);
    const double c = ours.centres[k];
    const double off = std::fabs(wrap_degrees(inverted - c));
    if (off > kCentreTolerance) {
      throw ExternalDataError("external angle " + std::string(a) +
                              " does not fall on a bin centre of width " + std::to_string(w));
    }
    ext[k] += *pct;
    ext_num += c * *pct;
    ext_den += *pct;
  }
  if (!header_seen) throw ExternalDataError("external CSV is empty");

  OverlayTable out;
  for (std::size_t i = 0; i < ours.centres.size(); ++i) {
    out.rows.push_back({ours.centres[i], ours.percentages[i], ext[i], ours.percentages[i] - ext[i]});
  }
  out.ours_mean_deg = ours.mean_deg();
  out.external_mean_deg = ext_den > 0.0 ? ext_num / ext_den : 0.0;
  out.mean_gap_deg = out.external_mean_deg - out.ours_mean_deg;
  return out;
}

OverlayTable compare_external(const Histogram& ours, const std::filesystem::path& external_csv) {
  std::string text;
  try {
    text = read_file(external_csv);
  } catch (const IoError& e) {
    throw ExternalDataError(e.what());
  }
  return compare_external_csv(ours, text);
}

TemporalResult temporal_means(std::span<const TiltRecord> records, int bin_years) {
  if (bin_years < 1) throw AnalysisError("bin_years must be positive");
  std::map<int, std::vector<double>> bins;
  bool wrap_sensitive = false;
  for (const auto& r : records) {
    if (!r.year) continue;
    bins[floor_div(*r.year, bin_years) * bin_years].push_back(r.tilt_deg);
    if (std::fabs(r.tilt_deg) > 150.0) wrap_sensitive = true;
  }
  if (bins.empty()) throw AnalysisError("no dated tilt records");

  TemporalResult out;
  if (wrap_sensitive) {
    out.warnings.emplace_back("tilts beyond +-150 degrees present; arithmetic means near the wrap are biased");
  }
  for (const auto& [start, v] : bins) {
    TemporalRow row;
    row.year_start = start;
    row.year_end = start + bin_years - 1;
    row.n = static_cast<int>(v.size());
    double s = 0.0;
    for (double x : v) s += x;
    row.mean_deg = s / row.n;
    if (row.n > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - row.mean_deg) * (x - row.mean_deg);
      row.sd_deg = std::sqrt(ss / (row.n - 1));
    }
    out.rows.push_back(row);
  }
  return out;
}

std::optional<InterocularRecord> interocular_delta(const EyelightPair& pair) {
  const double tl = tilt_angle(pair.left_pupil, pair.left_highlight);
  const double tr = tilt_angle(pair.right_pupil, pair.right_highlight);
  if (std::fabs(tl) >= 90.0 || std::fabs(tr) >= 90.0) return std::nullopt;
  InterocularRecord r;
  r.tilt_viewer_left_deg = tl;
  r.tilt_viewer_right_deg = tr;
  r.delta_deg = tr - tl;
  return r;
}

InterocularResult interocular_test(std::span<const AnnotationDocument> docs) {
  InterocularResult out;
  for (const auto& doc : docs) {
    for (std::size_t i = 0; i < doc.faces.size(); ++i) {
      const auto& e = doc.faces[i].eyelights;
      if (!e) continue;
      auto rec = interocular_delta(*e);
      if (!rec) continue;
      rec->painting_id = doc.meta.id;
      rec->face_index = static_cast<int>(i);
      if (rec->delta_deg < 0.0) ++out.negative;
      if (rec->delta_deg > 0.0) ++out.positive;
      out.records.push_back(std::move(*rec));
    }
  }
  if (out.records.empty()) throw AnalysisError("no faces with eyelights lit from above");
  std::vector<double> deltas;
  deltas.reserve(out.records.size());
  for (const auto& r : out.records) deltas.push_back(r.delta_deg);
  try {
    out.ttest = stats::t_test_one_sample(deltas, 0.0);
  } catch (const stats::DegenerateInput&) {
    out.ttest.reset();
  }
  return out;
}

}  // namespace limner::eyelight
