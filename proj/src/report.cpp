#include "limner/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "limner/error.hpp"
#include "limner/eyelight.hpp"
#include "limner/faces.hpp"
#include "limner/perspective.hpp"
#include "limner/shadowfit.hpp"

namespace limner::report {

using nlohmann::json;

namespace {

std::vector<Warning> corpus_warnings(const LoadedCorpus& corpus) {
  std::vector<Warning> out;
  for (const auto& w : corpus.warnings) out.push_back({w.id, w.message});
  return out;
}

json warnings_json(const std::vector<Warning>& ws) {
  json arr = json::array();
  for (const auto& w : ws) arr.push_back(json{{"id", w.id}, {"message", w.message}});
  return arr;
}

void append_warnings(std::ostringstream& os, const std::vector<Warning>& ws) {
  for (const auto& w : ws) os << "# warning," << csv_field(w.id) << ',' << csv_field(w.message) << '\n';
}

json regression_json(const stats::RegressionReport& r) {
  return json{{"slope", r.slope},
              {"intercept", r.intercept},
              {"r_squared", r.r_squared},
              {"slope_ci95", json::array({r.slope_ci95.lo, r.slope_ci95.hi})},
              {"intercept_p", r.intercept_p},
              {"n", r.n},
              {"residual_se", r.residual_se}};
}

// Runs f on every document in parallel. A document whose f throws becomes a
// warning; results come back in document order.
template <typename R, typename F>
std::vector<std::optional<R>> per_document(const std::vector<AnnotationDocument>& docs, F f,
                                           std::vector<Warning>& warnings) {
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
  std::vector<std::optional<R>> results(docs.size());
  std::vector<std::string> errors(docs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      results[i] = f(docs[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (results[i]) continue;
    std::string msg = errors[i];
    const std::string prefix = docs[i].meta.id + ": ";
    if (msg.starts_with(prefix)) msg.erase(0, prefix.size());
    warnings.push_back({docs[i].meta.id, msg});
  }
  return results;
}

void check_table(const std::string& table, std::initializer_list<std::string_view> allowed) {
  for (auto a : allowed) {
    if (table == a) return;
  }
  std::string msg = "unknown table '" + table + "'; expected one of";
  for (auto a : allowed) msg += " " + std::string(a);
  throw AnalysisError(msg);
}

// --- perspective ---------------------------------------------------------------

AnalysisOutput analyze_perspective(const LoadedCorpus& corpus, const AnalyzeOptions& opt) {
  if (!opt.table.empty()) check_table(opt.table, {"fits"});
  AnalysisOutput out;
  out.warnings = corpus_warnings(corpus);
  const auto results = per_document<perspective::SizeGradientResult>(
      corpus.documents,
      [&](const AnnotationDocument& d) { return perspective::size_gradient(d, opt.human_length_m); },
      out.warnings);

  std::ostringstream os;
  os << "# figure_length: vertical extent\n";
  os << "id,n,r_squared,intercept,intercept_p,slope,slope_lo,slope_hi,height_lengths,height_m\n";
  json rows = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i]) continue;
    const auto& r = *results[i];
    const auto& g = r.regression;
    os << csv_field(corpus.documents[i].meta.id) << ',' << g.n << ',' << format_real(g.r_squared) << ','
       << format_real(g.intercept) << ',' << format_real(g.intercept_p) << ',' << format_real(g.slope) << ','
       << format_real(g.slope_ci95.lo) << ',' << format_real(g.slope_ci95.hi) << ','
       << format_real(r.viewpoint_height_lengths) << ',' << format_real(r.viewpoint_height_m) << '\n';
    rows.push_back(json{{"id", corpus.documents[i].meta.id},
                        {"n_figures", r.n_figures},
                        {"regression", regression_json(g)},
                        {"viewpoint_height_lengths", r.viewpoint_height_lengths},
                        {"viewpoint_height_m", r.viewpoint_height_m}});
  }
  if (rows.empty()) throw AnalysisError("no painting could be analysed (perspective needs a horizon and 3 figures)");
  append_warnings(os, out.warnings);
  out.csv = os.str();
  out.json = json{{"kind", "perspective"},
                  {"figure_length", "vertical extent"},
                  {"human_length_m", opt.human_length_m},
                  {"paintings", std::move(rows)},
                  {"warnings", warnings_json(out.warnings)}};
  return out;
}

// --- shadows ---------------------------------------------------------------------

AnalysisOutput analyze_shadows(const LoadedCorpus& corpus, const AnalyzeOptions& opt) {
  const std::string table = opt.table.empty() ? "fits" : opt.table;
  check_table(table, {"fits", "deviations", "correlation"});
  AnalysisOutput out;
  out.warnings = corpus_warnings(corpus);
  shadowfit::ShadowFitOptions fit_opt;
  fit_opt.focal_px = opt.focal_px;
  const auto results = per_document<shadowfit::ShadowFitReport>(
      corpus.documents,
      [&](const AnnotationDocument& d) { return shadowfit::fit_shadow_vanishing(d, fit_opt); }, out.warnings);

  std::vector<shadowfit::ShadowFitReport> fits;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i]) continue;
    fits.push_back(*results[i]);
    ids.push_back(corpus.documents[i].meta.id);
  }
  if (fits.empty()) {
    throw AnalysisError("no painting could be analysed (shadows need a horizon and 2 shadow segments)");
  }

  std::optional<stats::Correlation> corr;
  std::string corr_error;
  try {
    corr = shadowfit::angle_cost_correlation(fits);
  } catch (const std::exception& e) {
    corr_error = e.what();
  }

  std::ostringstream os;
  json rows = json::array();
  if (table == "fits") os << "id,theta_deg,cost,n_segments\n";
  if (table == "deviations") os << "id,figure_index,deviation_deg\n";
  for (std::size_t k = 0; k < fits.size(); ++k) {
    const auto& f = fits[k];
    if (table == "fits") {
      os << csv_field(ids[k]) << ',' << format_real(f.theta_deg) << ',' << format_real(f.cost) << ','
         << f.n_segments << '\n';
    } else if (table == "deviations") {
      for (std::size_t s = 0; s < f.per_segment_deviation_deg.size(); ++s) {
        os << csv_field(ids[k]) << ',' << f.figure_index[s] << ',' << format_real(f.per_segment_deviation_deg[s])
           << '\n';
      }
    }
    rows.push_back(json{{"id", ids[k]},
                        {"theta_deg", f.theta_deg},
                        {"cost", f.cost},
                        {"n_segments", f.n_segments},
                        {"figure_index", f.figure_index},
                        {"deviation_deg", f.per_segment_deviation_deg}});
  }
  if (table == "correlation") {
    if (!corr) throw AnalysisError("correlation unavailable: " + corr_error);
    os << "n,r,p\n" << fits.size() << ',' << format_real(corr->r) << ',' << format_real(corr->p) << '\n';
  }
  append_warnings(os, out.warnings);
  out.csv = os.str();
  out.json = json{{"kind", "shadows"},
                  {"paintings", std::move(rows)},
                  {"correlation", corr ? json{{"n", fits.size()}, {"r", corr->r}, {"p", corr->p}} : json(nullptr)},
                  {"warnings", warnings_json(out.warnings)}};
  return out;
}

// --- eyelights -------------------------------------------------------------------

json optional_year(const std::optional<int>& y) { return y ? json(*y) : json(nullptr); }

AnalysisOutput analyze_eyelights(const LoadedCorpus& corpus, const AnalyzeOptions& opt) {
  const std::string table = opt.table.empty() ? "histogram" : opt.table;
  check_table(table, {"histogram", "tilts", "temporal", "interocular", "compare"});
  AnalysisOutput out;
  out.warnings = corpus_warnings(corpus);

  for (const auto& d : corpus.documents) {
    const bool any = std::any_of(d.faces.begin(), d.faces.end(), [](const FaceAnnotation& f) {
      return f.eyelights.has_value();
    });
    if (!any) out.warnings.push_back({d.meta.id, "no eyelight annotations"});
  }
  const auto tilts = eyelight::collect_tilts(corpus.documents);
  if (tilts.empty()) throw AnalysisError("no painting could be analysed (no eyelight annotations)");
  const auto hist = eyelight::corpus_histogram(tilts, opt.bin_width_deg);

  std::optional<eyelight::TemporalResult> temporal;
  std::string temporal_error;
  try {
    temporal = eyelight::temporal_means(tilts, opt.bin_years);
  } catch (const AnalysisError& e) {
    temporal_error = e.what();
  }
  std::optional<eyelight::InterocularResult> inter;
  std::string inter_error;
  try {
    inter = eyelight::interocular_test(corpus.documents);
  } catch (const AnalysisError& e) {
    inter_error = e.what();
  }
  std::optional<eyelight::OverlayTable> overlay;
  if (opt.external_csv) {
    overlay = eyelight::compare_external(hist, *opt.external_csv);
  } else if (table == "compare") {
    throw AnalysisError("the compare table needs an external histogram CSV");
  }
  if (temporal) {
    for (const auto& w : temporal->warnings) out.warnings.push_back({"", w});
  }

  std::ostringstream os;
  if (table == "histogram") {
    os << "# n: " << hist.n << "\n# mean_deg: " << format_real(hist.mean_deg()) << '\n';
    os << "centre_deg,count,percentage\n";
    for (std::size_t b = 0; b < hist.centres.size(); ++b) {
      os << format_real(hist.centres[b]) << ',' << hist.counts[b] << ',' << format_real(hist.percentages[b])
         << '\n';
    }
  } else if (table == "tilts") {
    os << "painting_id,face_index,eye,tilt_deg,year\n";
    for (const auto& t : tilts) {
      os << csv_field(t.painting_id) << ',' << t.face_index << ',' << eyelight::to_string(t.eye) << ','
         << format_real(t.tilt_deg) << ',' << (t.year ? std::to_string(*t.year) : "") << '\n';
    }
  } else if (table == "temporal") {
    if (!temporal) throw AnalysisError("temporal table unavailable: " + temporal_error);
    os << "year_start,year_end,mean_deg,sd_deg,n\n";
    for (const auto& r : temporal->rows) {
      os << r.year_start << ',' << r.year_end << ',' << format_real(r.mean_deg) << ','
         << (r.sd_deg ? format_real(*r.sd_deg) : "") << ',' << r.n << '\n';
    }
  } else if (table == "interocular") {
    if (!inter) throw AnalysisError("interocular table unavailable: " + inter_error);
    os << "# negative: " << inter->negative << "\n# positive: " << inter->positive << '\n';
    if (inter->ttest) {
      os << "# t: " << format_real(inter->ttest->t) << "\n# df: " << inter->ttest->df
         << "\n# p: " << format_real(inter->ttest->p) << '\n';
    }
    os << "painting_id,face_index,delta_deg,tilt_viewer_left_deg,tilt_viewer_right_deg\n";
    for (const auto& r : inter->records) {
      os << csv_field(r.painting_id) << ',' << r.face_index << ',' << format_real(r.delta_deg) << ','
         << format_real(r.tilt_viewer_left_deg) << ',' << format_real(r.tilt_viewer_right_deg) << '\n';
    }
  } else {
    os << "# ours_mean_deg: " << format_real(overlay->ours_mean_deg)
       << "\n# external_mean_deg: " << format_real(overlay->external_mean_deg)
       << "\n# mean_gap_deg: " << format_real(overlay->mean_gap_deg) << '\n';
    os << "centre_deg,ours_pct,external_pct,difference_pct\n";
    for (const auto& r : overlay->rows) {
      os << format_real(r.centre_deg) << ',' << format_real(r.ours_pct) << ',' << format_real(r.external_pct)
         << ',' << format_real(r.difference_pct) << '\n';
    }
  }
  append_warnings(os, out.warnings);
  out.csv = os.str();

  json tilt_rows = json::array();
  for (const auto& t : tilts) {
    tilt_rows.push_back(json{{"painting_id", t.painting_id},
                             {"face_index", t.face_index},
                             {"eye", eyelight::to_string(t.eye)},
                             {"tilt_deg", t.tilt_deg},
                             {"year", optional_year(t.year)}});
  }
  json bins = json::array();
  for (std::size_t b = 0; b < hist.centres.size(); ++b) {
    bins.push_back(json{{"centre_deg", hist.centres[b]}, {"count", hist.counts[b]}, {"percentage", hist.percentages[b]}});
  }
  json temporal_json = nullptr;
  if (temporal) {
    json rows = json::array();
    for (const auto& r : temporal->rows) {
      rows.push_back(json{{"year_start", r.year_start},
                          {"year_end", r.year_end},
                          {"mean_deg", r.mean_deg},
                          {"sd_deg", r.sd_deg ? json(*r.sd_deg) : json(nullptr)},
                          {"n", r.n}});
    }
    temporal_json = json{{"bin_years", opt.bin_years}, {"rows", std::move(rows)}};
  }
  json inter_json = nullptr;
  if (inter) {
    json rows = json::array();
    for (const auto& r : inter->records) {
      rows.push_back(json{{"painting_id", r.painting_id},
                          {"face_index", r.face_index},
                          {"delta_deg", r.delta_deg},
                          {"tilt_viewer_left_deg", r.tilt_viewer_left_deg},
                          {"tilt_viewer_right_deg", r.tilt_viewer_right_deg}});
    }
    json t = nullptr;
    if (inter->ttest) {
      t = json{{"t", inter->ttest->t},
               {"df", inter->ttest->df},
               {"p", inter->ttest->p},
               {"mean", inter->ttest->mean},
               {"n", inter->ttest->n}};
    }
    inter_json = json{{"records", std::move(rows)},
                      {"negative", inter->negative},
                      {"positive", inter->positive},
                      {"ttest", std::move(t)}};
  }
  json compare_json = nullptr;
  if (overlay) {
    json rows = json::array();
    for (const auto& r : overlay->rows) {
      rows.push_back(json{{"centre_deg", r.centre_deg},
                          {"ours_pct", r.ours_pct},
                          {"external_pct", r.external_pct},
                          {"difference_pct", r.difference_pct}});
    }
    compare_json = json{{"rows", std::move(rows)},
                        {"ours_mean_deg", overlay->ours_mean_deg},
                        {"external_mean_deg", overlay->external_mean_deg},
                        {"mean_gap_deg", overlay->mean_gap_deg}};
  }
  out.json = json{{"kind", "eyelights"},
                  {"tilts", std::move(tilt_rows)},
                  {"histogram",
                   json{{"bin_width_deg", hist.bin_width_deg}, {"n", hist.n}, {"mean_deg", hist.mean_deg()}, {"bins", std::move(bins)}}},
                  {"temporal", std::move(temporal_json)},
                  {"interocular", std::move(inter_json)},
                  {"compare", std::move(compare_json)},
                  {"warnings", warnings_json(out.warnings)}};
  return out;
}

// --- categories ------------------------------------------------------------------

AnalysisOutput analyze_categories(const LoadedCorpus& corpus, const AnalyzeOptions& opt) {
  if (!opt.table.empty()) check_table(opt.table, {"bins"});
  AnalysisOutput out;
  out.warnings = corpus_warnings(corpus);
  for (const auto& d : corpus.documents) {
    if (d.faces.empty()) {
      out.warnings.push_back({d.meta.id, "no face annotations"});
    } else if (!d.meta.year) {
      out.warnings.push_back({d.meta.id, "no year; faces count toward other_rate only"});
    }
  }
  const auto table = faces::category_time_table(corpus.documents, opt.bin_years);

  std::ostringstream os;
  os << "# other_rate: " << format_real(table.other_rate) << "\n# n_faces: " << table.n_faces
     << "\n# n_other: " << table.n_other << '\n';
  os << "bin_start,bin_end,LL,LF,FF,RF,RR,n\n";
  json rows = json::array();
  for (const auto& b : table.bins) {
    os << b.year_start << ',' << b.year_end;
    json props = json::object();
    json counts = json::object();
    for (int k = 0; k < 5; ++k) {
      os << ',' << format_real(b.proportions[k]);
      const std::string code(to_code(kLabelledPoseGaze[k]));
      props[code] = b.proportions[k];
      counts[code] = b.counts[k];
    }
    os << ',' << b.n << '\n';
    rows.push_back(json{{"bin_start", b.year_start},
                        {"bin_end", b.year_end},
                        {"proportions", std::move(props)},
                        {"counts", std::move(counts)},
                        {"n", b.n}});
  }
  append_warnings(os, out.warnings);
  out.csv = os.str();
  out.json = json{{"kind", "categories"},
                  {"bin_years", table.bin_years},
                  {"bins", std::move(rows)},
                  {"other_rate", table.other_rate},
                  {"n_faces", table.n_faces},
                  {"n_other", table.n_other},
                  {"warnings", warnings_json(out.warnings)}};
  return out;
}

}  // namespace

std::optional<Kind> kind_from_string(std::string_view s) {
  if (s == "perspective") return Kind::Perspective;
  if (s == "shadows") return Kind::Shadows;
  if (s == "eyelights") return Kind::Eyelights;
  if (s == "categories") return Kind::Categories;
  return std::nullopt;
}

std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::Perspective: return "perspective";
    case Kind::Shadows: return "shadows";
    case Kind::Eyelights: return "eyelights";
    case Kind::Categories: return "categories";
  }
  return "";
}

AnalyzeOptions options_from_json(const json& j) {
  AnalyzeOptions o;
  if (j.is_null()) return o;
  if (!j.is_object()) throw std::invalid_argument("options: expected an object");
  for (const auto& [k, v] : j.items()) {
    if (k == "human_length_m" && v.is_number()) {
      o.human_length_m = v.get<double>();
    } else if (k == "bin_years" && v.is_number_integer()) {
      o.bin_years = v.get<int>();
    } else if (k == "bin_width_deg" && v.is_number()) {
      o.bin_width_deg = v.get<double>();
    } else if (k == "focal_px" && (v.is_number() || v.is_null())) {
      if (v.is_number()) o.focal_px = v.get<double>();
    } else if (k == "table" && v.is_string()) {
      o.table = v.get<std::string>();
    } else {
      throw std::invalid_argument("options." + k + ": unknown or mistyped field");
    }
  }
  return o;
}

AnalysisOutput analyze(Kind kind, const LoadedCorpus& corpus, const AnalyzeOptions& options) {
  if (!(options.human_length_m > 0.0)) throw AnalysisError("human length must be positive");
  if (options.bin_years < 1) throw AnalysisError("bin_years must be positive");
  if (options.focal_px && !(*options.focal_px > 0.0)) throw AnalysisError("focal_px must be positive");
  switch (kind) {
    case Kind::Perspective: return analyze_perspective(corpus, options);
    case Kind::Shadows: return analyze_shadows(corpus, options);
    case Kind::Eyelights: return analyze_eyelights(corpus, options);
    case Kind::Categories: return analyze_categories(corpus, options);
  }
  throw AnalysisError("unknown analysis kind");
}

json tilt_preview(const EyelightPair& pair) {
  const double l = eyelight::tilt_angle(pair.left_pupil, pair.left_highlight);
  const double r = eyelight::tilt_angle(pair.right_pupil, pair.right_highlight);
  const auto rec = eyelight::interocular_delta(pair);
  return json{{"tilt_viewer_left_deg", l},
              {"tilt_viewer_right_deg", r},
              {"delta_deg", rec ? json(rec->delta_deg) : json(nullptr)}};
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace limner::report
