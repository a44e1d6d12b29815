#include "limner/document.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <unistd.h>

namespace limner {

using nlohmann::json;

namespace {

constexpr std::string_view kPoseCodes[] = {"LL", "LF", "FF", "RF", "RR", "OTHER"};

json point_json(const Point& p) { return json{{"x", p.x}, {"y", p.y}}; }

json optional_point_json(const std::optional<Point>& p) {
  return p ? point_json(*p) : json(nullptr);
}

// --- schema readers -------------------------------------------------------

std::string at_path(std::string_view parent, std::string_view key) {
  if (parent.empty()) return std::string(key);
  return std::string(parent) + "." + std::string(key);
}

void require_object(const json& j, const std::string& where,
                    std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  for (auto k : keys) {
    if (!j.contains(std::string(k))) {
      throw SchemaError(at_path(where, k) + ": missing field");
    }
  }
  if (j.size() != keys.size()) {
    std::set<std::string_view> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items()) {
      if (!allowed.contains(k)) throw SchemaError(at_path(where, k) + ": unknown field");
    }
  }
}

double read_real(const json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where + ": expected a number");
  return j.get<double>();
}

std::int64_t read_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SchemaError(where + ": expected an integer");
  if (j.is_number_unsigned() &&
      j.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    throw SchemaError(where + ": integer out of range");
  }
  return j.get<std::int64_t>();
}

std::string read_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw SchemaError(where + ": expected a string");
  return j.get<std::string>();
}

Point read_point(const json& j, const std::string& where) {
  require_object(j, where, {"x", "y"});
  return {read_real(j["x"], where + ".x"), read_real(j["y"], where + ".y")};
}

PaintingMeta read_meta(const json& j) {
  require_object(j, "meta", {"id", "title", "year", "width_px", "height_px", "image_path"});
  PaintingMeta m;
  m.id = read_string(j["id"], "meta.id");
  m.title = read_string(j["title"], "meta.title");
  if (!j["year"].is_null()) {
    auto y = read_int(j["year"], "meta.year");
    if (y < INT32_MIN || y > INT32_MAX) throw SchemaError("meta.year: integer out of range");
    m.year = static_cast<int>(y);
  }
  m.width_px = read_int(j["width_px"], "meta.width_px");
  m.height_px = read_int(j["height_px"], "meta.height_px");
  m.image_path = read_string(j["image_path"], "meta.image_path");
  return m;
}

FigureAnnotation read_figure(const json& j, const std::string& where) {
  require_object(j, where, {"head", "foot", "shadow_end"});
  FigureAnnotation f;
  f.head = read_point(j["head"], where + ".head");
  f.foot = read_point(j["foot"], where + ".foot");
  if (!j["shadow_end"].is_null()) f.shadow_end = read_point(j["shadow_end"], where + ".shadow_end");
  return f;
}

EyelightPair read_eyelights(const json& j, const std::string& where) {
  require_object(j, where, {"left_pupil", "left_highlight", "right_pupil", "right_highlight"});
  return {read_point(j["left_pupil"], where + ".left_pupil"),
          read_point(j["left_highlight"], where + ".left_highlight"),
          read_point(j["right_pupil"], where + ".right_pupil"),
          read_point(j["right_highlight"], where + ".right_highlight")};
}

FaceAnnotation read_face(const json& j, const std::string& where) {
  require_object(j, where, {"bbox", "category", "eyelights"});
  FaceAnnotation f;
  const auto bw = where + ".bbox";
  require_object(j["bbox"], bw, {"x", "y", "w", "h"});
  f.bbox = {read_real(j["bbox"]["x"], bw + ".x"), read_real(j["bbox"]["y"], bw + ".y"),
            read_real(j["bbox"]["w"], bw + ".w"), read_real(j["bbox"]["h"], bw + ".h")};
  auto code = read_string(j["category"], where + ".category");
  auto cat = pose_gaze_from_code(code);
  if (!cat) throw SchemaError(where + ".category: unknown pose/gaze value '" + code + "'");
  f.category = *cat;
  if (!j["eyelights"].is_null()) f.eyelights = read_eyelights(j["eyelights"], where + ".eyelights");
  return f;
}

// --- invariant checks -----------------------------------------------------

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

struct Bounds {
  double w;
  double h;

  void check(const Point& p, const std::string& where) const {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InvariantError(where + ": coordinates must be finite");
    }
    if (p.x < 0.0 || p.x > w || p.y < 0.0 || p.y > h) {
      throw InvariantError(where + ": point (" + fmt(p.x) + ", " + fmt(p.y) +
                           ") outside image [0, " + fmt(w) + "] x [0, " + fmt(h) + "]");
    }
  }
};

}  // namespace

std::string_view to_code(PoseGaze p) { return kPoseCodes[static_cast<int>(p)]; }

std::optional<PoseGaze> pose_gaze_from_code(std::string_view code) {
  for (int i = 0; i < 6; ++i) {
    if (kPoseCodes[i] == code) return static_cast<PoseGaze>(i);
  }
  return std::nullopt;
}

json to_json(const EyelightPair& e) {
  return json{{"left_pupil", point_json(e.left_pupil)},
              {"left_highlight", point_json(e.left_highlight)},
              {"right_pupil", point_json(e.right_pupil)},
              {"right_highlight", point_json(e.right_highlight)}};
}

EyelightPair eyelight_pair_from_json(const json& j) { return read_eyelights(j, "eyelights"); }

json to_json(const AnnotationDocument& doc) {
  json meta{{"id", doc.meta.id},
            {"title", doc.meta.title},
            {"year", doc.meta.year ? json(*doc.meta.year) : json(nullptr)},
            {"width_px", doc.meta.width_px},
            {"height_px", doc.meta.height_px},
            {"image_path", doc.meta.image_path}};
  json figures = json::array();
  for (const auto& f : doc.figures) {
    figures.push_back(json{{"head", point_json(f.head)},
                           {"foot", point_json(f.foot)},
                           {"shadow_end", optional_point_json(f.shadow_end)}});
  }
  json faces = json::array();
  for (const auto& f : doc.faces) {
    faces.push_back(json{
        {"bbox", json{{"x", f.bbox.x}, {"y", f.bbox.y}, {"w", f.bbox.w}, {"h", f.bbox.h}}},
        {"category", std::string(to_code(f.category))},
        {"eyelights", f.eyelights ? to_json(*f.eyelights) : json(nullptr)}});
  }
  return json{{"version", kSchemaVersion},
              {"meta", std::move(meta)},
              {"horizon", doc.horizon ? json{{"y_h", doc.horizon->y_h}} : json(nullptr)},
              {"figures", std::move(figures)},
              {"faces", std::move(faces)}};
}

std::string serialize_document(const AnnotationDocument& doc) {
  return to_json(doc).dump(2) + "\n";
}

void validate_document(const AnnotationDocument& doc) {
  const auto& m = doc.meta;
  if (m.id.empty()) throw InvariantError("meta.id: must be non-empty");
  if (m.width_px <= 0) throw InvariantError("meta.width_px: must be positive");
  if (m.height_px <= 0) throw InvariantError("meta.height_px: must be positive");
  const Bounds bounds{static_cast<double>(m.width_px), static_cast<double>(m.height_px)};

  if (doc.horizon) {
    const double y = doc.horizon->y_h;
    if (!std::isfinite(y) || y < 0.0 || y > bounds.h) {
      throw InvariantError("horizon.y_h: " + fmt(y) + " outside [0, " + fmt(bounds.h) + "]");
    }
  }

  for (std::size_t i = 0; i < doc.figures.size(); ++i) {
    const auto& f = doc.figures[i];
    const auto where = "figures[" + std::to_string(i) + "]";
    bounds.check(f.head, where + ".head");
    bounds.check(f.foot, where + ".foot");
    if (!(f.foot.y > f.head.y)) {
      throw InvariantError(where + ": foot.y (" + fmt(f.foot.y) +
                           ") must be below head.y (" + fmt(f.head.y) + ")");
    }
    if (f.shadow_end) {
      bounds.check(*f.shadow_end, where + ".shadow_end");
      if (*f.shadow_end == f.foot) {
        throw InvariantError(where + ": shadow_end coincides with foot");
      }
    }
  }

  for (std::size_t i = 0; i < doc.faces.size(); ++i) {
    const auto& f = doc.faces[i];
    const auto where = "faces[" + std::to_string(i) + "]";
    const auto& b = f.bbox;
    if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) || !std::isfinite(b.h)) {
      throw InvariantError(where + ".bbox: values must be finite");
    }
    if (!(b.w > 0.0) || !(b.h > 0.0)) throw InvariantError(where + ".bbox: w and h must be positive");
    if (b.x < 0.0 || b.y < 0.0 || b.x + b.w > bounds.w || b.y + b.h > bounds.h) {
      throw InvariantError(where + ".bbox: rectangle extends outside the image");
    }
    if (f.eyelights) {
      const auto& e = *f.eyelights;
      const auto ew = where + ".eyelights";
      bounds.check(e.left_pupil, ew + ".left_pupil");
      bounds.check(e.left_highlight, ew + ".left_highlight");
      bounds.check(e.right_pupil, ew + ".right_pupil");
      bounds.check(e.right_highlight, ew + ".right_highlight");
      if (!(e.left_pupil.x < e.right_pupil.x)) {
        throw InvariantError(ew + ": left_pupil.x must be smaller than right_pupil.x");
      }
      if (e.left_highlight == e.left_pupil) throw InvariantError(ew + ": left highlight coincides with pupil");
      if (e.right_highlight == e.right_pupil) throw InvariantError(ew + ": right highlight coincides with pupil");
    }
  }
}

AnnotationDocument document_from_json(const json& j) {
  require_object(j, "document", {"version", "meta", "horizon", "figures", "faces"});
  if (read_int(j["version"], "version") != kSchemaVersion) {
    throw SchemaError("version: unsupported schema version " + j["version"].dump());
  }
  AnnotationDocument doc;
  doc.meta = read_meta(j["meta"]);
  if (!j["horizon"].is_null()) {
    require_object(j["horizon"], "horizon", {"y_h"});
    doc.horizon = HorizonAnnotation{read_real(j["horizon"]["y_h"], "horizon.y_h")};
  }
  if (!j["figures"].is_array()) throw SchemaError("figures: expected an array");
  if (!j["faces"].is_array()) throw SchemaError("faces: expected an array");
  doc.figures.reserve(j["figures"].size());
  for (std::size_t i = 0; i < j["figures"].size(); ++i) {
    doc.figures.push_back(read_figure(j["figures"][i], "figures[" + std::to_string(i) + "]"));
  }
  doc.faces.reserve(j["faces"].size());
  for (std::size_t i = 0; i < j["faces"].size(); ++i) {
    doc.faces.push_back(read_face(j["faces"][i], "faces[" + std::to_string(i) + "]"));
  }
  validate_document(doc);
  return doc;
}

AnnotationDocument parse_document(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
  try {
    return document_from_json(j);
  } catch (const DocumentError&) {
    throw;
  } catch (const json::exception& e) {
    throw SchemaError(e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  static std::atomic<unsigned> counter{0};
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot replace " + path.string());
  }
}

void save_document(const AnnotationDocument& doc, const std::filesystem::path& path) {
  validate_document(doc);
  write_file_atomic(path, serialize_document(doc));
}

AnnotationDocument load_document(const std::filesystem::path& path) {
  return parse_document(read_file(path));
}

}  // namespace limner
