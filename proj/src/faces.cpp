#include "limner/faces.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace limner::faces {

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::filesystem::path resolve(const std::filesystem::path& root, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : root / path;
}

}  // namespace

CategoryTimeTable category_time_table(std::span<const AnnotationDocument> docs, int bin_years) {
  if (bin_years < 1) throw AnalysisError("bin_years must be positive");
  CategoryTimeTable table;
  table.bin_years = bin_years;
  std::map<int, std::array<int, 5>> bins;
  for (const auto& doc : docs) {
    for (const auto& face : doc.faces) {
      ++table.n_faces;
      if (face.category == PoseGaze::Other) {
        ++table.n_other;
        continue;
      }
      if (!doc.meta.year) continue;
      auto& counts = bins[floor_div(*doc.meta.year, bin_years) * bin_years];
      ++counts[static_cast<int>(face.category)];
    }
  }
  if (bins.empty()) throw AnalysisError("no dated, categorised faces");
  table.other_rate = static_cast<double>(table.n_other) / table.n_faces;
  for (const auto& [start, counts] : bins) {
    CategoryBin bin;
    bin.year_start = start;
    bin.year_end = start + bin_years - 1;
    bin.counts = counts;
    for (int c : counts) bin.n += c;
    for (int k = 0; k < 5; ++k) bin.proportions[k] = static_cast<double>(counts[k]) / bin.n;
    table.bins.push_back(bin);
  }
  return table;
}

image::Image AverageImage::to_srgb8() const {
  auto img = image::make_image(width, height);
  for (std::size_t i = 0; i < pixels.size(); ++i) img.rgb[i] = image::linear_to_srgb8(pixels[i]);
  return img;
}

Averager::Averager(Size target, std::size_t batch_size, bool parallel)
    : target_(target),
      batch_size_(std::max<std::size_t>(1, batch_size)),
      parallel_(parallel),
      acc_(static_cast<std::size_t>(std::max(0, target.width)) * std::max(0, target.height) * 3) {
  if (target.width <= 0 || target.height <= 0) throw AnalysisError("target dimensions must be positive");
}

void Averager::add(const image::Image& img) { add(img, image::full_region(img)); }

void Averager::add(const image::Image& img, const BBox& region) {
  if (parallel_) {
    pending_.push_back(image::resample_linear(img, region, target_.width, target_.height));
    if (pending_.size() >= batch_size_) flush();
  } else {
    acc_.add_reference(image::resample_linear_reference(img, region, target_.width, target_.height));
  }
}

void Averager::flush() {
  if (pending_.empty()) return;
  acc_.add_batch(pending_);
  pending_.clear();
}

AverageImage Averager::result() {
  flush();
  if (acc_.count() == 0) throw AnalysisError("nothing to average");
  AverageImage out;
  out.width = target_.width;
  out.height = target_.height;
  out.n_images = acc_.count();
  out.pixels = acc_.mean();
  for (double& v : out.pixels) v = std::clamp(v, 0.0, 1.0);
  return out;
}

AverageImage average_images(std::span<const image::Image> images, Size target) {
  if (images.empty()) throw AnalysisError("no images to average");
  Averager avg(target);
  for (const auto& img : images) avg.add(img);
  return avg.result();
}

AverageImage average_images_reference(std::span<const image::Image> images, Size target) {
  if (images.empty()) throw AnalysisError("no images to average");
  Averager avg(target, 1, false);
  for (const auto& img : images) avg.add(img);
  return avg.result();
}

AverageImage average_faces_by_category(std::span<const AnnotationDocument> docs,
                                       const std::filesystem::path& image_root,
                                       const std::set<PoseGaze>& categories, Size target) {
  Averager avg(target);
  for (const auto& doc : docs) {
    const bool any = std::any_of(doc.faces.begin(), doc.faces.end(),
                                 [&](const FaceAnnotation& f) { return categories.contains(f.category); });
    if (!any) continue;
    if (doc.meta.image_path.empty()) {
      throw AnalysisError(doc.meta.id + ": selected faces but no image_path");
    }
    const auto img = image::read_image(resolve(image_root, doc.meta.image_path));
    // Bboxes were validated against the annotated dimensions; rescale if the
    // file on disk is a different resolution.
    const double sx = static_cast<double>(img.width) / static_cast<double>(doc.meta.width_px);
    const double sy = static_cast<double>(img.height) / static_cast<double>(doc.meta.height_px);
    for (const auto& face : doc.faces) {
      if (!categories.contains(face.category)) continue;
      const BBox r{face.bbox.x * sx, face.bbox.y * sy, face.bbox.w * sx, face.bbox.h * sy};
      avg.add(img, r);
    }
  }
  if (avg.count() == 0) throw AnalysisError("no faces in the selected categories");
  return avg.result();
}

AverageImage average_paintings(std::span<const AnnotationDocument> docs,
                               const std::filesystem::path& image_root, Size target) {
  Averager avg(target);
  for (const auto& doc : docs) {
    if (doc.meta.image_path.empty()) continue;
    avg.add(image::read_image(resolve(image_root, doc.meta.image_path)));
  }
  if (avg.count() == 0) throw AnalysisError("no paintings with images");
  return avg.result();
}

}  // namespace limner::faces
