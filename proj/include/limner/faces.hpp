#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <vector>

#include "limner/error.hpp"
#include "limner/image.hpp"
#include "limner/kernels.hpp"
#include "limner/types.hpp"

namespace limner::faces {

struct CategoryBin {
  int year_start = 0;
  int year_end = 0;  // inclusive
  /// Indexed like kLabelledPoseGaze (LL, LF, FF, RF, RR); sums to 1.
  std::array<double, 5> proportions{};
  std::array<int, 5> counts{};
  int n = 0;
};

struct CategoryTimeTable {
  int bin_years = 25;
  std::vector<CategoryBin> bins;
  double other_rate = 0.0;
  int n_faces = 0;
  int n_other = 0;
};

/// Proportions over the five labelled classes per year bin; Other only
/// enters other_rate (computed over every face in the corpus).
CategoryTimeTable category_time_table(std::span<const AnnotationDocument> docs, int bin_years = 25);

struct Size {
  int width = 0;
  int height = 0;
};

inline constexpr Size kDefaultFaceTarget{128, 128};
inline constexpr Size kDefaultPaintingTarget{256, 256};

/// Per-pixel, per-channel mean in linear light.
struct AverageImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;  // 3 interleaved channels, [0, 1]
  std::size_t n_images = 0;

  /// sRGB-encoded 8-bit rendering.
  image::Image to_srgb8() const;
};

/// Streaming averager: regions are resampled on arrival and folded into a
/// compensated accumulator in batches, so memory stays bounded.
class Averager {
 public:
  explicit Averager(Size target, std::size_t batch_size = 32, bool parallel = true);

  void add(const image::Image& img);
  void add(const image::Image& img, const BBox& region);
  std::size_t count() const { return acc_.count() + pending_.size(); }

  /// Throws AnalysisError if nothing was added.
  AverageImage result();

 private:
  void flush();

  Size target_;
  std::size_t batch_size_;
  bool parallel_;
  kernels::CompensatedAccumulator acc_;
  std::vector<std::vector<float>> pending_;
};

AverageImage average_images(std::span<const image::Image> images, Size target);

/// Serial path: serial resampling and element-by-element accumulation.
AverageImage average_images_reference(std::span<const image::Image> images, Size target);

/// Face crops whose category is in `categories`, averaged. Paintings are
/// read from image_path resolved against `image_root`. Throws AnalysisError
/// for an empty selection.
AverageImage average_faces_by_category(std::span<const AnnotationDocument> docs,
                                       const std::filesystem::path& image_root,
                                       const std::set<PoseGaze>& categories,
                                       Size target = kDefaultFaceTarget);

/// Whole-painting average (every document with an image).
AverageImage average_paintings(std::span<const AnnotationDocument> docs,
                               const std::filesystem::path& image_root,
                               Size target = kDefaultPaintingTarget);

}  // namespace limner::faces
