#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "limner/types.hpp"

namespace limner::image {

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 8-bit sRGB, 3 interleaved channels, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  std::uint8_t at(int x, int y, int c) const { return rgb[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  friend bool operator==(const Image&, const Image&) = default;
};

Image make_image(int width, int height, std::uint8_t fill = 0);

/// PNG or JPEG, detected from the signature. Grey and alpha are folded to RGB.
Image decode(std::span<const std::uint8_t> bytes);
Image read_image(const std::filesystem::path& path);

/// Deterministic PNG encoding (no timestamps, fixed compression settings).
std::vector<std::uint8_t> encode_png(const Image& img);
void write_png(const std::filesystem::path& path, const Image& img);

double srgb_to_linear(double v);
double linear_to_srgb(double v);
/// Linear [0,1] to 8-bit sRGB with rounding.
std::uint8_t linear_to_srgb8(double v);

/// Bilinear stretch of `region` (source pixel units, may be fractional) to
/// target_w x target_h, sampled in linear light. Pixel (i, j) samples the
/// source at region.x + (i + 0.5) * region.w / target_w - 0.5, clamped to
/// the edge. Output: linear floats, 3 interleaved channels.
std::vector<float> resample_linear(const Image& src, const BBox& region, int target_w, int target_h);
std::vector<float> resample_linear_reference(const Image& src, const BBox& region, int target_w, int target_h);

inline BBox full_region(const Image& img) {
  return {0.0, 0.0, static_cast<double>(img.width), static_cast<double>(img.height)};
}

}  // namespace limner::image
