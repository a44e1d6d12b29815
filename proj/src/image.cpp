#include "limner/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>

#include <jpeglib.h>
#include <png.h>

namespace limner::image {

namespace {

const std::array<float, 256>& srgb_lut() {
  static const std::array<float, 256> lut = [] {
    std::array<float, 256> t{};
    for (int i = 0; i < 256; ++i) t[i] = static_cast<float>(srgb_to_linear(i / 255.0));
    return t;
  }();
  return lut;
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw ImageError(std::string("PNG decode failed: ") + img.message);
  }
  img.format = PNG_FORMAT_RGB;
  Image out;
  out.width = static_cast<int>(img.width);
  out.height = static_cast<int>(img.height);
  out.rgb.resize(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, out.rgb.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw ImageError("PNG decode failed: " + msg);
  }
  return out;
}

struct JpegErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

// Kept free of C++ objects with destructors between setjmp and longjmp.
bool decode_jpeg_raw(const std::uint8_t* data, std::size_t size, std::uint8_t* out, std::size_t out_size,
                     int* width, int* height, char* message) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    std::strncpy(message, err.message, JMSG_LENGTH_MAX);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, data, static_cast<unsigned long>(size));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  *width = static_cast<int>(cinfo.output_width);
  *height = static_cast<int>(cinfo.output_height);
  const std::size_t stride = static_cast<std::size_t>(cinfo.output_width) * 3;
  if (out == nullptr || out_size < stride * cinfo.output_height) {
    // Size probe only.
    jpeg_destroy_decompress(&cinfo);
    return true;
  }
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out + stride * cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

Image decode_jpeg(std::span<const std::uint8_t> bytes) {
  char message[JMSG_LENGTH_MAX] = {0};
  int w = 0, h = 0;
  if (!decode_jpeg_raw(bytes.data(), bytes.size(), nullptr, 0, &w, &h, message)) {
    throw ImageError(std::string("JPEG decode failed: ") + message);
  }
  if (w <= 0 || h <= 0) throw ImageError("JPEG decode failed: empty image");
  Image out = make_image(w, h);
  if (!decode_jpeg_raw(bytes.data(), bytes.size(), out.rgb.data(), out.rgb.size(), &w, &h, message)) {
    throw ImageError(std::string("JPEG decode failed: ") + message);
  }
  return out;
}

struct Tap {
  int i0;
  int i1;
  float f;
};

// Bilinear taps along one axis, clamped to [0, n-1].
std::vector<Tap> taps(double origin, double extent, int target, int n) {
  std::vector<Tap> out(target);
  for (int i = 0; i < target; ++i) {
    const double s = origin + (i + 0.5) * extent / target - 0.5;
    const double fl = std::floor(s);
    int i0 = static_cast<int>(fl);
    const float f = static_cast<float>(s - fl);
    int i1 = i0 + 1;
    i0 = std::clamp(i0, 0, n - 1);
    i1 = std::clamp(i1, 0, n - 1);
    out[i] = {i0, i1, f};
  }
  return out;
}

void check_resample_args(const Image& src, const BBox& region, int tw, int th) {
  if (src.width <= 0 || src.height <= 0) throw ImageError("empty source image");
  if (tw <= 0 || th <= 0) throw ImageError("target dimensions must be positive");
  if (!(region.w > 0.0) || !(region.h > 0.0)) throw ImageError("region must have positive size");
}

inline void resample_row(const Image& src, const std::vector<Tap>& xt, const Tap& yt, float* out) {
  const auto& lut = srgb_lut();
  const std::size_t stride = static_cast<std::size_t>(src.width) * 3;
  const std::uint8_t* r0 = src.rgb.data() + stride * yt.i0;
  const std::uint8_t* r1 = src.rgb.data() + stride * yt.i1;
  for (std::size_t i = 0; i < xt.size(); ++i) {
    const auto& t = xt[i];
    for (int c = 0; c < 3; ++c) {
      const float a = lut[r0[t.i0 * 3 + c]];
      const float b = lut[r0[t.i1 * 3 + c]];
      const float d = lut[r1[t.i0 * 3 + c]];
      const float e = lut[r1[t.i1 * 3 + c]];
      const float top = a + (b - a) * t.f;
      const float bot = d + (e - d) * t.f;
      out[i * 3 + c] = top + (bot - top) * yt.f;
    }
  }
}

}  // namespace

Image make_image(int width, int height, std::uint8_t fill) {
  if (width <= 0 || height <= 0) throw ImageError("image dimensions must be positive");
  Image img;
  img.width = width;
  img.height = height;
  img.rgb.assign(static_cast<std::size_t>(width) * height * 3, fill);
  return img;
}

Image decode(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kPng[] = {0x89, 'P', 'N', 'G'};
  if (bytes.size() >= 8 && std::equal(std::begin(kPng), std::end(kPng), bytes.begin())) {
    return decode_png(bytes);
  }
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
    return decode_jpeg(bytes);
  }
  throw ImageError("unrecognised image format (expected PNG or JPEG)");
}

Image read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageError("cannot open image " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode(bytes);
  } catch (const ImageError& e) {
    throw ImageError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const Image& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.rgb.size() != static_cast<std::size_t>(img.width) * img.height * 3) {
    throw ImageError("encode_png: inconsistent image");
  }
  png_image pi;
  std::memset(&pi, 0, sizeof pi);
  pi.version = PNG_IMAGE_VERSION;
  pi.width = static_cast<png_uint_32>(img.width);
  pi.height = static_cast<png_uint_32>(img.height);
  pi.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&pi, nullptr, &size, 0, img.rgb.data(), 0, nullptr)) {
    throw ImageError(std::string("PNG encode failed: ") + pi.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&pi, out.data(), &size, 0, img.rgb.data(), 0, nullptr)) {
    throw ImageError(std::string("PNG encode failed: ") + pi.message);
  }
  out.resize(size);
  return out;
}

void write_png(const std::filesystem::path& path, const Image& img) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ImageError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ImageError("write failed: " + path.string());
}

double srgb_to_linear(double v) {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v) {
  v = std::clamp(v, 0.0, 1.0);
  return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

std::uint8_t linear_to_srgb8(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(linear_to_srgb(v), 0.0, 1.0) * 255.0));
}

std::vector<float> resample_linear_reference(const Image& src, const BBox& region, int tw, int th) {
  check_resample_args(src, region, tw, th);
  const auto xt = taps(region.x, region.w, tw, src.width);
  const auto yt = taps(region.y, region.h, th, src.height);
  std::vector<float> out(static_cast<std::size_t>(tw) * th * 3);
  for (int j = 0; j < th; ++j) resample_row(src, xt, yt[j], out.data() + static_cast<std::size_t>(j) * tw * 3);
  return out;
}

std::vector<float> resample_linear(const Image& src, const BBox& region, int tw, int th) {
  check_resample_args(src, region, tw, th);
  const auto xt = taps(region.x, region.w, tw, src.width);
  const auto yt = taps(region.y, region.h, th, src.height);
  std::vector<float> out(static_cast<std::size_t>(tw) * th * 3);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < th; ++j) resample_row(src, xt, yt[j], out.data() + static_cast<std::size_t>(j) * tw * 3);
  return out;
}

}  // namespace limner::image
