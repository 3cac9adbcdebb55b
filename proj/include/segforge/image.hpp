#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace segforge {

// Row-major 8-bit image, 1 (gray) or 3 (RGB) channels.
struct ImageBuffer {
  int height = 0;
  int width = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;  // height * width * channels

  static ImageBuffer make(int height, int width, int channels,
                          std::uint8_t fill = 0);

  std::uint8_t& at(int y, int x, int c) {
    return pixels[static_cast<std::size_t>((y * width + x) * channels + c)];
  }
  std::uint8_t at(int y, int x, int c) const {
    return pixels[static_cast<std::size_t>((y * width + x) * channels + c)];
  }

  bool same_shape(const ImageBuffer& other) const {
    return height == other.height && width == other.width &&
           channels == other.channels;
  }
  bool valid() const;
};

// Pixel-level class labels, 0 = background / defect-free.
struct MaskBuffer {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> labels;  // height * width

  static MaskBuffer make(int height, int width, std::uint8_t fill = 0);

  std::uint8_t& at(int y, int x) {
    return labels[static_cast<std::size_t>(y * width + x)];
  }
  std::uint8_t at(int y, int x) const {
    return labels[static_cast<std::size_t>(y * width + x)];
  }

  bool valid() const;
  bool all_zero() const;
  std::uint8_t max_label() const;
  // Distinct labels present, ascending, background included if present.
  std::vector<int> label_set() const;
  bool contains_label(int label) const;
};

struct Sample {
  ImageBuffer image;
  MaskBuffer mask;
  std::string id;

  bool dims_match() const {
    return image.height == mask.height && image.width == mask.width;
  }
};

// Bilinear sample of one channel; coordinates in pixel units, outside -> 0.
double bilinear_sample(const ImageBuffer& img, double y, double x, int c);

// Nearest-neighbor lookups; outside -> 0 (black / background).
std::uint8_t nearest_pixel(const ImageBuffer& img, double y, double x, int c);
std::uint8_t nearest_label(const MaskBuffer& mask, double y, double x);

// Integer Rec.601 weights (299/587/114 per 1000); gray passes through.
ImageBuffer to_grayscale(const ImageBuffer& img);

ImageBuffer resize_bilinear(const ImageBuffer& img, int out_h, int out_w);
MaskBuffer resize_nearest(const MaskBuffer& mask, int out_h, int out_w);

std::uint8_t clamp_u8(double v);

}  // namespace segforge
