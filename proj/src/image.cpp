#include "segforge/image.hpp"

#include <algorithm>
#include <cmath>

#include "segforge/errors.hpp"

namespace segforge {

ImageBuffer ImageBuffer::make(int height, int width, int channels,
                              std::uint8_t fill) {
  if (height <= 0 || width <= 0 || (channels != 1 && channels != 3)) {
    throw DataError("ImageBuffer::make: bad shape " + std::to_string(height) +
                    "x" + std::to_string(width) + "x" +
                    std::to_string(channels));
  }
  ImageBuffer img;
  img.height = height;
  img.width = width;
  img.channels = channels;
  img.pixels.assign(
      static_cast<std::size_t>(height) * width * channels, fill);
  return img;
}

bool ImageBuffer::valid() const {
  return height > 0 && width > 0 && (channels == 1 || channels == 3) &&
         pixels.size() == static_cast<std::size_t>(height) * width * channels;
}

MaskBuffer MaskBuffer::make(int height, int width, std::uint8_t fill) {
  if (height <= 0 || width <= 0) {
    throw DataError("MaskBuffer::make: bad shape");
  }
  MaskBuffer mask;
  mask.height = height;
  mask.width = width;
  mask.labels.assign(static_cast<std::size_t>(height) * width, fill);
  return mask;
}

bool MaskBuffer::valid() const {
  return height > 0 && width > 0 &&
         labels.size() == static_cast<std::size_t>(height) * width;
}

bool MaskBuffer::all_zero() const {
  return std::all_of(labels.begin(), labels.end(),
                     [](std::uint8_t v) { return v == 0; });
}

std::uint8_t MaskBuffer::max_label() const {
  std::uint8_t m = 0;
  for (std::uint8_t v : labels) m = std::max(m, v);
  return m;
}

std::vector<int> MaskBuffer::label_set() const {
  bool seen[256] = {};
  for (std::uint8_t v : labels) seen[v] = true;
  std::vector<int> out;
  for (int i = 0; i < 256; ++i)
    if (seen[i]) out.push_back(i);
  return out;
}

bool MaskBuffer::contains_label(int label) const {
  return std::find(labels.begin(), labels.end(),
                   static_cast<std::uint8_t>(label)) != labels.end();
}

double bilinear_sample(const ImageBuffer& img, double y, double x, int c) {
  if (x < -0.5 || y < -0.5 || x > img.width - 0.5 || y > img.height - 0.5) {
    return 0.0;
  }
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double dx = x - x0;
  const double dy = y - y0;
  auto value = [&](int yy, int xx) -> double {
    if (xx < 0 || yy < 0 || xx >= img.width || yy >= img.height) return 0.0;
    return img.at(yy, xx, c);
  };
  const double top = value(y0, x0) * (1.0 - dx) + value(y0, x0 + 1) * dx;
  const double bot = value(y0 + 1, x0) * (1.0 - dx) + value(y0 + 1, x0 + 1) * dx;
  return top * (1.0 - dy) + bot * dy;
}

std::uint8_t nearest_pixel(const ImageBuffer& img, double y, double x, int c) {
  const int xi = static_cast<int>(std::lround(x));
  const int yi = static_cast<int>(std::lround(y));
  if (xi < 0 || yi < 0 || xi >= img.width || yi >= img.height) return 0;
  return img.at(yi, xi, c);
}

std::uint8_t nearest_label(const MaskBuffer& mask, double y, double x) {
  const int xi = static_cast<int>(std::lround(x));
  const int yi = static_cast<int>(std::lround(y));
  if (xi < 0 || yi < 0 || xi >= mask.width || yi >= mask.height) return 0;
  return mask.at(yi, xi);
}

ImageBuffer to_grayscale(const ImageBuffer& img) {
  if (img.channels == 1) return img;
  ImageBuffer out = ImageBuffer::make(img.height, img.width, 1);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const int r = img.at(y, x, 0);
      const int g = img.at(y, x, 1);
      const int b = img.at(y, x, 2);
      out.at(y, x, 0) =
          static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
    }
  }
  return out;
}

ImageBuffer resize_bilinear(const ImageBuffer& img, int out_h, int out_w) {
  ImageBuffer out = ImageBuffer::make(out_h, out_w, img.channels);
  const double sy = static_cast<double>(img.height) / out_h;
  const double sx = static_cast<double>(img.width) / out_w;
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      const double src_y = (y + 0.5) * sy - 0.5;
      const double src_x = (x + 0.5) * sx - 0.5;
      for (int c = 0; c < img.channels; ++c) {
        const double cy = std::clamp(src_y, 0.0, img.height - 1.0);
        const double cx = std::clamp(src_x, 0.0, img.width - 1.0);
        out.at(y, x, c) = clamp_u8(bilinear_sample(img, cy, cx, c));
      }
    }
  }
  return out;
}

MaskBuffer resize_nearest(const MaskBuffer& mask, int out_h, int out_w) {
  MaskBuffer out = MaskBuffer::make(out_h, out_w);
  const double sy = static_cast<double>(mask.height) / out_h;
  const double sx = static_cast<double>(mask.width) / out_w;
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      int src_y = static_cast<int>((y + 0.5) * sy);
      int src_x = static_cast<int>((x + 0.5) * sx);
      src_y = std::clamp(src_y, 0, mask.height - 1);
      src_x = std::clamp(src_x, 0, mask.width - 1);
      out.at(y, x) = mask.at(src_y, src_x);
    }
  }
  return out;
}

std::uint8_t clamp_u8(double v) {
  const long r = std::lround(v);
  if (r <= 0) return 0;
  if (r >= 255) return 255;
  return static_cast<std::uint8_t>(r);
}

}  // namespace segforge
