#include "segforge/augment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>

#include "json.hpp"
#include "segforge/dedup.hpp"
#include "segforge/errors.hpp"
#include "segforge/rng.hpp"

namespace segforge {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Json = nlohmann::json;

// ---- spatial maps -------------------------------------------------------

// Inverse affine map: src = [a b; c d] * dst + [tx ty].
struct AffineInverse {
  double a = 1, b = 0, tx = 0;
  double c = 0, d = 1, ty = 0;
};

Sample warp_with(const Sample& in, int out_h, int out_w,
                 const std::function<void(double, double, double&, double&)>&
                     dst_to_src) {
  Sample out;
  out.id = in.id;
  out.image = ImageBuffer::make(out_h, out_w, in.image.channels);
  out.mask = MaskBuffer::make(out_h, out_w);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      double sx = 0, sy = 0;
      dst_to_src(static_cast<double>(x), static_cast<double>(y), sx, sy);
      for (int ch = 0; ch < in.image.channels; ++ch) {
        out.image.at(y, x, ch) = clamp_u8(bilinear_sample(in.image, sy, sx, ch));
      }
      out.mask.at(y, x) = nearest_label(in.mask, sy, sx);
    }
  }
  return out;
}

Sample warp_affine(const Sample& in, const AffineInverse& m) {
  return warp_with(in, in.image.height, in.image.width,
                   [&](double x, double y, double& sx, double& sy) {
                     sx = m.a * x + m.b * y + m.tx;
                     sy = m.c * x + m.d * y + m.ty;
                   });
}

// Solves an n x n system in place, partial pivoting.
void solve_linear(std::vector<std::vector<double>>& a, std::vector<double>& b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-12) {
      throw DataError("singular system in homography estimation");
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double sum = b[i];
    for (std::size_t k = i + 1; k < n; ++k) sum -= a[i][k] * b[k];
    b[i] = sum / a[i][i];
  }
}

// Homography h (h33 = 1) mapping (X, Y) -> (u, v) for four correspondences.
std::array<double, 9> homography_from_corners(
    const std::array<std::array<double, 2>, 4>& dst,
    const std::array<std::array<double, 2>, 4>& src) {
  std::vector<std::vector<double>> a(8, std::vector<double>(8, 0.0));
  std::vector<double> b(8, 0.0);
  for (int i = 0; i < 4; ++i) {
    const double X = dst[i][0], Y = dst[i][1];
    const double u = src[i][0], v = src[i][1];
    a[2 * i] = {X, Y, 1, 0, 0, 0, -u * X, -u * Y};
    b[2 * i] = u;
    a[2 * i + 1] = {0, 0, 0, X, Y, 1, -v * X, -v * Y};
    b[2 * i + 1] = v;
  }
  solve_linear(a, b);
  return {b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7], 1.0};
}

// ---- geometric transforms -----------------------------------------------

Sample flip_horizontal(const Sample& in) {
  Sample out = in;
  const int w = in.image.width;
  for (int y = 0; y < in.image.height; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < in.image.channels; ++c) {
        out.image.at(y, x, c) = in.image.at(y, w - 1 - x, c);
      }
      out.mask.at(y, x) = in.mask.at(y, w - 1 - x);
    }
  }
  return out;
}

Sample flip_vertical(const Sample& in) {
  Sample out = in;
  const int h = in.image.height;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < in.image.width; ++x) {
      for (int c = 0; c < in.image.channels; ++c) {
        out.image.at(y, x, c) = in.image.at(h - 1 - y, x, c);
      }
      out.mask.at(y, x) = in.mask.at(h - 1 - y, x);
    }
  }
  return out;
}

Sample rotate_about_center(const Sample& in, double deg) {
  if (deg == 0.0) return in;
  const double rad = deg * kPi / 180.0;
  const double cx = (in.image.width - 1) / 2.0;
  const double cy = (in.image.height - 1) / 2.0;
  const double cs = std::cos(rad), sn = std::sin(rad);
  AffineInverse m;  // rotate destination back by -deg
  m.a = cs;
  m.b = sn;
  m.c = -sn;
  m.d = cs;
  m.tx = cx - cs * cx - sn * cy;
  m.ty = cy + sn * cx - cs * cy;
  return warp_affine(in, m);
}

Sample perspective_jitter(const Sample& in, double strength, Rng& rng) {
  const double w = in.image.width - 1.0;
  const double h = in.image.height - 1.0;
  const std::array<std::array<double, 2>, 4> dst = {
      {{0, 0}, {w, 0}, {w, h}, {0, h}}};
  std::array<std::array<double, 2>, 4> src = dst;
  for (auto& corner : src) {
    corner[0] += rng.next_uniform(-strength, strength) * w;
    corner[1] += rng.next_uniform(-strength, strength) * h;
  }
  const auto hom = homography_from_corners(dst, src);
  return warp_with(in, in.image.height, in.image.width,
                   [&](double x, double y, double& sx, double& sy) {
                     const double den = hom[6] * x + hom[7] * y + hom[8];
                     sx = (hom[0] * x + hom[1] * y + hom[2]) / den;
                     sy = (hom[3] * x + hom[4] * y + hom[5]) / den;
                   });
}

std::vector<double> gaussian_kernel(double sigma) {
  const int half = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(static_cast<std::size_t>(2 * half + 1));
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + half)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable Gaussian smoothing of a scalar field, replicated borders.
void smooth_field(std::vector<double>& field, int h, int w, double sigma) {
  const auto kernel = gaussian_kernel(sigma);
  const int half = static_cast<int>(kernel.size() / 2);
  std::vector<double> tmp(field.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -half; i <= half; ++i) {
        const int xx = std::clamp(x + i, 0, w - 1);
        acc += kernel[static_cast<std::size_t>(i + half)] *
               field[static_cast<std::size_t>(y * w + xx)];
      }
      tmp[static_cast<std::size_t>(y * w + x)] = acc;
    }
  }
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      double acc = 0.0;
      for (int i = -half; i <= half; ++i) {
        const int yy = std::clamp(y + i, 0, h - 1);
        acc += kernel[static_cast<std::size_t>(i + half)] *
               tmp[static_cast<std::size_t>(yy * w + x)];
      }
      field[static_cast<std::size_t>(y * w + x)] = acc;
    }
  }
}

Sample elastic_deform(const Sample& in, double alpha, double sigma, Rng& rng) {
  const int h = in.image.height, w = in.image.width;
  std::vector<double> dx(static_cast<std::size_t>(h) * w);
  std::vector<double> dy(dx.size());
  for (auto& v : dx) v = rng.next_uniform(-1.0, 1.0);
  for (auto& v : dy) v = rng.next_uniform(-1.0, 1.0);
  smooth_field(dx, h, w, sigma);
  smooth_field(dy, h, w, sigma);
  return warp_with(in, h, w, [&](double x, double y, double& sx, double& sy) {
    const std::size_t i =
        static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
        static_cast<std::size_t>(x);
    sx = x + alpha * dx[i];
    sy = y + alpha * dy[i];
  });
}

Sample random_crop(const Sample& in, int crop_h, int crop_w, Rng& rng) {
  if (crop_h <= 0 || crop_w <= 0 || crop_h > in.image.height ||
      crop_w > in.image.width) {
    throw DataError("random_crop: crop larger than source");
  }
  const int top = static_cast<int>(
      rng.next_below(static_cast<std::uint64_t>(in.image.height - crop_h + 1)));
  const int left = static_cast<int>(
      rng.next_below(static_cast<std::uint64_t>(in.image.width - crop_w + 1)));
  Sample out;
  out.id = in.id;
  out.image = ImageBuffer::make(crop_h, crop_w, in.image.channels);
  out.mask = MaskBuffer::make(crop_h, crop_w);
  for (int y = 0; y < crop_h; ++y) {
    for (int x = 0; x < crop_w; ++x) {
      for (int c = 0; c < in.image.channels; ++c) {
        out.image.at(y, x, c) = in.image.at(top + y, left + x, c);
      }
      out.mask.at(y, x) = in.mask.at(top + y, left + x);
    }
  }
  return out;
}

// ---- photometric transforms ---------------------------------------------

void equalize_channel(ImageBuffer& img, int channel) {
  std::array<std::uint64_t, 256> hist{};
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) ++hist[img.at(y, x, channel)];
  }
  std::array<std::uint64_t, 256> cdf{};
  std::uint64_t running = 0;
  for (int v = 0; v < 256; ++v) {
    running += hist[static_cast<std::size_t>(v)];
    cdf[static_cast<std::size_t>(v)] = running;
  }
  std::uint64_t cdf_min = 0;
  for (int v = 0; v < 256; ++v) {
    if (hist[static_cast<std::size_t>(v)] != 0) {
      cdf_min = cdf[static_cast<std::size_t>(v)];
      break;
    }
  }
  const std::uint64_t n = cdf[255];
  if (n == cdf_min) return;  // single intensity: nothing to stretch
  std::array<std::uint8_t, 256> lut{};
  const std::uint64_t den = n - cdf_min;
  for (int v = 0; v < 256; ++v) {
    const std::uint64_t num = (cdf[static_cast<std::size_t>(v)] - cdf_min);
    lut[static_cast<std::size_t>(v)] =
        static_cast<std::uint8_t>((num * 255 + den / 2) / den);
  }
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      img.at(y, x, channel) = lut[img.at(y, x, channel)];
    }
  }
}

void add_gaussian_noise(ImageBuffer& img, double stddev, Rng& rng) {
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        img.at(y, x, c) =
            clamp_u8(img.at(y, x, c) + rng.next_gaussian(0.0, stddev));
      }
    }
  }
}

void convolve_separable(ImageBuffer& img, const std::vector<double>& kernel) {
  const int half = static_cast<int>(kernel.size() / 2);
  const std::size_t plane =
      static_cast<std::size_t>(img.height) * img.width * img.channels;
  std::vector<double> tmp(plane), tmp2(plane);
  auto idx = [&](int y, int x, int c) {
    return static_cast<std::size_t>((y * img.width + x) * img.channels + c);
  };
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        double acc = 0.0;
        for (int i = -half; i <= half; ++i) {
          const int xx = std::clamp(x + i, 0, img.width - 1);
          acc += kernel[static_cast<std::size_t>(i + half)] * img.at(y, xx, c);
        }
        tmp[idx(y, x, c)] = acc;
      }
    }
  }
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        double acc = 0.0;
        for (int i = -half; i <= half; ++i) {
          const int yy = std::clamp(y + i, 0, img.height - 1);
          acc += kernel[static_cast<std::size_t>(i + half)] * tmp[idx(yy, x, c)];
        }
        tmp2[idx(y, x, c)] = acc;
      }
    }
  }
  for (std::size_t i = 0; i < plane; ++i) img.pixels[i] = clamp_u8(tmp2[i]);
}

void sharpen_image(ImageBuffer& img) {
  const ImageBuffer src = img;
  auto value = [&](int y, int x, int c) -> double {
    y = std::clamp(y, 0, src.height - 1);
    x = std::clamp(x, 0, src.width - 1);
    return src.at(y, x, c);
  };
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        const double v = 5.0 * value(y, x, c) - value(y - 1, x, c) -
                         value(y + 1, x, c) - value(y, x - 1, c) -
                         value(y, x + 1, c);
        img.at(y, x, c) = clamp_u8(v);
      }
    }
  }
}

// t in [0,1] is the local effect intensity; sign +1 brightens, -1 darkens.
void apply_light_pattern(ImageBuffer& img, const std::string& pattern,
                         double strength, double sign, Rng& rng) {
  const int h = img.height, w = img.width;
  std::vector<double> t(static_cast<std::size_t>(h) * w, 0.0);
  if (pattern == "radial") {
    const double cx = rng.next_uniform(0.0, w - 1.0);
    const double cy = rng.next_uniform(0.0, h - 1.0);
    double max_d = 0.0;
    for (const auto& corner : {std::array<double, 2>{0, 0},
                               std::array<double, 2>{w - 1.0, 0},
                               std::array<double, 2>{0, h - 1.0},
                               std::array<double, 2>{w - 1.0, h - 1.0}}) {
      max_d = std::max(max_d, std::hypot(corner[0] - cx, corner[1] - cy));
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double d = std::hypot(x - cx, y - cy);
        t[static_cast<std::size_t>(y * w + x)] = 1.0 - d / max_d;
      }
    }
  } else {  // linear ramp along a random direction
    const double phi = rng.next_uniform(0.0, 2.0 * kPi);
    const double dx = std::cos(phi), dy = std::sin(phi);
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& corner : {std::array<double, 2>{0, 0},
                               std::array<double, 2>{w - 1.0, 0},
                               std::array<double, 2>{0, h - 1.0},
                               std::array<double, 2>{w - 1.0, h - 1.0}}) {
      const double p = corner[0] * dx + corner[1] * dy;
      if (first) {
        lo = hi = p;
        first = false;
      } else {
        lo = std::min(lo, p);
        hi = std::max(hi, p);
      }
    }
    const double span = std::max(hi - lo, 1e-9);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        t[static_cast<std::size_t>(y * w + x)] = (x * dx + y * dy - lo) / span;
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double factor =
          1.0 + sign * strength * t[static_cast<std::size_t>(y * w + x)];
      for (int c = 0; c < img.channels; ++c) {
        img.at(y, x, c) = clamp_u8(img.at(y, x, c) * factor);
      }
    }
  }
}

void color_jitter_image(ImageBuffer& img, const TransformSpec& spec,
                        Rng& rng) {
  const double brightness =
      rng.next_uniform(-spec.brightness, spec.brightness) * 255.0;
  const double contrast =
      rng.next_uniform(1.0 - spec.contrast, 1.0 + spec.contrast);
  const double saturation =
      rng.next_uniform(1.0 - spec.saturation, 1.0 + spec.saturation);
  const ImageBuffer gray = to_grayscale(img);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        double v = img.at(y, x, c);
        if (img.channels == 3) {
          const double g = gray.at(y, x, 0);
          v = g + (v - g) * saturation;
        }
        v = (v - 128.0) * contrast + 128.0;
        v += brightness;
        img.at(y, x, c) = clamp_u8(v);
      }
    }
  }
}

}  // namespace

// ---- TransformSpec -------------------------------------------------------

bool TransformSpec::geometric() const {
  switch (kind) {
    case TransformKind::hflip:
    case TransformKind::vflip:
    case TransformKind::rotate:
    case TransformKind::perspective:
    case TransformKind::elastic:
    case TransformKind::random_crop:
      return true;
    default:
      return false;
  }
}

bool TransformSpec::mixing() const {
  return kind == TransformKind::mixup || kind == TransformKind::cutmix;
}

std::string TransformSpec::name() const {
  char buf[64];
  switch (kind) {
    case TransformKind::hflip:
      return "hflip";
    case TransformKind::vflip:
      return "vflip";
    case TransformKind::rotate:
      std::snprintf(buf, sizeof(buf), "rotate%g", deg);
      return buf;
    case TransformKind::histogram_eq:
      return "histeq";
    case TransformKind::perspective:
      return "perspective";
    case TransformKind::elastic:
      return "elastic";
    case TransformKind::gaussian_noise:
      return "noise";
    case TransformKind::gaussian_blur:
      return "blur";
    case TransformKind::sharpen:
      return "sharpen";
    case TransformKind::random_crop:
      return "crop";
    case TransformKind::shadow:
      return "shadow";
    case TransformKind::highlight:
      return "highlight";
    case TransformKind::color_jitter:
      return "jitter";
    case TransformKind::channel_emphasis:
      std::snprintf(buf, sizeof(buf), "chan%d", channel);
      return buf;
    case TransformKind::mixup:
      return "mixup";
    case TransformKind::cutmix:
      return "cutmix";
  }
  return "unknown";
}

namespace {

const std::map<std::string, TransformKind>& kind_names() {
  static const std::map<std::string, TransformKind> names = {
      {"hflip", TransformKind::hflip},
      {"vflip", TransformKind::vflip},
      {"rotate", TransformKind::rotate},
      {"histogram_eq", TransformKind::histogram_eq},
      {"perspective", TransformKind::perspective},
      {"elastic", TransformKind::elastic},
      {"gaussian_noise", TransformKind::gaussian_noise},
      {"gaussian_blur", TransformKind::gaussian_blur},
      {"sharpen", TransformKind::sharpen},
      {"random_crop", TransformKind::random_crop},
      {"shadow", TransformKind::shadow},
      {"highlight", TransformKind::highlight},
      {"color_jitter", TransformKind::color_jitter},
      {"channel_emphasis", TransformKind::channel_emphasis},
      {"mixup", TransformKind::mixup},
      {"cutmix", TransformKind::cutmix}};
  return names;
}

TransformSpec spec_from_json(const Json& j) {
  TransformSpec spec;
  const std::string kind = j.at("kind").get<std::string>();
  auto it = kind_names().find(kind);
  if (it == kind_names().end()) {
    throw DataError("unknown transform kind '" + kind + "'");
  }
  spec.kind = it->second;
  if (j.contains("deg")) spec.deg = j["deg"].get<double>();
  if (j.contains("strength")) spec.strength = j["strength"].get<double>();
  if (j.contains("alpha")) spec.alpha = j["alpha"].get<double>();
  if (j.contains("sigma")) spec.sigma = j["sigma"].get<double>();
  if (j.contains("stddev")) spec.stddev = j["stddev"].get<double>();
  if (j.contains("radius")) spec.radius = j["radius"].get<double>();
  if (j.contains("crop_h")) spec.crop_h = j["crop_h"].get<int>();
  if (j.contains("crop_w")) spec.crop_w = j["crop_w"].get<int>();
  if (j.contains("pattern")) spec.pattern = j["pattern"].get<std::string>();
  if (j.contains("brightness")) spec.brightness = j["brightness"].get<double>();
  if (j.contains("contrast")) spec.contrast = j["contrast"].get<double>();
  if (j.contains("saturation")) spec.saturation = j["saturation"].get<double>();
  if (j.contains("channel")) spec.channel = j["channel"].get<int>();
  if (j.contains("emphasis")) spec.emphasis = j["emphasis"].get<double>();
  if (j.contains("lambda")) spec.lambda = j["lambda"].get<double>();
  if (j.contains("region")) {
    const auto& r = j["region"];
    spec.region = {r.at("y").get<int>(), r.at("x").get<int>(),
                   r.at("h").get<int>(), r.at("w").get<int>()};
  }
  if (spec.deg <= -180.0 || spec.deg > 180.0) {
    throw DataError("rotate deg must be in (-180, 180]");
  }
  if (spec.stddev < 0 || spec.strength < 0) {
    throw DataError("stddev and strength must be >= 0");
  }
  return spec;
}

Json spec_to_json(const TransformSpec& spec) {
  Json j;
  for (const auto& [name, kind] : kind_names()) {
    if (kind == spec.kind) {
      j["kind"] = name;
      break;
    }
  }
  switch (spec.kind) {
    case TransformKind::rotate:
      j["deg"] = spec.deg;
      break;
    case TransformKind::perspective:
    case TransformKind::shadow:
    case TransformKind::highlight:
      j["strength"] = spec.strength;
      if (spec.kind != TransformKind::perspective) j["pattern"] = spec.pattern;
      break;
    case TransformKind::elastic:
      j["alpha"] = spec.alpha;
      j["sigma"] = spec.sigma;
      break;
    case TransformKind::gaussian_noise:
      j["stddev"] = spec.stddev;
      break;
    case TransformKind::gaussian_blur:
      j["radius"] = spec.radius;
      break;
    case TransformKind::random_crop:
      j["crop_h"] = spec.crop_h;
      j["crop_w"] = spec.crop_w;
      break;
    case TransformKind::color_jitter:
      j["brightness"] = spec.brightness;
      j["contrast"] = spec.contrast;
      j["saturation"] = spec.saturation;
      break;
    case TransformKind::channel_emphasis:
      j["channel"] = spec.channel;
      j["emphasis"] = spec.emphasis;
      break;
    case TransformKind::mixup:
      j["lambda"] = spec.lambda;
      break;
    case TransformKind::cutmix:
      j["region"] = {{"y", spec.region.y},
                     {"x", spec.region.x},
                     {"h", spec.region.h},
                     {"w", spec.region.w}};
      break;
    default:
      break;
  }
  return j;
}

}  // namespace

TransformSpec TransformSpec::parse(const std::string& json_text) {
  return spec_from_json(Json::parse(json_text));
}

std::string TransformSpec::to_json() const { return spec_to_json(*this).dump(); }

// ---- operations ----------------------------------------------------------

Sample apply_geometric(const TransformSpec& spec, const Sample& sample,
                       std::uint64_t seed) {
  if (!spec.geometric()) {
    throw DataError("apply_geometric: '" + spec.name() + "' is not geometric");
  }
  if (!sample.dims_match()) {
    throw DataError("apply_geometric: image/mask dimension mismatch");
  }
  Rng rng(seed);
  switch (spec.kind) {
    case TransformKind::hflip:
      return flip_horizontal(sample);
    case TransformKind::vflip:
      return flip_vertical(sample);
    case TransformKind::rotate:
      return rotate_about_center(sample, spec.deg);
    case TransformKind::perspective:
      return perspective_jitter(sample, spec.strength, rng);
    case TransformKind::elastic:
      return elastic_deform(sample, spec.alpha, spec.sigma, rng);
    case TransformKind::random_crop:
      return random_crop(sample, spec.crop_h, spec.crop_w, rng);
    default:
      throw DataError("unreachable geometric kind");
  }
}

Sample apply_photometric(const TransformSpec& spec, const Sample& sample,
                         std::uint64_t seed) {
  if (spec.geometric() || spec.mixing()) {
    throw DataError("apply_photometric: '" + spec.name() +
                    "' is not photometric");
  }
  Rng rng(seed);
  Sample out = sample;
  switch (spec.kind) {
    case TransformKind::histogram_eq:
      for (int c = 0; c < out.image.channels; ++c) {
        equalize_channel(out.image, c);
      }
      break;
    case TransformKind::gaussian_noise:
      if (spec.stddev > 0.0) add_gaussian_noise(out.image, spec.stddev, rng);
      break;
    case TransformKind::gaussian_blur:
      if (spec.radius > 0.0) {
        convolve_separable(out.image, gaussian_kernel(spec.radius));
      }
      break;
    case TransformKind::sharpen:
      sharpen_image(out.image);
      break;
    case TransformKind::shadow:
      apply_light_pattern(out.image, spec.pattern, spec.strength, -1.0, rng);
      break;
    case TransformKind::highlight:
      apply_light_pattern(out.image, spec.pattern, spec.strength, 1.0, rng);
      break;
    case TransformKind::color_jitter:
      color_jitter_image(out.image, spec, rng);
      break;
    case TransformKind::channel_emphasis: {
      if (spec.channel < 0 || spec.channel >= out.image.channels) {
        throw DataError("channel_emphasis: channel out of range");
      }
      for (int y = 0; y < out.image.height; ++y) {
        for (int x = 0; x < out.image.width; ++x) {
          out.image.at(y, x, spec.channel) =
              clamp_u8(out.image.at(y, x, spec.channel) * spec.emphasis);
        }
      }
      break;
    }
    default:
      throw DataError("unreachable photometric kind");
  }
  return out;
}

Sample mix_samples(const TransformSpec& spec, const Sample& a, const Sample& b,
                   std::uint64_t seed) {
  (void)seed;
  if (!spec.mixing()) {
    throw DataError("mix_samples: '" + spec.name() + "' is not a mixing op");
  }
  if (!a.image.same_shape(b.image)) {
    throw DataError("mix_samples: dimension mismatch");
  }
  Sample out = a;
  if (spec.kind == TransformKind::mixup) {
    const double lam = spec.lambda;
    for (std::size_t i = 0; i < a.image.pixels.size(); ++i) {
      out.image.pixels[i] =
          clamp_u8(lam * a.image.pixels[i] + (1.0 - lam) * b.image.pixels[i]);
    }
    out.mask = (lam >= 0.5) ? a.mask : b.mask;  // dominant image keeps labels
    return out;
  }
  // cutmix
  const int y0 = std::clamp(spec.region.y, 0, a.image.height);
  const int x0 = std::clamp(spec.region.x, 0, a.image.width);
  const int y1 = std::clamp(spec.region.y + spec.region.h, y0, a.image.height);
  const int x1 = std::clamp(spec.region.x + spec.region.w, x0, a.image.width);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      for (int c = 0; c < a.image.channels; ++c) {
        out.image.at(y, x, c) = b.image.at(y, x, c);
      }
      out.mask.at(y, x) = b.mask.at(y, x);
    }
  }
  return out;
}

Sample apply_transform(const TransformSpec& spec, const Sample& sample,
                       std::uint64_t seed) {
  if (spec.mixing()) {
    throw DataError("apply_transform: mixing op needs two samples");
  }
  return spec.geometric() ? apply_geometric(spec, sample, seed)
                          : apply_photometric(spec, sample, seed);
}

const std::vector<TransformSpec>& standard_transforms() {
  static const std::vector<TransformSpec> specs = [] {
    std::vector<TransformSpec> v;
    TransformSpec s;
    s.kind = TransformKind::hflip;
    v.push_back(s);
    s = TransformSpec{};
    s.kind = TransformKind::rotate;
    s.deg = 30.0;
    v.push_back(s);
    s.deg = 50.0;
    v.push_back(s);
    s = TransformSpec{};
    s.kind = TransformKind::histogram_eq;
    v.push_back(s);
    s = TransformSpec{};
    s.kind = TransformKind::perspective;
    s.strength = 0.1;
    v.push_back(s);
    s = TransformSpec{};
    s.kind = TransformKind::elastic;
    s.alpha = 34.0;
    s.sigma = 4.0;
    v.push_back(s);
    return v;
  }();
  return specs;
}

Dataset run_pipeline(const Dataset& dataset,
                     const std::vector<TransformSpec>& specs,
                     std::uint64_t seed) {
  if (dataset.empty()) throw DataError("run_pipeline: empty dataset");
  Dataset out;
  out.reserve(dataset.size() * (specs.size() + 1));
  for (const Sample& sample : dataset) out.push_back(sample);
  for (const Sample& sample : dataset) {
    std::set<std::string> used;
    for (const TransformSpec& spec : specs) {
      std::string suffix = spec.name();
      int dup = 1;
      while (!used.insert(suffix).second) {
        suffix = spec.name() + "_" + std::to_string(++dup);
      }
      const std::uint64_t s =
          mix_seed(mix_seed(seed, sample.id), spec.name());
      Sample variant;
      if (spec.mixing()) {
        // partner: deterministic random other sample
        Rng prng(mix_seed(s, "partner"));
        std::size_t j = prng.next_below(dataset.size());
        if (dataset.size() > 1 && dataset[j].id == sample.id) {
          j = (j + 1) % dataset.size();
        }
        variant = mix_samples(spec, sample, dataset[j], s);
      } else {
        variant = apply_transform(spec, sample, s);
      }
      variant.id = sample.id + "__" + suffix;
      out.push_back(std::move(variant));
    }
  }
  return out;
}

Dataset standard_pipeline(const Dataset& dataset, std::uint64_t seed) {
  return run_pipeline(dataset, standard_transforms(), seed);
}

std::vector<TransformSpec> load_pipeline_config(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pipeline config " + path.string());
  Json j = Json::parse(in, nullptr, true, true);
  const Json& list = j.is_array() ? j : j.at("transforms");
  std::vector<TransformSpec> specs;
  for (const auto& item : list) specs.push_back(spec_from_json(item));
  return specs;
}

Dataset downsample_majority(const Dataset& dataset,
                            const DownsamplePolicy& policy,
                            std::uint64_t seed) {
  if (policy.kind == DownsamplePolicy::Kind::fraction &&
      (policy.fraction <= 0.0 || policy.fraction > 1.0)) {
    throw DataError("downsample_majority: fraction must be in (0, 1]");
  }

  ClassDistribution dist = class_distribution(dataset);

  // Per-class caps.
  std::map<int, std::size_t> caps;
  if (policy.kind == DownsamplePolicy::Kind::max_samples) {
    for (const auto& [label, count] : dist.counts) {
      caps[label] = policy.max_samples;
    }
  } else {
    std::vector<int> majority = policy.majority_classes;
    if (majority.empty()) {
      double mean = 0.0;
      for (const auto& [label, count] : dist.counts) {
        mean += static_cast<double>(count);
      }
      if (!dist.counts.empty()) mean /= static_cast<double>(dist.counts.size());
      for (const auto& [label, count] : dist.counts) {
        if (static_cast<double>(count) > mean) majority.push_back(label);
      }
    }
    for (int label : majority) {
      const std::size_t count = dist.count(label);
      caps[label] = static_cast<std::size_t>(
          std::ceil(policy.fraction * static_cast<double>(count) - 1e-9));
    }
  }

  std::vector<bool> retained(dataset.size(), true);
  std::vector<HashDigest> digests;
  if (policy.prefer_similar) {
    digests.reserve(dataset.size());
    for (const Sample& s : dataset) digests.push_back(hash_image(s.image));
  }

  auto count_retained = [&](int label) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (retained[i] && dataset[i].mask.contains_label(label)) ++n;
    }
    return n;
  };

  Rng rng(mix_seed(seed, "downsample"));
  for (const auto& [label, cap] : caps) {
    std::size_t current = count_retained(label);
    while (current > cap) {
      std::vector<std::size_t> pool;
      std::vector<std::size_t> single;  // contain only this class
      for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (!retained[i] || !dataset[i].mask.contains_label(label)) continue;
        pool.push_back(i);
        bool only = true;
        for (int l : dataset[i].mask.label_set()) {
          if (l != 0 && l != label) {
            only = false;
            break;
          }
        }
        if (only) single.push_back(i);
      }
      const std::vector<std::size_t>& candidates =
          single.empty() ? pool : single;
      std::size_t victim;
      if (policy.prefer_similar && candidates.size() > 1) {
        // drop the sample closest to another candidate of the same class
        int best_d = 65;
        victim = candidates.front();
        for (std::size_t i : candidates) {
          int nearest = 65;
          for (std::size_t j : candidates) {
            if (i == j) continue;
            nearest = std::min(nearest, hamming(digests[i], digests[j]));
          }
          if (nearest < best_d ||
              (nearest == best_d && dataset[i].id < dataset[victim].id)) {
            best_d = nearest;
            victim = i;
          }
        }
      } else {
        victim = candidates[rng.next_below(candidates.size())];
      }
      retained[victim] = false;
      --current;
    }
  }

  Dataset out;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (retained[i]) out.push_back(dataset[i]);
  }
  return out;
}

}  // namespace segforge
