#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "segforge/dataset.hpp"

namespace segforge {

enum class TransformKind {
  hflip,
  vflip,
  rotate,
  histogram_eq,
  perspective,
  elastic,
  gaussian_noise,
  gaussian_blur,
  sharpen,
  random_crop,
  shadow,
  highlight,
  color_jitter,
  channel_emphasis,
  mixup,
  cutmix,
};

struct CutRegion {
  int y = 0;
  int x = 0;
  int h = 0;
  int w = 0;
};

struct TransformSpec {
  TransformKind kind = TransformKind::hflip;

  double deg = 0.0;          // rotate, in (-180, 180]
  double strength = 0.1;     // perspective corner jitter / shadow / highlight
  double alpha = 34.0;       // elastic displacement scale
  double sigma = 4.0;        // elastic smoothing
  double stddev = 0.0;       // gaussian_noise
  double radius = 0.0;       // gaussian_blur (sigma in pixels)
  int crop_h = 0;            // random_crop
  int crop_w = 0;
  std::string pattern = "linear";  // shadow / highlight: linear | radial
  double brightness = 0.2;   // color_jitter max deltas
  double contrast = 0.2;
  double saturation = 0.2;
  int channel = 0;           // channel_emphasis
  double emphasis = 1.5;
  double lambda = 0.5;       // mixup blend weight for sample a
  CutRegion region;          // cutmix

  bool geometric() const;
  bool mixing() const;
  std::string name() const;  // stable id suffix, e.g. "rotate30"

  static TransformSpec parse(const std::string& json_text);
  std::string to_json() const;
};

// Image and mask move through the identical spatial map; the mask is
// resampled nearest-neighbor and out-of-bounds regions are filled with
// image=0 / mask=0.
Sample apply_geometric(const TransformSpec& spec, const Sample& sample,
                       std::uint64_t seed);

// Mask is returned byte-identical; image values are clamped to [0, 255].
Sample apply_photometric(const TransformSpec& spec, const Sample& sample,
                         std::uint64_t seed);

// mixup / cutmix over two same-sized samples.
Sample mix_samples(const TransformSpec& spec, const Sample& a,
                   const Sample& b, std::uint64_t seed);

// Dispatch for non-mixing specs.
Sample apply_transform(const TransformSpec& spec, const Sample& sample,
                       std::uint64_t seed);

// hflip, rotate 30, rotate 50, histogram_eq, perspective, elastic.
const std::vector<TransformSpec>& standard_transforms();

// Original + the six standard variants per sample: output is exactly 7x the
// input. Variant ids carry the transform name as suffix.
Dataset standard_pipeline(const Dataset& dataset, std::uint64_t seed);

// Ordered custom pipeline; each spec appends one variant per sample.
Dataset run_pipeline(const Dataset& dataset,
                     const std::vector<TransformSpec>& specs,
                     std::uint64_t seed);

std::vector<TransformSpec> load_pipeline_config(
    const std::filesystem::path& path);

struct DownsamplePolicy {
  enum class Kind { max_samples, fraction };
  Kind kind = Kind::max_samples;
  std::size_t max_samples = 0;  // cap per class
  double fraction = 1.0;        // of each majority class
  // fraction policy only: classes to reduce; empty -> classes whose presence
  // count exceeds the mean of nonzero class counts.
  std::vector<int> majority_classes;
  // Remove nearest-hash-neighbor samples first instead of random choice.
  bool prefer_similar = false;
};

Dataset downsample_majority(const Dataset& dataset,
                            const DownsamplePolicy& policy,
                            std::uint64_t seed);

}  // namespace segforge
