#pragma once

#include <filesystem>

#include "segforge/image.hpp"

namespace segforge {

// 8-bit PNG only. Palette images are expanded, 16-bit depth is reduced,
// alpha is stripped. Throws IoError on failure.
ImageBuffer read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const ImageBuffer& img);

// Masks are 8-bit grayscale PNGs whose pixel value is the class label.
MaskBuffer read_mask_png(const std::filesystem::path& path);
void write_mask_png(const std::filesystem::path& path, const MaskBuffer& mask);

}  // namespace segforge
