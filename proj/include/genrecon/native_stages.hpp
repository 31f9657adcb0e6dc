#pragma once

#include <array>

#include "genrecon/image.hpp"

namespace genrecon {

inline constexpr int kUpscaleFactor = 4;

/// Bicubic fallback for the super-resolution stage: exactly 4W x 4H.
Image native_upscale(const Image& img);

struct MatteSettings {
  double threshold = 0.12;  // RGB distance to the border color
  int levels = 16;          // quantization per channel for the border mode
};

/// Mean color of the border pixels falling in the most populated quantized
/// bin of the 1-px image border. Ties go to the lowest bin index.
std::array<double, 3> dominant_border_color(const Image& img, int levels);

/// Naive background matte: pixels close to the dominant border color become
/// transparent and only the largest 4-connected foreground component stays
/// opaque. Always returns RGBA; an existing alpha channel is multiplied in.
Image naive_matte(const Image& img, const MatteSettings& settings = {});

}  // namespace genrecon
