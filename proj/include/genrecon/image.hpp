#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace genrecon {

/// Float RGB or RGBA raster, row-major with interleaved channels.
/// Intensities live in [0,1]; channel 4, when present, is alpha.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, float fill = 0.0f);
  Image(int width, int height, int channels, std::vector<float> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool has_alpha() const noexcept { return channels_ == 4; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  float at(int x, int y, int c) const noexcept { return data_[index(x, y, c)]; }
  float& at(int x, int y, int c) noexcept { return data_[index(x, y, c)]; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

/// Single-channel double plane (luma and metric intermediates).
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  double at(int x, int y) const noexcept {
    return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
  double& at(int x, int y) noexcept {
    return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
};

inline constexpr double kLumaR = 0.2126;
inline constexpr double kLumaG = 0.7152;
inline constexpr double kLumaB = 0.0722;

inline double luma_of(double r, double g, double b) noexcept {
  return kLumaR * r + kLumaG * g + kLumaB * b;
}

/// Throws unless every intensity is finite and within [0,1].
void check_range(const Image& img);

/// Rec.709 luma per pixel.
Plane luma(const Image& img);

double mean_luma(const Image& img);

/// Catmull-Rom resampling to exactly w x h. When shrinking, the kernel is
/// stretched by the scale factor so the result is not aliased.
Image resize_bicubic(const Image& img, int w, int h);

/// Normalized 1-D Gaussian taps of length 2*radius+1.
std::vector<double> gaussian_kernel(double sigma, int radius);

/// Separable Gaussian, radius ceil(3 sigma), clamp-to-edge. All channels.
Image gaussian_blur(const Image& img, double sigma);

}  // namespace genrecon
