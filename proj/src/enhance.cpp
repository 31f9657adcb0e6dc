#include "genrecon/enhance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "genrecon/error.hpp"

namespace genrecon {

namespace {

void check_interval(const char* name, double v, double lo, double hi) {
  if (!(v >= lo && v <= hi)) {
    throw_invalid(std::string(name) + " = " + std::to_string(v) + " outside [" +
                  std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

// Applies a scalar tone map to every RGB sample.
template <typename Fn>
Image map_rgb(const Image& img, Fn fn) {
  Image out = img;
  auto data = out.data();
  const auto ch = static_cast<std::size_t>(img.channels());
  for (std::size_t i = 0; i < data.size(); i += ch) {
    for (std::size_t c = 0; c < 3; ++c) {
      data[i + c] = static_cast<float>(std::clamp(fn(static_cast<double>(data[i + c])), 0.0, 1.0));
    }
  }
  return out;
}

}  // namespace

void EnhanceParams::validate() const {
  check_interval("brightness", brightness, -0.5, 0.5);
  check_interval("contrast", contrast, 0.5, 2.0);
  check_interval("gamma", gamma, 0.4, 2.5);
  check_interval("saturation", saturation, 0.0, 2.0);
  check_interval("smoothness", smoothness, 0.0, 1.0);
  check_interval("curve_strength", curve_strength, -1.0, 1.0);
}

Image apply_brightness(const Image& img, double b) {
  check_interval("brightness", b, -0.5, 0.5);
  return map_rgb(img, [b](double x) { return x + b; });
}

Image apply_contrast(const Image& img, double c) {
  check_interval("contrast", c, 0.5, 2.0);
  return map_rgb(img, [c](double x) { return (x - 0.5) * c + 0.5; });
}

Image apply_gamma(const Image& img, double g) {
  check_interval("gamma", g, 0.4, 2.5);
  return map_rgb(img, [g](double x) { return std::pow(x, g); });
}

Image apply_saturation(const Image& img, double s) {
  check_interval("saturation", s, 0.0, 2.0);
  Image out = img;
  auto data = out.data();
  const auto ch = static_cast<std::size_t>(img.channels());
  for (std::size_t i = 0; i < data.size(); i += ch) {
    const double l = luma_of(data[i], data[i + 1], data[i + 2]);
    for (std::size_t c = 0; c < 3; ++c) {
      data[i + c] = static_cast<float>(std::clamp(l + s * (data[i + c] - l), 0.0, 1.0));
    }
  }
  return out;
}

Image apply_smoothness(const Image& img, double w) {
  check_interval("smoothness", w, 0.0, 1.0);
  const Image blurred = gaussian_blur(img, kSmoothnessSigma);
  Image out = img;
  auto data = out.data();
  const auto src = blurred.data();
  const auto ch = static_cast<std::size_t>(img.channels());
  for (std::size_t i = 0; i < data.size(); i += ch) {
    for (std::size_t c = 0; c < 3; ++c) {
      const double v = (1.0 - w) * data[i + c] + w * src[i + c];
      data[i + c] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return out;
}

Image apply_curve(const Image& img, double alpha, int iterations) {
  check_interval("curve_strength", alpha, -1.0, 1.0);
  if (iterations < 1) throw_invalid("curve iterations must be >= 1");
  return map_rgb(img, [alpha, iterations](double x) {
    for (int i = 0; i < iterations; ++i) x += alpha * x * (1.0 - x);
    return x;
  });
}

Image apply_params(const Image& img, const EnhanceParams& p) {
  p.validate();
  const EnhanceParams id = EnhanceParams::identity();
  Image out = img;
  if (p.curve_strength != id.curve_strength) out = apply_curve(out, p.curve_strength);
  if (p.brightness != id.brightness) out = apply_brightness(out, p.brightness);
  if (p.contrast != id.contrast) out = apply_contrast(out, p.contrast);
  if (p.gamma != id.gamma) out = apply_gamma(out, p.gamma);
  if (p.saturation != id.saturation) out = apply_saturation(out, p.saturation);
  if (p.smoothness != id.smoothness) out = apply_smoothness(out, p.smoothness);
  return out;
}

}  // namespace genrecon
