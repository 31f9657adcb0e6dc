#pragma once

#include "genrecon/image.hpp"

namespace genrecon {

/// The six attributes the enhancement agent searches over. Each field has a
/// closed valid interval; see validate().
struct EnhanceParams {
  double brightness = 0.0;      // additive, [-0.5, 0.5]
  double contrast = 1.0;        // slope about 0.5, [0.5, 2.0]
  double gamma = 1.0;           // power, [0.4, 2.5]
  double saturation = 1.0;      // luma-relative scale, [0, 2]
  double smoothness = 0.0;      // blur blend weight, [0, 1]
  double curve_strength = 0.0;  // quadratic curve coefficient, [-1, 1]

  static EnhanceParams identity() { return {}; }

  /// Throws Error(invalid_argument) naming the first out-of-range field.
  void validate() const;

  bool operator==(const EnhanceParams&) const = default;
};

inline constexpr int kCurveIterations = 4;
inline constexpr double kSmoothnessSigma = 2.0;

// Each operator touches RGB only; alpha is passed through.
Image apply_brightness(const Image& img, double b);
Image apply_contrast(const Image& img, double c);
Image apply_gamma(const Image& img, double g);
Image apply_saturation(const Image& img, double s);
Image apply_smoothness(const Image& img, double w);
Image apply_curve(const Image& img, double alpha, int iterations = kCurveIterations);

/// curve -> brightness -> contrast -> gamma -> saturation -> smoothness.
/// Components at their identity value are skipped.
Image apply_params(const Image& img, const EnhanceParams& p);

}  // namespace genrecon
