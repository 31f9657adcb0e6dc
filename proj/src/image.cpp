#include "genrecon/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "genrecon/error.hpp"

namespace genrecon {

namespace {

void check_shape(int width, int height, int channels) {
  if (width < 1 || height < 1) {
    throw_invalid("image dimensions must be at least 1x1, got " + std::to_string(width) + "x" +
                  std::to_string(height));
  }
  if (channels != 3 && channels != 4) {
    throw_invalid("image must have 3 or 4 channels, got " + std::to_string(channels));
  }
}

double catmull_rom(double t) {
  t = std::abs(t);
  if (t < 1.0) return (1.5 * t - 2.5) * t * t + 1.0;
  if (t < 2.0) return ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0;
  return 0.0;
}

struct Contribution {
  int first = 0;
  std::vector<double> weights;
};

// Per output coordinate, the clamped source taps and their normalized weights.
std::vector<Contribution> resample_taps(int in_size, int out_size) {
  const double scale = static_cast<double>(in_size) / out_size;
  const double filter_scale = std::max(scale, 1.0);
  const double support = 2.0 * filter_scale;
  std::vector<Contribution> taps(static_cast<std::size_t>(out_size));
  for (int o = 0; o < out_size; ++o) {
    const double center = (o + 0.5) * scale - 0.5;
    const int lo = static_cast<int>(std::floor(center - support)) + 1;
    const int hi = static_cast<int>(std::floor(center + support));
    Contribution& c = taps[static_cast<std::size_t>(o)];
    c.first = lo;
    double sum = 0.0;
    for (int j = lo; j <= hi; ++j) {
      const double w = catmull_rom((j - center) / filter_scale);
      c.weights.push_back(w);
      sum += w;
    }
    for (double& w : c.weights) w /= sum;
  }
  return taps;
}

float clamp01(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

}  // namespace

Image::Image(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
  check_shape(width, height, channels);
  if (!(fill >= 0.0f && fill <= 1.0f)) throw_invalid("fill value outside [0,1]");
  data_.assign(pixel_count() * static_cast<std::size_t>(channels), fill);
}

Image::Image(int width, int height, int channels, std::vector<float> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_shape(width, height, channels);
  if (data_.size() != pixel_count() * static_cast<std::size_t>(channels)) {
    throw_invalid("image data length " + std::to_string(data_.size()) + " does not match " +
                  std::to_string(width) + "x" + std::to_string(height) + "x" +
                  std::to_string(channels));
  }
  check_range(*this);
}

void check_range(const Image& img) {
  for (float v : img.data()) {
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
      throw_invalid("image intensity outside [0,1]: " + std::to_string(v));
    }
  }
}

Plane luma(const Image& img) {
  Plane out(img.width(), img.height());
  const auto src = img.data();
  const auto ch = static_cast<std::size_t>(img.channels());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const float* px = &src[i * ch];
    out.values[i] = luma_of(px[0], px[1], px[2]);
  }
  return out;
}

double mean_luma(const Image& img) {
  const Plane l = luma(img);
  double sum = 0.0;
  for (double v : l.values) sum += v;
  return sum / static_cast<double>(l.values.size());
}

Image resize_bicubic(const Image& img, int w, int h) {
  if (w < 1 || h < 1) {
    throw_invalid("resize target must be at least 1x1, got " + std::to_string(w) + "x" +
                  std::to_string(h));
  }
  const int ch = img.channels();
  const int in_w = img.width();
  const int in_h = img.height();
  const auto xtaps = resample_taps(in_w, w);
  const auto ytaps = resample_taps(in_h, h);

  // Horizontal pass into a double buffer of in_h rows by w columns.
  std::vector<double> tmp(static_cast<std::size_t>(in_h) * w * ch, 0.0);
  for (int y = 0; y < in_h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Contribution& t = xtaps[static_cast<std::size_t>(x)];
      double* dst = &tmp[(static_cast<std::size_t>(y) * w + x) * ch];
      for (std::size_t k = 0; k < t.weights.size(); ++k) {
        const int sx = std::clamp(t.first + static_cast<int>(k), 0, in_w - 1);
        for (int c = 0; c < ch; ++c) dst[c] += t.weights[k] * img.at(sx, y, c);
      }
    }
  }

  Image out(w, h, ch);
  for (int y = 0; y < h; ++y) {
    const Contribution& t = ytaps[static_cast<std::size_t>(y)];
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (std::size_t k = 0; k < t.weights.size(); ++k) {
          const int sy = std::clamp(t.first + static_cast<int>(k), 0, in_h - 1);
          acc += t.weights[k] * tmp[(static_cast<std::size_t>(sy) * w + x) * ch + c];
        }
        out.at(x, y, c) = clamp01(acc);
      }
    }
  }
  return out;
}

std::vector<double> gaussian_kernel(double sigma, int radius) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw_invalid("gaussian sigma must be positive, got " + std::to_string(sigma));
  }
  if (radius < 0) throw_invalid("gaussian radius must be non-negative");
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (double& w : k) w /= sum;
  return k;
}

Image gaussian_blur(const Image& img, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw_invalid("gaussian_blur sigma must be positive, got " + std::to_string(sigma));
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  const auto kernel = gaussian_kernel(sigma, radius);
  const int w = img.width();
  const int h = img.height();
  const int ch = img.channels();

  std::vector<double> tmp(img.data().size(), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double* dst = &tmp[(static_cast<std::size_t>(y) * w + x) * ch];
      for (int k = -radius; k <= radius; ++k) {
        const int sx = std::clamp(x + k, 0, w - 1);
        const double wk = kernel[static_cast<std::size_t>(k + radius)];
        for (int c = 0; c < ch; ++c) dst[c] += wk * img.at(sx, y, c);
      }
    }
  }

  Image out(w, h, ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int sy = std::clamp(y + k, 0, h - 1);
          acc += kernel[static_cast<std::size_t>(k + radius)] *
                 tmp[(static_cast<std::size_t>(sy) * w + x) * ch + c];
        }
        out.at(x, y, c) = clamp01(acc);
      }
    }
  }
  return out;
}

}  // namespace genrecon
