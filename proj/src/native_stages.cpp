#include "genrecon/native_stages.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "genrecon/error.hpp"

namespace genrecon {

Image native_upscale(const Image& img) {
  return resize_bicubic(img, img.width() * kUpscaleFactor, img.height() * kUpscaleFactor);
}

std::array<double, 3> dominant_border_color(const Image& img, int levels) {
  if (levels < 1) throw_invalid("matte quantization needs at least one level");
  const int w = img.width();
  const int h = img.height();
  auto bin = [levels](float v) { return std::min(levels - 1, static_cast<int>(v * levels)); };

  struct Bin {
    std::size_t count = 0;
    std::array<double, 3> sum{};
  };
  std::map<int, Bin> bins;
  auto visit = [&](int x, int y) {
    const int key = (bin(img.at(x, y, 0)) * levels + bin(img.at(x, y, 1))) * levels +
                    bin(img.at(x, y, 2));
    Bin& b = bins[key];
    ++b.count;
    for (int c = 0; c < 3; ++c) b.sum[static_cast<std::size_t>(c)] += img.at(x, y, c);
  };
  for (int x = 0; x < w; ++x) {
    visit(x, 0);
    if (h > 1) visit(x, h - 1);
  }
  for (int y = 1; y + 1 < h; ++y) {
    visit(0, y);
    if (w > 1) visit(w - 1, y);
  }

  const Bin* best = nullptr;
  for (const auto& [key, b] : bins) {
    if (best == nullptr || b.count > best->count) best = &b;
  }
  std::array<double, 3> color{};
  for (std::size_t c = 0; c < 3; ++c) color[c] = best->sum[c] / static_cast<double>(best->count);
  return color;
}

Image naive_matte(const Image& img, const MatteSettings& settings) {
  if (!(settings.threshold > 0.0)) throw_invalid("matte threshold must be > 0");
  const int w = img.width();
  const int h = img.height();
  const auto bg = dominant_border_color(img, settings.levels);
  const std::size_t n = img.pixel_count();

  std::vector<char> foreground(n, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double d2 = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double d = img.at(x, y, c) - bg[static_cast<std::size_t>(c)];
        d2 += d * d;
      }
      foreground[static_cast<std::size_t>(y) * w + x] = std::sqrt(d2) >= settings.threshold;
    }
  }

  // Label 4-connected components and keep the largest (first found on ties).
  std::vector<int> label(n, -1);
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (!foreground[start] || label[start] >= 0) continue;
    const int id = static_cast<int>(sizes.size());
    std::size_t size = 0;
    stack.push_back(start);
    label[start] = id;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++size;
      const int x = static_cast<int>(p % static_cast<std::size_t>(w));
      const int y = static_cast<int>(p / static_cast<std::size_t>(w));
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
        const std::size_t q = static_cast<std::size_t>(ny[k]) * w + nx[k];
        if (foreground[q] && label[q] < 0) {
          label[q] = id;
          stack.push_back(q);
        }
      }
    }
    sizes.push_back(size);
  }
  int keep = -1;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (keep < 0 || sizes[i] > sizes[static_cast<std::size_t>(keep)]) keep = static_cast<int>(i);
  }

  Image out(w, h, 4);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(x, y, c);
      const float base = img.has_alpha() ? img.at(x, y, 3) : 1.0f;
      out.at(x, y, 3) = (keep >= 0 && label[p] == keep) ? base : 0.0f;
    }
  }
  return out;
}

}  // namespace genrecon
