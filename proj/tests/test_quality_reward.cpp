#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "genrecon/enhance.hpp"
#include "genrecon/error.hpp"
#include "genrecon/image.hpp"
#include "genrecon/reward.hpp"
#include "test_support.hpp"

using namespace genrecon;
using testing::gray_image;

namespace {

// Same formulas as tests/oracles/ssim_reference.py.
Plane wave_a(int w, int h) {
  Plane p(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) p.at(x, y) = 0.5 + 0.25 * std::sin(0.21 * x + 0.05 * y) * std::cos(0.17 * y);
  }
  return p;
}

Plane wave_b(int w, int h) {
  Plane p = wave_a(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) p.at(x, y) = 0.9 * p.at(x, y) + 0.05 + 0.04 * std::sin(1.3 * x + 0.7 * y);
  }
  return p;
}

double hash_noise(int x, int y) {
  const double s = std::sin(12.9898 * x + 78.233 * y) * 43758.5453;
  return s - std::floor(s) - 0.5;
}

struct WindowStats {
  double ssim = 0.0;
  double cs = 0.0;
};

// Per-window evaluation with an explicit 11x11 weight matrix.
WindowStats ssim_oracle(const Plane& a, const Plane& b) {
  double g[11];
  double gs = 0.0;
  for (int i = 0; i < 11; ++i) {
    g[i] = std::exp(-((i - 5) * (i - 5)) / (2 * 1.5 * 1.5));
    gs += g[i];
  }
  double wmat[11][11];
  for (int j = 0; j < 11; ++j) {
    for (int i = 0; i < 11; ++i) wmat[j][i] = g[i] * g[j] / (gs * gs);
  }
  const double c1 = 1e-4;
  const double c2 = 9e-4;
  double total_s = 0.0;
  double total_cs = 0.0;
  int count = 0;
  for (int y0 = 0; y0 + 11 <= a.height; ++y0) {
    for (int x0 = 0; x0 + 11 <= a.width; ++x0) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int j = 0; j < 11; ++j) {
        for (int i = 0; i < 11; ++i) {
          const double w = wmat[j][i];
          const double va = a.at(x0 + i, y0 + j);
          const double vb = b.at(x0 + i, y0 + j);
          ma += w * va;
          mb += w * vb;
          saa += w * va * va;
          sbb += w * vb * vb;
          sab += w * va * vb;
        }
      }
      const double va = saa - ma * ma;
      const double vb = sbb - mb * mb;
      const double cov = sab - ma * mb;
      const double cs = (2 * cov + c2) / (va + vb + c2);
      total_cs += cs;
      total_s += (2 * ma * mb + c1) / (ma * ma + mb * mb + c1) * cs;
      ++count;
    }
  }
  return {total_s / count, total_cs / count};
}

Plane halve(const Plane& p) {
  Plane out(p.width / 2, p.height / 2);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      out.at(x, y) = (p.at(2 * x, 2 * y) + p.at(2 * x + 1, 2 * y) + p.at(2 * x, 2 * y + 1) +
                      p.at(2 * x + 1, 2 * y + 1)) / 4;
    }
  }
  return out;
}

double ms_ssim_oracle(Plane a, Plane b) {
  const double weights[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
  double out = 1.0;
  for (int level = 0; level < 5; ++level) {
    const WindowStats s = ssim_oracle(a, b);
    out *= std::pow(std::max(level == 4 ? s.ssim : s.cs, 0.0), weights[level]);
    a = halve(a);
    b = halve(b);
  }
  return out;
}

Image plane_to_image(const Plane& p) {
  Image img(p.width, p.height, 3);
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      const auto v = static_cast<float>(std::clamp(p.at(x, y), 0.0, 1.0));
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = v;
    }
  }
  return img;
}

Image textured_fixture(int w, int h) {
  Image img(w, h, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = 0.5 + 0.35 * std::sin(0.4 * x) * std::cos(0.3 * y);
      img.at(x, y, 0) = static_cast<float>(v);
      img.at(x, y, 1) = static_cast<float>(0.8 * v + 0.1);
      img.at(x, y, 2) = static_cast<float>(1.0 - v);
    }
  }
  return img;
}

double spatial_oracle(const Image& o, const Image& e) {
  const int pw = o.width() / 4;
  const int ph = o.height() / 4;
  auto pooled = [&](const Image& img, int px, int py) {
    double s = 0.0;
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 4; ++x) {
        const int ix = px * 4 + x;
        const int iy = py * 4 + y;
        s += luma_of(img.at(ix, iy, 0), img.at(ix, iy, 1), img.at(ix, iy, 2));
      }
    }
    return s / 16;
  };
  double sum = 0.0;
  int n = 0;
  for (int y = 0; y < ph; ++y) {
    for (int x = 0; x < pw; ++x) {
      const int nb[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (const auto& q : nb) {
        if (q[0] < 0 || q[1] < 0 || q[0] >= pw || q[1] >= ph) continue;
        const double d = std::abs(pooled(e, x, y) - pooled(e, q[0], q[1])) -
                         std::abs(pooled(o, x, y) - pooled(o, q[0], q[1]));
        sum += d * d;
        ++n;
      }
    }
  }
  return sum / n;
}

}  // namespace

TEST_CASE("exposure loss") {
  CHECK(exposure_loss(gray_image(32, 32, 0.6f)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(exposure_loss(gray_image(32, 32, 0.1f)) == doctest::Approx(0.25).epsilon(1e-7));
  Image half = gray_image(32, 16, 0.6f);
  for (int y = 0; y < 16; ++y) {
    for (int x = 16; x < 32; ++x) {
      for (int c = 0; c < 3; ++c) half.at(x, y, c) = 0.2f;
    }
  }
  CHECK(exposure_loss(half) == doctest::Approx(0.08).epsilon(1e-6));
  CHECK(exposure_loss(gray_image(32, 32, 0.3f), 0.3) == doctest::Approx(0.0));
  CHECK_THROWS_AS(exposure_loss(gray_image(15, 40, 0.3f)), Error);

  // Zero exactly when every patch mean hits the target, even with texture inside patches.
  Image checker(32, 32, 3);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      for (int c = 0; c < 3; ++c) checker.at(x, y, c) = (x + y) % 2 ? 0.75f : 0.25f;
    }
  }
  CHECK(exposure_loss(checker, 0.5) == doctest::Approx(0.0).epsilon(1e-12));
  checker.at(0, 0, 0) = 0.0f;
  CHECK(exposure_loss(checker, 0.5) > 0.0);
}

TEST_CASE("spatial consistency loss") {
  const Image tex = textured_fixture(32, 24);
  CHECK(spatial_consistency_loss(tex, tex) == 0.0);

  Image shifted = tex;
  Image low(32, 24, 3);
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 32; ++x) {
      for (int c = 0; c < 3; ++c) low.at(x, y, c) = 0.6f * tex.at(x, y, c);
    }
  }
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 32; ++x) {
      for (int c = 0; c < 3; ++c) shifted.at(x, y, c) = low.at(x, y, c) + 0.25f;
    }
  }
  CHECK(spatial_consistency_loss(low, shifted) == doctest::Approx(0.0).epsilon(1e-12));

  Image step(8, 8, 3);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      for (int c = 0; c < 3; ++c) step.at(x, y, c) = x < 4 ? 0.2f : 0.8f;
    }
  }
  const Image flat = gray_image(8, 8, 0.5f);
  const double loss = spatial_consistency_loss(step, flat);
  CHECK(loss > 0.0);
  // Pooled 2x2 grid: four ordered horizontal pairs with |0.6| difference out of eight pairs.
  CHECK(loss == doctest::Approx(4 * 0.36 / 8).epsilon(1e-6));
  CHECK(loss == doctest::Approx(spatial_oracle(step, flat)).epsilon(1e-12));

  std::mt19937_64 rng(12);
  for (int i = 0; i < 20; ++i) {
    const Image a = testing::random_image(rng, 24, 20);
    const Image b = testing::random_image(rng, 24, 20);
    CHECK(spatial_consistency_loss(a, b) == doctest::Approx(spatial_oracle(a, b)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(spatial_consistency_loss(tex, gray_image(32, 20, 0.5f)), Error);
}

TEST_CASE("contrast score") {
  CHECK(contrast_score(gray_image(16, 16, 0.42f)) == doctest::Approx(0.0).epsilon(1e-12));
  Image half(16, 16, 3);
  Image checker(16, 16, 3);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      for (int c = 0; c < 3; ++c) {
        half.at(x, y, c) = x < 8 ? 0.0f : 1.0f;
        checker.at(x, y, c) = (x + y) % 2 ? 0.75f : 0.25f;
      }
    }
  }
  CHECK(contrast_score(half) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(contrast_score(checker) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("colorfulness") {
  std::mt19937_64 rng(8);
  Image gray = testing::random_image(rng, 12, 12);
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 12; ++x) gray.at(x, y, 1) = gray.at(x, y, 2) = gray.at(x, y, 0);
  }
  CHECK(colorfulness(gray) == 0.0);
  const Image red = testing::constant_image(8, 8, 1.0f, 0.0f, 0.0f);
  CHECK(colorfulness(red) == doctest::Approx(0.3 * std::sqrt(1.25)).epsilon(1e-12));
  CHECK(colorfulness(red) == doctest::Approx(0.3354).epsilon(1e-4));
  const Image colorful = testing::random_image(rng, 20, 20);
  CHECK(colorfulness(colorful) > 0.1);
  CHECK(colorfulness(apply_saturation(colorful, 0.0)) <= 1e-6);
}

TEST_CASE("ssim closed forms and reference values") {
  const Plane a = wave_a(64, 48);
  const Plane b = wave_b(64, 48);
  CHECK(ssim(a, a) == 1.0);
  CHECK(ssim(gray_image(16, 16, 0.5f), gray_image(16, 16, 0.5f)) == 1.0);
  // (2 ab + C1) / (a^2 + b^2 + C1) with the structure term equal to one.
  const double closed = (2 * 0.2 * 0.8 + 1e-4) / (0.04 + 0.64 + 1e-4);
  CHECK(ssim(Plane(32, 32, 0.2), Plane(32, 32, 0.8)) == doctest::Approx(closed).epsilon(1e-12));
  CHECK(std::abs(ssim(gray_image(32, 32, 0.2f), gray_image(32, 32, 0.8f)) - 0.47066607851786485) <= 1e-4);
  // Frozen from scikit-image (Gaussian weights, sigma 1.5, population covariance).
  CHECK(ssim(Plane(32, 32, 0.2), Plane(32, 32, 0.8)) == doctest::Approx(0.47066607851786485).epsilon(1e-12));
  CHECK(ssim(a, b) == doctest::Approx(0.84714496976038911).epsilon(1e-9));
  CHECK(ssim(wave_a(192, 192), wave_b(192, 192)) == doctest::Approx(0.84607972590809399).epsilon(1e-9));

  CHECK_THROWS_AS(ssim(a, wave_a(64, 47)), Error);
  CHECK_THROWS_AS(ssim(Plane(10, 20, 0.5), Plane(10, 20, 0.5)), Error);
}

TEST_CASE("ssim matches the per-window oracle") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 12; ++i) {
    const int w = testing::uniform_int(rng, 11, 40);
    const int h = testing::uniform_int(rng, 11, 40);
    Plane p(w, h);
    Plane q(w, h);
    for (std::size_t k = 0; k < p.values.size(); ++k) {
      p.values[k] = testing::uniform(rng, 0.0, 1.0);
      q.values[k] = std::clamp(p.values[k] + testing::uniform(rng, -0.3, 0.3), 0.0, 1.0);
    }
    CHECK(ssim(p, q) == doctest::Approx(ssim_oracle(p, q).ssim).epsilon(1e-12));
  }
}

TEST_CASE("ssim symmetry and bounds over random pairs") {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 100; ++i) {
    const int w = testing::uniform_int(rng, 11, 30);
    const int h = testing::uniform_int(rng, 11, 30);
    const Image x = testing::random_image(rng, w, h);
    const Image y = i % 2 ? testing::random_image(rng, w, h) : testing::random_smooth_image(rng, w, h);
    const double s = ssim(x, y);
    CHECK(std::abs(s - ssim(y, x)) <= 1e-9);
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
    CHECK(ssim(x, x) == 1.0);
  }
}

TEST_CASE("ms-ssim") {
  const Plane a = wave_a(192, 192);
  const Plane b = wave_b(192, 192);
  CHECK(ms_ssim(a, a) == 1.0);
  CHECK(ms_ssim(a, b) == doctest::Approx(ms_ssim_oracle(a, b)).epsilon(1e-12));
  // Frozen from pytorch-msssim (valid Gaussian window, 2x2 average pooling).
  CHECK(ms_ssim(a, b) == doctest::Approx(0.97819377139647778).epsilon(1e-9));
  CHECK(ms_ssim(wave_a(256, 224), wave_b(256, 224)) == doctest::Approx(0.97819072937019647).epsilon(1e-9));

  CHECK_THROWS_AS(ms_ssim(a, wave_a(192, 190)), Error);
  CHECK_THROWS_AS(ms_ssim(wave_a(175, 200), wave_a(175, 200)), Error);
  CHECK_NOTHROW(ms_ssim(wave_a(176, 176), wave_b(176, 176)));

  // More noise of the same pattern lowers the score.
  double previous = 1.0;
  for (int k = 1; k <= 6; ++k) {
    Plane n = a;
    for (int y = 0; y < n.height; ++y) {
      for (int x = 0; x < n.width; ++x) n.at(x, y) += 0.03 * k * hash_noise(x, y);
    }
    const double s = ms_ssim(a, n);
    CHECK(s < previous);
    CHECK(s >= 0.0);
    previous = s;
  }
  CHECK(ms_ssim(plane_to_image(a), plane_to_image(a)) == 1.0);
}

TEST_CASE("reward breakdown examples") {
  const RewardWeights w;
  const Image u = gray_image(64, 64, 0.6f);
  const RewardBreakdown id = reward(u, u, w);
  CHECK(id.exposure_loss == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(id.spatial_loss == 0.0);
  CHECK(id.contrast_score == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(id.colorfulness == 0.0);
  CHECK(id.ssim_to_original == 1.0);
  CHECK(id.penalty == 0.0);
  CHECK(std::abs(id.total) <= 1e-12);

  const Image tex = textured_fixture(64, 64);
  const RewardBreakdown dark = reward(tex, gray_image(64, 64, 0.01f), w);
  CHECK(dark.ssim_to_original < 0.3);
  CHECK(dark.penalty == 10.0);
  CHECK(dark.total <= -10.0 + w.contrast * dark.contrast_score + w.colorfulness * dark.colorfulness);
  CHECK(dark.total < -10.0);

  const Image dim = gray_image(64, 64, 0.1f);
  const RewardBreakdown before = reward(dim, dim, w);
  const RewardBreakdown after = reward(dim, gray_image(64, 64, 0.6f), w);
  CHECK(before.exposure_loss == doctest::Approx(0.25).epsilon(1e-7));
  CHECK(after.exposure_loss == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(after.penalty == 0.0);
  CHECK(after.total > before.total);
}

TEST_CASE("reward composition and evaluator consistency") {
  std::mt19937_64 rng(40);
  RewardWeights w;
  w.contrast = 0.7;
  w.colorfulness = 0.05;
  for (int i = 0; i < 30; ++i) {
    const Image orig = testing::random_smooth_image(rng, 40, 36);
    const Image enh = apply_params(orig, testing::random_params(rng));
    const RewardBreakdown r = reward(orig, enh, w);
    CHECK(r.total == compose_total(r, w));
    CHECK(r.penalty == ssim_penalty(r.ssim_to_original, w));
    CHECK(r.exposure_loss >= 0.0);
    CHECK(r.spatial_loss >= 0.0);
    CHECK(r.contrast_score >= 0.0);
    CHECK(r.colorfulness >= 0.0);
    CHECK(r.ssim_to_original == doctest::Approx(ssim(orig, enh)).epsilon(1e-12));
    CHECK(r.spatial_loss == doctest::Approx(spatial_consistency_loss(orig, enh)).epsilon(1e-12));
    CHECK(r.exposure_loss == exposure_loss(enh, w.exposure_target));
    CHECK(r.contrast_score == contrast_score(enh));
    CHECK(r.colorfulness == colorfulness(enh));
    const RewardEvaluator eval(orig, w);
    const RewardBreakdown e = eval(enh);
    CHECK(e.total == r.total);
    CHECK(e.ssim_to_original == r.ssim_to_original);
  }
  RewardWeights bad;
  bad.spatial = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(reward(gray_image(16, 16, 0.5f), gray_image(16, 16, 0.5f), bad), Error);
  CHECK_THROWS_AS(reward(gray_image(16, 16, 0.5f), gray_image(16, 17, 0.5f), RewardWeights{}), Error);
}
