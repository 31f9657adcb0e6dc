#include "genrecon/reward.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "genrecon/error.hpp"

namespace genrecon {

namespace {

std::string dims(const Plane& p) {
  return std::to_string(p.width) + "x" + std::to_string(p.height);
}

void require_same_size(const Plane& a, const Plane& b, const char* what) {
  if (a.width != b.width || a.height != b.height) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + ": dimension mismatch " + dims(a) + " vs " + dims(b));
  }
}

void require_min_size(const Plane& p, int min_side, const char* what) {
  if (p.width < min_side || p.height < min_side) {
    throw Error(ErrorCode::image_too_small, std::string(what) + ": image " + dims(p) +
                                                " smaller than " + std::to_string(min_side) +
                                                "x" + std::to_string(min_side));
  }
}

const std::vector<double>& ssim_kernel() {
  static const std::vector<double> k = gaussian_kernel(kSsimSigma, kSsimWindow / 2);
  return k;
}

// Gaussian-weighted window means at every fully contained window position.
Plane filter_valid(const Plane& p) {
  const auto& k = ssim_kernel();
  const int n = kSsimWindow;
  const int ow = p.width - n + 1;
  const int oh = p.height - n + 1;
  Plane rows(ow, p.height);
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += k[static_cast<std::size_t>(i)] * p.at(x + i, y);
      rows.at(x, y) = acc;
    }
  }
  Plane out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += k[static_cast<std::size_t>(i)] * rows.at(x, y + i);
      out.at(x, y) = acc;
    }
  }
  return out;
}

Plane product(const Plane& a, const Plane& b) {
  Plane out(a.width, a.height);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a.values[i] * b.values[i];
  return out;
}

struct SsimMeans {
  double ssim = 0.0;
  double cs = 0.0;
};

SsimMeans ssim_from_moments(const Plane& mu_a, const Plane& sq_a, const Plane& mu_b,
                            const Plane& sq_b, const Plane& ab) {
  double ssim_sum = 0.0;
  double cs_sum = 0.0;
  const std::size_t n = mu_a.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double ma = mu_a.values[i];
    const double mb = mu_b.values[i];
    const double va = sq_a.values[i] - ma * ma;
    const double vb = sq_b.values[i] - mb * mb;
    const double cov = ab.values[i] - ma * mb;
    const double l = (2.0 * ma * mb + kSsimC1) / (ma * ma + mb * mb + kSsimC1);
    const double cs = (2.0 * cov + kSsimC2) / (va + vb + kSsimC2);
    ssim_sum += l * cs;
    cs_sum += cs;
  }
  return {ssim_sum / static_cast<double>(n), cs_sum / static_cast<double>(n)};
}

SsimMeans ssim_means(const Plane& a, const Plane& b) {
  return ssim_from_moments(filter_valid(a), filter_valid(product(a, a)), filter_valid(b),
                           filter_valid(product(b, b)), filter_valid(product(a, b)));
}

Plane pool_mean(const Plane& p, int factor) {
  const int ow = p.width / factor;
  const int oh = p.height / factor;
  Plane out(ow, oh);
  const double inv = 1.0 / (factor * factor);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int dy = 0; dy < factor; ++dy) {
        for (int dx = 0; dx < factor; ++dx) acc += p.at(x * factor + dx, y * factor + dy);
      }
      out.at(x, y) = acc * inv;
    }
  }
  return out;
}

double spatial_from_pooled(const Plane& o, const Plane& e) {
  static constexpr int kDx[4] = {-1, 1, 0, 0};
  static constexpr int kDy[4] = {0, 0, -1, 1};
  double sum = 0.0;
  std::size_t pairs = 0;
  for (int y = 0; y < o.height; ++y) {
    for (int x = 0; x < o.width; ++x) {
      for (int d = 0; d < 4; ++d) {
        const int nx = x + kDx[d];
        const int ny = y + kDy[d];
        if (nx < 0 || ny < 0 || nx >= o.width || ny >= o.height) continue;
        const double de = std::abs(e.at(x, y) - e.at(nx, ny));
        const double dor = std::abs(o.at(x, y) - o.at(nx, ny));
        sum += (de - dor) * (de - dor);
        ++pairs;
      }
    }
  }
  return sum / static_cast<double>(pairs);
}

double exposure_from_luma(const Plane& l, double target) {
  require_min_size(l, kExposurePatch, "exposure_loss");
  const Plane means = pool_mean(l, kExposurePatch);
  double sum = 0.0;
  for (double m : means.values) sum += (m - target) * (m - target);
  return sum / static_cast<double>(means.values.size());
}

double stddev(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(v.size()));
}

}  // namespace

void RewardWeights::validate() const {
  const double terms[] = {exposure, spatial, contrast, colorfulness, ssim_penalty};
  for (double t : terms) {
    if (!std::isfinite(t) || t < 0.0) throw_invalid("reward weights must be finite and >= 0");
  }
  if (!std::isfinite(exposure_target) || !std::isfinite(ssim_floor)) {
    throw_invalid("reward constants must be finite");
  }
}

double ssim_penalty(double ssim_to_original, const RewardWeights& w) {
  return ssim_to_original < w.ssim_floor ? w.ssim_penalty : 0.0;
}

double compose_total(const RewardBreakdown& r, const RewardWeights& w) {
  return w.contrast * r.contrast_score + w.colorfulness * r.colorfulness -
         w.exposure * r.exposure_loss - w.spatial * r.spatial_loss -
         ssim_penalty(r.ssim_to_original, w);
}

double exposure_loss(const Image& img, double target) {
  return exposure_from_luma(luma(img), target);
}

double spatial_consistency_loss(const Image& orig, const Image& enh) {
  const Plane o = luma(orig);
  const Plane e = luma(enh);
  require_same_size(o, e, "spatial_consistency_loss");
  require_min_size(o, 2 * kSpatialPool, "spatial_consistency_loss");
  return spatial_from_pooled(pool_mean(o, kSpatialPool), pool_mean(e, kSpatialPool));
}

double contrast_score(const Image& img) { return stddev(luma(img).values); }

double colorfulness(const Image& img) {
  const std::size_t n = img.pixel_count();
  const auto ch = static_cast<std::size_t>(img.channels());
  const auto d = img.data();
  std::vector<double> rg(n);
  std::vector<double> yb(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = d[i * ch];
    const double g = d[i * ch + 1];
    const double b = d[i * ch + 2];
    rg[i] = r - g;
    yb[i] = 0.5 * (r + g) - b;
  }
  double mrg = 0.0;
  double myb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mrg += rg[i];
    myb += yb[i];
  }
  mrg /= static_cast<double>(n);
  myb /= static_cast<double>(n);
  const double srg = stddev(rg);
  const double syb = stddev(yb);
  return std::sqrt(srg * srg + syb * syb) + 0.3 * std::sqrt(mrg * mrg + myb * myb);
}

double ssim(const Plane& a, const Plane& b) {
  require_same_size(a, b, "ssim");
  require_min_size(a, kSsimWindow, "ssim");
  return ssim_means(a, b).ssim;
}

double ssim(const Image& a, const Image& b) { return ssim(luma(a), luma(b)); }

double ms_ssim(const Plane& a, const Plane& b) {
  require_same_size(a, b, "ms_ssim");
  require_min_size(a, kSsimWindow << (kMsSsimLevels - 1), "ms_ssim");
  Plane x = a;
  Plane y = b;
  double result = 1.0;
  for (int level = 0; level < kMsSsimLevels; ++level) {
    const SsimMeans m = ssim_means(x, y);
    const bool last = level == kMsSsimLevels - 1;
    const double term = std::max(last ? m.ssim : m.cs, 0.0);
    result *= std::pow(term, kMsSsimWeights[level]);
    if (!last) {
      x = pool_mean(x, 2);
      y = pool_mean(y, 2);
    }
  }
  return result;
}

double ms_ssim(const Image& a, const Image& b) { return ms_ssim(luma(a), luma(b)); }

RewardBreakdown reward(const Image& orig, const Image& enh, const RewardWeights& w) {
  return RewardEvaluator(orig, w)(enh);
}

RewardEvaluator::RewardEvaluator(const Image& orig, const RewardWeights& w)
    : weights_(w), luma_(luma(orig)) {
  weights_.validate();
  require_min_size(luma_, kExposurePatch, "reward");
  pooled_ = pool_mean(luma_, kSpatialPool);
  mu_ = filter_valid(luma_);
  sq_ = filter_valid(product(luma_, luma_));
}

RewardBreakdown RewardEvaluator::operator()(const Image& enh) const {
  const Plane e = luma(enh);
  require_same_size(luma_, e, "reward");
  RewardBreakdown r;
  r.exposure_loss = exposure_from_luma(e, weights_.exposure_target);
  r.spatial_loss = spatial_from_pooled(pooled_, pool_mean(e, kSpatialPool));
  r.contrast_score = stddev(e.values);
  r.colorfulness = colorfulness(enh);
  r.ssim_to_original = ssim_from_moments(mu_, sq_, filter_valid(e), filter_valid(product(e, e)),
                                         filter_valid(product(luma_, e)))
                           .ssim;
  r.penalty = ssim_penalty(r.ssim_to_original, weights_);
  r.total = compose_total(r, weights_);
  return r;
}

}  // namespace genrecon
