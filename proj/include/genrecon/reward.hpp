#pragma once

#include "genrecon/image.hpp"

namespace genrecon {

inline constexpr int kExposurePatch = 16;
inline constexpr int kSpatialPool = 4;
inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;
inline constexpr int kMsSsimLevels = 5;
inline constexpr double kMsSsimWeights[kMsSsimLevels] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

/// Term weights and guard constants of the scalar reward.
struct RewardWeights {
  double exposure = 1.0;
  double spatial = 1.0;
  double contrast = 0.5;
  double colorfulness = 0.01;
  double exposure_target = 0.6;
  double ssim_floor = 0.3;
  double ssim_penalty = 10.0;

  void validate() const;
};

struct RewardBreakdown {
  double exposure_loss = 0.0;
  double spatial_loss = 0.0;
  double contrast_score = 0.0;
  double colorfulness = 0.0;
  double ssim_to_original = 1.0;
  double penalty = 0.0;
  double total = 0.0;
};

/// The affine combination that defines RewardBreakdown::total. Recomputing it
/// from stored components reproduces the stored total bit for bit.
double compose_total(const RewardBreakdown& r, const RewardWeights& w);
double ssim_penalty(double ssim_to_original, const RewardWeights& w);

/// Mean over non-overlapping 16x16 luma patches of (patch mean - target)^2.
double exposure_loss(const Image& img, double target = 0.6);

/// Change of 4-neighbour differences between 4x4-pooled luma planes.
double spatial_consistency_loss(const Image& orig, const Image& enh);

/// Population standard deviation of luma.
double contrast_score(const Image& img);

/// Hasler-Suesstrunk colorfulness.
double colorfulness(const Image& img);

/// Single-scale SSIM on luma: 11x11 Gaussian window (sigma 1.5), valid
/// window positions only, data range 1.
double ssim(const Image& a, const Image& b);

/// Five-level MS-SSIM on luma with 2x2 mean pooling between levels.
/// Negative contrast-structure terms are clamped to 0 before the weighted
/// geometric product, so the result lies in [0,1].
double ms_ssim(const Image& a, const Image& b);

double ssim(const Plane& a, const Plane& b);
double ms_ssim(const Plane& a, const Plane& b);

RewardBreakdown reward(const Image& orig, const Image& enh, const RewardWeights& w);

/// Scores candidates against one fixed original. Original-side statistics are
/// computed once; results are identical to reward(orig, enh, w).
class RewardEvaluator {
 public:
  RewardEvaluator(const Image& orig, const RewardWeights& w);

  RewardBreakdown operator()(const Image& enh) const;

  int width() const noexcept { return luma_.width; }
  int height() const noexcept { return luma_.height; }
  const RewardWeights& weights() const noexcept { return weights_; }

 private:
  RewardWeights weights_;
  Plane luma_;
  Plane pooled_;
  Plane mu_;
  Plane sq_;
};

}  // namespace genrecon
