#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "zsworld/dataset.hpp"

namespace zsworld {

inline constexpr std::size_t kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

/// Height x width x channels image, interleaved (HWC), values in [0, range].
class ImageArray {
 public:
  ImageArray(std::size_t height, std::size_t width, std::size_t channels,
             std::vector<double> pixels, double range = 1.0);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  double range() const noexcept { return range_; }
  std::span<const double> pixels() const noexcept { return pixels_; }
  double at(std::size_t y, std::size_t x, std::size_t c) const noexcept {
    return pixels_[(y * width_ + x) * channels_ + c];
  }

 private:
  std::size_t height_, width_, channels_;
  double range_;
  std::vector<double> pixels_;
};

/// Mean absolute difference per element.
double l1_distance(std::span<const double> a, std::span<const double> b);
double l1_distance(const ImageArray& a, const ImageArray& b);

/// Normalised 11x11 Gaussian window (sigma 1.5), row-major.
std::vector<double> ssim_window();

/// SSIM with the 11x11 / sigma 1.5 Gaussian window and C1 = (0.01 L)^2,
/// C2 = (0.03 L)^2 over valid window positions only; mean over positions,
/// then over channels.
double ssim(const ImageArray& a, const ImageArray& b);

/// Sample Pearson correlation. ContractError on length mismatch or fewer
/// than two points; UndefinedCorrelationError when either series has zero
/// variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// Seeded 2 x d Gaussian projection plus the bounding box of a reference set
/// projected through it, partitioned into grid x grid sectors.
class CoverageGrid {
 public:
  CoverageGrid(const LatentDataset& reference, std::uint64_t projection_seed,
               std::size_t grid);

  /// Row-major 2 x dim projection matrix for a seed.
  static std::vector<double> projection(std::uint64_t seed, std::size_t dim);

  std::size_t grid() const noexcept { return grid_; }
  std::span<const double> matrix() const noexcept { return matrix_; }

  /// Sector of a latent mean, or -1 when it projects outside the box.
  long long sector(std::span<const float> mu) const;

  /// Fraction of sectors holding at least one stored mu of `ds`.
  double coverage(const LatentDataset& ds) const;

 private:
  std::size_t dim_;
  std::size_t grid_;
  std::vector<double> matrix_;
  double lo_[2], hi_[2];
};

/// Coverage with `ds` as its own reference set.
double coverage_ratio(const LatentDataset& ds, std::uint64_t projection_seed,
                      std::size_t grid = 32);

}  // namespace zsworld
