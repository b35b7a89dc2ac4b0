#include "zsworld/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zsworld/error.hpp"
#include "zsworld/rng.hpp"

namespace zsworld {
namespace {

std::vector<double> gaussian_1d() {
  std::vector<double> g(kSsimWindow);
  const double centre = static_cast<double>(kSsimWindow / 2);
  double sum = 0.0;
  for (std::size_t i = 0; i < kSsimWindow; ++i) {
    const double x = static_cast<double>(i) - centre;
    g[i] = std::exp(-(x * x) / (2.0 * kSsimSigma * kSsimSigma));
    sum += g[i];
  }
  for (double& v : g) v /= sum;
  return g;
}

}  // namespace

ImageArray::ImageArray(std::size_t height, std::size_t width, std::size_t channels,
                       std::vector<double> pixels, double range)
    : height_(height), width_(width), channels_(channels), range_(range),
      pixels_(std::move(pixels)) {
  if (height == 0 || width == 0 || channels == 0) {
    throw ContractError("ImageArray: empty shape");
  }
  if (!(range > 0.0)) throw ContractError("ImageArray: dynamic range must be positive");
  if (pixels_.size() != height * width * channels) {
    throw ContractError("ImageArray: " + std::to_string(pixels_.size()) +
                        " pixels for shape " + std::to_string(height) + "x" +
                        std::to_string(width) + "x" + std::to_string(channels));
  }
  for (double v : pixels_) {
    if (!(v >= 0.0 && v <= range)) throw ContractError("ImageArray: value outside [0, L]");
  }
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("l1_distance: shape mismatch");
  if (a.empty()) throw ContractError("l1_distance: empty arrays");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

double l1_distance(const ImageArray& a, const ImageArray& b) {
  if (a.height() != b.height() || a.width() != b.width() || a.channels() != b.channels()) {
    throw ContractError("l1_distance: shape mismatch");
  }
  return l1_distance(a.pixels(), b.pixels());
}

std::vector<double> ssim_window() {
  const auto g = gaussian_1d();
  std::vector<double> w(kSsimWindow * kSsimWindow);
  for (std::size_t y = 0; y < kSsimWindow; ++y) {
    for (std::size_t x = 0; x < kSsimWindow; ++x) w[y * kSsimWindow + x] = g[y] * g[x];
  }
  return w;
}

double ssim(const ImageArray& a, const ImageArray& b) {
  if (a.height() != b.height() || a.width() != b.width() || a.channels() != b.channels()) {
    throw ContractError("ssim: shape mismatch");
  }
  if (a.range() != b.range()) throw ContractError("ssim: dynamic ranges differ");
  if (a.height() < kSsimWindow || a.width() < kSsimWindow) {
    throw ContractError("ssim: image smaller than the 11x11 window");
  }
  const double c1 = (kSsimK1 * a.range()) * (kSsimK1 * a.range());
  const double c2 = (kSsimK2 * a.range()) * (kSsimK2 * a.range());
  const auto g = gaussian_1d();
  const std::size_t h = a.height(), w = a.width();
  const std::size_t oh = h - kSsimWindow + 1, ow = w - kSsimWindow + 1;

  // Separable filtering of the five moment images, valid region only.
  enum { kA, kB, kAA, kBB, kAB, kMoments };
  std::vector<double> rows(kMoments * h * ow);
  std::vector<double> cols(kMoments * oh * ow);

  double channel_sum = 0.0;
  for (std::size_t c = 0; c < a.channels(); ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        double m[kMoments] = {};
        for (std::size_t k = 0; k < kSsimWindow; ++k) {
          const double va = a.at(y, x + k, c), vb = b.at(y, x + k, c);
          m[kA] += g[k] * va;
          m[kB] += g[k] * vb;
          m[kAA] += g[k] * va * va;
          m[kBB] += g[k] * vb * vb;
          m[kAB] += g[k] * va * vb;
        }
        for (int q = 0; q < kMoments; ++q) rows[(q * h + y) * ow + x] = m[q];
      }
    }
    for (int q = 0; q < kMoments; ++q) {
      for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
          double acc = 0.0;
          for (std::size_t k = 0; k < kSsimWindow; ++k) acc += g[k] * rows[(q * h + y + k) * ow + x];
          cols[(q * oh + y) * ow + x] = acc;
        }
      }
    }
    double sum = 0.0;
    for (std::size_t p = 0; p < oh * ow; ++p) {
      const double mu_a = cols[kA * oh * ow + p], mu_b = cols[kB * oh * ow + p];
      const double var_a = cols[kAA * oh * ow + p] - mu_a * mu_a;
      const double var_b = cols[kBB * oh * ow + p] - mu_b * mu_b;
      const double cov = cols[kAB * oh * ow + p] - mu_a * mu_b;
      sum += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
             ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
    }
    channel_sum += sum / static_cast<double>(oh * ow);
  }
  return channel_sum / static_cast<double>(a.channels());
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ContractError("pearson: series lengths differ");
  if (xs.size() < 2) throw ContractError("pearson: need at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedCorrelationError("pearson: a series has zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> CoverageGrid::projection(std::uint64_t seed, std::size_t dim) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> m(2 * dim);
  for (double& v : m) v = normal(rng);
  return m;
}

CoverageGrid::CoverageGrid(const LatentDataset& reference, std::uint64_t projection_seed,
                           std::size_t grid)
    : dim_(reference.dim()), grid_(grid), matrix_(projection(projection_seed, reference.dim())) {
  if (grid < 2) throw ContractError("coverage: grid must be at least 2");
  if (reference.empty()) throw ContractError("coverage: reference set is empty");
  lo_[0] = lo_[1] = INFINITY;
  hi_[0] = hi_[1] = -INFINITY;
  const auto mu = reference.mu_rows();
  for (std::size_t g = 0; g < reference.total(); ++g) {
    for (int axis = 0; axis < 2; ++axis) {
      double p = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) p += matrix_[axis * dim_ + i] * mu[g * dim_ + i];
      lo_[axis] = std::min(lo_[axis], p);
      hi_[axis] = std::max(hi_[axis], p);
    }
  }
}

long long CoverageGrid::sector(std::span<const float> mu) const {
  if (mu.size() != dim_) throw ContractError("coverage: dimension mismatch");
  long long cell[2];
  for (int axis = 0; axis < 2; ++axis) {
    double p = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) p += matrix_[axis * dim_ + i] * mu[i];
    if (p < lo_[axis] || p > hi_[axis]) return -1;
    const double extent = hi_[axis] - lo_[axis];
    long long c = 0;
    if (extent > 0.0) {
      c = static_cast<long long>(std::floor((p - lo_[axis]) / extent * static_cast<double>(grid_)));
      c = std::clamp<long long>(c, 0, static_cast<long long>(grid_) - 1);
    }
    cell[axis] = c;
  }
  return cell[1] * static_cast<long long>(grid_) + cell[0];
}

double CoverageGrid::coverage(const LatentDataset& ds) const {
  std::vector<bool> occupied(grid_ * grid_, false);
  std::size_t count = 0;
  for (std::size_t g = 0; g < ds.total(); ++g) {
    const long long s = sector(ds.at(g).mu);
    if (s >= 0 && !occupied[static_cast<std::size_t>(s)]) {
      occupied[static_cast<std::size_t>(s)] = true;
      ++count;
    }
  }
  return static_cast<double>(count) / static_cast<double>(grid_ * grid_);
}

double coverage_ratio(const LatentDataset& ds, std::uint64_t projection_seed, std::size_t grid) {
  return CoverageGrid(ds, projection_seed, grid).coverage(ds);
}

}  // namespace zsworld
