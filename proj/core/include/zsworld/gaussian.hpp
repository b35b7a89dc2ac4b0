#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "zsworld/rng.hpp"

namespace zsworld {

/// Lower bound applied to every standard deviation.
inline constexpr double kSigmaFloor = 1e-3;

/// Multivariate normal with diagonal covariance, parameterised by standard
/// deviations. Construction floors sigma at `floor` and rejects non-finite
/// components or mismatched lengths with ContractError.
class DiagGaussian {
 public:
  DiagGaussian() = default;
  DiagGaussian(std::vector<double> mu, std::vector<double> sigma,
               double floor = kSigmaFloor);

  /// N(0, I) in `dim` dimensions.
  static DiagGaussian standard(std::size_t dim);

  std::size_t dim() const noexcept { return mu_.size(); }
  std::span<const double> mu() const noexcept { return mu_; }
  std::span<const double> sigma() const noexcept { return sigma_; }

  friend bool operator==(const DiagGaussian&, const DiagGaussian&) = default;

 private:
  std::vector<double> mu_;
  std::vector<double> sigma_;
};

/// KL(p || q) in nats, closed form, accumulated in double. Clamped at zero.
double kl_divergence(const DiagGaussian& p, const DiagGaussian& q);

/// mu + sigma * eps with eps ~ N(0, I) drawn from `rng`.
std::vector<double> sample(const DiagGaussian& g, Rng& rng);

/// Per-dimension sample mean and maximum-likelihood standard deviation
/// (divide by K), sigma floored at `floor`. Throws EmptyRetrievalError for an
/// empty batch.
DiagGaussian fit_gaussian(std::span<const std::vector<double>> latents,
                          double floor = kSigmaFloor);

/// Same as above over a row-major K x d block.
DiagGaussian fit_gaussian(std::span<const double> rows, std::size_t dim,
                          double floor = kSigmaFloor);

}  // namespace zsworld
