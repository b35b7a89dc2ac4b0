#include "zsworld/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zsworld/error.hpp"

namespace zsworld {

DiagGaussian::DiagGaussian(std::vector<double> mu, std::vector<double> sigma,
                           double floor)
    : mu_(std::move(mu)), sigma_(std::move(sigma)) {
  if (mu_.size() != sigma_.size()) {
    throw ContractError("DiagGaussian: mu has " + std::to_string(mu_.size()) +
                        " components, sigma has " + std::to_string(sigma_.size()));
  }
  for (std::size_t i = 0; i < mu_.size(); ++i) {
    if (!std::isfinite(mu_[i]) || !std::isfinite(sigma_[i])) {
      throw ContractError("DiagGaussian: non-finite component " + std::to_string(i));
    }
    sigma_[i] = std::max(sigma_[i], floor);
  }
}

DiagGaussian DiagGaussian::standard(std::size_t dim) {
  return DiagGaussian(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0));
}

double kl_divergence(const DiagGaussian& p, const DiagGaussian& q) {
  if (p.dim() != q.dim()) {
    throw ContractError("kl_divergence: dimension mismatch " + std::to_string(p.dim()) +
                        " vs " + std::to_string(q.dim()));
  }
  const auto pm = p.mu(), ps = p.sigma(), qm = q.mu(), qs = q.sigma();
  double kl = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const double diff = pm[i] - qm[i];
    kl += std::log(qs[i] / ps[i]) +
          (ps[i] * ps[i] + diff * diff) / (2.0 * qs[i] * qs[i]) - 0.5;
  }
  return std::max(kl, 0.0);
}

std::vector<double> sample(const DiagGaussian& g, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(g.dim());
  const auto mu = g.mu(), sigma = g.sigma();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mu[i] + sigma[i] * normal(rng);
  return out;
}

DiagGaussian fit_gaussian(std::span<const double> rows, std::size_t dim, double floor) {
  if (dim == 0 || rows.empty()) {
    throw EmptyRetrievalError("fit_gaussian: retrieval produced no candidates");
  }
  if (rows.size() % dim != 0) {
    throw ContractError("fit_gaussian: batch size is not a multiple of the dimension");
  }
  const std::size_t k = rows.size() / dim;
  // Mean accumulated as offsets from the first row, so K identical rows
  // reproduce that row exactly.
  std::vector<double> mu(dim, 0.0), var(dim, 0.0);
  for (std::size_t r = 1; r < k; ++r) {
    for (std::size_t i = 0; i < dim; ++i) mu[i] += rows[r * dim + i] - rows[i];
  }
  for (std::size_t i = 0; i < dim; ++i) mu[i] = rows[i] + mu[i] / static_cast<double>(k);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double diff = rows[r * dim + i] - mu[i];
      var[i] += diff * diff;
    }
  }
  std::vector<double> sigma(dim);
  for (std::size_t i = 0; i < dim; ++i) sigma[i] = std::sqrt(var[i] / static_cast<double>(k));
  return DiagGaussian(std::move(mu), std::move(sigma), floor);
}

DiagGaussian fit_gaussian(std::span<const std::vector<double>> latents, double floor) {
  if (latents.empty()) {
    throw EmptyRetrievalError("fit_gaussian: retrieval produced no candidates");
  }
  const std::size_t dim = latents.front().size();
  std::vector<double> rows;
  rows.reserve(latents.size() * dim);
  for (const auto& v : latents) {
    if (v.size() != dim) throw ContractError("fit_gaussian: ragged batch");
    rows.insert(rows.end(), v.begin(), v.end());
  }
  return fit_gaussian(rows, dim, floor);
}

}  // namespace zsworld
