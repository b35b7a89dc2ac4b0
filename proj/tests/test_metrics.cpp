#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles/oracles.hpp"
#include "support.hpp"
#include "zsworld/error.hpp"
#include "zsworld/metrics.hpp"

using namespace zsworld;

namespace {

ImageArray random_image(std::mt19937_64& rng, std::size_t h, std::size_t w, std::size_t c,
                        double range = 1.0) {
  std::uniform_real_distribution<double> u(0.0, range);
  std::vector<double> px(h * w * c);
  for (double& v : px) v = u(rng);
  return ImageArray(h, w, c, std::move(px), range);
}

ImageArray constant(std::size_t h, std::size_t w, std::size_t c, double v) {
  return ImageArray(h, w, c, std::vector<double>(h * w * c, v));
}

// One latent per "state", all in one trajectory.
LatentDataset from_points(const std::vector<std::vector<float>>& pts) {
  LatentDataset ds(pts.front().size(), 1);
  ds.append(testing::chain(pts, std::vector<ActionId>(pts.size() - 1, 0)));
  return ds;
}

}  // namespace

TEST_CASE("ImageArray validation") {
  CHECK_THROWS_AS(ImageArray(2, 2, 1, std::vector<double>(3, 0.0)), ContractError);
  CHECK_THROWS_AS(ImageArray(2, 2, 1, std::vector<double>(4, 1.5)), ContractError);
  CHECK_THROWS_AS(ImageArray(0, 2, 1, {}), ContractError);
  CHECK_NOTHROW(ImageArray(2, 2, 1, std::vector<double>(4, 255.0), 255.0));
}

TEST_CASE("l1_distance") {
  std::mt19937_64 rng(1);
  CHECK(l1_distance(constant(4, 4, 3, 0.3), constant(4, 4, 3, 0.3)) == 0.0);
  CHECK(l1_distance(constant(4, 4, 3, 0.0), constant(4, 4, 3, 1.0)) == 1.0);
  CHECK_THROWS_AS(l1_distance(constant(4, 4, 3, 0.0), constant(4, 4, 1, 0.0)), ContractError);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_image(rng, 8, 5, 3), b = random_image(rng, 8, 5, 3),
               c = random_image(rng, 8, 5, 3);
    CHECK(std::abs(l1_distance(a, b) - oracle::l1(a.pixels(), b.pixels())) <= 1e-12);
    CHECK(l1_distance(a, b) == l1_distance(b, a));
    CHECK(l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c) + 1e-12);
    CHECK(l1_distance(a, b) > 0.0);
  }
}

TEST_CASE("ssim") {
  std::mt19937_64 rng(2);
  const auto w = ssim_window();
  double sum = 0.0;
  for (double v : w) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(w[5 * 11 + 5] > w[0]);

  const auto x = random_image(rng, 16, 16, 3);
  CHECK(std::abs(ssim(x, x) - 1.0) <= 1e-9);

  const double c1 = 0.01 * 0.01;
  CHECK(ssim(constant(11, 11, 1, 0.0), constant(11, 11, 1, 1.0)) ==
        doctest::Approx(c1 / (1.0 + c1)).epsilon(1e-12));
  CHECK(c1 / (1.0 + c1) == doctest::Approx(9.999e-5).epsilon(1e-4));

  CHECK_THROWS_AS(ssim(constant(10, 16, 1, 0.0), constant(10, 16, 1, 0.0)), ContractError);
  CHECK_THROWS_AS(ssim(constant(16, 16, 1, 0.0), constant(16, 16, 3, 0.0)), ContractError);

  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_image(rng, 16, 16, 3), b = random_image(rng, 16, 16, 3);
    const double s = ssim(a, b);
    CHECK(std::abs(s - oracle::ssim(a, b)) <= 1e-9);
    CHECK(std::abs(s - ssim(b, a)) <= 1e-12);
    CHECK(std::abs(s) <= 1.0);
  }
  // Non-unit range and non-square shapes.
  const auto a = random_image(rng, 13, 20, 2, 255.0), b = random_image(rng, 13, 20, 2, 255.0);
  CHECK(std::abs(ssim(a, b) - oracle::ssim(a, b)) <= 1e-9);
}

TEST_CASE("pearson") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::vector<double> xs{1, 2, 3, 4, 5.5};
  std::vector<double> ys, neg;
  for (double x : xs) {
    ys.push_back(2 * x + 3);
    neg.push_back(-x);
  }
  CHECK(pearson(xs, ys) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(xs, neg) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK_THROWS_AS(pearson(xs, std::vector<double>(5, 1.0)), UndefinedCorrelationError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1.0}, std::vector<double>{2.0}), ContractError);
  CHECK_THROWS_AS(pearson(xs, std::vector<double>{1, 2}), ContractError);

  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(30), b(30), a2(30), b2(30);
    for (std::size_t i = 0; i < 30; ++i) {
      a[i] = normal(rng);
      b[i] = 0.5 * a[i] + normal(rng);
      a2[i] = 3.0 * a[i] + 10.0;
      b2[i] = 0.25 * b[i] - 4.0;
    }
    const double r = pearson(a, b);
    CHECK(std::abs(r - oracle::pearson(a, b)) <= 1e-12);
    CHECK(std::abs(pearson(a2, b2) - r) <= 1e-12);
    CHECK(std::abs(r) <= 1.0);
  }
}

TEST_CASE("coverage_ratio") {
  std::mt19937_64 rng(4);
  SUBCASE("all points in one sector") {
    const auto ds = from_points({{1, 2, 3, 4}, {1, 2, 3, 4}, {1, 2, 3, 4}});
    CHECK(coverage_ratio(ds, 7, 32) == 1.0 / (32 * 32));
    CHECK(coverage_ratio(ds, 7, 2) == 0.25);
  }
  SUBCASE("dense sweep covers the whole box") {
    // d = 2 so the projection is invertible; sweep a fine lattice in the
    // projected plane and map it back.
    const auto m = CoverageGrid::projection(5, 2);
    const double det = m[0] * m[3] - m[1] * m[2];
    std::vector<std::vector<float>> pts;
    const int n = 200;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const double p0 = static_cast<double>(i) / n, p1 = static_cast<double>(j) / n;
        pts.push_back({static_cast<float>((m[3] * p0 - m[1] * p1) / det),
                       static_cast<float>((-m[2] * p0 + m[0] * p1) / det)});
      }
    }
    CHECK(coverage_ratio(from_points(pts), 5, 32) == 1.0);
  }
  SUBCASE("matches the cell-set oracle") {
    for (int trial = 0; trial < 20; ++trial) {
      const auto ds = testing::random_dataset(rng, {6, 10, 60, 5, 2});
      const auto ref = testing::random_dataset(rng, {3, 10, 60, 5, 2});
      for (std::size_t grid : {2u, 8u, 32u}) {
        CHECK(coverage_ratio(ds, trial, grid) == oracle::coverage(ds, ds, trial, grid));
        const CoverageGrid g(ref, trial, grid);
        CHECK(g.coverage(ds) == oracle::coverage(ds, ref, trial, grid));
      }
    }
  }
  SUBCASE("monotone as trajectories are appended") {
    const auto full = testing::random_dataset(rng, {15, 20, 40, 6, 3});
    const CoverageGrid g(full, 11, 32);
    double prev = 0.0;
    for (std::size_t n = 1; n <= full.num_trajectories(); ++n) {
      const double c = g.coverage(full.first_trajectories(n));
      CHECK(c >= prev);
      prev = c;
    }
    CHECK(prev > 0.0);
    CHECK(prev <= 1.0);
  }
  SUBCASE("contract errors") {
    const auto ds = testing::random_dataset(rng, {2, 3, 3, 3, 2});
    CHECK_THROWS_AS(coverage_ratio(ds, 0, 1), ContractError);
    CHECK_THROWS_AS(coverage_ratio(LatentDataset(3, 2), 0, 8), ContractError);
  }
}
