#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nsmoo/minnorm.hpp"
#include "oracles.hpp"

using namespace nsmoo;
using oracle::vec;

namespace {

std::vector<Vector> random_set(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vector> g(static_cast<std::size_t>(count(rng)));
  for (auto& v : g) v = vec({gauss(rng), gauss(rng), gauss(rng)});
  return g;
}

Vector recombine(const std::vector<Vector>& g, const SimplexWeights& w) {
  Vector s = Vector::Zero(g[0].size());
  for (std::size_t i = 0; i < g.size(); ++i) s += w[i] * g[i];
  return s;
}

void expect_variational_optimality(const std::vector<Vector>& g, const Vector& p) {
  for (const auto& gi : g) EXPECT_GE(p.dot(gi - p), -1e-8 * (1 + p.squaredNorm()));
}

}  // namespace

TEST(MinNormPoint, Singleton) {
  const auto r = min_norm_point({vec({2, 0})});
  EXPECT_NEAR((r.point - vec({2, 0})).norm(), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(r.weights[0], 1.0);
}

TEST(MinNormPoint, OppositePair) {
  const auto r = min_norm_point({vec({1, 0}), vec({-1, 0})});
  EXPECT_NEAR(r.point.norm(), 0.0, 1e-14);
  EXPECT_NEAR(r.weights[0], 0.5, 1e-14);
  EXPECT_NEAR(r.weights[1], 0.5, 1e-14);
}

TEST(MinNormPoint, ProjectionOntoSegment) {
  const auto r = min_norm_point({vec({1, 0}), vec({0, 1})});
  EXPECT_NEAR((r.point - vec({0.5, 0.5})).norm(), 0.0, 1e-14);
}

TEST(MinNormPoint, EmptyAndNonFiniteRejected) {
  EXPECT_THROW(min_norm_point({}), PreconditionError);
  EXPECT_THROW(min_norm_point({vec({NAN, 0})}), PreconditionError);
  EXPECT_THROW(min_norm_point({vec({1, 0}), vec({1})}), PreconditionError);
}

TEST(MinNormPoint, DuplicatesAreHandled) {
  const auto r = min_norm_point({vec({1, 0}), vec({1, 0}), vec({0, 1}), vec({0, 1})});
  EXPECT_NEAR((r.point - vec({0.5, 0.5})).norm(), 0.0, 1e-14);
  EXPECT_NEAR((recombine({vec({1, 0}), vec({1, 0}), vec({0, 1}), vec({0, 1})}, r.weights) - r.point).norm(), 0.0,
              1e-14);
}

TEST(MinNormPoint, MatchesSimplexGridOracle) {
  std::mt19937_64 rng(20240611);
  for (int t = 0; t < 100; ++t) {
    const auto g = random_set(rng);
    const auto r = min_norm_point(g);
    expect_variational_optimality(g, r.point);
    EXPECT_LE(r.point.norm(), std::sqrt(oracle::simplex_grid_min_sq(g, 400)) + 1e-5) << "set " << t;
  }
}

TEST(MinNormPoint, WeightsReproducePoint) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const auto g = random_set(rng);
    const auto r = min_norm_point(g);
    EXPECT_LE((recombine(g, r.weights) - r.point).norm(), 1e-10);
  }
}

TEST(MinNormPoint, ScalingEquivariance) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 100; ++t) {
    auto g = random_set(rng);
    const auto r = min_norm_point(g);
    for (auto& v : g) v *= 3.5;
    const auto s = min_norm_point(g);
    EXPECT_LE((s.point - 3.5 * r.point).norm(), 1e-9 * (1 + s.point.norm()));
  }
}

TEST(MinNormPoint, RotationEquivariance) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss;
  for (int t = 0; t < 100; ++t) {
    auto g = random_set(rng);
    Matrix R(3, 3);
    for (Eigen::Index i = 0; i < 9; ++i) R(i) = gauss(rng);
    const Matrix Q = Eigen::HouseholderQR<Matrix>(R).householderQ();
    const auto r = min_norm_point(g);
    for (auto& v : g) v = Q * v;
    const auto s = min_norm_point(g);
    EXPECT_LE((s.point - Q * r.point).norm(), 1e-8);
  }
}

TEST(MinNormPoint, AddingGeneratorNeverIncreasesNorm) {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> gauss;
  for (int t = 0; t < 100; ++t) {
    auto g = random_set(rng);
    const double before = min_norm_point(g).point.norm();
    g.push_back(vec({gauss(rng), gauss(rng), gauss(rng)}));
    EXPECT_LE(min_norm_point(g).point.norm(), before + 1e-12);
  }
}

TEST(ContainsOrigin, Examples) {
  EXPECT_TRUE(contains_origin({vec({1, 0}), vec({-1, 0})}, 1e-8));
  EXPECT_FALSE(contains_origin({vec({1, 0}), vec({0, 1})}, 1e-8));
  EXPECT_TRUE(contains_origin({vec({1, 1}), vec({-1, 1}), vec({0, -1})}, 1e-8));
}

TEST(ContainsOrigin, InteriorCombinationWeights) {
  const auto r = min_norm_point({vec({1, 1}), vec({-1, 1}), vec({0, -1})});
  EXPECT_NEAR(r.weights[0], 0.25, 1e-12);
  EXPECT_NEAR(r.weights[1], 0.25, 1e-12);
  EXPECT_NEAR(r.weights[2], 0.5, 1e-12);
}
