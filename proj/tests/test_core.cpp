#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "nsmoo/core.hpp"
#include "nsmoo/problems.hpp"
#include "oracles.hpp"

using namespace nsmoo;
using oracle::vec;

namespace {

MopProblem paraboloid() { return make_paraboloid(vec({0, 0}), vec({1, 0.5})).problem; }

}  // namespace

TEST(Evaluate, ParaboloidAtFirstCenter) {
  const Vector f = evaluate(paraboloid(), vec({0, 0}));
  EXPECT_DOUBLE_EQ(f[0], 0.0);
  EXPECT_DOUBLE_EQ(f[1], 1.25);
}

TEST(Evaluate, ParaboloidAtSecondCenter) {
  const Vector f = evaluate(paraboloid(), vec({1, 0.5}));
  EXPECT_DOUBLE_EQ(f[0], 1.25);
  EXPECT_DOUBLE_EQ(f[1], 0.0);
}

TEST(Evaluate, L1QuadraticAtLossMinimizer) {
  const auto l1q = make_l1_quadratic(Matrix::Identity(1, 1), vec({3}));
  const Vector f = evaluate(l1q.problem, vec({3}));
  EXPECT_DOUBLE_EQ(f[0], 0.0);
  EXPECT_DOUBLE_EQ(f[1], 3.0);
}

TEST(Evaluate, NonFiniteValueNamesTheObjective) {
  MopProblem p = paraboloid();
  p.objectives[1].value = [](const Vector&) { return std::numeric_limits<double>::quiet_NaN(); };
  try {
    evaluate(p, vec({0, 0}));
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.objective(), 1u);
  }
}

TEST(Evaluate, RejectsNonFinitePoint) {
  EXPECT_THROW(evaluate(paraboloid(), vec({INFINITY, 0})), PreconditionError);
  EXPECT_THROW(evaluate(paraboloid(), vec({0, 0, 0})), PreconditionError);
}

TEST(Dominates, Examples) {
  EXPECT_EQ(dominates(vec({0, 0}), vec({1, 1})), Dominance::strictly);
  EXPECT_EQ(dominates(vec({0, 1}), vec({0, 2})), Dominance::weakly);
  EXPECT_EQ(dominates(vec({1, 0}), vec({0, 1})), Dominance::none);
  EXPECT_THROW(dominates(vec({1}), vec({0, 1})), PreconditionError);
}

TEST(Dominates, IrreflexiveAndTransitiveOnRandomTriples) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coin(0, 3);  // small integer grid: many ties
  auto draw = [&] { return vec({double(coin(rng)), double(coin(rng)), double(coin(rng))}); };
  for (int t = 0; t < 5000; ++t) {
    const Vector a = draw(), b = draw(), c = draw();
    EXPECT_EQ(dominates(a, a), Dominance::none);
    if (dominates(a, b) != Dominance::none && dominates(b, c) != Dominance::none)
      EXPECT_NE(dominates(a, c), Dominance::none);
    if (dominates(a, b) == Dominance::strictly && dominates(b, c) == Dominance::strictly)
      EXPECT_EQ(dominates(a, c), Dominance::strictly);
  }
}

TEST(KktResidual, Examples) {
  const MopProblem p = paraboloid();
  EXPECT_LE(kkt_residual(p, vec({0.5, 0.25}), SimplexWeights(vec({0.5, 0.5}))), 1e-12);
  EXPECT_LE(kkt_residual(p, vec({0, 0}), SimplexWeights(vec({1, 0}))), 1e-12);
  // t = 0.25: x = (0.25, 0.125); 0.75 * 2x + 0.25 * 2(x - c2) = 2x - 0.5 c2 = 0
  EXPECT_LE(kkt_residual(p, vec({0.25, 0.125}), SimplexWeights(vec({0.75, 0.25}))), 1e-12);
  EXPECT_THROW(kkt_residual(p, vec({0, 0}), SimplexWeights(vec({1.0}))), PreconditionError);
}

TEST(KktResidual, VanishesAlongSegmentAndNotOffIt) {
  const MopProblem p = paraboloid();
  for (int s = 0; s <= 10; ++s) {
    const double t = 0.1 * s;
    const Vector x = vec({t, 0.5 * t});
    EXPECT_LE(kkt_residual(p, x, SimplexWeights::normalized(vec({1 - t, t}))), 1e-10) << "t=" << t;
  }
  for (const Vector& x : {vec({0.5, 1.0}), vec({-1, 0}), vec({2, 2})}) {
    double best = INFINITY;
    for (int s = 0; s <= 1000; ++s) {
      const double a = s / 1000.0;
      best = std::min(best, kkt_residual(p, x, SimplexWeights::normalized(vec({1 - a, a}))));
    }
    EXPECT_GT(best, 0.1);
  }
}

TEST(SimplexWeights, Validation) {
  EXPECT_NO_THROW(SimplexWeights(vec({0.25, 0.75})));
  EXPECT_THROW(SimplexWeights(vec({-0.1, 1.1})), PreconditionError);
  EXPECT_THROW(SimplexWeights(vec({0.5, 0.6})), PreconditionError);
  EXPECT_THROW(SimplexWeights{Vector()}, PreconditionError);
  const SimplexWeights w = SimplexWeights::normalized(vec({1, 1, 1}));
  EXPECT_NEAR(w.values().sum(), 1.0, 1e-15);
}

TEST(MopProblem, SmoothSubgradientsMatchFiniteDifferences) {
  const MopProblem p = paraboloid();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 50; ++t) {
    const Vector x = vec({u(rng), u(rng)});
    for (std::size_t i = 0; i < p.k(); ++i) {
      const Vector g = p.objectives[i].subgrad(x);
      const Vector fd = oracle::central_difference(p.objectives[i].value, x);
      EXPECT_LE((g - fd).norm(), 1e-5 * (1 + g.norm()));
    }
  }
}

TEST(MopProblem, OraclesAreBitwiseDeterministic) {
  const MopProblem p = paraboloid();
  const Vector x = vec({0.123456789, -1.987654321});
  for (std::size_t i = 0; i < p.k(); ++i) {
    EXPECT_EQ(p.objectives[i].value(x), p.objectives[i].value(x));
    EXPECT_TRUE(p.objectives[i].subgrad(x) == p.objectives[i].subgrad(x));
  }
}
