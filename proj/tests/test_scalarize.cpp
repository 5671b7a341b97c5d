#include <gtest/gtest.h>

#include <cmath>

#include "nsmoo/problems.hpp"
#include "nsmoo/scalarize.hpp"
#include "oracles.hpp"

using namespace nsmoo;
using oracle::vec;

namespace {

MopProblem paraboloid() { return make_paraboloid(vec({0, 0}), vec({1, 0.5})).problem; }

DescentConfig tight() {
  DescentConfig cfg;
  cfg.tol_crit = 1e-9;
  cfg.tol_eps = 1e-9;
  return cfg;
}

std::vector<ScalarizationSpec> weight_grid() {
  std::vector<ScalarizationSpec> specs;
  for (int s = 0; s <= 10; ++s) specs.emplace_back(SimplexWeights::normalized(vec({1 - 0.1 * s, 0.1 * s})));
  return specs;
}

}  // namespace

TEST(WeightedSum, FirstObjectiveOnly) {
  const auto sol = weighted_sum_solve(paraboloid(), SimplexWeights(vec({1, 0})), vec({-1, 2}), DescentConfig{});
  EXPECT_LE(sol.x.norm(), 1e-4);
}

TEST(WeightedSum, EqualWeightsGiveMidpoint) {
  const auto sol = weighted_sum_solve(paraboloid(), SimplexWeights(vec({0.5, 0.5})), vec({-1, 2}), DescentConfig{});
  EXPECT_LE((sol.x - vec({0.5, 0.25})).norm(), 1e-4);
  EXPECT_LE(kkt_residual(paraboloid(), sol.x, SimplexWeights(vec({0.5, 0.5}))), 1e-5);
}

TEST(WeightedSum, SoftThresholdingOfRegularizationPair) {
  const auto l1q = make_l1_quadratic(Matrix::Identity(1, 1), vec({3}));
  const auto sol = weighted_sum_solve(l1q.problem, SimplexWeights(vec({0.5, 0.5})), vec({0}), tight());
  EXPECT_NEAR(sol.x[0], 2.0, 1e-6);
}

TEST(WeightedSum, WrongWeightLengthRejected) {
  EXPECT_THROW(weighted_sum_solve(paraboloid(), SimplexWeights(vec({1.0})), vec({0, 0}), DescentConfig{}),
               PreconditionError);
}

TEST(PascolettiSerafini, EqualDirectionsFromOrigin) {
  const auto sol = ps_solve(paraboloid(), PsSpec{vec({0, 0}), vec({1, 1})}, vec({-1, 2}), DescentConfig{});
  EXPECT_LE((sol.x - vec({0.5, 0.25})).norm(), 1e-3);
  EXPECT_NEAR(sol.value, 0.3125, 1e-3);
}

TEST(PascolettiSerafini, ReferenceAtParetoPointIsNotImproved) {
  const MopProblem p = paraboloid();
  const Vector xhat = vec({0.3, 0.15});
  const Vector z = evaluate(p, xhat);
  const auto sol = ps_solve(p, PsSpec{z, vec({1, 1})}, vec({2, -1}), tight());
  EXPECT_LE(sol.value, 1e-9);
  EXPECT_TRUE(((sol.f - z).array() <= 1e-9).all());
}

TEST(PascolettiSerafini, FeasibleByConstruction) {
  const MopProblem p = paraboloid();
  for (double a : {0.1, 0.5, 2.0, 7.0}) {
    const PsSpec spec{vec({-0.5, 0.2}), vec({1.0, a})};
    const auto sol = ps_solve(p, spec, vec({1, 1}), DescentConfig{});
    const Vector scaled = (sol.f - spec.z).cwiseQuotient(spec.r);
    EXPECT_EQ(sol.value, scaled.maxCoeff());
    EXPECT_TRUE(((sol.f - spec.z).array() <= (sol.value * spec.r).array() + 1e-12).all());
  }
}

TEST(PascolettiSerafini, InvalidDirectionRejected) {
  EXPECT_THROW(ps_solve(paraboloid(), PsSpec{vec({0, 0}), vec({1, 0})}, vec({0, 0}), DescentConfig{}),
               PreconditionError);
  EXPECT_THROW(ps_solve(paraboloid(), PsSpec{vec({0}), vec({1})}, vec({0, 0}), DescentConfig{}), PreconditionError);
}

TEST(PascolettiSerafini, TiesUseLowestIndexSubgradient) {
  const MopProblem g = ps_problem(paraboloid(), PsSpec{vec({0, 0}), vec({1, 1})});
  // f1 = f2 at the midpoint: the subgradient must be grad f1 = 2x
  const Vector x = vec({0.5, 0.25});
  EXPECT_LE((g.objectives[0].subgrad(x) - 2.0 * x).norm(), 1e-15);
}

TEST(FrontSweep, ElevenWeightsAreMutuallyNondominated) {
  const auto sweep = front_sweep(paraboloid(), weight_grid(), vec({-1, 2}), DescentConfig{});
  ASSERT_EQ(sweep.entries.size(), 11u);
  EXPECT_TRUE(sweep.nondominated);
  EXPECT_EQ(sweep.accepted_count(), 11u);
  for (const auto& e : sweep.entries) {
    const double a2 = std::get<SimplexWeights>(e.spec)[1];
    // minimizer of the weighted sum is c1 + a2 (c2 - c1)
    EXPECT_LE((e.x - vec({a2, 0.5 * a2})).norm(), 1e-3);
  }
}

TEST(FrontSweep, WarmStartGivesSameFront) {
  SweepOptions opt;
  opt.start = StartStrategy::warm_start;
  const auto sweep = front_sweep(paraboloid(), weight_grid(), vec({-1, 2}), DescentConfig{}, opt);
  EXPECT_TRUE(sweep.nondominated);
  EXPECT_EQ(sweep.accepted_count(), 11u);
}

TEST(FrontSweep, SingleSpec) {
  const auto sweep =
      front_sweep(paraboloid(), {ScalarizationSpec{PsSpec{vec({0, 0}), vec({1, 1})}}}, vec({0, 0}), DescentConfig{});
  ASSERT_EQ(sweep.entries.size(), 1u);
  EXPECT_TRUE(sweep.nondominated);
  EXPECT_TRUE(sweep.entries[0].accepted);
}

TEST(FrontSweep, DuplicateSpecsKeepOneRepresentative) {
  const SimplexWeights w(vec({0.5, 0.5}));
  const auto sweep = front_sweep(paraboloid(), {w, w, w}, vec({0, 0}), DescentConfig{});
  EXPECT_EQ(sweep.accepted_count(), 1u);
  EXPECT_TRUE(sweep.entries[0].accepted);
}

TEST(FrontSweep, EmptyRejectedAndFailuresRecorded) {
  EXPECT_THROW(front_sweep(paraboloid(), {}, vec({0, 0}), DescentConfig{}), PreconditionError);
  // wrong weight length fails that entry only
  const auto sweep = front_sweep(paraboloid(), {SimplexWeights(vec({1.0})), SimplexWeights(vec({0.5, 0.5}))},
                                 vec({0, 0}), DescentConfig{});
  ASSERT_EQ(sweep.entries.size(), 2u);
  EXPECT_FALSE(sweep.entries[0].solved);
  EXPECT_FALSE(sweep.entries[0].error.empty());
  EXPECT_TRUE(sweep.entries[1].accepted);
}

TEST(FrontSweep, AcceptedImagesNeverDominateEachOther) {
  std::vector<ScalarizationSpec> specs;
  for (int s = 0; s <= 10; ++s) {
    const double angle = 0.05 + 1.47 * s / 10.0;
    specs.emplace_back(PsSpec{vec({0, 0}), vec({std::cos(angle), std::sin(angle)})});
  }
  const auto sweep = front_sweep(paraboloid(), specs, vec({0, 0}), DescentConfig{});
  EXPECT_TRUE(sweep.nondominated);
  for (const auto& a : sweep.entries)
    for (const auto& b : sweep.entries)
      if (&a != &b && a.accepted && b.accepted) EXPECT_FALSE(((a.f - b.f).array() <= 1e-9).all());
}
