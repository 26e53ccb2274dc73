#include "distopt/problem.hpp"
#include "distopt/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace distopt;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

FeasibleSet unit_box2() { return FeasibleSet::box(pt({0, 0}), pt({1, 1})); }

// x^4 - 3x^2 on one coordinate.
ComponentFunction quartic() { return ComponentFunction::polynomial("q", {{0, 0, -3, 0, 1}}, 20, 42); }

ComponentFunction sine_quad() {
  Matrix a(2, 2);
  a << 1.0, 0.2, 0.2, 0.8;
  return ComponentFunction::sine_quadratic("s", {a, pt({0.1, -0.3}), 0.5}, pt({0.3, 0.2}),
                                           pt({2.0, 1.5}), 10, 10);
}

}  // namespace

TEST(Project, BoxClampsPerCoordinate) {
  const Point p = project(unit_box2(), pt({2, -1}));
  EXPECT_EQ(p, pt({1, 0}));
}

TEST(Project, BoxIdentityOnInterior) {
  EXPECT_EQ(project(unit_box2(), pt({0.3, 0.7})), pt({0.3, 0.7}));
}

TEST(Project, BallScalesRadially) {
  const auto ball = FeasibleSet::ball(pt({0, 0}), 1.0);
  const Point p = project(ball, pt({3, 4}));
  EXPECT_NEAR(p[0], 0.6, 1e-15);
  EXPECT_NEAR(p[1], 0.8, 1e-15);
}

TEST(Project, DimensionMismatchIsConfigError) {
  EXPECT_THROW(project(unit_box2(), pt({1, 2, 3})), ConfigError);
}

TEST(Project, InvalidSetsRejected) {
  EXPECT_THROW(FeasibleSet::box(pt({1}), pt({0})), ConfigError);
  EXPECT_THROW(FeasibleSet::ball(pt({0}), 0.0), ConfigError);
}

TEST(Project, IdempotentAndNonExpansive) {
  Rng rng(3);
  const std::vector<FeasibleSet> sets = {
      FeasibleSet::box(pt({-1, 0, 2}), pt({1, 0.5, 3})),
      FeasibleSet::ball(pt({0.5, -1, 2}), 1.7),
  };
  for (const auto& s : sets) {
    for (int i = 0; i < 2000; ++i) {
      Point x(3), y(3);
      for (int d = 0; d < 3; ++d) {
        x[d] = 6 * rng.normal();
        y[d] = 6 * rng.normal();
      }
      const Point px = s.project(x);
      // Re-projecting a boundary point of the ball is exact up to rounding.
      EXPECT_LE((s.project(px) - px).norm(), 1e-14);
      EXPECT_TRUE(s.contains(px, 1e-12));
      EXPECT_LE((px - s.project(y)).norm(), (x - y).norm() + 1e-12);
    }
  }
}

TEST(Project, BallMatchesNearestSampledPoint) {
  // Brute force: no sampled boundary point is closer than the projection.
  const auto ball = FeasibleSet::ball(pt({1, 2}), 0.5);
  const Point p = pt({4, -1});
  const Point q = ball.project(p);
  for (int i = 0; i < 3600; ++i) {
    const double t = 2 * M_PI * i / 3600.0;
    const Point b = pt({1 + 0.5 * std::cos(t), 2 + 0.5 * std::sin(t)});
    EXPECT_LE((q - p).norm(), (b - p).norm() + 1e-12);
  }
}

TEST(Eval, QuadraticConvention) {
  Matrix a(1, 1);
  a << 2;
  const auto c = ComponentFunction::quadratic("a", a, pt({0}), 0, 10, 2);
  EXPECT_DOUBLE_EQ(eval_component(c, pt({3})), 9.0);
}

TEST(Eval, Polynomial) { EXPECT_DOUBLE_EQ(eval_component(quartic(), pt({1})), -2.0); }

TEST(Eval, SumOfNonConvexPair) {
  Matrix a(1, 1);
  a << 6;
  const Problem prob{1, {quartic(), ComponentFunction::quadratic("b", a, pt({1}), 0, 13, 6)},
                     FeasibleSet::box(pt({-2}), pt({2}))};
  EXPECT_DOUBLE_EQ(prob.value(pt({1})), 2.0);
}

TEST(Grad, Polynomial) { EXPECT_DOUBLE_EQ(grad_component(quartic(), pt({1}))[0], -2.0); }

TEST(Grad, Quadratic) {
  const auto c = ComponentFunction::quadratic("a", 2 * Matrix::Identity(2, 2), pt({1, 1}), 0, 10, 2);
  EXPECT_EQ(grad_component(c, pt({0, 0})), pt({1, 1}));
}

TEST(Grad, StationaryPoint) {
  const auto c = ComponentFunction::polynomial("x2", {{0, 0, 1}}, 4, 2);
  EXPECT_EQ(grad_component(c, pt({0}))[0], 0.0);
}

TEST(Grad, SineQuadraticClosedForm) {
  const auto c = sine_quad();
  const Point x = pt({0.4, -0.7});
  // A x + b + amp * freq * cos(freq * x), written out by hand.
  const double g0 = 1.0 * 0.4 + 0.2 * -0.7 + 0.1 + 0.3 * 2.0 * std::cos(2.0 * 0.4);
  const double g1 = 0.2 * 0.4 + 0.8 * -0.7 - 0.3 + 0.2 * 1.5 * std::cos(1.5 * -0.7);
  const Point g = grad_component(c, x);
  EXPECT_NEAR(g[0], g0, 1e-15);
  EXPECT_NEAR(g[1], g1, 1e-15);
  const double f = 0.5 * (1.0 * 0.16 + 2 * 0.2 * 0.4 * -0.7 + 0.8 * 0.49) + 0.1 * 0.4 + 0.3 * 0.7 +
                   0.5 + 0.3 * std::sin(0.8) + 0.2 * std::sin(-1.05);
  EXPECT_NEAR(c.value(x), f, 1e-15);
}

TEST(Component, RejectsBadDeclarations) {
  EXPECT_THROW(ComponentFunction::polynomial("p", {{0, 1}}, 1, 0), ConfigError);
  EXPECT_THROW(ComponentFunction::polynomial("p", {{0, 1}}, -1, 1), ConfigError);
  Matrix a(2, 2);
  a << 1, 2, 0, 1;
  EXPECT_THROW(ComponentFunction::quadratic("q", a, pt({0, 0}), 0, 1, 1), ConfigError);
}

TEST(CheckGradient, QuadraticExact) {
  const auto c = ComponentFunction::polynomial("x2", {{0, 0, 1}}, 4, 2);
  const auto r = check_gradient(c, {pt({1})}, 1e-5);
  EXPECT_LE(r.max_relative_error, 1e-8);
}

TEST(CheckGradient, Quartic) {
  const auto r = check_gradient(quartic(), {pt({1.5})}, 1e-5);
  EXPECT_LE(r.max_relative_error, 1e-6);
}

TEST(CheckGradient, SineQuadraticRandomPoints) {
  Rng rng(11);
  const auto box = FeasibleSet::box(pt({-2, -2}), pt({2, 2}));
  std::vector<Point> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(sample_uniform(box, rng));
  EXPECT_LE(check_gradient(sine_quad(), pts, 1e-5).max_relative_error, 1e-5);
}

TEST(CheckGradient, ConsistencyAcrossFamilies) {
  Rng rng(12);
  const auto box = FeasibleSet::box(pt({-1.5, -1.5}), pt({1.5, 1.5}));
  Matrix a(2, 2);
  a << -1.0, 0.7, 0.7, 2.0;
  const std::vector<ComponentFunction> fs = {
      ComponentFunction::quadratic("q", a, pt({0.3, -0.2}), 1.0, 100, 100),
      ComponentFunction::polynomial("p", {{1, -2, 0.5, 0.1, -0.2}, {0, 0, 1}}, 100, 100),
      sine_quad(),
  };
  std::vector<Point> pts;
  for (int i = 0; i < 100; ++i) pts.push_back(sample_uniform(box, rng));
  for (const auto& f : fs) EXPECT_LE(check_gradient(f, pts, 1e-6, box).max_relative_error, 1e-5);
}

TEST(CheckGradient, SkipsPointsNearBoundary) {
  const auto box = FeasibleSet::box(pt({0}), pt({1}));
  const auto r = check_gradient(quartic(), {pt({1e-7}), pt({0.5})}, 1e-5, box);
  EXPECT_EQ(r.checked, 1);
  EXPECT_EQ(r.skipped, 1);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(CheckGradient, StepOutOfRange) {
  EXPECT_THROW(check_gradient(quartic(), {pt({1})}, 0.1), ConfigError);
  EXPECT_THROW(check_gradient(quartic(), {pt({1})}, 0.0), ConfigError);
}

TEST(EstimateBounds, QuarticMatchesDenseGrid) {
  const auto box = FeasibleSet::box(pt({-2}), pt({2}));
  // Dense-grid maxima of |4x^3 - 6x| and |12x^2 - 6|.
  double l_grid = 0, n_grid = 0;
  for (int i = 0; i <= 400000; ++i) {
    const double x = -2 + 4.0 * i / 400000;
    l_grid = std::max(l_grid, std::abs(4 * x * x * x - 6 * x));
    n_grid = std::max(n_grid, std::abs(12 * x * x - 6));
  }
  EXPECT_NEAR(l_grid, 20.0, 1e-12);
  EXPECT_NEAR(n_grid, 42.0, 1e-12);
  const auto est = estimate_bounds(quartic(), box, 2000, 1);
  EXPECT_LE(est.l_hat, l_grid);
  EXPECT_LE(est.n_hat, n_grid);
  EXPECT_GT(est.l_hat, 19.0);
  EXPECT_GT(est.n_hat, 35.0);
  EXPECT_TRUE(est.ok());
}

TEST(EstimateBounds, ConstantFunction) {
  const auto c = ComponentFunction::polynomial("k", {{3.0}}, 0, 1e-3);
  const auto est = estimate_bounds(c, FeasibleSet::box(pt({-2}), pt({2})), 100, 2);
  EXPECT_EQ(est.l_hat, 0.0);
  EXPECT_EQ(est.n_hat, 0.0);
  EXPECT_TRUE(est.ok());
}

TEST(EstimateBounds, FlagsUnderDeclaredConstants) {
  const auto c = quartic().with_bounds(5, 5);
  const auto est = estimate_bounds(c, FeasibleSet::box(pt({-2}), pt({2})), 500, 3);
  EXPECT_TRUE(est.l_violated);
  EXPECT_TRUE(est.n_violated);
}

TEST(EstimateBounds, RequiresEnoughSamples) {
  EXPECT_THROW(estimate_bounds(quartic(), FeasibleSet::box(pt({-2}), pt({2})), 50, 1), ConfigError);
}

TEST(AnalyticBounds, DominateSampledValues) {
  const auto box = FeasibleSet::box(pt({-1.5, -1.5}), pt({1.5, 1.5}));
  const auto ball = FeasibleSet::ball(pt({0.3, -0.2}), 1.2);
  Matrix a(2, 2);
  a << -1.0, 0.7, 0.7, 2.0;
  const std::vector<ComponentFunction> fs = {
      ComponentFunction::quadratic("q", a, pt({0.3, -0.2}), 1.0, 1, 1),
      ComponentFunction::polynomial("p", {{1, -2, 0.5, 0.1, -0.2}, {0, 0, 1}}, 1, 1),
      sine_quad(),
  };
  for (const auto& set : {box, ball})
    for (const auto& f : fs) {
      const auto ab = analytic_bounds(f, set);
      const auto est = estimate_bounds(f.with_bounds(ab.grad_bound, ab.lipschitz), set, 3000, 9);
      EXPECT_TRUE(est.ok()) << f.id();
    }
}

TEST(Convexity, NonConvexComponentsConvexSum) {
  Matrix a(1, 1);
  a << 6;
  const Problem prob{1, {quartic(), ComponentFunction::quadratic("b", a, pt({1}), 0, 13, 6)},
                     FeasibleSet::box(pt({-2}), pt({2}))};
  EXPECT_TRUE(verify_sum_convexity(prob, 500, 1).pass);
}

TEST(Convexity, ConcaveSumFails) {
  const Problem prob{1,
                     {ComponentFunction::polynomial("m", {{0, 0, -1}}, 4, 2),
                      ComponentFunction::polynomial("z", {{0}}, 0, 1e-3)},
                     FeasibleSet::box(pt({-2}), pt({2}))};
  const auto v = verify_sum_convexity(prob, 100, 1);
  EXPECT_FALSE(v.pass);
  EXPECT_GT(v.violations, 0);
}

TEST(Convexity, SingleConvexQuadratic) {
  const Problem prob{2, {ComponentFunction::quadratic("q", 2 * Matrix::Identity(2, 2), pt({1, 0}), 0, 10, 2)},
                     FeasibleSet::ball(pt({0, 0}), 1)};
  EXPECT_TRUE(verify_sum_convexity(prob, 100, 1).pass);
}

TEST(ProblemStructure, RejectsMismatchedDimensions) {
  const Problem prob{2, {quartic()}, unit_box2()};
  EXPECT_THROW(prob.check_structure(), ConfigError);
  const Problem empty{1, {}, FeasibleSet::box(pt({0}), pt({1}))};
  EXPECT_THROW(empty.check_structure(), ConfigError);
}

TEST(SampleUniform, StaysInsideAndCoversBall) {
  Rng rng(4);
  const auto ball = FeasibleSet::ball(pt({0, 0}), 2.0);
  int inner = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Point p = sample_uniform(ball, rng);
    ASSERT_TRUE(ball.contains(p, 1e-12));
    if (p.norm() < 1.0) ++inner;
  }
  // Area fraction of the inner disc is 1/4.
  EXPECT_NEAR(static_cast<double>(inner) / n, 0.25, 0.015);
}
