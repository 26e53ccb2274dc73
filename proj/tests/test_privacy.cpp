#include "distopt/privacy.hpp"

#include <gtest/gtest.h>

using namespace distopt;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

Problem triangle_quadratic() {
  Matrix a0(2, 2), a1(2, 2), a2(2, 2);
  a0 << 2, .5, .5, 1;
  a1 << 1, -.3, -.3, 1.5;
  a2 << .6, -.2, -.2, 1.1;
  const auto set = FeasibleSet::box(pt({-2, -2}), pt({2, 2}));
  std::vector<ComponentFunction> cs = {
      ComponentFunction::quadratic("0", a0, pt({1, .5}), 0, 10, 3),
      ComponentFunction::quadratic("1", a1, pt({-1.5, .8}), 0, 10, 3),
      ComponentFunction::quadratic("2", a2, pt({-.4, .5}), 0, 10, 3),
  };
  return {2, std::move(cs), set};
}

Problem separable_pair() {
  return {1,
          {ComponentFunction::polynomial("p", {{0, 0, -3, 0, 1}}, 21, 43),
           ComponentFunction::polynomial("q", {{0, 1, 3}}, 13, 6)},
          FeasibleSet::box(pt({-2}), pt({2}))};
}

double sum_value(const std::vector<ComponentFunction>& cs, const Point& x) {
  double s = 0;
  for (const auto& c : cs) s += c.value(x);
  return s;
}

}  // namespace

TEST(Partition, ZeroPerturbationHalvesExactly) {
  const auto prob = triangle_quadratic();
  const auto t = partition_problem(prob, Graph::complete(3), six_agent_partition_plan(), {});
  ASSERT_EQ(t.problem.n_agents(), 6);
  EXPECT_EQ(t.provenance, (std::vector<int>{0, 0, 1, 1, 2, 2}));
  Rng rng(1);
  for (int n = 0; n < 50; ++n) {
    const Point x = sample_uniform(prob.set, rng);
    for (int v = 0; v < 6; ++v)
      EXPECT_EQ(t.problem.components[v].value(x), prob.components[v / 2].value(x) / 2);
  }
  EXPECT_TRUE(t.certificate.pass);
  EXPECT_EQ(t.certificate.n_points, kCertificationPoints);
}

TEST(Partition, SixAgentPlanIsConnectedAndMatchesKappaSupport) {
  const auto plan = six_agent_partition_plan();
  EXPECT_EQ(plan.n_virtual(), 6);
  EXPECT_TRUE(check_partition_plan(Graph::complete(3), plan).empty());
  const Graph vg = virtual_topology(Graph::complete(3), plan);
  EXPECT_TRUE(is_connected(vg));
  const auto support = build_kappa_matrix(six_agent_kappa_pattern(), 0.25).support_graph();
  EXPECT_EQ(vg, support);
}

TEST(Partition, PerturbedSumIsPreserved) {
  const auto prob = triangle_quadratic();
  for (double scale : {0.1, 1.0}) {
    PartitionOptions opts;
    opts.perturbation_scale = scale;
    opts.seed = 11;
    const auto t = partition_problem(prob, Graph::complete(3), six_agent_partition_plan(), opts);
    EXPECT_TRUE(t.certificate.pass);
    Rng rng(2);
    for (int n = 0; n < 100; ++n) {
      const Point x = sample_uniform(prob.set, rng);
      const double f = prob.value(x);
      EXPECT_NEAR(t.problem.value(x), f, 1e-9 * (1 + std::abs(f)));
      EXPECT_LE((t.problem.gradient(x) - prob.gradient(x)).norm(), 1e-9 * (1 + std::abs(f)));
    }
    // Pieces differ from plain halves.
    EXPECT_NE(t.problem.components[0].value(pt({1, 1})), prob.components[0].value(pt({1, 1})) / 2);
    for (const auto& c : t.problem.components) {
      const auto b = analytic_bounds(c, prob.set);
      EXPECT_GE(c.grad_bound(), b.grad_bound);
      EXPECT_GE(c.lipschitz(), b.lipschitz);
    }
  }
}

TEST(Partition, SeparableFamilyStaysSeparable) {
  PartitionOptions opts;
  opts.perturbation_scale = 0.5;
  opts.seed = 3;
  const auto t = partition_problem(separable_pair(), Graph::complete(2),
                                   default_partition_plan(Graph::complete(2), 3), opts);
  EXPECT_EQ(t.problem.n_agents(), 6);
  EXPECT_TRUE(t.certificate.pass);
  EXPECT_TRUE(is_connected(t.graph));
  for (const auto& c : t.problem.components) EXPECT_EQ(c.family(), Family::kPolynomialSeparable);
}

TEST(Partition, DisconnectedPlanIsRejected) {
  PartitionPlan plan = six_agent_partition_plan();
  plan.links = {{0, 1}, {2, 3}, {4, 5}, {1, 2}};
  try {
    virtual_topology(Graph::complete(3), plan);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("disconnected"), std::string::npos);
    EXPECT_NE(msg.find(" 4"), std::string::npos);
    EXPECT_NE(msg.find(" 5"), std::string::npos);
  }
}

TEST(Partition, LinkWithoutRealEdgeIsRejected) {
  PartitionPlan plan = six_agent_partition_plan();
  const Graph path = Graph::path(3);  // agents 0 and 2 share no link
  EXPECT_FALSE(check_partition_plan(path, plan).empty());
  EXPECT_THROW(virtual_topology(path, plan), ValidationError);
}

TEST(Partition, SingleAgentSinglePiece) {
  const Problem prob{1, {ComponentFunction::polynomial("p", {{0, 1, 1}}, 5, 2)},
                     FeasibleSet::box(pt({-2}), pt({2}))};
  PartitionOptions opts;
  opts.perturbation_scale = 1.0;
  const auto t = partition_problem(prob, Graph(1), default_partition_plan(Graph(1), 1), opts);
  ASSERT_EQ(t.problem.n_agents(), 1);
  EXPECT_EQ(t.problem.components[0].value(pt({0.7})), prob.components[0].value(pt({0.7})));
}

TEST(Partition, GradientCapRejectsLargePerturbation) {
  PartitionOptions opts;
  opts.perturbation_scale = 50.0;
  opts.seed = 1;
  opts.gradient_bound_cap = 100.0;
  try {
    partition_problem(triangle_quadratic(), Graph::complete(3), six_agent_partition_plan(), opts);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("cap"), std::string::npos);
  }
}

TEST(Partition, Reproducible) {
  PartitionOptions opts;
  opts.perturbation_scale = 1.0;
  opts.seed = 99;
  const auto a = partition_problem(triangle_quadratic(), Graph::complete(3), six_agent_partition_plan(), opts);
  const auto b = partition_problem(triangle_quadratic(), Graph::complete(3), six_agent_partition_plan(), opts);
  const Point x = pt({0.3, -1.1});
  for (int v = 0; v < 6; ++v) EXPECT_EQ(a.problem.components[v].value(x), b.problem.components[v].value(x));
}

TEST(Sharing, ZeroScaleIsIdentity) {
  const auto prob = triangle_quadratic();
  const auto t = random_function_sharing(prob, Graph::complete(3), 0.0, 5);
  const Point x = pt({0.4, 1.3});
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(t.problem.components[i].value(x), prob.components[i].value(x));
    EXPECT_EQ(t.problem.components[i].grad_bound(), prob.components[i].grad_bound());
  }
}

TEST(Sharing, TwoAgentPairTelescopes) {
  const Problem prob{1,
                     {ComponentFunction::quadratic("a", Matrix::Identity(1, 1), pt({0}), 0, 2, 1),
                      ComponentFunction::quadratic("b", 3 * Matrix::Identity(1, 1), pt({1}), 0, 7, 3)},
                     FeasibleSet::box(pt({-2}), pt({2}))};
  const QuadraticForm r01{2 * Matrix::Identity(1, 1), pt({0.5}), 1.0};
  const QuadraticForm r10{-1 * Matrix::Identity(1, 1), pt({-2}), 0.25};
  const auto t = apply_shared_functions(prob, Graph::complete(2), {{0, 1, r01}, {1, 0, r10}});
  for (double x : {-1.5, 0.0, 0.3, 2.0}) {
    const Point p = pt({x});
    EXPECT_DOUBLE_EQ(t.problem.components[0].value(p),
                     prob.components[0].value(p) - r01.value(p) + r10.value(p));
    EXPECT_DOUBLE_EQ(t.problem.components[1].value(p),
                     prob.components[1].value(p) + r01.value(p) - r10.value(p));
    EXPECT_NEAR(t.problem.value(p), prob.value(p), 1e-14);
  }
}

TEST(Sharing, PreservesSumAndGradients) {
  const auto prob = triangle_quadratic();
  for (double scale : {0.1, 1.0}) {
    const auto t = random_function_sharing(prob, Graph::complete(3), scale, 23);
    EXPECT_TRUE(t.certificate.pass);
    EXPECT_EQ(t.transform, "random_sharing");
    Rng rng(4);
    for (int n = 0; n < 100; ++n) {
      const Point x = sample_uniform(prob.set, rng);
      EXPECT_LE((t.problem.gradient(x) - prob.gradient(x)).norm(), 1e-12);
      EXPECT_NEAR(sum_value(t.problem.components, x), prob.value(x), 1e-12);
    }
  }
}

TEST(Sharing, CorruptedTransformFailsCertificate) {
  const auto prob = triangle_quadratic();
  auto shared = draw_shared_functions(prob, Graph::complete(3), 1.0, 7);
  ASSERT_EQ(shared.size(), 6u);
  shared.pop_back();
  auto t = apply_shared_functions(prob, Graph::complete(3), shared);
  // Dropping one R only from the receiver side breaks the telescoping sum.
  const auto& last = draw_shared_functions(prob, Graph::complete(3), 1.0, 7).back();
  t.problem.components[static_cast<std::size_t>(last.to)] =
      t.problem.components[static_cast<std::size_t>(last.to)].plus(last.r);
  const auto cert = certify_equivalence(prob, t, 1000, 1);
  EXPECT_FALSE(cert.pass);
  EXPECT_GT(cert.value_residual, 1e-6);
}

TEST(Sharing, RejectsOffGraphPairs) {
  const auto prob = triangle_quadratic();
  const QuadraticForm r{Matrix::Identity(2, 2), pt({0, 0}), 0};
  EXPECT_THROW(apply_shared_functions(prob, Graph::path(3), {{0, 2, r}}), ConfigError);
  EXPECT_THROW(random_function_sharing(prob, Graph(3, {{0, 1}}), 1.0, 1), ConfigError);
}

TEST(Sharing, BitwiseReproducible) {
  const auto prob = triangle_quadratic();
  const auto a = draw_shared_functions(prob, Graph::complete(3), 1.0, 23);
  const auto b = draw_shared_functions(prob, Graph::complete(3), 1.0, 23);
  const auto c = draw_shared_functions(prob, Graph::complete(3), 1.0, 24);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].r.a, b[i].r.a);
    EXPECT_EQ(a[i].r.b, b[i].r.b);
    EXPECT_EQ(a[i].r.c, b[i].r.c);
  }
  EXPECT_NE(a[0].r.a, c[0].r.a);
}

TEST(RandomQuadratic, SpectralNormAndRanges) {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto q = random_quadratic(3, 0.7, t % 2 == 0, rng);
    Eigen::SelfAdjointEigenSolver<Matrix> es(q.a);
    EXPECT_NEAR(es.eigenvalues().cwiseAbs().maxCoeff(), 0.7, 1e-12);
    EXPECT_LE(q.b.cwiseAbs().maxCoeff(), 0.7);
    EXPECT_LE(std::abs(q.c), 0.7);
    if (t % 2 == 0) EXPECT_EQ((q.a - Matrix(q.a.diagonal().asDiagonal())).norm(), 0.0);
  }
}
