#include "rotavg/problem.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rotavg/synth.hpp"
#include "test_util.hpp"

namespace rotavg {
namespace {

using testing::random_rotation;

SolutionStack random_stack(std::mt19937_64& rng, int n) {
  std::vector<Rotation> r;
  for (int i = 0; i < n; ++i) r.push_back(random_rotation(rng));
  return SolutionStack(std::move(r));
}

TEST(BuildMeasurement, ZeroEdges) {
  const BlockMeasurement m = build_measurement(CameraGraph(4, {}));
  EXPECT_EQ(m.dense(), Eigen::MatrixXd::Zero(12, 12));
  EXPECT_EQ(m.frobenius_norm(), 0.0);
}

TEST(BuildMeasurement, TwoVertices) {
  std::mt19937_64 rng(40);
  const Rotation q = random_rotation(rng);
  const Eigen::MatrixXd d = build_measurement(CameraGraph(2, {{0, 1, q}})).dense();
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(6, 6);
  expected.topRightCorner<3, 3>() = q.matrix();
  expected.bottomLeftCorner<3, 3>() = q.matrix().transpose();
  EXPECT_EQ(d, expected);
}

TEST(BuildMeasurement, StructureOnRandomGraphs) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const CameraGraph g = testing::random_graph(rng, 2 + trial, 0.4);
    const BlockMeasurement m = build_measurement(g);
    const Eigen::MatrixXd d = m.dense();
    EXPECT_EQ((d - d.transpose()).norm(), 0.0);
    EXPECT_EQ((Eigen::MatrixXd(m.sparse()) - d).norm(), 0.0);
    EXPECT_NEAR(m.frobenius_norm(), d.norm(), 1e-12);
    const Eigen::MatrixXd adj = g.adjacency();
    for (int i = 0; i < g.num_vertices(); ++i) {
      for (int j = 0; j < g.num_vertices(); ++j) {
        const Eigen::Matrix3d b = d.block<3, 3>(3 * i, 3 * j);
        EXPECT_EQ(b, m.block(i, j));
        if (adj(i, j) != 0.0) {
          EXPECT_LT(orthogonality_error<double>(b), 1e-12);
        } else {
          EXPECT_EQ(b, Eigen::Matrix3d::Zero());
        }
      }
    }
  }
}

TEST(PrimalObjective, NoiseFreeAndEmpty) {
  for (Topology t : {Topology::Cycle, Topology::Complete}) {
    SynthSpec spec;
    spec.topology = t;
    spec.n = 9;
    const SynthInstance inst = generate(spec);
    const double edges = static_cast<double>(inst.graph.num_edges());
    EXPECT_NEAR(primal_objective(inst.ground_truth, build_measurement(inst.graph)),
                -6.0 * edges, 1e-10);
    EXPECT_NEAR(chordal_cost(inst.ground_truth, inst.graph), 0.0, 1e-12);
  }
  EXPECT_EQ(primal_objective(SolutionStack::Identity(3), build_measurement(CameraGraph(3, {}))),
            0.0);
}

TEST(PrimalObjective, SizeMismatch) {
  const CameraGraph g(3, {{0, 1, Rotation::Identity()}});
  EXPECT_THROW(primal_objective(SolutionStack::Identity(2), build_measurement(g)), InputError);
  EXPECT_THROW(chordal_cost(SolutionStack::Identity(4), g), InputError);
  EXPECT_THROW(residual_angles(SolutionStack::Identity(4), g), InputError);
}

TEST(PrimalObjective, AgreesWithDenseTraceAndChordalCost) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    const CameraGraph g = testing::random_graph(rng, 2 + trial, 0.5);
    const BlockMeasurement m = build_measurement(g);
    const SolutionStack r = random_stack(rng, g.num_vertices());
    const Eigen::MatrixXd rm = r.matrix();
    const double dense = -(rm * m.dense() * rm.transpose()).trace();
    const double p = primal_objective(r, m);
    EXPECT_NEAR(p, dense, 1e-10 * std::max(1.0, std::abs(dense)));
    const double c = chordal_cost(r, g);
    EXPECT_NEAR(c, 6.0 * g.num_edges() + p, 1e-9 * std::max(1.0, c));
    EXPECT_GE(p, -6.0 * g.num_edges() - 1e-9);
  }
}

TEST(ChordalCost, SingleEdge) {
  for (double alpha : {0.0, 0.1, 1.0, 2.5, 3.1}) {
    const CameraGraph g(2, {{0, 1, testing::rot_z(alpha)}});
    const double expected = 8.0 * std::pow(std::sin(alpha / 2), 2);
    EXPECT_NEAR(chordal_cost(SolutionStack::Identity(2), g), expected, 1e-13);
  }
}

TEST(ResidualAngles, KnownValues) {
  SynthSpec spec;
  spec.n = 6;
  const SynthInstance inst = generate(spec);
  const ResidualReport perfect = residual_angles(inst.ground_truth, inst.graph);
  EXPECT_EQ(perfect.edges.size(), 6u);
  EXPECT_LT(perfect.max_angle, 1e-7);
  const ResidualReport one =
      residual_angles(SolutionStack::Identity(2), CameraGraph(2, {{0, 1, testing::rot_z(0.3)}}));
  ASSERT_EQ(one.edges.size(), 1u);
  EXPECT_NEAR(one.edges[0].angle, 0.3, 1e-14);
  EXPECT_NEAR(one.max_angle, 0.3, 1e-14);
}

TEST(ResidualAngles, ConsistentWithChordalCost) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const CameraGraph g = testing::random_graph(rng, 2 + trial, 0.5);
    const SolutionStack r = random_stack(rng, g.num_vertices());
    const ResidualReport rep = residual_angles(r, g);
    double sum = 0.0;
    double mx = 0.0;
    for (const EdgeResidual& e : rep.edges) {
      sum += 8.0 * std::pow(std::sin(e.angle / 2), 2);
      mx = std::max(mx, e.angle);
    }
    EXPECT_NEAR(sum, chordal_cost(r, g), 1e-9 * std::max(1.0, sum));
    EXPECT_EQ(rep.max_angle, mx);
  }
}

TEST(Problem, GaugeInvariance) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const CameraGraph g = testing::random_graph(rng, 3 + trial, 0.5);
    const BlockMeasurement m = build_measurement(g);
    const SolutionStack r = random_stack(rng, g.num_vertices());
    const SolutionStack qr = apply_gauge(random_rotation(rng), r);
    EXPECT_NEAR(primal_objective(qr, m), primal_objective(r, m), 1e-10);
    EXPECT_NEAR(chordal_cost(qr, g), chordal_cost(r, g), 1e-10);
    const ResidualReport a = residual_angles(r, g);
    const ResidualReport b = residual_angles(qr, g);
    for (std::size_t k = 0; k < a.edges.size(); ++k) {
      EXPECT_NEAR(a.edges[k].angle, b.edges[k].angle, 1e-10);
    }
  }
}

TEST(Problem, LowerBoundAttainedOnlyWithZeroResiduals) {
  SynthSpec spec;
  spec.topology = Topology::Complete;
  spec.n = 6;
  spec.sigma = 0.1;
  const SynthInstance inst = generate(spec);
  const double floor = -6.0 * inst.graph.num_edges();
  const double p = primal_objective(inst.ground_truth, build_measurement(inst.graph));
  EXPECT_GT(p, floor + 1e-3);
}

}  // namespace
}  // namespace rotavg
