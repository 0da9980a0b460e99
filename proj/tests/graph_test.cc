#include "rotavg/graph.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "test_util.hpp"

namespace rotavg {
namespace {

constexpr double kPi = std::numbers::pi;

CameraGraph cycle(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, Rotation::Identity()});
  return CameraGraph(n, std::move(edges));
}

CameraGraph complete(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j, Rotation::Identity()});
  }
  return CameraGraph(n, std::move(edges));
}

// Second-smallest eigenvalue by a Jacobi-SVD of the (PSD) Laplacian, an
// algorithm independent of the library's tridiagonal QR path.
double brute_force_fiedler(const Eigen::MatrixXd& l) {
  Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(l).singularValues();
  std::sort(s.begin(), s.end());
  return s(1);
}

TEST(CameraGraph, RejectsInvalidEdges) {
  EXPECT_THROW(CameraGraph(3, {{0, 0, Rotation::Identity()}}), InputError);
  EXPECT_THROW(CameraGraph(3, {{0, 3, Rotation::Identity()}}), InputError);
  EXPECT_THROW(CameraGraph(3, {{-1, 2, Rotation::Identity()}}), InputError);
  EXPECT_THROW(CameraGraph(3, {{0, 1, Rotation::Identity()}, {1, 0, Rotation::Identity()}}),
               InputError);
}

TEST(CameraGraph, NormalizesReversedEdges) {
  const Rotation q = testing::rot_z(0.4);
  const CameraGraph g(3, {{2, 1, q}, {0, 1, Rotation::Identity()}});
  ASSERT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.edges()[0].i, 0);
  EXPECT_EQ(g.edges()[1].i, 1);
  EXPECT_EQ(g.edges()[1].j, 2);
  EXPECT_EQ(g.edges()[1].rotation.matrix(), q.matrix().transpose());
  EXPECT_EQ(g.measurement(2, 1)->matrix(), q.matrix());
  EXPECT_EQ(g.measurement(1, 2)->matrix(), q.matrix().transpose());
  EXPECT_FALSE(g.measurement(0, 2).has_value());
}

TEST(CameraGraph, Structure) {
  EXPECT_TRUE(cycle(5).is_cycle());
  EXPECT_TRUE(cycle(5).is_connected());
  EXPECT_FALSE(complete(4).is_cycle());
  EXPECT_TRUE(complete(3).is_cycle());
  const CameraGraph split(4, {{0, 1, Rotation::Identity()}, {2, 3, Rotation::Identity()}});
  EXPECT_FALSE(split.is_connected());
  EXPECT_EQ(split.degree(0), 1);
}

TEST(SpectralSummary, TwoVertices) {
  const SpectralSummary s = spectral_summary(CameraGraph(2, {{0, 1, Rotation::Identity()}}));
  Eigen::Matrix2d expected;
  expected << 1, -1, -1, 1;
  EXPECT_EQ(s.laplacian, Eigen::MatrixXd(expected));
  EXPECT_NEAR(s.fiedler, 2.0, 1e-12);
  EXPECT_TRUE(s.connected);
}

TEST(SpectralSummary, CompleteAndCycle) {
  const SpectralSummary k5 = spectral_summary(complete(5));
  EXPECT_NEAR(k5.fiedler, 5.0, 1e-12);
  EXPECT_EQ(k5.d_max, 4);
  EXPECT_EQ(k5.d_min, 4);
  EXPECT_NEAR(spectral_summary(cycle(4)).fiedler, 2.0, 1e-12);
  for (int n = 3; n <= 40; ++n) {
    EXPECT_NEAR(spectral_summary(cycle(n)).fiedler, 2.0 * (1.0 - std::cos(2.0 * kPi / n)),
                1e-12);
  }
}

TEST(SpectralSummary, RejectsTinyGraphs) {
  EXPECT_THROW(spectral_summary(CameraGraph(1, {})), InputError);
  EXPECT_THROW(spectral_summary(CameraGraph(0, {})), InputError);
}

TEST(SpectralSummary, DisconnectedHasZeroFiedler) {
  const CameraGraph split(4, {{0, 1, Rotation::Identity()}, {2, 3, Rotation::Identity()}});
  const SpectralSummary s = spectral_summary(split);
  EXPECT_FALSE(s.connected);
  EXPECT_NEAR(s.fiedler, 0.0, 1e-12);
}

TEST(SpectralSummary, MatchesBruteForceOnRandomGraphs) {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 49;
    const CameraGraph g = testing::random_graph(rng, n, 0.3);
    const SpectralSummary s = spectral_summary(g);
    EXPECT_LT(s.laplacian.rowwise().sum().cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(s.fiedler, brute_force_fiedler(s.laplacian), 1e-9);
    EXPECT_EQ(s.connected, g.is_connected());
  }
}

TEST(SpectralSummary, LanczosPathMatchesDense) {
  std::mt19937_64 rng(21);
  SpectralOptions lanczos;
  lanczos.dense_limit = 1;
  for (int trial = 0; trial < 10; ++trial) {
    const CameraGraph g = testing::random_graph(rng, 30 + 10 * trial, 0.15);
    if (!g.is_connected()) continue;
    const SpectralSummary dense = spectral_summary(g);
    const SpectralSummary sparse = spectral_summary(g, lanczos);
    EXPECT_NEAR(sparse.fiedler, dense.fiedler, 1e-9 * std::max(1.0, dense.fiedler));
    EXPECT_TRUE(sparse.connected);
  }
  const SpectralSummary c = spectral_summary(cycle(300), lanczos);
  EXPECT_NEAR(c.fiedler, 2.0 * (1.0 - std::cos(2.0 * kPi / 300)), 1e-10);
}

TEST(AlphaMaxBound, KnownValues) {
  EXPECT_NEAR(alpha_max_bound(spectral_summary(complete(3))), kPi / 3, 1e-12);
  EXPECT_NEAR(alpha_max_bound(spectral_summary(complete(3))) * 180.0 / kPi, 60.0, 1e-9);
  // Complete graph: lambda2 = n, d_max = n - 1.
  const double limit = 2.0 * std::asin((std::sqrt(3.0) - 1.0) / 2.0);
  EXPECT_NEAR(limit, 0.749, 5e-4);
  EXPECT_NEAR(alpha_max_bound(1e4, 9999), 0.749, 1e-3);
  const Eigen::MatrixXd l6 = cycle(6).laplacian();
  const double lambda2 = brute_force_fiedler(l6);
  EXPECT_NEAR(lambda2, 1.0, 1e-12);
  EXPECT_NEAR(alpha_max_bound(spectral_summary(cycle(6))),
              2.0 * std::asin(std::sqrt(0.25 + lambda2 / 4.0) - 0.5), 1e-12);
}

TEST(AlphaMaxBound, DisconnectedIsDomainError) {
  const CameraGraph split(4, {{0, 1, Rotation::Identity()}, {2, 3, Rotation::Identity()}});
  EXPECT_THROW(alpha_max_bound(spectral_summary(split)), DomainError);
  EXPECT_THROW(alpha_max_bound(0.0, 2), DomainError);
}

TEST(AlphaMaxBound, MonotoneInFiedlerAndDegree) {
  for (int d = 1; d <= 50; ++d) {
    double prev = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double lambda2 = k * 0.01 * (d + 1);
      const double a = alpha_max_bound(lambda2, d);
      EXPECT_GT(a, prev);
      prev = a;
      if (d > 1) EXPECT_LT(a, alpha_max_bound(lambda2, d - 1));
    }
  }
}

TEST(CycleBound, KnownValuesAndDominance) {
  EXPECT_NEAR(cycle_bound(3), kPi / 3, 1e-15);
  EXPECT_NEAR(cycle_bound(3), alpha_max_bound(spectral_summary(cycle(3))), 1e-12);
  EXPECT_NEAR(cycle_bound(6), kPi / 6, 1e-15);
  EXPECT_NEAR(cycle_bound(100), kPi / 100, 1e-15);
  EXPECT_GT(cycle_bound(100), alpha_max_bound(spectral_summary(cycle(100))));
  for (int n = 3; n <= 200; ++n) {
    EXPECT_GE(cycle_bound(n), alpha_max_bound(spectral_summary(cycle(n))) - 1e-12) << n;
  }
  EXPECT_THROW(cycle_bound(2), InputError);
}

}  // namespace
}  // namespace rotavg
