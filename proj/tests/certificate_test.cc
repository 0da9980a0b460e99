#include "rotavg/certificate.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "rotavg/sdp.hpp"
#include "rotavg/synth.hpp"
#include "test_util.hpp"

namespace rotavg {
namespace {

constexpr double kPi = std::numbers::pi;
using testing::uniform_residual_cycle;

Eigen::VectorXd spectrum(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

TEST(LagrangeMultiplier, NoiseFree) {
  for (Topology t : {Topology::Cycle, Topology::Complete}) {
    SynthSpec spec;
    spec.topology = t;
    spec.n = 7;
    const SynthInstance inst = generate(spec);
    const Multiplier mult = lagrange_multiplier(inst.ground_truth, inst.graph);
    for (int i = 0; i < spec.n; ++i) {
      EXPECT_LT((mult.blocks[i] - inst.graph.degree(i) * Eigen::Matrix3d::Identity()).norm(),
                1e-12);
    }
    EXPECT_LT(mult.max_asymmetry(), 1e-12);
  }
}

TEST(LagrangeMultiplier, SingleEdgeResidualSpectrum) {
  std::mt19937_64 rng(50);
  for (double alpha : {0.2, 0.9, 2.0}) {
    const Eigen::Vector3d v = testing::random_unit(rng);
    const Rotation e = from_axis_angle<double>(v, alpha);
    const Rotation r0 = testing::random_rotation(rng);
    const Rotation r1 = testing::random_rotation(rng);
    // Measurement chosen so that the residual R_0 R_01 R_1^T equals e.
    const CameraGraph g(2, {{0, 1, r0.transpose() * e * r1}});
    const Multiplier mult = lagrange_multiplier(SolutionStack({r0, r1}), g);
    const Eigen::Matrix3d sym = 0.5 * (mult.blocks[0] + mult.blocks[0].transpose());
    const Eigen::Vector3d w = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(sym).eigenvalues();
    Eigen::Vector3d expected(std::cos(alpha), std::cos(alpha), 1.0);
    EXPECT_LT((w - expected).norm(), 1e-12) << alpha;
  }
}

TEST(LagrangeMultiplier, StationaryCycleSpectrum) {
  for (double alpha : {0.05, 0.3, 1.2}) {
    const auto [g, r] = uniform_residual_cycle(9, alpha);
    const Multiplier mult = lagrange_multiplier(r, g);
    EXPECT_LT(mult.max_asymmetry(), 1e-12);
    for (int i = 0; i < 9; ++i) {
      const Eigen::Vector3d w =
          Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(mult.blocks[i]).eigenvalues();
      EXPECT_LT((w - Eigen::Vector3d(2 * std::cos(alpha), 2 * std::cos(alpha), 2)).norm(),
                1e-12);
    }
  }
}

TEST(LagrangeMultiplier, PerturbedIsNotStationary) {
  SynthSpec spec;
  spec.n = 8;
  spec.sigma = 0.3;
  const SynthInstance inst = generate(spec);
  const SolutionStack r = perturb_solution(inst.ground_truth, 0.2, 3);
  EXPECT_GT(lagrange_multiplier(r, inst.graph).max_asymmetry(), 1e-3);
  EXPECT_EQ(certify(r, inst.graph).verdict, Verdict::NotStationary);
  EXPECT_THROW(lagrange_multiplier(SolutionStack::Identity(3), inst.graph), InputError);
}

TEST(Certify, NoiseFree) {
  for (Topology t : {Topology::Cycle, Topology::Complete, Topology::RandomRegular}) {
    SynthSpec spec;
    spec.topology = t;
    spec.n = 10;
    const SynthInstance inst = generate(spec);
    const Certificate c = certify(inst.ground_truth, inst.graph);
    EXPECT_NEAR(c.lambda_min_margin, 0.0, 1e-12);
    EXPECT_EQ(c.verdict, Verdict::CertifiedGlobal);
    EXPECT_NEAR(c.duality_gap, 0.0, 1e-10);
    // M equals L_G (x) I_3 after the rotation change of basis.
    EXPECT_LT(delta_matrix(inst.ground_truth, inst.graph).norm(), 1e-12);
  }
}

TEST(Certify, CycleEightEvenResidual) {
  const auto [g, r] = uniform_residual_cycle(8, kPi / 16);
  const Certificate c = certify(r, g);
  EXPECT_EQ(c.verdict, Verdict::CertifiedGlobal);
  EXPECT_NEAR(c.max_residual, kPi / 16, 1e-12);
  ASSERT_TRUE(c.cycle_bound.has_value());
  EXPECT_NEAR(*c.cycle_bound, kPi / 8, 1e-15);
}

TEST(Certify, CycleEightWrapAroundLocalMinimum) {
  const double alpha = 2 * kPi / 8;
  const auto [g, r] = uniform_residual_cycle(8, alpha);
  const Certificate c = certify(r, g);
  EXPECT_LT(c.lambda_min_margin, 0.0);
  EXPECT_EQ(c.verdict, Verdict::NotCertified);
  EXPECT_LT(c.stationarity_residual, 1e-12);
  // The predicted eigenvalue 4 sin(pi/n - alpha) sin(pi/n) is in the spectrum
  // and is the smallest one.
  const double predicted = 4 * std::sin(kPi / 8 - alpha) * std::sin(kPi / 8);
  const Eigen::VectorXd w = spectrum(certificate_matrix(r, g));
  EXPECT_NEAR(w(0), predicted, 1e-12);
  EXPECT_NEAR(c.lambda_min_margin, predicted, 1e-12);
}

TEST(Certify, CycleSpectrumMatchesClosedForm) {
  // Uniform residual alpha about z on an n-cycle: besides the z-block
  // (the plain cycle Laplacian with eigenvalues 2 - 2 cos(2 pi k / n)), the
  // xy-block has eigenvalues 2 cos(alpha) - 2 cos(2 pi k / n - alpha); for
  // k = 1 and k = n - 1 these are 4 sin(pi/n -+ alpha) sin(pi/n)-type values.
  for (int n : {5, 8, 13}) {
    for (double alpha : {0.1, 0.4}) {
      const auto [g, r] = uniform_residual_cycle(n, alpha);
      std::vector<double> expected;
      for (int k = 0; k < n; ++k) {
        const double t = 2 * kPi * k / n;
        expected.push_back(2 - 2 * std::cos(t));
        expected.push_back(2 * std::cos(alpha) - 2 * std::cos(t - alpha));
        expected.push_back(2 * std::cos(alpha) - 2 * std::cos(t + alpha));
      }
      std::sort(expected.begin(), expected.end());
      const Eigen::VectorXd w = spectrum(certificate_matrix(r, g));
      for (int k = 0; k < 3 * n; ++k) EXPECT_NEAR(w(k), expected[k], 1e-11);
      EXPECT_NEAR(w(0), std::min(0.0, 4 * std::sin(kPi / n - alpha) * std::sin(kPi / n)),
                  1e-11);
    }
  }
}

TEST(Certify, CycleBoundIsSharp) {
  for (int n = 3; n <= 20; ++n) {
    const double edge = kPi / n;
    for (int k = 0; k <= 40; ++k) {
      const double alpha = edge * (0.8 + 0.01 * k);
      const auto [g, r] = uniform_residual_cycle(n, alpha);
      const Certificate c = certify(r, g);
      const bool certified = c.verdict == Verdict::CertifiedGlobal;
      EXPECT_EQ(certified, alpha <= edge + 1e-9) << n << " " << alpha;
    }
    const auto [g, r] = uniform_residual_cycle(n, edge);
    EXPECT_EQ(certify(r, g).verdict, Verdict::CertifiedGlobal) << n;
  }
}

TEST(Certify, DisconnectedIsDomainError) {
  const CameraGraph g(4, {{0, 1, Rotation::Identity()}, {2, 3, Rotation::Identity()}});
  EXPECT_THROW(certify(SolutionStack::Identity(4), g), DomainError);
}

TEST(Certify, DualObjectiveEqualsPrimalAtStationaryPoints) {
  for (double alpha : {0.0, 0.3, 1.0, 2.8}) {
    const auto [g, r] = uniform_residual_cycle(11, alpha);
    const Certificate c = certify(r, g);
    EXPECT_LT(c.stationarity_residual, 1e-10);
    EXPECT_NEAR(c.dual_objective, c.primal_objective, 1e-9 * std::abs(c.primal_objective));
  }
}

TEST(Certify, GaugeInvariance) {
  std::mt19937_64 rng(51);
  for (double alpha : {0.1, 0.5}) {
    const auto [g, r] = uniform_residual_cycle(10, alpha);
    const Certificate a = certify(r, g);
    for (int k = 0; k < 5; ++k) {
      const Certificate b = certify(apply_gauge(testing::random_rotation(rng), r), g);
      EXPECT_EQ(a.verdict, b.verdict);
      EXPECT_NEAR(a.lambda_min_margin, b.lambda_min_margin, 1e-9);
    }
  }
}

TEST(Certify, LanczosPathMatchesDense) {
  CertifyOptions sparse;
  sparse.dense_limit = 0;
  for (double alpha : {0.05, 0.3, 0.6}) {
    const auto [g, r] = uniform_residual_cycle(12, alpha);
    const Certificate d = certify(r, g);
    const Certificate s = certify(r, g, sparse);
    EXPECT_FALSE(d.used_lanczos);
    EXPECT_TRUE(s.used_lanczos);
    EXPECT_NEAR(s.lambda_min_margin, d.lambda_min_margin, 1e-8);
    EXPECT_EQ(s.verdict, d.verdict);
  }
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    SynthSpec spec;
    spec.topology = Topology::RandomRegular;
    spec.n = 40;
    spec.degree = 4;
    spec.sigma = 0.1;
    spec.seed = seed;
    const SynthInstance inst = generate(spec);
    SolverConfig cfg;
    cfg.rel_tol = 1e-14;
    const SolutionStack r = round_solution(solve_dd(build_measurement(inst.graph), cfg).y);
    const Certificate d = certify(r, inst.graph);
    const Certificate s = certify(r, inst.graph, sparse);
    EXPECT_NEAR(s.lambda_min_margin, d.lambda_min_margin, 1e-8);
    EXPECT_EQ(s.verdict, d.verdict);
    EXPECT_EQ(d.verdict, Verdict::CertifiedGlobal);
  }
}

TEST(Certify, AprioriBoundSoundness) {
  // Any BCD solution whose max residual is below the spectral bound must be
  // certified.
  int checked = 0;
  int skipped = 0;
  const Topology topologies[] = {Topology::Cycle, Topology::Complete, Topology::RandomRegular};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SynthSpec spec;
    spec.topology = topologies[seed % 3];
    spec.n = 4 + static_cast<int>(seed % 9);
    spec.degree = spec.n % 2 == 0 ? 3 : 4;
    spec.sigma = 0.3 * static_cast<double>(seed % 10 + 1) / 10.0;
    if (spec.topology == Topology::Cycle) spec.sigma *= 0.2;
    spec.seed = seed;
    const SynthInstance inst = generate(spec);
    SolverConfig cfg;
    cfg.rel_tol = 1e-14;
    cfg.max_sweeps = 20000;
    const SolutionStack r = round_solution(solve_dd(build_measurement(inst.graph), cfg).y);
    const Certificate c = certify(r, inst.graph);
    if (c.max_residual > c.apriori_bound) {
      ++skipped;
      continue;
    }
    ++checked;
    EXPECT_EQ(c.verdict, Verdict::CertifiedGlobal)
        << "seed " << seed << " residual " << c.max_residual << " bound " << c.apriori_bound;
  }
  std::printf("soundness: %d checked, %d above the bound\n", checked, skipped);
  EXPECT_EQ(checked + skipped, 200);
  EXPECT_GE(checked, 100);
}

TEST(SpectralBoundCheck, NoiseFree) {
  SynthSpec spec;
  spec.topology = Topology::Complete;
  spec.n = 6;
  const SynthInstance inst = generate(spec);
  const SpectralBoundReport rep = spectral_bound_check(inst.ground_truth, inst.graph);
  EXPECT_LT(rep.delta.norm(), 1e-12);
  EXPECT_TRUE(rep.all_ok());
}

TEST(SpectralBoundCheck, BcdSolutionsOnNoisyCycles) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SynthSpec spec;
    spec.n = 20;
    spec.sigma = 0.2;
    spec.seed = seed;
    const SynthInstance inst = generate(spec);
    SolverConfig cfg;
    cfg.rel_tol = 1e-14;
    const SolutionStack r = round_solution(solve_dd(build_measurement(inst.graph), cfg).y);
    const SpectralBoundReport rep = spectral_bound_check(r, inst.graph);
    EXPECT_TRUE(rep.diagonal_ok);
    EXPECT_TRUE(rep.offdiag_ok);
    EXPECT_TRUE(rep.eigenvalue_ok);
    EXPECT_LE(rep.max_abs_eigenvalue, rep.combined_bound);
  }
}

TEST(SpectralBoundCheck, OffDiagonalBoundIsTight) {
  for (double alpha : {0.1, 0.7, 1.5}) {
    const auto [g, r] = uniform_residual_cycle(6, alpha);
    const SpectralBoundReport rep = spectral_bound_check(r, g);
    EXPECT_TRUE(rep.all_ok());
    EXPECT_NEAR(rep.max_offdiag_norm, 2 * std::sin(alpha / 2), 1e-10);
    // Every residual is a rotation about z; a vector perpendicular to that
    // axis attains the bound.
    const Eigen::Matrix3d d01 = rep.delta.block<3, 3>(0, 3);
    const Eigen::Vector3d v(std::cos(0.3), std::sin(0.3), 0.0);
    EXPECT_NEAR((d01 * v).norm(), 2 * std::sin(alpha / 2), 1e-10);
    EXPECT_NEAR((d01 * Eigen::Vector3d::UnitZ()).norm(), 0.0, 1e-12);
  }
}

TEST(SpectralBoundCheck, Preconditions) {
  const auto [g, r] = uniform_residual_cycle(6, 2.0);
  EXPECT_THROW(spectral_bound_check(r, g), DomainError);
  SynthSpec spec;
  spec.n = 6;
  spec.sigma = 0.3;
  const SynthInstance inst = generate(spec);
  EXPECT_THROW(spectral_bound_check(perturb_solution(inst.ground_truth, 0.2, 1), inst.graph),
               InputError);
}

}  // namespace
}  // namespace rotavg
