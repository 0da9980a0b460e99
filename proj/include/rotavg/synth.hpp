#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "rotavg/problem.hpp"

namespace rotavg {

/// Seeded random source with platform-independent output: std::mt19937_64
/// (bit-exact by the standard) plus hand-rolled uniform/normal transforms,
/// since the std distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Box-Muller, no caching of the second variate.
  double normal();
  Eigen::Vector3d unit_vector();
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

enum class Topology { Cycle, Complete, RandomRegular };

struct SynthSpec {
  Topology topology = Topology::Cycle;
  int n = 3;
  int degree = 3;      // random_regular only
  double sigma = 0.0;  // standard deviation of the noise angle, radians
  std::uint64_t seed = 0;

  void validate() const;
};

Topology parse_topology(const std::string& name);
std::string to_string(Topology t);

struct SynthInstance {
  CameraGraph graph;
  SolutionStack ground_truth;
};

/// Ground truth R_i = Rz(2 pi i / n); measurements R_ij = R_i^T R_j N_ij
/// with N_ij a rotation about a uniform axis by a Normal(0, sigma) angle.
SynthInstance generate(const SynthSpec& spec);

/// Left-multiplies every rotation by a rotation about a uniform axis with
/// angle uniform in [0, scale].
SolutionStack perturb_solution(const SolutionStack& r, double scale,
                               std::uint64_t seed);

}  // namespace rotavg
