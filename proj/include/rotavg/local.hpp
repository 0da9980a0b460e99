#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "rotavg/problem.hpp"

namespace rotavg {

struct LMConfig {
  int max_iters = 200;
  double grad_tol = 1e-10;
  double initial_damping = 1e-4;
  double damping_up = 10.0;
  double damping_down = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LMResult {
  SolutionStack solution;
  std::vector<double> cost_trace;  // chordal cost after each accepted step
  int iterations = 0;
  bool converged = false;          // by the gradient criterion
  double gradient_norm = 0.0;      // infinity norm at the returned point
  double wall_time = 0.0;
};

/// Gradient of chordal_cost with respect to left tangent perturbations
/// R_i <- exp([w_i]_x) R_i at w = 0, stacked as a 3n vector.
Eigen::VectorXd lm_gradient(const CameraGraph& g, const SolutionStack& r);

/// Levenberg-Marquardt on SO(3)^n for the chordal cost, vertex 0 pinned.
LMResult lm_solve(const CameraGraph& g, const SolutionStack& init,
                  const LMConfig& cfg = {});

}  // namespace rotavg
