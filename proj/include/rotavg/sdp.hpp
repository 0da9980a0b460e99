#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rotavg/problem.hpp"

namespace rotavg {

/// Iterate Y of the semidefinite relaxation: 3n x 3n, symmetric, with
/// identity 3x3 diagonal blocks.
class GramIterate {
 public:
  GramIterate() = default;
  // Validates symmetry and identity diagonal blocks to 1e-12.
  explicit GramIterate(Eigen::MatrixXd y);

  static GramIterate Identity(int n);
  // Y = R^T R.
  static GramIterate FromRotations(const SolutionStack& r);

  int num_blocks() const { return static_cast<int>(y_.rows() / 3); }
  const Eigen::MatrixXd& matrix() const { return y_; }
  Eigen::Matrix3d block(int i, int j) const { return y_.block<3, 3>(3 * i, 3 * j); }

  // Overwrites block row and column k with s (3n x 3; its k-th block is
  // ignored) and sets Y_kk = I.
  void replace_block_column(int k, const Eigen::MatrixXd& s);

  // max_i ||Y_ii - I||_F
  double diagonal_error() const;
  // Smallest eigenvalue via a dense eigensolve.
  double min_eigenvalue() const;

 private:
  Eigen::MatrixXd y_;
};

enum class SweepOrder { Cyclic, RandomPermutation };

struct SolverConfig {
  int max_sweeps = 1000;
  double rel_tol = 1e-9;  // relative objective decrease per sweep
  SweepOrder order = SweepOrder::Cyclic;
  std::uint64_t seed = 0;
  bool spanning_tree_init = false;

  void validate() const;
};

struct SolveTrace {
  double initial_objective = 0.0;
  std::vector<double> objectives;  // after each sweep
  int sweeps_run = 0;
  bool converged = false;
  double wall_time = 0.0;  // seconds
  std::vector<std::string> warnings;
};

struct DdSolution {
  GramIterate y;
  SolveTrace trace;
};

/// Minimizer of tr(a^T S) subject to [[I, S^T], [S, b]] >= 0:
/// S = -b a pinv(sqrt(a^T b a)).
///
/// b must be PSD (checked with a dense eigensolve when check_psd is set;
/// NotPsd failures surface as SolverStateError).
Eigen::MatrixXd block_update(const Eigen::MatrixXd& b, const Eigen::MatrixXd& a,
                             bool check_psd = true);

/// -tr(Rtilde Y).
double relaxation_objective(const GramIterate& y, const BlockMeasurement& m);

/// One block coordinate descent pass, updating block k for each k in order.
GramIterate bcd_sweep(GramIterate y, const BlockMeasurement& m,
                      const std::vector<int>& order);

// In-place variant used by the solver loop.
void bcd_sweep_inplace(GramIterate& y, const BlockMeasurement& m,
                       const std::vector<int>& order);

GramIterate spanning_tree_start(const BlockMeasurement& m);

DdSolution solve_dd(const BlockMeasurement& m, const SolverConfig& cfg = {});
DdSolution solve_dd(const BlockMeasurement& m, const SolverConfig& cfg,
                    GramIterate start);

/// Reads rotations off block row `anchor` of Y, projected to SO(3), with
/// R_anchor = I.
SolutionStack round_solution(const GramIterate& y, int anchor = 0);

}  // namespace rotavg
