#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "rotavg/graph.hpp"

namespace rotavg {

/// The 3n x 3n symmetric measurement matrix with zero diagonal blocks and
/// block (i, j) = a_ij R_ij.
///
/// Stored block-sparse (one list of neighbor blocks per block row, sorted
/// by column); dense() and sparse() materialize it on request.
class BlockMeasurement {
 public:
  struct Block {
    int col;
    Eigen::Matrix3d value;
  };

  BlockMeasurement() = default;
  explicit BlockMeasurement(const CameraGraph& g);

  int num_blocks() const { return n_; }
  const std::vector<Block>& row(int i) const { return rows_[i]; }
  Eigen::Matrix3d block(int i, int j) const;

  Eigen::MatrixXd dense() const;
  Eigen::SparseMatrix<double> sparse() const;
  double frobenius_norm() const;

 private:
  int n_ = 0;
  std::vector<std::vector<Block>> rows_;
};

/// n rotations, conceptually the 3 x 3n row-block matrix [R_1 ... R_n].
class SolutionStack {
 public:
  SolutionStack() = default;
  explicit SolutionStack(std::vector<Rotation> rotations)
      : rotations_(std::move(rotations)) {}
  static SolutionStack Identity(int n) {
    return SolutionStack(std::vector<Rotation>(n));
  }

  int size() const { return static_cast<int>(rotations_.size()); }
  const Rotation& operator[](int i) const { return rotations_[i]; }
  Rotation& operator[](int i) { return rotations_[i]; }
  const std::vector<Rotation>& rotations() const { return rotations_; }

  Eigen::MatrixXd matrix() const;

 private:
  std::vector<Rotation> rotations_;
};

// Left-multiply every rotation by q (global gauge change).
SolutionStack apply_gauge(const Rotation& q, const SolutionStack& r);

BlockMeasurement build_measurement(const CameraGraph& g);

/// -tr(R Rtilde R^T).
double primal_objective(const SolutionStack& r, const BlockMeasurement& m);

/// Sum over edges of ||R_i R_ij - R_j||_F^2.
double chordal_cost(const SolutionStack& r, const CameraGraph& g);

struct EdgeResidual {
  int i;
  int j;
  double angle;  // rotation angle of R_i R_ij R_j^T
};

struct ResidualReport {
  std::vector<EdgeResidual> edges;
  double max_angle = 0.0;
};

ResidualReport residual_angles(const SolutionStack& r, const CameraGraph& g);

}  // namespace rotavg
