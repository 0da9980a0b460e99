#include "rotavg/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rotavg {

namespace {

void check_size(int expected, int actual) {
  if (expected != actual) {
    throw InputError("solution has " + std::to_string(actual) +
                     " rotations, problem has " + std::to_string(expected));
  }
}

}  // namespace

BlockMeasurement::BlockMeasurement(const CameraGraph& g)
    : n_(g.num_vertices()), rows_(g.num_vertices()) {
  for (const Edge& e : g.edges()) {
    rows_[e.i].push_back({e.j, e.rotation.matrix()});
    rows_[e.j].push_back({e.i, e.rotation.matrix().transpose()});
  }
  for (auto& row : rows_) {
    std::sort(row.begin(), row.end(),
              [](const Block& a, const Block& b) { return a.col < b.col; });
  }
}

Eigen::Matrix3d BlockMeasurement::block(int i, int j) const {
  for (const Block& b : rows_[i]) {
    if (b.col == j) return b.value;
  }
  return Eigen::Matrix3d::Zero();
}

Eigen::MatrixXd BlockMeasurement::dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3 * n_, 3 * n_);
  for (int i = 0; i < n_; ++i) {
    for (const Block& b : rows_[i]) d.block<3, 3>(3 * i, 3 * b.col) = b.value;
  }
  return d;
}

Eigen::SparseMatrix<double> BlockMeasurement::sparse() const {
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < n_; ++i) {
    for (const Block& b : rows_[i]) {
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
          trip.emplace_back(3 * i + r, 3 * b.col + c, b.value(r, c));
        }
      }
    }
  }
  Eigen::SparseMatrix<double> s(3 * n_, 3 * n_);
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

double BlockMeasurement::frobenius_norm() const {
  double sq = 0.0;
  for (const auto& row : rows_) {
    for (const Block& b : row) sq += b.value.squaredNorm();
  }
  return std::sqrt(sq);
}

Eigen::MatrixXd SolutionStack::matrix() const {
  Eigen::MatrixXd r(3, 3 * size());
  for (int i = 0; i < size(); ++i) r.block<3, 3>(0, 3 * i) = rotations_[i].matrix();
  return r;
}

SolutionStack apply_gauge(const Rotation& q, const SolutionStack& r) {
  std::vector<Rotation> out;
  out.reserve(r.size());
  for (const Rotation& ri : r.rotations()) out.push_back(q * ri);
  return SolutionStack(std::move(out));
}

BlockMeasurement build_measurement(const CameraGraph& g) {
  return BlockMeasurement(g);
}

double primal_objective(const SolutionStack& r, const BlockMeasurement& m) {
  check_size(m.num_blocks(), r.size());
  // Upper-triangle blocks only, in row/column order; each counts twice.
  double sum = 0.0;
  for (int i = 0; i < m.num_blocks(); ++i) {
    for (const auto& b : m.row(i)) {
      if (b.col <= i) continue;
      sum += (r[i].matrix() * b.value * r[b.col].matrix().transpose()).trace();
    }
  }
  return -2.0 * sum;
}

double chordal_cost(const SolutionStack& r, const CameraGraph& g) {
  check_size(g.num_vertices(), r.size());
  double sum = 0.0;
  for (const Edge& e : g.edges()) {
    sum += (r[e.i].matrix() * e.rotation.matrix() - r[e.j].matrix()).squaredNorm();
  }
  return sum;
}

ResidualReport residual_angles(const SolutionStack& r, const CameraGraph& g) {
  check_size(g.num_vertices(), r.size());
  ResidualReport report;
  report.edges.reserve(g.num_edges());
  for (const Edge& e : g.edges()) {
    const Rotation res = r[e.i] * e.rotation * r[e.j].transpose();
    const double angle = rotation_angle(res);
    report.edges.push_back({e.i, e.j, angle});
    report.max_angle = std::max(report.max_angle, angle);
  }
  return report;
}

}  // namespace rotavg
