#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "rotavg/so3.hpp"

namespace rotavg {

/// Relative rotation measurement on an undirected edge, i < j.
///
/// `rotation` is the measurement R_ij with R_i R_ij ~ R_j; the reverse
/// direction is implied as R_ji = R_ij^T.
struct Edge {
  int i = 0;
  int j = 0;
  Rotation rotation;
};

/// Camera graph with one relative rotation per edge.
///
/// Edges are stored with i < j and sorted lexicographically, so every
/// iteration over edges is in a fixed order. Edges given as (j, i) with
/// j > i are flipped and their measurement transposed. Self-loops,
/// duplicates and out-of-range indices are rejected.
class CameraGraph {
 public:
  CameraGraph() = default;
  CameraGraph(int n, std::vector<Edge> edges);

  int num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  int degree(int v) const { return static_cast<int>(incident_[v].size()); }
  // Indices into edges() of the edges touching v, in edge order.
  const std::vector<int>& incident(int v) const { return incident_[v]; }

  // Measurement for the ordered pair (i, j), i.e. R_ij or R_ji^T.
  std::optional<Rotation> measurement(int i, int j) const;

  Eigen::MatrixXd adjacency() const;
  Eigen::MatrixXd laplacian() const;

  // Union-find connectivity (authoritative).
  bool is_connected() const;
  // Connected and every vertex of degree two, n >= 3.
  bool is_cycle() const;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> incident_;
};

struct SpectralSummary {
  Eigen::MatrixXd laplacian;
  double fiedler = 0.0;  // second-smallest Laplacian eigenvalue
  int d_max = 0;
  int d_min = 0;
  bool connected = false;
};

struct SpectralOptions {
  // Graphs up to this size use a dense symmetric eigensolver; larger ones
  // use shift-invert Lanczos on the complement of the constant vector.
  int dense_limit = 2000;
  double connectivity_tol = 1e-8;
};

SpectralSummary spectral_summary(const CameraGraph& g,
                                 const SpectralOptions& options = {});

/// Largest residual angle for which every stationary point is certified
/// global: 2 asin(sqrt(1/4 + lambda2 / (2 d_max)) - 1/2).
double alpha_max_bound(const SpectralSummary& s);
double alpha_max_bound(double fiedler, int d_max);

/// Residual bound pi / n for cycle graphs.
double cycle_bound(int n);

}  // namespace rotavg
