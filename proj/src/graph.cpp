#include "rotavg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "rotavg/detail/lanczos.hpp"

namespace rotavg {

CameraGraph::CameraGraph(int n, std::vector<Edge> edges) : n_(n) {
  if (n < 0) throw InputError("vertex count must be nonnegative");
  for (Edge& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) {
      throw InputError("edge (" + std::to_string(e.i) + ", " +
                       std::to_string(e.j) + ") has an out-of-range vertex");
    }
    if (e.i == e.j) {
      throw InputError("self-loop at vertex " + std::to_string(e.i));
    }
    if (e.i > e.j) {
      std::swap(e.i, e.j);
      e.rotation = e.rotation.transpose();
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (edges[k].i == edges[k - 1].i && edges[k].j == edges[k - 1].j) {
      throw InputError("duplicate edge (" + std::to_string(edges[k].i) + ", " +
                       std::to_string(edges[k].j) + ")");
    }
  }
  edges_ = std::move(edges);
  incident_.assign(n, {});
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    incident_[edges_[k].i].push_back(static_cast<int>(k));
    incident_[edges_[k].j].push_back(static_cast<int>(k));
  }
}

std::optional<Rotation> CameraGraph::measurement(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_ || i == j) return std::nullopt;
  const int lo = std::min(i, j);
  const int hi = std::max(i, j);
  for (int k : incident_[lo]) {
    const Edge& e = edges_[k];
    if (e.i == lo && e.j == hi) {
      return i < j ? e.rotation : e.rotation.transpose();
    }
  }
  return std::nullopt;
}

Eigen::MatrixXd CameraGraph::adjacency() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
  for (const Edge& e : edges_) a(e.i, e.j) = a(e.j, e.i) = 1.0;
  return a;
}

Eigen::MatrixXd CameraGraph::laplacian() const {
  Eigen::MatrixXd l = -adjacency();
  for (int v = 0; v < n_; ++v) l(v, v) = degree(v);
  return l;
}

bool CameraGraph::is_connected() const {
  if (n_ <= 1) return true;
  std::vector<int> parent(n_);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = n_;
  for (const Edge& e : edges_) {
    const int a = find(e.i);
    const int b = find(e.j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

bool CameraGraph::is_cycle() const {
  if (n_ < 3 || num_edges() != static_cast<std::size_t>(n_)) return false;
  for (int v = 0; v < n_; ++v) {
    if (degree(v) != 2) return false;
  }
  return is_connected();
}

namespace {

// lambda_2 of a connected graph via Lanczos on the Laplacian pseudoinverse,
// restricted to the complement of the constant vector.
double fiedler_lanczos(const CameraGraph& g) {
  const int n = g.num_vertices();
  const int m = n - 1;  // ground the last vertex
  std::vector<Eigen::Triplet<double>> trip;
  for (int v = 0; v < m; ++v) trip.emplace_back(v, v, g.degree(v));
  for (const Edge& e : g.edges()) {
    if (e.j < m) {
      trip.emplace_back(e.i, e.j, -1.0);
      trip.emplace_back(e.j, e.i, -1.0);
    }
  }
  Eigen::SparseMatrix<double> grounded(m, m);
  grounded.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(grounded);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("grounded Laplacian factorization failed");
  }
  auto op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y.setZero(n);
    y.head(m) = solver.solve(x.head(m));
    y.array() -= y.mean();
  };
  const Eigen::MatrixXd ones = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(n));
  const auto res = detail::lanczos_largest(op, n, ones, 500, 1e-13);
  if (!res.converged || res.value <= 0.0) {
    throw NumericalError("Lanczos iteration for the Fiedler value did not converge");
  }
  return 1.0 / res.value;
}

}  // namespace

SpectralSummary spectral_summary(const CameraGraph& g,
                                 const SpectralOptions& options) {
  const int n = g.num_vertices();
  if (n < 2) throw InputError("spectral summary needs at least two vertices");

  SpectralSummary s;
  s.laplacian = g.laplacian();
  s.d_max = 0;
  s.d_min = g.degree(0);
  for (int v = 0; v < n; ++v) {
    s.d_max = std::max(s.d_max, g.degree(v));
    s.d_min = std::min(s.d_min, g.degree(v));
  }
  const bool connected = g.is_connected();

  if (n <= options.dense_limit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.laplacian,
                                                      Eigen::EigenvaluesOnly);
    s.fiedler = std::max(0.0, es.eigenvalues()(1));
  } else {
    s.fiedler = connected ? fiedler_lanczos(g) : 0.0;
  }
  s.connected = s.fiedler > options.connectivity_tol;
  if (s.connected != connected) {
    throw NumericalError("Fiedler value " + std::to_string(s.fiedler) +
                         " disagrees with graph connectivity");
  }
  return s;
}

double alpha_max_bound(double fiedler, int d_max) {
  if (!(fiedler > 0.0) || d_max <= 0) {
    throw DomainError("residual bound requires a connected camera graph");
  }
  return 2.0 * std::asin(std::sqrt(0.25 + fiedler / (2.0 * d_max)) - 0.5);
}

double alpha_max_bound(const SpectralSummary& s) {
  if (!s.connected) {
    throw DomainError("residual bound requires a connected camera graph");
  }
  return alpha_max_bound(s.fiedler, s.d_max);
}

double cycle_bound(int n) {
  if (n < 3) throw InputError("cycle bound needs n >= 3");
  return std::numbers::pi / n;
}

}  // namespace rotavg
