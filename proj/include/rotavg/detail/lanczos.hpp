#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

namespace rotavg::detail {

struct LanczosResult {
  double value = 0.0;
  Eigen::VectorXd vector;
  int iterations = 0;
  bool converged = false;
};

// y = A x for a symmetric operator A.
using SymmetricOperator =
    std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

// Largest eigenvalue of a symmetric operator restricted to the orthogonal
// complement of span(deflate). `deflate` must have orthonormal columns (it
// may have zero columns). Lanczos with full reorthogonalization.
LanczosResult lanczos_largest(const SymmetricOperator& op, int dim,
                              const Eigen::MatrixXd& deflate, int max_iter,
                              double tol, std::uint64_t seed = 1);

}  // namespace rotavg::detail
