#include "rotavg/detail/lanczos.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace rotavg::detail {

namespace {

void project_out(const Eigen::MatrixXd& basis, int cols, Eigen::VectorXd& v) {
  if (cols == 0) return;
  // Two passes of classical Gram-Schmidt.
  for (int pass = 0; pass < 2; ++pass) {
    v.noalias() -= basis.leftCols(cols) * (basis.leftCols(cols).transpose() * v);
  }
}

}  // namespace

LanczosResult lanczos_largest(const SymmetricOperator& op, int dim,
                              const Eigen::MatrixXd& deflate, int max_iter,
                              double tol, std::uint64_t seed) {
  const int free_dim = dim - static_cast<int>(deflate.cols());
  LanczosResult result;
  if (free_dim <= 0) return result;
  max_iter = std::min(max_iter, free_dim);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd v(dim);
  for (int k = 0; k < dim; ++k) v(k) = unif(rng);
  project_out(deflate, static_cast<int>(deflate.cols()), v);
  v.normalize();

  Eigen::MatrixXd basis(dim, max_iter + 1);
  basis.col(0) = v;
  std::vector<double> alpha;
  std::vector<double> beta;
  Eigen::VectorXd w(dim);

  auto ritz = [&](int k, double& value, Eigen::VectorXd& coeffs) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (int a = 0; a < k; ++a) {
      t(a, a) = alpha[a];
      if (a + 1 < k) t(a, a + 1) = t(a + 1, a) = beta[a];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    value = es.eigenvalues()(k - 1);
    coeffs = es.eigenvectors().col(k - 1);
  };

  double value = 0.0;
  Eigen::VectorXd coeffs;
  for (int k = 0; k < max_iter; ++k) {
    op(basis.col(k), w);
    const double a = basis.col(k).dot(w);
    alpha.push_back(a);
    w -= a * basis.col(k);
    if (k > 0) w -= beta[k - 1] * basis.col(k - 1);
    project_out(deflate, static_cast<int>(deflate.cols()), w);
    project_out(basis, k + 1, w);
    const double b = w.norm();
    beta.push_back(b);
    ritz(k + 1, value, coeffs);
    result.iterations = k + 1;
    const double residual = std::abs(b * coeffs(k));
    const bool invariant = b <= 1e-14 * std::max(1.0, std::abs(value));
    if (invariant || residual <= tol * std::max(1.0, std::abs(value))) {
      result.converged = true;
      break;
    }
    basis.col(k + 1) = w / b;
  }
  result.value = value;
  result.vector = basis.leftCols(result.iterations) * coeffs;
  return result;
}

}  // namespace rotavg::detail
