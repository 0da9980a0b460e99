#include "rotavg/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "rotavg/detail/lanczos.hpp"

namespace rotavg {

double Multiplier::max_asymmetry() const {
  double worst = 0.0;
  for (double a : asymmetry) worst = std::max(worst, a);
  return worst;
}

double Multiplier::trace() const {
  double t = 0.0;
  for (const auto& b : blocks) t += b.trace();
  return t;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::CertifiedGlobal:
      return "certified_global";
    case Verdict::NotCertified:
      return "not_certified";
    case Verdict::NotStationary:
      return "not_stationary";
  }
  return "unknown";
}

Multiplier lagrange_multiplier(const SolutionStack& r, const CameraGraph& g) {
  const int n = g.num_vertices();
  if (r.size() != n) throw InputError("solution and graph sizes differ");
  Multiplier mult;
  mult.blocks.assign(n, Eigen::Matrix3d::Zero());
  for (const Edge& e : g.edges()) {
    const Eigen::Matrix3d& rij = e.rotation.matrix();
    mult.blocks[e.i] += rij * r[e.j].matrix().transpose() * r[e.i].matrix();
    mult.blocks[e.j] += rij.transpose() * r[e.i].matrix().transpose() * r[e.j].matrix();
  }
  mult.asymmetry.resize(n);
  for (int i = 0; i < n; ++i) {
    mult.asymmetry[i] = (mult.blocks[i] - mult.blocks[i].transpose()).norm();
  }
  return mult;
}

namespace {

Eigen::MatrixXd assemble(const Multiplier& mult, const CameraGraph& g) {
  const int n = g.num_vertices();
  Eigen::MatrixXd m = -BlockMeasurement(g).dense();
  for (int i = 0; i < n; ++i) {
    m.block<3, 3>(3 * i, 3 * i) =
        0.5 * (mult.blocks[i] + mult.blocks[i].transpose());
  }
  return m;
}

Eigen::SparseMatrix<double> assemble_sparse(const Multiplier& mult,
                                            const CameraGraph& g) {
  Eigen::SparseMatrix<double> m = -BlockMeasurement(g).sparse();
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < g.num_vertices(); ++i) {
    const Eigen::Matrix3d s = 0.5 * (mult.blocks[i] + mult.blocks[i].transpose());
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) trip.emplace_back(3 * i + a, 3 * i + b, s(a, b));
    }
  }
  Eigen::SparseMatrix<double> diag(m.rows(), m.cols());
  diag.setFromTriplets(trip.begin(), trip.end());
  return m + diag;
}

// lambda_min of M with the rows of R (the stationary nullspace) handled
// separately: Lanczos on (c I - M) over their orthogonal complement, plus
// the 3x3 compression of M onto them.
double min_eigenvalue_lanczos(const Eigen::SparseMatrix<double>& m,
                              const SolutionStack& r, int max_iter) {
  const int dim = static_cast<int>(m.rows());
  double shift = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    double row = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
      row += std::abs(it.value());
    }
    shift = std::max(shift, row);
  }
  const Eigen::MatrixXd basis =
      r.matrix().transpose() / std::sqrt(static_cast<double>(r.size()));
  auto op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y = shift * x - m * x;
  };
  const auto res = detail::lanczos_largest(op, dim, basis, max_iter, 1e-12);
  if (!res.converged) {
    throw NumericalError("Lanczos iteration for the certificate did not converge");
  }
  const Eigen::Matrix3d compressed = basis.transpose() * (m * basis);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(
      0.5 * (compressed + compressed.transpose()), Eigen::EigenvaluesOnly);
  return std::min(shift - res.value, es.eigenvalues()(0));
}

}  // namespace

Eigen::MatrixXd certificate_matrix(const SolutionStack& r, const CameraGraph& g) {
  return assemble(lagrange_multiplier(r, g), g);
}

Certificate certify(const SolutionStack& r, const CameraGraph& g,
                    const CertifyOptions& options) {
  const int n = g.num_vertices();
  if (r.size() != n) throw InputError("solution and graph sizes differ");
  if (!g.is_connected()) {
    throw DomainError("certification requires a connected camera graph");
  }

  Certificate cert;
  const Multiplier mult = lagrange_multiplier(r, g);
  cert.stationarity_residual = mult.max_asymmetry();
  cert.primal_objective = primal_objective(r, BlockMeasurement(g));
  cert.dual_objective = -mult.trace();
  cert.duality_gap = cert.primal_objective - cert.dual_objective;
  cert.max_residual = residual_angles(r, g).max_angle;
  if (n >= 2) cert.apriori_bound = alpha_max_bound(spectral_summary(g));
  if (g.is_cycle()) cert.cycle_bound = cycle_bound(n);

  double frob = 0.0;
  if (3 * n <= options.dense_limit) {
    const Eigen::MatrixXd m = assemble(mult, g);
    frob = m.norm();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    cert.lambda_min_margin = n > 0 ? es.eigenvalues()(0) : 0.0;
  } else {
    const Eigen::SparseMatrix<double> m = assemble_sparse(mult, g);
    frob = m.norm();
    cert.lambda_min_margin = min_eigenvalue_lanczos(m, r, options.lanczos_max_iter);
    cert.used_lanczos = true;
  }
  cert.tolerance = options.tau_cert_rel * frob;

  const bool gap_ok = std::abs(cert.duality_gap) <=
                      options.tau_gap * (1.0 + std::abs(cert.primal_objective));
  if (cert.stationarity_residual > options.tau_stat) {
    cert.verdict = Verdict::NotStationary;
  } else if (cert.lambda_min_margin >= -cert.tolerance && gap_ok) {
    cert.verdict = Verdict::CertifiedGlobal;
  } else {
    cert.verdict = Verdict::NotCertified;
  }
  return cert;
}

Eigen::MatrixXd delta_matrix(const SolutionStack& r, const CameraGraph& g) {
  const int n = g.num_vertices();
  const Eigen::MatrixXd m = certificate_matrix(r, g);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  for (int i = 0; i < n; ++i) d.block<3, 3>(3 * i, 3 * i) = r[i].matrix();
  Eigen::MatrixXd lap(3 * n, 3 * n);
  const Eigen::MatrixXd l = g.laplacian();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      lap.block<3, 3>(3 * i, 3 * j) = l(i, j) * Eigen::Matrix3d::Identity();
    }
  }
  return d * m * d.transpose() - lap;
}

namespace {

double spectral_norm(const Eigen::Matrix3d& a) {
  return Eigen::JacobiSVD<Eigen::Matrix3d>(a).singularValues()(0);
}

}  // namespace

SpectralBoundReport spectral_bound_check(const SolutionStack& r,
                                         const CameraGraph& g, double tau_stat) {
  const int n = g.num_vertices();
  if (r.size() != n) throw InputError("solution and graph sizes differ");
  if (lagrange_multiplier(r, g).max_asymmetry() > tau_stat) {
    throw InputError("spectral bound check requires a stationary point");
  }
  SpectralBoundReport rep;
  rep.alpha_max = residual_angles(r, g).max_angle;
  if (rep.alpha_max > std::numbers::pi / 2) {
    throw DomainError("residual bounds assume a max residual of at most pi/2");
  }
  rep.delta = delta_matrix(r, g);

  const double s = std::sin(rep.alpha_max / 2);
  const double eps = 1e-12;
  int d_max = 0;
  rep.diagonal_ok = true;
  rep.offdiag_ok = true;
  for (int i = 0; i < n; ++i) {
    d_max = std::max(d_max, g.degree(i));
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      const double norm = spectral_norm(rep.delta.block<3, 3>(3 * i, 3 * j));
      row += norm;
      if (i == j) {
        const double bound = 2.0 * g.degree(i) * s * s;
        if (norm > bound + eps) rep.diagonal_ok = false;
        if (bound > 0) rep.worst_diagonal_ratio = std::max(rep.worst_diagonal_ratio, norm / bound);
      } else {
        const double a = g.measurement(i, j) ? 1.0 : 0.0;
        const double bound = 2.0 * a * s;
        if (norm > bound + eps) rep.offdiag_ok = false;
        rep.max_offdiag_norm = std::max(rep.max_offdiag_norm, norm);
        if (bound > 0) rep.worst_offdiag_ratio = std::max(rep.worst_offdiag_ratio, norm / bound);
      }
    }
    rep.gershgorin_bound = std::max(rep.gershgorin_bound, row);
  }
  rep.combined_bound = 2.0 * d_max * s * (1.0 + s);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (rep.delta + rep.delta.transpose()), Eigen::EigenvaluesOnly);
  if (n > 0) {
    rep.max_abs_eigenvalue = std::max(std::abs(es.eigenvalues()(0)),
                                      std::abs(es.eigenvalues()(3 * n - 1)));
  }
  rep.eigenvalue_ok = rep.max_abs_eigenvalue <= rep.gershgorin_bound + 1e-10 &&
                      rep.gershgorin_bound <= rep.combined_bound + 1e-10;
  return rep;
}

}  // namespace rotavg
