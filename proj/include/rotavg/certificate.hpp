#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rotavg/problem.hpp"

namespace rotavg {

/// Closed-form Lagrange multiplier blocks Lambda_i = sum_j R_ij R_j^T R_i.
///
/// The blocks are kept unsymmetrized; at a stationary point they are
/// symmetric and the per-block asymmetry measures how far from stationary
/// the input is.
struct Multiplier {
  std::vector<Eigen::Matrix3d> blocks;
  std::vector<double> asymmetry;  // ||Lambda_i - Lambda_i^T||_F

  double max_asymmetry() const;
  double trace() const;
};

enum class Verdict { CertifiedGlobal, NotCertified, NotStationary };

std::string to_string(Verdict v);

struct Certificate {
  double lambda_min_margin = 0.0;    // lambda_min of sym(Lambda - Rtilde)
  double duality_gap = 0.0;          // primal - (-tr Lambda)
  double primal_objective = 0.0;
  double dual_objective = 0.0;       // -tr Lambda
  double max_residual = 0.0;         // radians
  double apriori_bound = 0.0;        // radians
  std::optional<double> cycle_bound; // pi / n, cycle graphs only
  double stationarity_residual = 0.0;
  double tolerance = 0.0;            // tau_cert actually applied
  bool used_lanczos = false;
  Verdict verdict = Verdict::NotCertified;
};

struct CertifyOptions {
  double tau_cert_rel = 1e-8;  // relative to ||Lambda - Rtilde||_F
  double tau_stat = 1e-6;
  double tau_gap = 1e-7;
  // 3n above this uses deflated Lanczos instead of a dense eigensolve.
  int dense_limit = 3000;
  int lanczos_max_iter = 2000;
};

Multiplier lagrange_multiplier(const SolutionStack& r, const CameraGraph& g);

/// Dense symmetrized Lambda - Rtilde.
Eigen::MatrixXd certificate_matrix(const SolutionStack& r, const CameraGraph& g);

Certificate certify(const SolutionStack& r, const CameraGraph& g,
                    const CertifyOptions& options = {});

/// Residual-based eigenvalue bounds on the deviation from L_G (x) I_3.
struct SpectralBoundReport {
  double alpha_max = 0.0;  // observed max residual angle
  // D_R (Lambda - Rtilde) D_R^T - L_G (x) I_3
  Eigen::MatrixXd delta;

  double worst_diagonal_ratio = 0.0;  // max_i ||Delta_ii|| / (2 d_i sin^2(a/2))
  double worst_offdiag_ratio = 0.0;   // max_ij ||Delta_ij|| / (2 sin(a/2))
  double max_offdiag_norm = 0.0;
  double gershgorin_bound = 0.0;      // max_i sum_j ||Delta_ij||
  double combined_bound = 0.0;        // 2 d_max s (1 + s), s = sin(a/2)
  double max_abs_eigenvalue = 0.0;    // |lambda|_max(Delta)

  bool diagonal_ok = false;
  bool offdiag_ok = false;
  bool eigenvalue_ok = false;
  bool all_ok() const { return diagonal_ok && offdiag_ok && eigenvalue_ok; }
};

Eigen::MatrixXd delta_matrix(const SolutionStack& r, const CameraGraph& g);

// Requires a stationary input with max residual <= pi/2.
SpectralBoundReport spectral_bound_check(const SolutionStack& r,
                                         const CameraGraph& g,
                                         double tau_stat = 1e-6);

}  // namespace rotavg
