#include "rotavg/local.hpp"

#include <chrono>
#include <cmath>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace rotavg {

namespace {

// (M_12 - M_21, M_20 - M_02, M_01 - M_10), so that tr([w]_x M) = w . vee(M).
Eigen::Vector3d vee_antisym(const Eigen::Matrix3d& m) {
  return {m(1, 2) - m(2, 1), m(2, 0) - m(0, 2), m(0, 1) - m(1, 0)};
}

// d vec(X) / d w for X = [w]_x A: rows 3c..3c+2 are -[a_c]_x.
Eigen::Matrix<double, 9, 3> left_jacobian(const Eigen::Matrix3d& a) {
  Eigen::Matrix<double, 9, 3> j;
  for (int c = 0; c < 3; ++c) {
    j.middleRows<3>(3 * c) = -skew<double>(a.col(c));
  }
  return j;
}

}  // namespace

void LMConfig::validate() const {
  if (max_iters <= 0 || !(grad_tol > 0) || !(initial_damping > 0)) {
    throw InputError("LM configuration values must be positive");
  }
  if (!(damping_up > 1) || !(damping_down > 0 && damping_down < 1)) {
    throw InputError("LM damping factors must satisfy up > 1 and 0 < down < 1");
  }
}

Eigen::VectorXd lm_gradient(const CameraGraph& g, const SolutionStack& r) {
  const int n = g.num_vertices();
  if (r.size() != n) throw InputError("solution and graph sizes differ");
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(3 * n);
  for (const Edge& e : g.edges()) {
    const Eigen::Matrix3d a = r[e.i].matrix() * e.rotation.matrix();
    const Eigen::Matrix3d x = a - r[e.j].matrix();
    grad.segment<3>(3 * e.i) += 2.0 * vee_antisym(a * x.transpose());
    grad.segment<3>(3 * e.j) -= 2.0 * vee_antisym(r[e.j].matrix() * x.transpose());
  }
  return grad;
}

LMResult lm_solve(const CameraGraph& g, const SolutionStack& init,
                  const LMConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int n = g.num_vertices();
  if (init.size() != n) throw InputError("initial solution and graph sizes differ");

  LMResult out;
  out.solution = init;
  double cost = chordal_cost(out.solution, g);
  out.cost_trace.push_back(cost);
  double damping = cfg.initial_damping;

  // Unknowns are the tangent vectors of vertices 1..n-1.
  const int dim = 3 * (n - 1);
  auto var = [](int v) { return 3 * (v - 1); };

  Eigen::VectorXd grad = lm_gradient(g, out.solution);
  while (out.iterations < cfg.max_iters) {
    if (grad.lpNorm<Eigen::Infinity>() < cfg.grad_tol) {
      out.converged = true;
      break;
    }
    if (dim == 0) break;
    ++out.iterations;

    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    for (const Edge& e : g.edges()) {
      const Eigen::Matrix3d a = out.solution[e.i].matrix() * e.rotation.matrix();
      const Eigen::Matrix3d x = a - out.solution[e.j].matrix();
      const Eigen::Map<const Eigen::Matrix<double, 9, 1>> xv(x.data());
      // Column-major vec, matching left_jacobian's layout.
      const Eigen::Matrix<double, 9, 3> ji = left_jacobian(a);
      const Eigen::Matrix<double, 9, 3> jj = -left_jacobian(out.solution[e.j].matrix());
      const int blocks[2] = {e.i, e.j};
      const Eigen::Matrix<double, 9, 3>* jac[2] = {&ji, &jj};
      for (int p = 0; p < 2; ++p) {
        if (blocks[p] == 0) continue;
        rhs.segment<3>(var(blocks[p])) -= jac[p]->transpose() * xv;
        for (int q = 0; q < 2; ++q) {
          if (blocks[q] == 0) continue;
          const Eigen::Matrix3d h = jac[p]->transpose() * (*jac[q]);
          for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
              trip.emplace_back(var(blocks[p]) + r, var(blocks[q]) + c, h(r, c));
            }
          }
        }
      }
    }
    Eigen::SparseMatrix<double> h(dim, dim);
    h.setFromTriplets(trip.begin(), trip.end());

    bool accepted = false;
    while (!accepted && out.iterations <= cfg.max_iters) {
      Eigen::SparseMatrix<double> damped = h;
      for (int k = 0; k < dim; ++k) damped.coeffRef(k, k) += damping;
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(damped);
      if (solver.info() == Eigen::Success) {
        const Eigen::VectorXd step = solver.solve(rhs);
        SolutionStack trial = out.solution;
        for (int v = 1; v < n; ++v) {
          trial[v] = Rotation::Unchecked(
              exp_so3<double>(step.segment<3>(var(v))).matrix() * trial[v].matrix());
        }
        const double trial_cost = chordal_cost(trial, g);
        if (trial_cost < cost) {
          out.solution = std::move(trial);
          cost = trial_cost;
          out.cost_trace.push_back(cost);
          damping = std::max(damping * cfg.damping_down, 1e-12);
          accepted = true;
          break;
        }
      }
      damping *= cfg.damping_up;
      if (damping > 1e16) break;
      ++out.iterations;
    }
    if (!accepted) break;
    grad = lm_gradient(g, out.solution);
  }
  for (int v = 0; v < n; ++v) {
    out.solution[v] = project_to_so3<double>(out.solution[v].matrix());
  }
  out.gradient_norm = lm_gradient(g, out.solution).lpNorm<Eigen::Infinity>();
  if (out.gradient_norm < cfg.grad_tol) out.converged = true;
  out.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace rotavg
