#include "rotavg/sdp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>

#include <Eigen/Eigenvalues>

namespace rotavg {

GramIterate::GramIterate(Eigen::MatrixXd y) : y_(std::move(y)) {
  if (y_.rows() != y_.cols() || y_.rows() % 3 != 0) {
    throw InputError("Gram iterate must be square with a multiple of 3 rows");
  }
  if ((y_ - y_.transpose()).norm() > 1e-12 * std::max(1.0, y_.norm())) {
    throw InputError("Gram iterate must be symmetric");
  }
  if (diagonal_error() > 1e-12) {
    throw InputError("Gram iterate must have identity diagonal blocks");
  }
}

GramIterate GramIterate::Identity(int n) {
  GramIterate g;
  g.y_ = Eigen::MatrixXd::Identity(3 * n, 3 * n);
  return g;
}

GramIterate GramIterate::FromRotations(const SolutionStack& r) {
  const Eigen::MatrixXd rm = r.matrix();
  GramIterate g;
  g.y_ = rm.transpose() * rm;
  for (int i = 0; i < r.size(); ++i) g.y_.block<3, 3>(3 * i, 3 * i).setIdentity();
  return g;
}

void GramIterate::replace_block_column(int k, const Eigen::MatrixXd& s) {
  y_.middleCols<3>(3 * k) = s;
  y_.middleRows<3>(3 * k) = s.transpose();
  y_.block<3, 3>(3 * k, 3 * k).setIdentity();
}

double GramIterate::diagonal_error() const {
  double worst = 0.0;
  for (int i = 0; i < num_blocks(); ++i) {
    worst = std::max(worst,
                     (block(i, i) - Eigen::Matrix3d::Identity()).norm());
  }
  return worst;
}

double GramIterate::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(y_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

void SolverConfig::validate() const {
  if (max_sweeps < 1) throw InputError("max_sweeps must be at least 1");
  if (!(rel_tol > 0.0)) throw InputError("rel_tol must be positive");
}

namespace {

// S = B c pinv(sqrt(c^T B c)) given bc = B c and the 3x3 product c^T B c.
Eigen::MatrixXd closed_form_block(const Eigen::MatrixXd& bc,
                                  const Eigen::Matrix3d& ctbc) {
  Sym3 inv_root;
  try {
    inv_root = pinv_sqrt_psd(Sym3(ctbc));
  } catch (const NotPsdError& e) {
    throw SolverStateError(std::string("block subproblem: ") + e.what());
  }
  return bc * inv_root.matrix();
}

}  // namespace

Eigen::MatrixXd block_update(const Eigen::MatrixXd& b, const Eigen::MatrixXd& a,
                             bool check_psd) {
  if (b.rows() != b.cols() || a.rows() != b.rows() || a.cols() != 3) {
    throw InputError("block_update expects b (m x m) and a (m x 3)");
  }
  if (check_psd && b.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (b + b.transpose()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -So3Tolerances<double>::psd * std::max(1.0, b.norm())) {
      throw SolverStateError("block subproblem matrix is not PSD");
    }
  }
  const Eigen::MatrixXd ba = b * a;
  const Eigen::Matrix3d atba = a.transpose() * ba;
  return closed_form_block(-ba, atba);
}

double relaxation_objective(const GramIterate& y, const BlockMeasurement& m) {
  if (y.num_blocks() != m.num_blocks()) {
    throw InputError("Gram iterate and measurement sizes differ");
  }
  double sum = 0.0;
  for (int i = 0; i < m.num_blocks(); ++i) {
    for (const auto& b : m.row(i)) {
      if (b.col <= i) continue;
      sum += (b.value * y.block(b.col, i)).trace();
    }
  }
  return -2.0 * sum;
}

void bcd_sweep_inplace(GramIterate& y, const BlockMeasurement& m,
                       const std::vector<int>& order) {
  const int n = m.num_blocks();
  if (y.num_blocks() != n) throw InputError("Gram iterate and measurement sizes differ");
  Eigen::MatrixXd bc(3 * n, 3);
  for (int k : order) {
    if (k < 0 || k >= n) throw InputError("sweep order has an out-of-range block");
    // The linear term of block k is -2 tr(c^T S) with c_j = Rtilde_jk, so the
    // subproblem data is a = -c, and only neighbors of k contribute.
    bc.setZero();
    for (const auto& blk : m.row(k)) {
      bc.noalias() += y.matrix().middleCols<3>(3 * blk.col) * blk.value.transpose();
    }
    Eigen::Matrix3d ctbc = Eigen::Matrix3d::Zero();
    for (const auto& blk : m.row(k)) {
      ctbc.noalias() += blk.value * bc.middleRows<3>(3 * blk.col);
    }
    bc.middleRows<3>(3 * k).setZero();
    y.replace_block_column(k, closed_form_block(bc, ctbc));
  }
}

GramIterate bcd_sweep(GramIterate y, const BlockMeasurement& m,
                      const std::vector<int>& order) {
  bcd_sweep_inplace(y, m, order);
  return y;
}

GramIterate spanning_tree_start(const BlockMeasurement& m) {
  const int n = m.num_blocks();
  std::vector<Rotation> r(n);
  std::vector<bool> seen(n, false);
  for (int root = 0; root < n; ++root) {
    if (seen[root]) continue;
    seen[root] = true;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      const int i = q.front();
      q.pop();
      for (const auto& blk : m.row(i)) {
        if (seen[blk.col]) continue;
        seen[blk.col] = true;
        // R_j = R_i R_ij
        r[blk.col] = project_to_so3<double>(r[i].matrix() * blk.value);
        q.push(blk.col);
      }
    }
  }
  return GramIterate::FromRotations(SolutionStack(std::move(r)));
}

namespace {

bool blocks_connected(const BlockMeasurement& m) {
  const int n = m.num_blocks();
  if (n <= 1) return true;
  std::vector<bool> seen(n, false);
  std::vector<int> stack{0};
  seen[0] = true;
  int count = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (const auto& blk : m.row(i)) {
      if (!seen[blk.col]) {
        seen[blk.col] = true;
        ++count;
        stack.push_back(blk.col);
      }
    }
  }
  return count == n;
}

}  // namespace

DdSolution solve_dd(const BlockMeasurement& m, const SolverConfig& cfg) {
  return solve_dd(m, cfg,
                  cfg.spanning_tree_init ? spanning_tree_start(m)
                                         : GramIterate::Identity(m.num_blocks()));
}

DdSolution solve_dd(const BlockMeasurement& m, const SolverConfig& cfg,
                    GramIterate start) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  DdSolution out{std::move(start), {}};
  if (out.y.num_blocks() != m.num_blocks()) {
    throw InputError("initial iterate and measurement sizes differ");
  }
  if (!blocks_connected(m)) {
    out.trace.warnings.push_back(
        "camera graph is disconnected; the relative gauge between components is arbitrary");
  }

  const int n = m.num_blocks();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);

  double prev = relaxation_objective(out.y, m);
  out.trace.initial_objective = prev;
  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    if (cfg.order == SweepOrder::RandomPermutation) {
      std::shuffle(order.begin(), order.end(), rng);
    }
    bcd_sweep_inplace(out.y, m, order);
    const double f = relaxation_objective(out.y, m);
    out.trace.objectives.push_back(f);
    out.trace.sweeps_run = sweep + 1;
    const double decrease = prev - f;
    const double scale = std::abs(prev) > 0.0 ? std::abs(prev) : 1.0;
    prev = f;
    if (decrease / scale < cfg.rel_tol) {
      out.trace.converged = true;
      break;
    }
  }
  out.trace.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

SolutionStack round_solution(const GramIterate& y, int anchor) {
  const int n = y.num_blocks();
  if (anchor < 0 || anchor >= n) throw InputError("anchor vertex out of range");
  std::vector<Rotation> r(n);
  for (int i = 0; i < n; ++i) {
    if (i == anchor) continue;
    try {
      r[i] = project_to_so3<double>(y.block(anchor, i));
    } catch (const DegenerateInputError&) {
      throw RoundingError("block (" + std::to_string(anchor) + ", " +
                          std::to_string(i) +
                          ") of the Gram iterate is rank deficient; try another anchor");
    }
  }
  return SolutionStack(std::move(r));
}

}  // namespace rotavg
