#pragma once

// Rotation-group kernels and closed-form 3x3 symmetric matrix functions.
//
// Everything here is templated on the scalar type and header-only. The
// double instantiations are aliased as Rotation, Sym3 and SymEigen3.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "rotavg/errors.hpp"

namespace rotavg {

template <typename Scalar>
struct So3Tolerances {
  // Frobenius tolerance on R^T R - I and on det(R) - 1.
  static constexpr Scalar orth = Scalar(1e-9);
  // Relative eigenvalue / singular value cutoff.
  static constexpr Scalar rank = Scalar(1e-10);
  // PSD acceptance, relative to the Frobenius norm.
  static constexpr Scalar psd = Scalar(1e-8);
  // Relative eigenvalue separation below which the closed-form
  // eigendecomposition hands over to Jacobi iteration.
  static constexpr Scalar separation = Scalar(1e-6);
};

template <typename Scalar>
Scalar orthogonality_error(const Eigen::Matrix<Scalar, 3, 3>& m) {
  const Scalar orth =
      (m.transpose() * m - Eigen::Matrix<Scalar, 3, 3>::Identity()).norm();
  using std::abs;
  return std::max(orth, abs(m.determinant() - Scalar(1)));
}

/// A 3x3 special orthogonal matrix.
///
/// Construction from a raw matrix validates orthogonality and a positive
/// determinant to So3Tolerances::orth. No silent repair happens here; use
/// project_to_so3 to obtain the nearest rotation of an arbitrary matrix.
template <typename Scalar>
class RotationT {
 public:
  using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

  RotationT() : m_(Matrix3::Identity()) {}

  explicit RotationT(const Matrix3& m) : m_(m) {
    if (!m.allFinite() ||
        orthogonality_error(m) > So3Tolerances<Scalar>::orth) {
      throw InputError("matrix is not a rotation");
    }
  }

  static RotationT Identity() { return RotationT(); }

  // Caller guarantees m is a rotation to working precision (e.g. a product
  // of rotations).
  static RotationT Unchecked(const Matrix3& m) {
    RotationT r;
    r.m_ = m;
    return r;
  }

  const Matrix3& matrix() const { return m_; }
  Scalar operator()(int i, int j) const { return m_(i, j); }

  RotationT transpose() const { return Unchecked(m_.transpose()); }
  RotationT inverse() const { return transpose(); }

  friend RotationT operator*(const RotationT& a, const RotationT& b) {
    return Unchecked(a.m_ * b.m_);
  }

  friend bool operator==(const RotationT& a, const RotationT& b) {
    return a.m_ == b.m_;
  }

 private:
  Matrix3 m_;
};

/// A 3x3 symmetric matrix, symmetrized on construction.
template <typename Scalar>
class Sym3T {
 public:
  using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

  Sym3T() : m_(Matrix3::Zero()) {}
  explicit Sym3T(const Matrix3& m) : m_(Scalar(0.5) * (m + m.transpose())) {}

  static Sym3T Identity() { return Sym3T(Matrix3::Identity()); }

  const Matrix3& matrix() const { return m_; }
  Scalar operator()(int i, int j) const { return m_(i, j); }

 private:
  Matrix3 m_;
};

template <typename Scalar>
struct SymEigen3T {
  Eigen::Matrix<Scalar, 3, 1> values;   // ascending
  Eigen::Matrix<Scalar, 3, 3> vectors;  // orthonormal columns
  bool used_jacobi = false;
};

using Rotation = RotationT<double>;
using Sym3 = Sym3T<double>;
using SymEigen3 = SymEigen3T<double>;

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> skew(const Eigen::Matrix<Scalar, 3, 1>& w) {
  Eigen::Matrix<Scalar, 3, 3> k;
  k << Scalar(0), -w.z(), w.y(),  //
      w.z(), Scalar(0), -w.x(),   //
      -w.y(), w.x(), Scalar(0);
  return k;
}

/// Rodrigues' formula. The axis must have unit norm to 1e-12.
template <typename Scalar>
RotationT<Scalar> from_axis_angle(const Eigen::Matrix<Scalar, 3, 1>& axis,
                                  Scalar angle) {
  using std::abs;
  using std::cos;
  using std::sin;
  if (!axis.allFinite() || abs(axis.norm() - Scalar(1)) > Scalar(1e-12)) {
    throw InputError("rotation axis must be a unit vector");
  }
  const Eigen::Matrix<Scalar, 3, 3> k = skew(axis);
  const Eigen::Matrix<Scalar, 3, 3> r = Eigen::Matrix<Scalar, 3, 3>::Identity() +
                                        sin(angle) * k +
                                        (Scalar(1) - cos(angle)) * k * k;
  return RotationT<Scalar>::Unchecked(r);
}

/// exp([w]_x) for an arbitrary tangent vector.
template <typename Scalar>
RotationT<Scalar> exp_so3(const Eigen::Matrix<Scalar, 3, 1>& w) {
  const Scalar theta = w.norm();
  if (theta == Scalar(0)) return RotationT<Scalar>::Identity();
  return from_axis_angle<Scalar>(w / theta, theta);
}

/// Rotation angle in [0, pi].
template <typename Scalar>
Scalar rotation_angle(const RotationT<Scalar>& r) {
  using std::acos;
  const Scalar c = (r.matrix().trace() - Scalar(1)) / Scalar(2);
  return acos(std::clamp(c, Scalar(-1), Scalar(1)));
}

/// Frobenius distance between two rotations.
template <typename Scalar>
Scalar chordal_distance(const RotationT<Scalar>& r, const RotationT<Scalar>& s) {
  return (r.matrix() - s.matrix()).norm();
}

/// Nearest rotation in Frobenius norm (special orthogonal polar factor).
template <typename Scalar>
RotationT<Scalar> project_to_so3(const Eigen::Matrix<Scalar, 3, 3>& m) {
  if (!m.allFinite()) throw DegenerateInputError("matrix has non-finite entries");
  const Eigen::JacobiSVD<Eigen::Matrix<Scalar, 3, 3>> svd(
      m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(0) == Scalar(0) || sv(2) <= So3Tolerances<Scalar>::rank * sv(0)) {
    throw DegenerateInputError("cannot project a rank-deficient matrix to SO(3)");
  }
  const Eigen::Matrix<Scalar, 3, 3>& u = svd.matrixU();
  const Eigen::Matrix<Scalar, 3, 3>& v = svd.matrixV();
  Eigen::Matrix<Scalar, 3, 1> d(Scalar(1), Scalar(1),
                                (u * v.transpose()).determinant() < Scalar(0)
                                    ? Scalar(-1)
                                    : Scalar(1));
  return RotationT<Scalar>::Unchecked(u * d.asDiagonal() * v.transpose());
}

namespace detail {

// Cyclic Jacobi eigenvalue iteration for a symmetric 3x3 matrix.
template <typename Scalar>
SymEigen3T<Scalar> jacobi_sym3(Eigen::Matrix<Scalar, 3, 3> a) {
  using std::abs;
  using std::sqrt;
  Eigen::Matrix<Scalar, 3, 3> v = Eigen::Matrix<Scalar, 3, 3>::Identity();
  const Scalar scale = a.norm();
  for (int sweep = 0; sweep < 64; ++sweep) {
    const Scalar off = sqrt(a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) +
                            a(1, 2) * a(1, 2));
    if (off <= std::numeric_limits<Scalar>::epsilon() * scale * Scalar(1e-2) ||
        off == Scalar(0)) {
      break;
    }
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a(p, q) == Scalar(0)) continue;
        const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * a(p, q));
        const Scalar t = (theta >= Scalar(0) ? Scalar(1) : Scalar(-1)) /
                         (abs(theta) + sqrt(theta * theta + Scalar(1)));
        const Scalar c = Scalar(1) / sqrt(t * t + Scalar(1));
        const Scalar s = t * c;
        Eigen::Matrix<Scalar, 3, 3> g = Eigen::Matrix<Scalar, 3, 3>::Identity();
        g(p, p) = c;
        g(q, q) = c;
        g(p, q) = s;
        g(q, p) = -s;
        a = g.transpose() * a * g;
        a(p, q) = a(q, p) = Scalar(0);
        v = v * g;
      }
    }
  }
  SymEigen3T<Scalar> out;
  std::array<int, 3> idx{0, 1, 2};
  std::sort(idx.begin(), idx.end(),
            [&](int x, int y) { return a(x, x) < a(y, y); });
  for (int k = 0; k < 3; ++k) {
    out.values(k) = a(idx[k], idx[k]);
    out.vectors.col(k) = v.col(idx[k]);
  }
  out.used_jacobi = true;
  return out;
}

// Unit eigenvector for an eigenvalue of multiplicity one, from the largest
// cross product of two rows of (a - lambda I).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> isolated_eigenvector(
    const Eigen::Matrix<Scalar, 3, 3>& a, Scalar lambda) {
  const Eigen::Matrix<Scalar, 3, 3> m =
      a - lambda * Eigen::Matrix<Scalar, 3, 3>::Identity();
  const Eigen::Matrix<Scalar, 3, 1> r0 = m.row(0).transpose();
  const Eigen::Matrix<Scalar, 3, 1> r1 = m.row(1).transpose();
  const Eigen::Matrix<Scalar, 3, 1> r2 = m.row(2).transpose();
  const std::array<Eigen::Matrix<Scalar, 3, 1>, 3> c{r0.cross(r1), r0.cross(r2),
                                                     r1.cross(r2)};
  int best = 0;
  for (int k = 1; k < 3; ++k) {
    if (c[k].squaredNorm() > c[best].squaredNorm()) best = k;
  }
  return c[best].normalized();
}

}  // namespace detail

/// Eigendecomposition of a symmetric 3x3 matrix.
///
/// Eigenvalues come from the trigonometric solution of the characteristic
/// cubic. The eigenvector of the best-isolated eigenvalue is taken from a
/// row cross product, and the remaining pair from an exact 2x2 rotation in
/// its orthogonal complement. When two eigenvalues are closer than
/// So3Tolerances::separation * ||s||_F the routine uses Jacobi iteration.
template <typename Scalar>
SymEigen3T<Scalar> eigen_sym3(const Sym3T<Scalar>& s) {
  using std::abs;
  using std::acos;
  using std::cos;
  using std::sqrt;
  using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
  using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

  const Matrix3& a = s.matrix();
  const Scalar norm = a.norm();
  if (norm == Scalar(0)) {
    SymEigen3T<Scalar> out;
    out.values.setZero();
    out.vectors.setIdentity();
    return out;
  }

  const Matrix3 as = a / norm;
  const Scalar q = as.trace() / Scalar(3);
  const Scalar p1 = as(0, 1) * as(0, 1) + as(0, 2) * as(0, 2) + as(1, 2) * as(1, 2);
  const Scalar p2 = (as(0, 0) - q) * (as(0, 0) - q) +
                    (as(1, 1) - q) * (as(1, 1) - q) +
                    (as(2, 2) - q) * (as(2, 2) - q) + Scalar(2) * p1;
  const Scalar p = sqrt(p2 / Scalar(6));
  if (p == Scalar(0)) return detail::jacobi_sym3<Scalar>(a);

  const Matrix3 b = (as - q * Matrix3::Identity()) / p;
  const Scalar r = std::clamp(b.determinant() / Scalar(2), Scalar(-1), Scalar(1));
  const Scalar phi = acos(r) / Scalar(3);
  const Scalar two_pi_3 = Scalar(2) * std::numbers::pi_v<Scalar> / Scalar(3);
  const Scalar hi = q + Scalar(2) * p * cos(phi);
  const Scalar lo = q + Scalar(2) * p * cos(phi + two_pi_3);
  const Scalar mid = Scalar(3) * q - hi - lo;

  const Scalar min_gap = std::min(hi - mid, mid - lo);
  if (min_gap < So3Tolerances<Scalar>::separation) {
    return detail::jacobi_sym3<Scalar>(a);
  }

  // Isolated eigenvalue first; the pair left over is solved in 2D.
  const bool hi_isolated = (hi - mid) >= (mid - lo);
  const Vector3 v0 = detail::isolated_eigenvector<Scalar>(as, hi_isolated ? hi : lo);

  Vector3 u = abs(v0.x()) > abs(v0.y()) ? Vector3(-v0.z(), Scalar(0), v0.x())
                                        : Vector3(Scalar(0), v0.z(), -v0.y());
  u.normalize();
  const Vector3 w = v0.cross(u);

  const Scalar b00 = u.dot(as * u);
  const Scalar b01 = u.dot(as * w);
  const Scalar b11 = w.dot(as * w);
  Scalar c = Scalar(1);
  Scalar sn = Scalar(0);
  if (b01 != Scalar(0)) {
    const Scalar theta = (b11 - b00) / (Scalar(2) * b01);
    const Scalar t = (theta >= Scalar(0) ? Scalar(1) : Scalar(-1)) /
                     (abs(theta) + sqrt(theta * theta + Scalar(1)));
    c = Scalar(1) / sqrt(t * t + Scalar(1));
    sn = t * c;
  }
  const Vector3 e1 = c * u - sn * w;
  const Vector3 e2 = sn * u + c * w;

  std::array<Vector3, 3> vecs{v0, e1, e2};
  std::array<Scalar, 3> vals{};
  for (int k = 0; k < 3; ++k) vals[k] = vecs[k].dot(as * vecs[k]);
  std::array<int, 3> idx{0, 1, 2};
  std::sort(idx.begin(), idx.end(), [&](int x, int y) { return vals[x] < vals[y]; });

  SymEigen3T<Scalar> out;
  for (int k = 0; k < 3; ++k) {
    out.values(k) = vals[idx[k]] * norm;
    out.vectors.col(k) = vecs[idx[k]];
  }
  return out;
}

/// Principal square root of a PSD matrix. Eigenvalues in [-tau_psd, 0) are
/// clamped to zero; anything more negative is rejected.
template <typename Scalar>
Sym3T<Scalar> sqrt_psd(const Sym3T<Scalar>& s) {
  using std::sqrt;
  const SymEigen3T<Scalar> e = eigen_sym3(s);
  const Scalar tol = So3Tolerances<Scalar>::psd * s.matrix().norm();
  if (e.values(0) < -tol) {
    throw NotPsdError("matrix is not positive semidefinite (min eigenvalue " +
                      std::to_string(double(e.values(0))) + ")");
  }
  Eigen::Matrix<Scalar, 3, 1> d;
  for (int k = 0; k < 3; ++k) d(k) = sqrt(std::max(e.values(k), Scalar(0)));
  return Sym3T<Scalar>(e.vectors * d.asDiagonal() * e.vectors.transpose());
}

/// Moore-Penrose pseudoinverse of a PSD matrix.
template <typename Scalar>
Sym3T<Scalar> pinv_psd(const Sym3T<Scalar>& s) {
  const SymEigen3T<Scalar> e = eigen_sym3(s);
  const Scalar top = e.values(2);
  Eigen::Matrix<Scalar, 3, 1> d = Eigen::Matrix<Scalar, 3, 1>::Zero();
  if (top > Scalar(0)) {
    const Scalar cutoff = So3Tolerances<Scalar>::rank * top;
    for (int k = 0; k < 3; ++k) {
      if (e.values(k) > cutoff) d(k) = Scalar(1) / e.values(k);
    }
  }
  return Sym3T<Scalar>(e.vectors * d.asDiagonal() * e.vectors.transpose());
}

/// pinv(sqrt(s)) for PSD s, computed from the eigenvalues of s so that the
/// rank cutoff applies to s itself: a rounding-level null eigenvalue e of s
/// would otherwise survive as sqrt(e) and be inverted.
template <typename Scalar>
Sym3T<Scalar> pinv_sqrt_psd(const Sym3T<Scalar>& s) {
  using std::sqrt;
  const SymEigen3T<Scalar> e = eigen_sym3(s);
  const Scalar tol = So3Tolerances<Scalar>::psd * s.matrix().norm();
  if (e.values(0) < -tol) {
    throw NotPsdError("matrix is not positive semidefinite (min eigenvalue " +
                      std::to_string(double(e.values(0))) + ")");
  }
  const Scalar top = e.values(2);
  Eigen::Matrix<Scalar, 3, 1> d = Eigen::Matrix<Scalar, 3, 1>::Zero();
  if (top > Scalar(0)) {
    const Scalar cutoff = So3Tolerances<Scalar>::rank * top;
    for (int k = 0; k < 3; ++k) {
      if (e.values(k) > cutoff) d(k) = Scalar(1) / sqrt(e.values(k));
    }
  }
  return Sym3T<Scalar>(e.vectors * d.asDiagonal() * e.vectors.transpose());
}

}  // namespace rotavg
