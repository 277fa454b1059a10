#pragma once

#include <Eigen/Dense>

namespace ekphd {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Mat34 = Eigen::Matrix<double, 3, 4>;
using Mat53 = Eigen::Matrix<double, 5, 3>;
using Mat57 = Eigen::Matrix<double, 5, 7>;

template <typename Derived>
typename Derived::PlainObject symmetrize(const Eigen::MatrixBase<Derived>& m) {
  return (0.5 * (m + m.transpose())).eval();
}

/// True when `m` is symmetric within `rel_tol * max(1, |m|_max)` and its
/// smallest eigenvalue is at least `-rel_tol * max(1, trace)`.
template <typename Derived>
bool is_symmetric_psd(const Eigen::MatrixBase<Derived>& m, double rel_tol = 1e-10) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > rel_tol * scale) return false;
  const Eigen::MatrixXd sym = symmetrize(m.derived().template cast<double>());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  const double tr = std::max(1.0, std::abs(sym.trace()));
  return es.eigenvalues().minCoeff() >= -rel_tol * tr;
}

/// Reciprocal condition estimate of a symmetric PSD matrix via its eigenvalues.
template <typename Derived>
double spd_rcond(const Eigen::MatrixBase<Derived>& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(m.derived().template cast<double>()),
                                                    Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (ev.size() == 0) return 1.0;
  const double hi = ev.cwiseAbs().maxCoeff();
  if (hi == 0.0) return 0.0;
  return ev.minCoeff() / hi;
}

}  // namespace ekphd
