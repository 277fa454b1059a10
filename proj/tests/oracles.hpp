// Independent reference computations used by the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ekphd/geometry.hpp"

namespace oracle {

/// Central differences of f around x; `wrap` marks output rows that are angles.
template <int In, int Out>
Eigen::Matrix<double, Out, In> central_diff(
    const std::function<Eigen::Matrix<double, Out, 1>(const Eigen::Matrix<double, In, 1>&)>& f,
    const Eigen::Matrix<double, In, 1>& x, double h, const std::vector<int>& wrap = {}) {
  Eigen::Matrix<double, Out, In> j;
  for (int c = 0; c < In; ++c) {
    auto xp = x;
    auto xm = x;
    xp(c) += h;
    xm(c) -= h;
    Eigen::Matrix<double, Out, 1> d = f(xp) - f(xm);
    for (int r : wrap) d(r) = ekphd::wrap_angle(d(r));
    j.col(c) = d / (2.0 * h);
  }
  return j;
}

/// max |A - B| / max(1, max |B|).
template <typename A, typename B>
double rel_error(const A& a, const B& b) {
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

/// Best tr(A'L) over all assignments of n rows to distinct columns; -inf if
/// no admissible assignment exists.
inline double brute_force_assignment(const Eigen::MatrixXd& l) {
  const int n = static_cast<int>(l.rows());
  const int cols = static_cast<int>(l.cols());
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> col(n, -1);
  std::vector<bool> used(cols, false);
  std::function<void(int, double)> rec = [&](int i, double acc) {
    if (i == n) {
      best = std::max(best, acc);
      return;
    }
    for (int c = 0; c < cols; ++c) {
      if (used[c] || !std::isfinite(l(i, c))) continue;
      used[c] = true;
      rec(i + 1, acc + l(i, c));
      used[c] = false;
    }
  };
  rec(0, 0.0);
  return best;
}

/// GOSPA (alpha = 2) by enumerating every partial assignment X -> Y.
inline double brute_force_gospa(const std::vector<Eigen::Vector3d>& x,
                                 const std::vector<Eigen::Vector3d>& y, double p, double c) {
  const std::size_t nx = x.size();
  const std::size_t ny = y.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> used(ny, false);
  std::function<void(std::size_t, double, std::size_t)> rec = [&](std::size_t i, double acc,
                                                                   std::size_t matched) {
    if (i == nx) {
      const double unmatched = static_cast<double>(nx + ny - 2 * matched);
      best = std::min(best, acc + std::pow(c, p) / 2.0 * unmatched);
      return;
    }
    rec(i + 1, acc, matched);  // x_i unassigned
    for (std::size_t j = 0; j < ny; ++j) {
      if (used[j]) continue;
      const double d = std::min((x[i] - y[j]).norm(), c);
      used[j] = true;
      rec(i + 1, acc + std::pow(d, p), matched + 1);
      used[j] = false;
    }
  };
  rec(0, 0.0, 0);
  return std::pow(best, 1.0 / p);
}

/// Log-density of N(z; mean, cov) via an explicit inverse and determinant.
template <int N>
double gaussian_log_pdf(const Eigen::Matrix<double, N, 1>& r, const Eigen::Matrix<double, N, N>& cov) {
  const double quad = r.dot(cov.inverse() * r);
  return -0.5 * (N * std::log(2.0 * M_PI) + std::log(cov.determinant()) + quad);
}

}  // namespace oracle
