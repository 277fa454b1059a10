#include "ekphd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ekphd/association.hpp"
#include "ekphd/errors.hpp"

namespace ekphd {

GospaResult gospa(std::span<const Vec3> truth, std::span<const Vec3> estimate,
                  const GospaParams& params) {
  if (params.alpha != 2.0) throw std::invalid_argument("gospa supports alpha = 2 only");
  if (params.p < 1.0 || params.c <= 0.0) throw std::invalid_argument("gospa needs p >= 1, c > 0");
  const std::size_t n = truth.size();
  const std::size_t m = estimate.size();
  const double cp = std::pow(params.c, params.p);

  // Maximize the saving c^p - d^p over matched pairs; unmatched elements
  // each cost c^p / 2.
  CostMatrix gain;
  gain.n = n;
  gain.m = m;
  gain.values = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n),
                                          static_cast<Eigen::Index>(m + n),
                                          -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = std::min((truth[i] - estimate[j]).norm(), params.c);
      gain.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          cp - std::pow(d, params.p);
    }
    gain.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m + i)) = 0.0;
  }
  const Assignment a = auction_assign(gain);

  double localization = 0.0;
  std::size_t matched = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!a.landmark_to[i]) continue;
    const double d = (truth[i] - estimate[*a.landmark_to[i]]).norm();
    if (d < params.c) {
      localization += std::pow(d, params.p);
      ++matched;
    }
  }
  GospaResult r;
  r.n_missed = n - matched;
  r.n_false = m - matched;
  const double missed = 0.5 * cp * static_cast<double>(r.n_missed);
  const double false_alarm = 0.5 * cp * static_cast<double>(r.n_false);
  const double inv_p = 1.0 / params.p;
  r.localization = std::pow(localization, inv_p);
  r.missed = std::pow(missed, inv_p);
  r.false_alarm = std::pow(false_alarm, inv_p);
  r.total = std::pow(localization + missed + false_alarm, inv_p);
  return r;
}

std::vector<double> rmse_series(const std::vector<std::vector<double>>& runs, bool wrap_angles) {
  if (runs.empty()) return {};
  const std::size_t steps = runs.front().size();
  for (const auto& run : runs) {
    if (run.size() != steps) throw LengthMismatch("error series have different lengths");
  }
  std::vector<double> out(steps, 0.0);
  for (const auto& run : runs) {
    for (std::size_t k = 0; k < steps; ++k) {
      const double e = wrap_angles ? wrap_angle(run[k]) : run[k];
      out[k] += e * e;
    }
  }
  for (double& v : out) v = std::sqrt(v / static_cast<double>(runs.size()));
  return out;
}

}  // namespace ekphd
