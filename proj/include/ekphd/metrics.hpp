#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ekphd/linalg.hpp"

namespace ekphd {

struct GospaParams {
  double p = 2.0;
  double c = 20.0;
  double alpha = 2.0;
};

/// GOSPA distance (alpha = 2) and its decomposition; each part is reported in
/// meters so that total^p = localization^p + missed^p + false_alarm^p.
struct GospaResult {
  double total = 0.0;
  double localization = 0.0;
  double missed = 0.0;
  double false_alarm = 0.0;
  std::size_t n_missed = 0;
  std::size_t n_false = 0;
};

/// X is the reference set, Y the estimate. Only alpha = 2 is supported.
GospaResult gospa(std::span<const Vec3> truth, std::span<const Vec3> estimate,
                  const GospaParams& params = {});

/// sqrt(mean over runs of error^2) per step. With `wrap_angles` set, errors
/// are wrapped to (-pi, pi] before squaring.
std::vector<double> rmse_series(const std::vector<std::vector<double>>& runs,
                                bool wrap_angles = false);

}  // namespace ekphd
