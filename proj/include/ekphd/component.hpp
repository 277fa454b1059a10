#pragma once

#include <vector>

#include "ekphd/geometry.hpp"

namespace ekphd {

/// One term of the Gaussian-mixture map intensity. Weights are kept in log form.
struct GaussianComponent {
  double log_w = 0.0;
  Vec3 mean = Vec3::Zero();
  Mat3 cov = Mat3::Identity();
  LandmarkType type = LandmarkType::VA;
};

struct MapPhd {
  std::vector<GaussianComponent> components;
};

}  // namespace ekphd
