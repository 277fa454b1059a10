#pragma once

#include "ekphd/geometry.hpp"

namespace ekphd {

/// Visibility region used for adaptive detection and survival probabilities.
/// Scatterers are visible within `sp_visibility_radius` (3-D distance) of the
/// vehicle; LOS and reflection paths while the vehicle is within `max_range`
/// of the base station.
struct FieldOfView {
  Vec3 bs{0.0, 0.0, 40.0};
  double sp_visibility_radius = 50.0;
  double max_range = 200.0;
  double ue_height = 0.0;
};

bool in_fov(const FieldOfView& fov, const Vec4& ue, const Vec3& lm, LandmarkType type);

/// `p_d` inside the field of view, 0 outside.
double detection_probability(const FieldOfView& fov, const Vec4& ue, const Vec3& lm,
                             LandmarkType type, double p_d);

/// `p_s` inside the field of view, 1 outside.
double survival_probability(const FieldOfView& fov, const Vec4& ue, const Vec3& lm,
                            LandmarkType type, double p_s);

}  // namespace ekphd
