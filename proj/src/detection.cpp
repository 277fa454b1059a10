#include "ekphd/detection.hpp"

namespace ekphd {

bool in_fov(const FieldOfView& fov, const Vec4& ue, const Vec3& lm, LandmarkType type) {
  const Vec3 p(ue(0), ue(1), fov.ue_height);
  if (type == LandmarkType::SP) return (lm - p).norm() <= fov.sp_visibility_radius;
  return (fov.bs - p).norm() <= fov.max_range;
}

double detection_probability(const FieldOfView& fov, const Vec4& ue, const Vec3& lm,
                             LandmarkType type, double p_d) {
  return in_fov(fov, ue, lm, type) ? p_d : 0.0;
}

double survival_probability(const FieldOfView& fov, const Vec4& ue, const Vec3& lm,
                            LandmarkType type, double p_s) {
  return in_fov(fov, ue, lm, type) ? p_s : 1.0;
}

}  // namespace ekphd
