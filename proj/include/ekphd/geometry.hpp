#pragma once

#include <string_view>

#include "ekphd/linalg.hpp"

namespace ekphd {

/// Source of a propagation path: line of sight to the base station, a specular
/// reflection parameterized by its virtual anchor, or a scattering point.
enum class LandmarkType { BS, VA, SP };

std::string_view to_string(LandmarkType t);

/// [range incl. clock bias (m), DOA azimuth, DOA elevation, DOD azimuth, DOD elevation].
/// All measurements share one 5x5 noise covariance.
using Measurement = Vec5;

struct LandmarkEstimate {
  Vec3 pos = Vec3::Zero();
  LandmarkType type = LandmarkType::VA;
};

/// Norm below which a direction vector is treated as degenerate.
inline constexpr double kDegenerateNorm = 1e-9;

/// Wraps to the half-open interval (-pi, pi].
double wrap_angle(double theta);

/// Measurement difference with the four angle components wrapped.
Vec5 measurement_residual(const Vec5& z, const Vec5& predicted);

/// Point on the reflecting plane (bisector of `bs` and `va`) where the path
/// from `p` toward the virtual anchor crosses it.
Vec3 incidence_point(const Vec3& p, const Vec3& bs, const Vec3& va);

/// Noise-free measurement of landmark `lm` seen from vehicle state `ue`.
/// For `LandmarkType::BS` the landmark argument is ignored and `bs` is used.
Vec5 measure(const Vec4& ue, const Vec3& lm, LandmarkType type, const Vec3& bs,
             double ue_height = 0.0);

/// d measure / d [x, y, heading, bias, lm_x, lm_y, lm_z]. Landmark columns are
/// zero for line-of-sight paths.
Mat57 measurement_jacobian(const Vec4& ue, const Vec3& lm, LandmarkType type, const Vec3& bs,
                           double ue_height = 0.0);

/// Landmark position implied by one measurement and the vehicle mean `m`.
Vec3 birth_mean(const Vec5& z, const Vec4& m, const Vec3& bs, LandmarkType type,
                double ue_height = 0.0);

/// d birth_mean / d m (3x4), closed form.
Mat34 birth_mean_jacobian(const Vec5& z, const Vec4& m, const Vec3& bs, LandmarkType type,
                          double ue_height = 0.0);

/// (G' Sigma^-1 G)^-1 + A P A' with G the landmark block of the measurement
/// Jacobian at the birth mean and A = birth_mean_jacobian.
Mat3 birth_covariance(const Vec5& z, const Vec4& m, const Mat4& ue_cov, const Mat5& meas_cov,
                      const Vec3& bs, LandmarkType type, double ue_height = 0.0);

}  // namespace ekphd
