#pragma once

#include "ekphd/linalg.hpp"

namespace ekphd {

/// Gaussian belief over the vehicle state [x (m), y (m), heading (rad), clock bias (m)].
struct VehicleState {
  Vec4 mean = Vec4::Zero();
  Mat4 cov = Mat4::Zero();
};

/// Coordinated-turn inputs for one sampling interval. Speed and turn rate are
/// treated as exact (supplied by the vehicle), only `process_noise` is uncertain.
struct MotionParams {
  double speed = 0.0;      // m/s
  double turn_rate = 0.0;  // rad/s
  double dt = 0.5;         // s
  Mat4 process_noise = Mat4::Zero();
};

/// Below this turn rate the straight-line limit is used.
inline constexpr double kStraightLineTurnRate = 1e-8;

Vec4 ct_transition(const Vec4& x, const MotionParams& p);
Mat4 ct_jacobian(const Vec4& x, const MotionParams& p);
VehicleState predict_vehicle(const VehicleState& s, const MotionParams& p);

}  // namespace ekphd
