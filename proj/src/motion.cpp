#include "ekphd/motion.hpp"

#include <cmath>

#include "ekphd/geometry.hpp"

namespace ekphd {

namespace {

// Displacement along the chord and its direction for one interval.
struct Chord {
  double length;
  double heading;
};

Chord chord(double heading, const MotionParams& p) {
  if (std::abs(p.turn_rate) < kStraightLineTurnRate) {
    return {p.speed * p.dt, heading};
  }
  const double half = 0.5 * p.turn_rate * p.dt;
  return {2.0 * p.speed / p.turn_rate * std::sin(half), heading + half};
}

}  // namespace

Vec4 ct_transition(const Vec4& x, const MotionParams& p) {
  const Chord c = chord(x(2), p);
  Vec4 out;
  out(0) = x(0) + c.length * std::cos(c.heading);
  out(1) = x(1) + c.length * std::sin(c.heading);
  out(2) = wrap_angle(x(2) + p.turn_rate * p.dt);
  out(3) = x(3);
  return out;
}

Mat4 ct_jacobian(const Vec4& x, const MotionParams& p) {
  const Chord c = chord(x(2), p);
  Mat4 f = Mat4::Identity();
  f(0, 2) = -c.length * std::sin(c.heading);
  f(1, 2) = c.length * std::cos(c.heading);
  return f;
}

VehicleState predict_vehicle(const VehicleState& s, const MotionParams& p) {
  const Mat4 f = ct_jacobian(s.mean, p);
  VehicleState out;
  out.mean = ct_transition(s.mean, p);
  out.cov = symmetrize(f * s.cov * f.transpose() + p.process_noise);
  return out;
}

}  // namespace ekphd
