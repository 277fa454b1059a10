#include "ekphd/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ekphd/errors.hpp"

namespace ekphd {

namespace {

using Row3 = Eigen::RowVector3d;

struct Angles {
  double azimuth;
  double elevation;
  Row3 d_azimuth;    // gradient w.r.t. the direction vector
  Row3 d_elevation;
};

Angles angles_of(const Vec3& e, const char* what) {
  const double horiz2 = e(0) * e(0) + e(1) * e(1);
  const double horiz = std::sqrt(horiz2);
  const double norm2 = horiz2 + e(2) * e(2);
  if (horiz < kDegenerateNorm) {
    throw DegenerateGeometry(std::string(what) + " direction has no horizontal component");
  }
  Angles a;
  a.azimuth = std::atan2(e(1), e(0));
  a.elevation = std::atan2(e(2), horiz);
  a.d_azimuth << -e(1) / horiz2, e(0) / horiz2, 0.0;
  a.d_elevation << -e(0) * e(2) / (horiz * norm2), -e(1) * e(2) / (horiz * norm2), horiz / norm2;
  return a;
}

double checked_norm(const Vec3& v, const char* what) {
  const double n = v.norm();
  if (n < kDegenerateNorm) throw DegenerateGeometry(std::string("zero-length ") + what);
  return n;
}

Vec3 position_of(const Vec4& ue, double ue_height) { return {ue(0), ue(1), ue_height}; }

// Reflection across the plane bisecting bs and va, plus the side indicator of
// the vehicle relative to that plane (sign of 1 - t along p -> va).
struct Mirror {
  Vec3 normal;  // unit, from bs toward va
  double separation;
  double side;
  Mat3 reflect() const { return Mat3::Identity() - 2.0 * normal * normal.transpose(); }
};

Mirror mirror_of(const Vec3& p, const Vec3& bs, const Vec3& va) {
  Mirror m;
  m.separation = checked_norm(va - bs, "base station to virtual anchor");
  m.normal = (va - bs) / m.separation;
  const double denom = (va - p).dot(m.normal);
  if (std::abs(denom) < kDegenerateNorm) {
    throw DegenerateGeometry("reflection path parallel to the reflecting plane");
  }
  const double t = (0.5 * (bs + va) - p).dot(m.normal) / denom;
  m.side = (1.0 - t) >= 0.0 ? 1.0 : -1.0;
  return m;
}

}  // namespace

std::string_view to_string(LandmarkType t) {
  switch (t) {
    case LandmarkType::BS: return "BS";
    case LandmarkType::VA: return "VA";
    case LandmarkType::SP: return "SP";
  }
  return "?";
}

double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(theta + std::numbers::pi, two_pi);
  if (r <= 0.0) r += two_pi;
  return r - std::numbers::pi;
}

Vec5 measurement_residual(const Vec5& z, const Vec5& predicted) {
  Vec5 r = z - predicted;
  for (int i = 1; i < 5; ++i) r(i) = wrap_angle(r(i));
  return r;
}

Vec3 incidence_point(const Vec3& p, const Vec3& bs, const Vec3& va) {
  const Vec3 u = (va - bs) / checked_norm(va - bs, "base station to virtual anchor");
  const double denom = (va - p).dot(u);
  if (std::abs(denom) < kDegenerateNorm) {
    throw DegenerateGeometry("reflection path parallel to the reflecting plane");
  }
  const double t = (0.5 * (bs + va) - p).dot(u) / denom;
  return p + t * (va - p);
}

Vec5 measure(const Vec4& ue, const Vec3& lm, LandmarkType type, const Vec3& bs,
             double ue_height) {
  const Vec3 p = position_of(ue, ue_height);
  double range = 0.0;
  Vec3 arrival;
  Vec3 departure;
  switch (type) {
    case LandmarkType::BS:
      arrival = bs - p;
      range = checked_norm(arrival, "line-of-sight path");
      departure = p - bs;
      break;
    case LandmarkType::VA:
      arrival = lm - p;
      range = checked_norm(arrival, "vehicle to virtual anchor");
      departure = incidence_point(p, bs, lm) - bs;
      checked_norm(departure, "base station to incidence point");
      break;
    case LandmarkType::SP:
      arrival = lm - p;
      departure = lm - bs;
      range = checked_norm(departure, "base station to scatterer") +
              checked_norm(arrival, "scatterer to vehicle");
      break;
  }
  const Angles doa = angles_of(arrival, "arrival");
  const Angles dod = angles_of(departure, "departure");
  Vec5 z;
  z << range + ue(3), wrap_angle(doa.azimuth - ue(2)), doa.elevation, wrap_angle(dod.azimuth),
      dod.elevation;
  return z;
}

Mat57 measurement_jacobian(const Vec4& ue, const Vec3& lm, LandmarkType type, const Vec3& bs,
                           double ue_height) {
  const Vec3 p = position_of(ue, ue_height);
  Mat57 g = Mat57::Zero();
  g(0, 3) = 1.0;
  g(1, 2) = -1.0;

  // d(direction)/d(p) and d(direction)/d(lm) for the arrival and departure vectors.
  Vec3 arrival;
  Vec3 departure;
  Mat3 arr_dp = -Mat3::Identity();
  Mat3 arr_dl = Mat3::Identity();
  Mat3 dep_dp = Mat3::Zero();
  Mat3 dep_dl = Mat3::Zero();
  Row3 range_dp;
  Row3 range_dl = Row3::Zero();

  switch (type) {
    case LandmarkType::BS: {
      arrival = bs - p;
      departure = p - bs;
      arr_dl.setZero();
      dep_dp = Mat3::Identity();
      const double r = checked_norm(arrival, "line-of-sight path");
      range_dp = -arrival.transpose() / r;
      break;
    }
    case LandmarkType::VA: {
      arrival = lm - p;
      const double r = checked_norm(arrival, "vehicle to virtual anchor");
      range_dp = -arrival.transpose() / r;
      range_dl = arrival.transpose() / r;
      const Mirror mir = mirror_of(p, bs, lm);
      const Mat3 refl = mir.reflect();
      const Vec3 w = p - lm;
      departure = mir.side * (refl * w);
      checked_norm(departure, "base station to incidence point");
      const Mat3 proj = Mat3::Identity() - mir.normal * mir.normal.transpose();
      const Mat3 d_refl_w =
          -2.0 / mir.separation * (mir.normal.dot(w) * proj + mir.normal * (w.transpose() * proj));
      dep_dp = mir.side * refl;
      dep_dl = mir.side * (-refl + d_refl_w);
      break;
    }
    case LandmarkType::SP: {
      arrival = lm - p;
      departure = lm - bs;
      const double r1 = checked_norm(arrival, "scatterer to vehicle");
      const double r2 = checked_norm(departure, "base station to scatterer");
      range_dp = -arrival.transpose() / r1;
      range_dl = arrival.transpose() / r1 + departure.transpose() / r2;
      dep_dl = Mat3::Identity();
      break;
    }
  }

  const Angles doa = angles_of(arrival, "arrival");
  const Angles dod = angles_of(departure, "departure");

  g.block<1, 2>(0, 0) = range_dp.head<2>();
  g.block<1, 3>(0, 4) = range_dl;

  g.block<1, 2>(1, 0) = (doa.d_azimuth * arr_dp).head<2>();
  g.block<1, 3>(1, 4) = doa.d_azimuth * arr_dl;
  g.block<1, 2>(2, 0) = (doa.d_elevation * arr_dp).head<2>();
  g.block<1, 3>(2, 4) = doa.d_elevation * arr_dl;

  g.block<1, 2>(3, 0) = (dod.d_azimuth * dep_dp).head<2>();
  g.block<1, 3>(3, 4) = dod.d_azimuth * dep_dl;
  g.block<1, 2>(4, 0) = (dod.d_elevation * dep_dp).head<2>();
  g.block<1, 3>(4, 4) = dod.d_elevation * dep_dl;
  return g;
}

namespace {

// Point at range (d - B) along the global arrival direction, and its
// derivative with respect to the vehicle mean.
struct RayPoint {
  Vec3 point;
  Mat34 d_point;
  Vec3 origin;
  Mat34 d_origin;
};

RayPoint ray_point(const Vec5& z, const Vec4& m, double ue_height) {
  const double reach = z(0) - m(3);
  const double az = z(1) + m(2);
  const double el = z(2);
  const Vec3 dir(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));

  RayPoint r;
  r.origin = position_of(m, ue_height);
  r.point = r.origin + reach * dir;
  r.d_origin.setZero();
  r.d_origin(0, 0) = 1.0;
  r.d_origin(1, 1) = 1.0;
  r.d_point = r.d_origin;
  r.d_point.col(2) << -reach * std::cos(el) * std::sin(az), reach * std::cos(el) * std::cos(az), 0.0;
  r.d_point.col(3) = -dir;
  return r;
}

void require_birth_type(LandmarkType type) {
  if (type == LandmarkType::BS) {
    throw DegenerateGeometry("births are generated for reflection and scattering types only");
  }
}

}  // namespace

Vec3 birth_mean(const Vec5& z, const Vec4& m, const Vec3& bs, LandmarkType type,
                double ue_height) {
  require_birth_type(type);
  const RayPoint r = ray_point(z, m, ue_height);
  if (type == LandmarkType::VA) return r.point;

  const Vec3 q = bs - r.point;
  const double n = checked_norm(q, "base station to ray point");
  const Vec3 u = q / n;
  const Vec3 a = r.origin - r.point;
  const double denom = a.dot(u);
  if (std::abs(denom) < kDegenerateNorm) {
    throw DegenerateGeometry("scatterer birth projection is undefined");
  }
  return r.point + (n / (2.0 * denom)) * a;
}

Mat34 birth_mean_jacobian(const Vec5& z, const Vec4& m, const Vec3& bs, LandmarkType type,
                          double ue_height) {
  require_birth_type(type);
  const RayPoint r = ray_point(z, m, ue_height);
  if (type == LandmarkType::VA) return r.d_point;

  const Vec3 q = bs - r.point;
  const double n = checked_norm(q, "base station to ray point");
  const Vec3 u = q / n;
  const Vec3 a = r.origin - r.point;
  const double denom = a.dot(u);
  if (std::abs(denom) < kDegenerateNorm) {
    throw DegenerateGeometry("scatterer birth projection is undefined");
  }
  const double c = n / (2.0 * denom);
  const Mat3 proj = Mat3::Identity() - u * u.transpose();

  Mat34 out;
  for (int k = 0; k < 4; ++k) {
    const Vec3 d_point = r.d_point.col(k);
    const Vec3 d_q = -d_point;
    const Vec3 d_a = r.d_origin.col(k) - d_point;
    const double d_n = u.dot(d_q);
    const Vec3 d_u = proj * d_q / n;
    const double d_denom = d_a.dot(u) + a.dot(d_u);
    const double d_c = d_n / (2.0 * denom) - n * d_denom / (2.0 * denom * denom);
    out.col(k) = d_point + d_c * a + c * d_a;
  }
  return out;
}

Mat3 birth_covariance(const Vec5& z, const Vec4& m, const Mat4& ue_cov, const Mat5& meas_cov,
                      const Vec3& bs, LandmarkType type, double ue_height) {
  const Vec3 mean = birth_mean(z, m, bs, type, ue_height);
  const Mat53 g = measurement_jacobian(m, mean, type, bs, ue_height).rightCols<3>();
  const Mat3 info = symmetrize(g.transpose() * meas_cov.ldlt().solve(g));
  const double rcond = spd_rcond(info);
  if (!(rcond > 1e-12)) {
    throw SingularInformation("birth information matrix is ill-conditioned");
  }
  const Mat34 a = birth_mean_jacobian(z, m, bs, type, ue_height);
  return symmetrize(info.inverse() + a * ue_cov * a.transpose());
}

}  // namespace ekphd
