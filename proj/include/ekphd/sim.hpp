#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ekphd/bounds.hpp"
#include "ekphd/detection.hpp"
#include "ekphd/geometry.hpp"

namespace ekphd {

/// Ground-truth world: one base station, virtual anchors, scattering points.
struct Scenario {
  Vec3 bs{0.0, 0.0, 40.0};
  std::vector<Vec3> vas;
  std::vector<Vec3> sps;
  double sp_visibility_radius = 50.0;
  double max_range = 200.0;
  double clutter_rate = 1.0;
  Mat5 meas_cov = Mat5::Identity();
  double ue_height = 0.0;

  FieldOfView fov() const;
  /// Virtual anchors get ids 0..nVA-1, scatterers follow.
  std::vector<TrueLandmark> landmarks() const;
};

/// Base station at [0 0 40], four virtual anchors at distance 200 along the
/// axes, four scatterers at [+-65 +-65 z] with z ~ U(0, 40) drawn from `seed`.
Scenario default_scenario(std::uint64_t seed);

/// Noise-free coordinated-turn state after k intervals starting from x0.
Vec4 ground_truth_step(std::size_t k, double speed, double turn_rate, double dt, const Vec4& x0);

double detection_probability(const Scenario& s, const Vec4& ue, const Vec3& lm, LandmarkType type,
                             double p_d = 0.9);

inline constexpr int kOriginLos = -1;
inline constexpr int kOriginClutter = -2;

struct LabeledMeasurement {
  Measurement z = Measurement::Zero();
  int origin = kOriginClutter;  // landmark id, kOriginLos, or kOriginClutter
};

struct MeasurementOptions {
  double p_d = 0.9;
  bool noise = true;
  bool clutter = true;
};

/// One scan: every landmark (and the LOS path) detected with its adaptive
/// probability, plus Poisson clutter spread uniformly over range [0, r],
/// azimuths (-pi, pi] and elevations (-pi/2, pi/2]. The set is shuffled.
std::vector<LabeledMeasurement> generate_measurements(const Vec4& ue_true, const Scenario& s,
                                                      std::mt19937_64& rng,
                                                      const MeasurementOptions& opts = {});

std::vector<Measurement> strip_labels(const std::vector<LabeledMeasurement>& zs);

}  // namespace ekphd
