#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ekphd/association.hpp"
#include "ekphd/component.hpp"
#include "ekphd/detection.hpp"
#include "ekphd/motion.hpp"

namespace ekphd {

Mat5 default_measurement_covariance();

struct FilterParams {
  double p_d = 0.9;
  double p_s = 0.99;
  double p_b = 1e-6;
  double map_noise = 1e-4;  // per-axis variance added to surviving components
  double prune_log_threshold = std::log(1e-6);
  double merge_threshold = 50.0;
  std::size_t cap = 50;
  double gate_tail = 1e-9;
  double clutter_rate = 1.0;  // expected clutter count per scan
  double extraction_threshold = 0.5;
  bool births = true;         // false gives the LOS-only tracker
  FieldOfView fov;
  Mat5 meas_cov = default_measurement_covariance();

  /// Uniform clutter density over range [0, r] and the four angles.
  double clutter_intensity() const;
  AssociationContext association() const;
};

struct FilterState {
  VehicleState ue;
  MapPhd map;
  std::size_t step = 0;
  /// Components born from the previous scan's unassociated measurements;
  /// they enter the map at the next prediction.
  std::vector<GaussianComponent> births;
};

/// Map seeded with the base station as a near-Dirac anchor component.
FilterState init(const Vec3& bs, const VehicleState& ue0);

inline constexpr double kAnchorVariance = 1e-9;

MapPhd predict_map(const MapPhd& map, std::span<const GaussianComponent> births,
                   const FilterParams& params, const Vec4& ue_mean);

std::vector<GaussianComponent> make_births(std::span<const Measurement> unassociated,
                                           const VehicleState& ue, const FilterParams& params);

struct PairUpdate {
  std::size_t component = 0;
  std::size_t measurement = 0;
  Vec3 mean = Vec3::Zero();
  Mat3 cov = Mat3::Zero();
  double log_likelihood = 0.0;  // log N(z; g, S_pair) at the prediction
};

struct JointUpdate {
  VehicleState ue;
  std::vector<PairUpdate> pairs;
};

/// One EKF update of the stacked [vehicle; associated landmarks] state.
JointUpdate joint_update(const VehicleState& ue, const MapPhd& map, const Assignment& assign,
                         std::span<const Measurement> zs, const Mat5& meas_cov,
                         const FieldOfView& fov);

MapPhd map_update(const MapPhd& predicted, const Assignment& assign, const JointUpdate& joint,
                  const FilterParams& params, const Vec4& ue_mean);

/// Prune, merge, cap. The base-station anchor is left untouched.
MapPhd reduce(const MapPhd& map, const FilterParams& params);

std::vector<LandmarkEstimate> extract_landmarks(const MapPhd& map, double threshold = 0.5);

/// Intermediate results of one update, for diagnostics and tests.
struct UpdateReport {
  MapPhd predicted;
  CostMatrix cost;
  Assignment assignment;
  std::vector<double> detection_probability;  // per predicted component
  MapPhd updated;                             // before reduction
};

FilterState predict(const FilterState& state, const MotionParams& motion,
                    const FilterParams& params);

FilterState update(const FilterState& state, std::span<const Measurement> zs,
                   const FilterParams& params, UpdateReport* report = nullptr);

/// Prediction (skipped on the first recursion) followed by the update.
FilterState slam_step(const FilterState& state, std::span<const Measurement> zs,
                      const MotionParams& motion, const FilterParams& params);

}  // namespace ekphd
