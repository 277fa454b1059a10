#pragma once

#include <map>
#include <span>

#include <Eigen/Core>

#include "ekphd/detection.hpp"
#include "ekphd/motion.hpp"

namespace ekphd {

/// Per-step landmark process noise used in the bound's transition model.
enum class LandmarkNoise {
  Map,       // same artificial noise as the filter's map prediction
  Identity,  // unit variance per axis
  Zero,
};

struct TrueLandmark {
  int id = 0;
  Vec3 pos = Vec3::Zero();
  LandmarkType type = LandmarkType::VA;
};

struct LandmarkPrior {
  int id = 0;
  Mat3 information = Mat3::Identity();
};

struct BoundOptions {
  FieldOfView fov;
  double p_d = 0.9;
  Mat5 meas_cov = Mat5::Identity();
  LandmarkNoise landmark_noise = LandmarkNoise::Map;
  double map_noise = 1e-4;
  /// Landmarks known exactly: the information covers the vehicle state only.
  bool known_map = false;
};

/// Fisher information over [vehicle (4); landmark blocks (3 each)].
struct FimState {
  Eigen::MatrixXd info;
  std::map<int, Eigen::Index> landmark_offset;
};

FimState fim_init(const Mat4& p0, std::span<const LandmarkPrior> landmarks = {});

/// Information of a landmark observed once from `ue` with the vehicle state
/// known: G_l' Sigma^-1 G_l.
Mat3 landmark_entry_information(const Vec4& ue, const TrueLandmark& lm, const BoundOptions& opts);

/// Prior term: (Q + F J^-1 F')^-1 with F evaluated at the previous true state.
FimState fim_predict(const FimState& fim, const Vec4& ue_prev, const MotionParams& motion,
                     const BoundOptions& opts);

/// Data term at the current true state. LOS and every landmark inside the
/// field of view contribute, weighted by their detection probability. A
/// landmark seen for the first time enters with its one-shot information as
/// prior instead of a data term.
FimState fim_update(const FimState& fim, const Vec4& ue, std::span<const TrueLandmark> landmarks,
                    const BoundOptions& opts);

FimState fim_step(const FimState& fim, const Vec4& ue_prev, const Vec4& ue,
                  std::span<const TrueLandmark> landmarks, const MotionParams& motion,
                  const BoundOptions& opts);

double peb(const FimState& fim);
double leb(const FimState& fim, int landmark_id);

}  // namespace ekphd
