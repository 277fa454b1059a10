#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ekphd/component.hpp"
#include "ekphd/detection.hpp"
#include "ekphd/motion.hpp"

namespace ekphd {

/// n x (m + n) log-likelihood matrix: detections on the left, misdetections on
/// the diagonal of the right block. Forbidden entries hold -infinity.
struct CostMatrix {
  Eigen::MatrixXd values;
  std::size_t n = 0;
  std::size_t m = 0;
};

struct Assignment {
  /// Measurement index per landmark component, nullopt for a misdetection.
  std::vector<std::optional<std::size_t>> landmark_to;
  std::vector<std::size_t> unassociated_measurements;
};

/// Everything the pairwise likelihood needs besides the pair itself.
struct AssociationContext {
  Mat5 meas_cov = Mat5::Identity();
  FieldOfView fov;
  double p_d = 0.9;
  double clutter_intensity = 1.0;
  double gate = 50.0;  // squared Mahalanobis threshold
};

/// Squared-Mahalanobis gate for a 5-D innovation: the chi-square quantile that
/// leaves `tail_probability` in the upper tail.
double gate_threshold(double tail_probability, int dof = 5);

/// Predicted measurement of one map component together with the joint
/// vehicle/landmark innovation covariance.
struct PairPrediction {
  Vec5 z = Vec5::Zero();
  Mat57 jacobian = Mat57::Zero();
  Mat5 innovation_cov = Mat5::Identity();
  Mat5 innovation_info = Mat5::Identity();
  double log_det = 0.0;
};

PairPrediction predict_pair(const GaussianComponent& comp, const VehicleState& ue,
                            const Mat5& meas_cov, const FieldOfView& fov);

/// log N(z; prediction.z, prediction.innovation_cov) with angles wrapped.
double pair_log_likelihood(const PairPrediction& pred, const Measurement& z);

double misdetection_cost(double p_d);

/// Detection log-likelihood; -infinity outside the gate or when p_d is 0.
double pair_cost(const GaussianComponent& comp, const VehicleState& ue, const Measurement& z,
                 const AssociationContext& ctx);

/// Rows are filled in parallel (OpenMP) when there are enough components.
CostMatrix build_cost_matrix(std::span<const GaussianComponent> comps, const VehicleState& ue,
                             std::span<const Measurement> zs, const AssociationContext& ctx);

/// Single-threaded reference for build_cost_matrix.
CostMatrix build_cost_matrix_serial(std::span<const GaussianComponent> comps,
                                    const VehicleState& ue, std::span<const Measurement> zs,
                                    const AssociationContext& ctx);

Assignment auction_assign(const CostMatrix& cost);

/// tr(A' L) for the assignment; -infinity if it uses a forbidden entry.
double assignment_objective(const CostMatrix& cost, const Assignment& a);

}  // namespace ekphd
