#include "ekphd/bounds.hpp"

#include <cmath>
#include <string>

#include "ekphd/errors.hpp"

namespace ekphd {

namespace {

Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd sym = symmetrize(m);
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success || spd_rcond(sym) < 1e-12) {
    throw SingularFim("Fisher information is not invertible");
  }
  return symmetrize(llt.solve(Eigen::MatrixXd::Identity(sym.rows(), sym.cols())));
}

double landmark_noise_variance(const BoundOptions& opts) {
  switch (opts.landmark_noise) {
    case LandmarkNoise::Map: return opts.map_noise;
    case LandmarkNoise::Identity: return 1.0;
    case LandmarkNoise::Zero: return 0.0;
  }
  return opts.map_noise;
}

}  // namespace

FimState fim_init(const Mat4& p0, std::span<const LandmarkPrior> landmarks) {
  Eigen::LLT<Mat4> llt(p0);
  if (llt.info() != Eigen::Success || spd_rcond(p0) < 1e-12) {
    throw SingularPrior("initial vehicle covariance is not invertible");
  }
  FimState f;
  const auto dim = static_cast<Eigen::Index>(4 + 3 * landmarks.size());
  f.info = Eigen::MatrixXd::Zero(dim, dim);
  f.info.topLeftCorner<4, 4>() = symmetrize(llt.solve(Mat4::Identity()));
  Eigen::Index offset = 4;
  for (const auto& lm : landmarks) {
    f.info.block<3, 3>(offset, offset) = lm.information;
    f.landmark_offset[lm.id] = offset;
    offset += 3;
  }
  return f;
}

Mat3 landmark_entry_information(const Vec4& ue, const TrueLandmark& lm, const BoundOptions& opts) {
  const Mat53 g =
      measurement_jacobian(ue, lm.pos, lm.type, opts.fov.bs, opts.fov.ue_height).rightCols<3>();
  return symmetrize(g.transpose() * opts.meas_cov.ldlt().solve(g));
}

FimState fim_predict(const FimState& fim, const Vec4& ue_prev, const MotionParams& motion,
                     const BoundOptions& opts) {
  const Eigen::Index dim = fim.info.rows();
  Eigen::MatrixXd f = Eigen::MatrixXd::Identity(dim, dim);
  f.topLeftCorner<4, 4>() = ct_jacobian(ue_prev, motion);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dim, dim);
  q.topLeftCorner<4, 4>() = motion.process_noise;
  if (dim > 4) {
    q.bottomRightCorner(dim - 4, dim - 4).diagonal().setConstant(landmark_noise_variance(opts));
  }
  FimState out;
  out.landmark_offset = fim.landmark_offset;
  out.info = checked_inverse(q + f * checked_inverse(fim.info) * f.transpose());
  return out;
}

FimState fim_update(const FimState& fim, const Vec4& ue, std::span<const TrueLandmark> landmarks,
                    const BoundOptions& opts) {
  FimState out = fim;
  const Mat5 meas_info = opts.meas_cov.ldlt().solve(Mat5::Identity());

  auto add_data = [&](const Mat57& g, double weight, Eigen::Index offset) {
    const auto g_ue = g.leftCols<4>();
    const auto g_lm = g.rightCols<3>();
    out.info.topLeftCorner<4, 4>() += weight * g_ue.transpose() * meas_info * g_ue;
    if (offset < 0) return;
    const Eigen::Matrix<double, 4, 3> cross = weight * g_ue.transpose() * meas_info * g_lm;
    out.info.block<4, 3>(0, offset) += cross;
    out.info.block<3, 4>(offset, 0) += cross.transpose();
    out.info.block<3, 3>(offset, offset) += weight * g_lm.transpose() * meas_info * g_lm;
  };

  const double p_los = detection_probability(opts.fov, ue, opts.fov.bs, LandmarkType::BS, opts.p_d);
  if (p_los > 0.0) {
    add_data(measurement_jacobian(ue, opts.fov.bs, LandmarkType::BS, opts.fov.bs, opts.fov.ue_height),
             p_los, -1);
  }

  for (const auto& lm : landmarks) {
    const double p_d = detection_probability(opts.fov, ue, lm.pos, lm.type, opts.p_d);
    if (p_d <= 0.0) continue;
    const Mat57 g = measurement_jacobian(ue, lm.pos, lm.type, opts.fov.bs, opts.fov.ue_height);
    if (opts.known_map) {
      add_data(g, p_d, -1);
      continue;
    }
    const auto it = out.landmark_offset.find(lm.id);
    if (it == out.landmark_offset.end()) {
      const Eigen::Index offset = out.info.rows();
      out.info.conservativeResize(offset + 3, offset + 3);
      out.info.rightCols<3>().setZero();
      out.info.bottomRows<3>().setZero();
      out.info.block<3, 3>(offset, offset) = landmark_entry_information(ue, lm, opts);
      out.landmark_offset[lm.id] = offset;
      continue;
    }
    add_data(g, p_d, it->second);
  }
  out.info = symmetrize(out.info);
  return out;
}

FimState fim_step(const FimState& fim, const Vec4& ue_prev, const Vec4& ue,
                  std::span<const TrueLandmark> landmarks, const MotionParams& motion,
                  const BoundOptions& opts) {
  return fim_update(fim_predict(fim, ue_prev, motion, opts), ue, landmarks, opts);
}

double peb(const FimState& fim) {
  const Eigen::MatrixXd cov = checked_inverse(fim.info);
  return std::sqrt(cov(0, 0) + cov(1, 1));
}

double leb(const FimState& fim, int landmark_id) {
  const auto it = fim.landmark_offset.find(landmark_id);
  if (it == fim.landmark_offset.end()) {
    throw UnknownLandmark("landmark " + std::to_string(landmark_id) + " has no information block");
  }
  const Eigen::MatrixXd cov = checked_inverse(fim.info);
  return std::sqrt(cov.diagonal().segment<3>(it->second).sum());
}

}  // namespace ekphd
