#include "ekphd/filter.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <numeric>

#include "ekphd/errors.hpp"

namespace ekphd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_anchor(const GaussianComponent& c) { return c.type == LandmarkType::BS; }

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

Mat5 default_measurement_covariance() {
  Vec5 d;
  d << 1e-2, 1e-4, 1e-4, 1e-4, 1e-4;
  return d.asDiagonal();
}

double FilterParams::clutter_intensity() const {
  constexpr double pi4 = std::numbers::pi * std::numbers::pi * std::numbers::pi * std::numbers::pi;
  return clutter_rate / (4.0 * fov.max_range * pi4);
}

AssociationContext FilterParams::association() const {
  AssociationContext ctx;
  ctx.meas_cov = meas_cov;
  ctx.fov = fov;
  ctx.p_d = p_d;
  ctx.clutter_intensity = clutter_intensity();
  ctx.gate = gate_threshold(gate_tail);
  return ctx;
}

FilterState init(const Vec3& bs, const VehicleState& ue0) {
  FilterState s;
  s.ue = ue0;
  s.map.components.push_back({0.0, bs, kAnchorVariance * Mat3::Identity(), LandmarkType::BS});
  return s;
}

MapPhd predict_map(const MapPhd& map, std::span<const GaussianComponent> births,
                   const FilterParams& params, const Vec4& ue_mean) {
  MapPhd out;
  out.components.reserve(map.components.size() + births.size());
  for (const auto& c : map.components) {
    GaussianComponent p = c;
    if (!is_anchor(c)) {
      p.log_w += std::log(survival_probability(params.fov, ue_mean, c.mean, c.type, params.p_s));
      p.cov += params.map_noise * Mat3::Identity();
    }
    out.components.push_back(p);
  }
  out.components.insert(out.components.end(), births.begin(), births.end());
  return out;
}

std::vector<GaussianComponent> make_births(std::span<const Measurement> unassociated,
                                           const VehicleState& ue, const FilterParams& params) {
  std::vector<GaussianComponent> out;
  const double log_pb = std::log(params.p_b);
  for (const auto& z : unassociated) {
    for (LandmarkType type : {LandmarkType::VA, LandmarkType::SP}) {
      try {
        GaussianComponent c;
        c.log_w = log_pb;
        c.type = type;
        c.mean = birth_mean(z, ue.mean, params.fov.bs, type, params.fov.ue_height);
        c.cov = birth_covariance(z, ue.mean, ue.cov, params.meas_cov, params.fov.bs, type,
                                 params.fov.ue_height);
        out.push_back(c);
      } catch (const DegenerateGeometry&) {
      } catch (const SingularInformation&) {
      }
    }
  }
  return out;
}

JointUpdate joint_update(const VehicleState& ue, const MapPhd& map, const Assignment& assign,
                         std::span<const Measurement> zs, const Mat5& meas_cov,
                         const FieldOfView& fov) {
  JointUpdate out;
  out.ue = ue;
  for (std::size_t i = 0; i < assign.landmark_to.size(); ++i) {
    if (assign.landmark_to[i]) out.pairs.push_back({i, *assign.landmark_to[i], {}, {}, 0.0});
  }
  const auto count = static_cast<Eigen::Index>(out.pairs.size());
  if (count == 0) return out;

  const Eigen::Index dim = 4 + 3 * count;
  Eigen::VectorXd x(dim);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(5 * count, dim);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(5 * count, 5 * count);
  Eigen::VectorXd nu(5 * count);

  x.head<4>() = ue.mean;
  p.topLeftCorner<4, 4>() = ue.cov;
  for (Eigen::Index k = 0; k < count; ++k) {
    PairUpdate& pair = out.pairs[static_cast<std::size_t>(k)];
    const GaussianComponent& comp = map.components.at(pair.component);
    const Measurement& z = zs[pair.measurement];
    const PairPrediction pred = predict_pair(comp, ue, meas_cov, fov);
    pair.log_likelihood = pair_log_likelihood(pred, z);

    x.segment<3>(4 + 3 * k) = comp.mean;
    p.block<3, 3>(4 + 3 * k, 4 + 3 * k) = comp.cov;
    g.block<5, 4>(5 * k, 0) = pred.jacobian.leftCols<4>();
    g.block<5, 3>(5 * k, 4 + 3 * k) = pred.jacobian.rightCols<3>();
    r.block<5, 5>(5 * k, 5 * k) = meas_cov;
    nu.segment<5>(5 * k) = measurement_residual(z, pred.z);
  }

  const Eigen::MatrixXd s = symmetrize(g * p * g.transpose() + r);
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success || spd_rcond(s) < 1e-12) {
    throw SingularInnovation("stacked innovation covariance is not invertible");
  }
  const Eigen::MatrixXd gain = llt.solve(g * p).transpose();
  const Eigen::VectorXd x_post = x + gain * nu;
  const Eigen::MatrixXd ikg = Eigen::MatrixXd::Identity(dim, dim) - gain * g;
  const Eigen::MatrixXd p_post =
      symmetrize(ikg * p * ikg.transpose() + gain * r * gain.transpose());

  out.ue.mean = x_post.head<4>();
  out.ue.mean(2) = wrap_angle(out.ue.mean(2));
  out.ue.cov = p_post.topLeftCorner<4, 4>();
  for (Eigen::Index k = 0; k < count; ++k) {
    PairUpdate& pair = out.pairs[static_cast<std::size_t>(k)];
    pair.mean = x_post.segment<3>(4 + 3 * k);
    pair.cov = p_post.block<3, 3>(4 + 3 * k, 4 + 3 * k);
  }
  return out;
}

MapPhd map_update(const MapPhd& predicted, const Assignment& /*assign*/, const JointUpdate& joint,
                  const FilterParams& params, const Vec4& ue_mean) {
  MapPhd out;
  out.components.reserve(predicted.components.size() + joint.pairs.size());
  std::vector<double> p_d(predicted.components.size(), 0.0);
  for (std::size_t i = 0; i < predicted.components.size(); ++i) {
    GaussianComponent c = predicted.components[i];
    if (!is_anchor(c)) {
      p_d[i] = detection_probability(params.fov, ue_mean, c.mean, c.type, params.p_d);
      c.log_w += p_d[i] >= 1.0 ? kNegInf : std::log1p(-p_d[i]);
    }
    out.components.push_back(c);
  }

  const double log_clutter = std::log(params.clutter_intensity());
  for (const PairUpdate& pair : joint.pairs) {
    const GaussianComponent& prior = predicted.components.at(pair.component);
    if (is_anchor(prior) || p_d[pair.component] <= 0.0) continue;
    const double detected = std::log(p_d[pair.component]) + prior.log_w + pair.log_likelihood;
    GaussianComponent c;
    c.log_w = detected - log_add(log_clutter, detected);
    c.mean = pair.mean;
    c.cov = pair.cov;
    c.type = prior.type;
    out.components.push_back(c);
  }
  return out;
}

MapPhd reduce(const MapPhd& map, const FilterParams& params) {
  MapPhd out;
  std::vector<const GaussianComponent*> pool;
  for (const auto& c : map.components) {
    if (is_anchor(c)) {
      out.components.push_back(c);
    } else if (std::isfinite(c.log_w) && c.log_w >= params.prune_log_threshold) {
      pool.push_back(&c);
    }
  }

  std::vector<GaussianComponent> merged;
  std::vector<bool> taken(pool.size(), false);
  for (;;) {
    std::ptrdiff_t lead = -1;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (!taken[i] && (lead < 0 || pool[i]->log_w > pool[static_cast<std::size_t>(lead)]->log_w)) {
        lead = static_cast<std::ptrdiff_t>(i);
      }
    }
    if (lead < 0) break;
    const GaussianComponent& head = *pool[static_cast<std::size_t>(lead)];
    const Eigen::LDLT<Mat3> head_cov(head.cov);

    std::vector<std::size_t> cluster;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (taken[i] || pool[i]->type != head.type) continue;
      const Vec3 d = pool[i]->mean - head.mean;
      if (d.dot(head_cov.solve(d)) < params.merge_threshold) cluster.push_back(i);
    }

    double log_total = kNegInf;
    for (std::size_t i : cluster) log_total = log_add(log_total, pool[i]->log_w);
    GaussianComponent m;
    m.type = head.type;
    m.log_w = log_total;
    m.mean.setZero();
    for (std::size_t i : cluster) m.mean += std::exp(pool[i]->log_w - log_total) * pool[i]->mean;
    m.cov.setZero();
    for (std::size_t i : cluster) {
      const Vec3 d = pool[i]->mean - m.mean;
      m.cov += std::exp(pool[i]->log_w - log_total) * (pool[i]->cov + d * d.transpose());
      taken[i] = true;
    }
    m.cov = symmetrize(m.cov);
    merged.push_back(m);
  }

  std::stable_sort(merged.begin(), merged.end(),
                   [](const auto& a, const auto& b) { return a.log_w > b.log_w; });
  if (merged.size() > params.cap) merged.resize(params.cap);
  out.components.insert(out.components.end(), merged.begin(), merged.end());
  return out;
}

std::vector<LandmarkEstimate> extract_landmarks(const MapPhd& map, double threshold) {
  std::vector<LandmarkEstimate> out;
  const double log_threshold = std::log(threshold);
  for (const auto& c : map.components) {
    if (!is_anchor(c) && c.log_w > log_threshold) out.push_back({c.mean, c.type});
  }
  return out;
}

FilterState predict(const FilterState& state, const MotionParams& motion,
                    const FilterParams& params) {
  FilterState out;
  out.step = state.step;
  out.ue = predict_vehicle(state.ue, motion);
  out.map = predict_map(state.map, state.births, params, state.ue.mean);
  return out;
}

FilterState update(const FilterState& state, std::span<const Measurement> zs,
                   const FilterParams& params, UpdateReport* report) {
  const AssociationContext ctx = params.association();
  CostMatrix cost = build_cost_matrix(state.map.components, state.ue, zs, ctx);
  Assignment assign = auction_assign(cost);
  const JointUpdate joint = joint_update(state.ue, state.map, assign, zs, params.meas_cov, params.fov);
  MapPhd updated = map_update(state.map, assign, joint, params, state.ue.mean);

  FilterState out;
  out.step = state.step + 1;
  out.ue = joint.ue;
  out.map = reduce(updated, params);
  if (params.births) {
    std::vector<Measurement> unassociated;
    unassociated.reserve(assign.unassociated_measurements.size());
    for (std::size_t j : assign.unassociated_measurements) unassociated.push_back(zs[j]);
    out.births = make_births(unassociated, out.ue, params);
  }

  if (report) {
    report->predicted = state.map;
    report->detection_probability.clear();
    for (const auto& c : state.map.components) {
      report->detection_probability.push_back(
          is_anchor(c) ? 0.0
                       : detection_probability(params.fov, state.ue.mean, c.mean, c.type, params.p_d));
    }
    report->cost = std::move(cost);
    report->assignment = std::move(assign);
    report->updated = std::move(updated);
  }
  return out;
}

FilterState slam_step(const FilterState& state, std::span<const Measurement> zs,
                      const MotionParams& motion, const FilterParams& params) {
  if (state.step == 0) return update(state, zs, params);
  return update(predict(state, motion, params), zs, params);
}

}  // namespace ekphd
