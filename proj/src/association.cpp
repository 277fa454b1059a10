#include "ekphd/association.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>

#include "ekphd/auction.hpp"
#include "ekphd/errors.hpp"

namespace ekphd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kParallelRows = 16;

void fill_row(CostMatrix& out, std::size_t i, const GaussianComponent& comp,
              const VehicleState& ue, std::span<const Measurement> zs,
              const AssociationContext& ctx) {
  const double p_d = detection_probability(ctx.fov, ue.mean, comp.mean, comp.type, ctx.p_d);
  out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(out.m + i)) =
      misdetection_cost(p_d);
  if (p_d <= 0.0) return;

  PairPrediction pred;
  try {
    pred = predict_pair(comp, ue, ctx.meas_cov, ctx.fov);
  } catch (const DegenerateGeometry&) {
    return;
  } catch (const SingularInnovation&) {
    return;
  }
  const double base = std::log(p_d / ctx.clutter_intensity) -
                      0.5 * (5.0 * std::log(2.0 * std::numbers::pi) + pred.log_det);
  for (std::size_t j = 0; j < zs.size(); ++j) {
    const Vec5 nu = measurement_residual(zs[j], pred.z);
    const double d = nu.dot(pred.innovation_info * nu);
    if (d < ctx.gate) {
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = base - 0.5 * d;
    }
  }
}

CostMatrix empty_matrix(std::size_t n, std::size_t m) {
  CostMatrix out;
  out.n = n;
  out.m = m;
  out.values = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n),
                                         static_cast<Eigen::Index>(m + n), kNegInf);
  return out;
}

}  // namespace

double gate_threshold(double tail_probability, int dof) {
  const boost::math::chi_squared dist(dof);
  return boost::math::quantile(boost::math::complement(dist, tail_probability));
}

PairPrediction predict_pair(const GaussianComponent& comp, const VehicleState& ue,
                            const Mat5& meas_cov, const FieldOfView& fov) {
  PairPrediction p;
  p.z = measure(ue.mean, comp.mean, comp.type, fov.bs, fov.ue_height);
  p.jacobian = measurement_jacobian(ue.mean, comp.mean, comp.type, fov.bs, fov.ue_height);
  const auto g_ue = p.jacobian.leftCols<4>();
  const auto g_lm = p.jacobian.rightCols<3>();
  p.innovation_cov = symmetrize(g_ue * ue.cov * g_ue.transpose() +
                                g_lm * comp.cov * g_lm.transpose() + meas_cov);
  Eigen::LLT<Mat5> llt(p.innovation_cov);
  if (llt.info() != Eigen::Success) throw SingularInnovation("pair innovation not PD");
  p.innovation_info = llt.solve(Mat5::Identity());
  p.log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return p;
}

double pair_log_likelihood(const PairPrediction& pred, const Measurement& z) {
  const Vec5 nu = measurement_residual(z, pred.z);
  return -0.5 * (5.0 * std::log(2.0 * std::numbers::pi) + pred.log_det +
                 nu.dot(pred.innovation_info * nu));
}

double misdetection_cost(double p_d) { return p_d >= 1.0 ? kNegInf : std::log1p(-p_d); }

double pair_cost(const GaussianComponent& comp, const VehicleState& ue, const Measurement& z,
                 const AssociationContext& ctx) {
  CostMatrix row = empty_matrix(1, 1);
  const Measurement zs[1] = {z};
  fill_row(row, 0, comp, ue, zs, ctx);
  return row.values(0, 0);
}

CostMatrix build_cost_matrix_serial(std::span<const GaussianComponent> comps,
                                    const VehicleState& ue, std::span<const Measurement> zs,
                                    const AssociationContext& ctx) {
  CostMatrix out = empty_matrix(comps.size(), zs.size());
  for (std::size_t i = 0; i < comps.size(); ++i) fill_row(out, i, comps[i], ue, zs, ctx);
  return out;
}

CostMatrix build_cost_matrix(std::span<const GaussianComponent> comps, const VehicleState& ue,
                             std::span<const Measurement> zs, const AssociationContext& ctx) {
  CostMatrix out = empty_matrix(comps.size(), zs.size());
  const auto n = static_cast<std::ptrdiff_t>(comps.size());
#pragma omp parallel for schedule(static) if (comps.size() >= kParallelRows)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    fill_row(out, k, comps[k], ue, zs, ctx);
  }
  return out;
}

Assignment auction_assign(const CostMatrix& cost) {
  Assignment a;
  a.landmark_to.assign(cost.n, std::nullopt);
  std::vector<bool> used(cost.m, false);
  if (cost.n > 0) {
    const std::vector<int> cols = auction_maximize(cost.values);
    for (std::size_t i = 0; i < cost.n; ++i) {
      const int j = cols[i];
      if (j >= 0 && static_cast<std::size_t>(j) < cost.m) {
        a.landmark_to[i] = static_cast<std::size_t>(j);
        used[static_cast<std::size_t>(j)] = true;
      }
    }
  }
  for (std::size_t j = 0; j < cost.m; ++j) {
    if (!used[j]) a.unassociated_measurements.push_back(j);
  }
  return a;
}

double assignment_objective(const CostMatrix& cost, const Assignment& a) {
  double total = 0.0;
  for (std::size_t i = 0; i < cost.n; ++i) {
    const std::size_t col = a.landmark_to[i] ? *a.landmark_to[i] : cost.m + i;
    const double v = cost.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col));
    if (!std::isfinite(v)) return kNegInf;
    total += v;
  }
  return total;
}

}  // namespace ekphd
