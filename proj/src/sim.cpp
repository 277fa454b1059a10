#include "ekphd/sim.hpp"

#include <algorithm>
#include <numbers>

#include "ekphd/filter.hpp"
#include "ekphd/motion.hpp"

namespace ekphd {

FieldOfView Scenario::fov() const {
  FieldOfView f;
  f.bs = bs;
  f.sp_visibility_radius = sp_visibility_radius;
  f.max_range = max_range;
  f.ue_height = ue_height;
  return f;
}

std::vector<TrueLandmark> Scenario::landmarks() const {
  std::vector<TrueLandmark> out;
  int id = 0;
  for (const auto& v : vas) out.push_back({id++, v, LandmarkType::VA});
  for (const auto& s : sps) out.push_back({id++, s, LandmarkType::SP});
  return out;
}

Scenario default_scenario(std::uint64_t seed) {
  Scenario s;
  s.bs = Vec3(0.0, 0.0, 40.0);
  s.vas = {Vec3(200.0, 0.0, 40.0), Vec3(0.0, 200.0, 40.0), Vec3(-200.0, 0.0, 40.0),
           Vec3(0.0, -200.0, 40.0)};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> height(0.0, 40.0);
  for (const auto& [x, y] : {std::pair{65.0, 65.0}, {-65.0, 65.0}, {-65.0, -65.0}, {65.0, -65.0}}) {
    s.sps.emplace_back(x, y, height(rng));
  }
  s.meas_cov = default_measurement_covariance();
  return s;
}

Vec4 ground_truth_step(std::size_t k, double speed, double turn_rate, double dt, const Vec4& x0) {
  MotionParams p;
  p.speed = speed;
  p.turn_rate = turn_rate;
  p.dt = dt;
  Vec4 x = x0;
  for (std::size_t i = 0; i < k; ++i) x = ct_transition(x, p);
  return x;
}

double detection_probability(const Scenario& s, const Vec4& ue, const Vec3& lm, LandmarkType type,
                             double p_d) {
  return detection_probability(s.fov(), ue, lm, type, p_d);
}

std::vector<LabeledMeasurement> generate_measurements(const Vec4& ue_true, const Scenario& s,
                                                      std::mt19937_64& rng,
                                                      const MeasurementOptions& opts) {
  std::vector<LabeledMeasurement> out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Mat5 chol = s.meas_cov.llt().matrixL();

  auto emit = [&](const Vec3& pos, LandmarkType type, int origin) {
    if (unit(rng) >= detection_probability(s, ue_true, pos, type, opts.p_d)) return;
    Vec5 z = measure(ue_true, pos, type, s.bs, s.ue_height);
    if (opts.noise) {
      Vec5 w;
      for (int i = 0; i < 5; ++i) w(i) = gauss(rng);
      z += chol * w;
      for (int i = 1; i < 5; ++i) z(i) = wrap_angle(z(i));
    }
    out.push_back({z, origin});
  };

  emit(s.bs, LandmarkType::BS, kOriginLos);
  for (const auto& lm : s.landmarks()) emit(lm.pos, lm.type, lm.id);

  if (opts.clutter && s.clutter_rate > 0.0) {
    std::poisson_distribution<int> count(s.clutter_rate);
    const int n = count(rng);
    constexpr double pi = std::numbers::pi;
    for (int c = 0; c < n; ++c) {
      Vec5 z;
      z(0) = s.max_range * unit(rng);
      z(1) = pi - 2.0 * pi * unit(rng);
      z(2) = 0.5 * pi - pi * unit(rng);
      z(3) = pi - 2.0 * pi * unit(rng);
      z(4) = 0.5 * pi - pi * unit(rng);
      out.push_back({z, kOriginClutter});
    }
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

std::vector<Measurement> strip_labels(const std::vector<LabeledMeasurement>& zs) {
  std::vector<Measurement> out;
  out.reserve(zs.size());
  for (const auto& z : zs) out.push_back(z.z);
  return out;
}

}  // namespace ekphd
