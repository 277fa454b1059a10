#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>

#include "ekphd/sim.hpp"

using namespace ekphd;
constexpr double kPi = std::numbers::pi;

namespace {

Vec4 road_start() { return Vec4(22.22 / (kPi / 10), 0, kPi / 2, 300); }

/// Chi-square p-value of `xs` against a uniform distribution on [lo, hi].
double uniform_p_value(const std::vector<double>& xs, double lo, double hi, int bins = 20) {
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double x : xs) {
    const int b = std::clamp(static_cast<int>((x - lo) / (hi - lo) * bins), 0, bins - 1);
    counts[static_cast<std::size_t>(b)] += 1.0;
  }
  const double expected = static_cast<double>(xs.size()) / bins;
  double stat = 0.0;
  for (double c : counts) stat += (c - expected) * (c - expected) / expected;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(bins - 1), stat));
}

}  // namespace

TEST_CASE("default scenario") {
  const Scenario s = default_scenario(17);
  CHECK(s.bs == Vec3(0, 0, 40));
  REQUIRE(s.vas.size() == 4);
  CHECK(s.vas[0] == Vec3(200, 0, 40));
  CHECK(s.vas[1] == Vec3(0, 200, 40));
  CHECK(s.vas[2] == Vec3(-200, 0, 40));
  CHECK(s.vas[3] == Vec3(0, -200, 40));
  REQUIRE(s.sps.size() == 4);
  for (const auto& sp : s.sps) {
    CHECK(std::abs(sp(0)) == 65.0);
    CHECK(std::abs(sp(1)) == 65.0);
    CHECK(sp(2) >= 0.0);
    CHECK(sp(2) <= 40.0);
  }
  CHECK(s.sp_visibility_radius == 50.0);
  CHECK(s.max_range == 200.0);
  CHECK(s.clutter_rate == 1.0);
  CHECK(s.meas_cov.diagonal() == Vec5(1e-2, 1e-4, 1e-4, 1e-4, 1e-4));
  const Scenario t = default_scenario(17);
  for (std::size_t i = 0; i < 4; ++i) CHECK(t.sps[i] == s.sps[i]);
  CHECK(default_scenario(18).sps[0](2) != s.sps[0](2));
  const auto lms = s.landmarks();
  CHECK(lms.size() == 8);
  CHECK(lms[0].id == 0);
  CHECK(lms[4].type == LandmarkType::SP);
}

TEST_CASE("ground truth lap") {
  const Vec4 x0 = road_start();
  CHECK(ground_truth_step(0, 22.22, kPi / 10, 0.5, x0) == x0);
  const Vec4 x40 = ground_truth_step(40, 22.22, kPi / 10, 0.5, x0);
  CHECK((x40.head<2>() - x0.head<2>()).norm() < 1e-6);
  CHECK(std::abs(wrap_angle(x40(2) - x0(2))) < 1e-6);
  for (std::size_t k = 0; k < 40; ++k) {
    const Vec4 x = ground_truth_step(k, 22.22, kPi / 10, 0.5, x0);
    CHECK(x.head<2>().norm() == doctest::Approx(22.22 / (kPi / 10)).epsilon(1e-9));
    CHECK(x(3) == 300.0);
  }
}

TEST_CASE("detection probabilities") {
  const Scenario s = default_scenario(1);
  const Vec4 ue(0, 0, 0, 0);
  CHECK(detection_probability(s, ue, Vec3(60, 0, 0), LandmarkType::SP) == 0.0);
  CHECK(detection_probability(s, ue, Vec3(10, 0, 0), LandmarkType::SP) == 0.9);
  CHECK(detection_probability(s, road_start(), s.vas[0], LandmarkType::VA) == 0.9);
  CHECK(detection_probability(s, Vec4(300, 0, 0, 0), s.vas[0], LandmarkType::VA) == 0.0);
}

TEST_CASE("perfect detection without clutter") {
  Scenario s = default_scenario(2);
  s.clutter_rate = 0.0;
  MeasurementOptions o;
  o.p_d = 1.0;
  std::mt19937_64 rng(1);
  for (std::size_t k = 0; k < 40; ++k) {
    const Vec4 x = ground_truth_step(k, 22.22, kPi / 10, 0.5, road_start());
    std::size_t visible = 1;  // LOS
    for (const auto& lm : s.landmarks()) visible += in_fov(s.fov(), x, lm.pos, lm.type);
    const auto zs = generate_measurements(x, s, rng, o);
    CHECK(zs.size() == visible);
    for (const auto& z : zs) CHECK(z.origin != kOriginClutter);
  }
}

TEST_CASE("noise-free measurements equal the model and labels round-trip") {
  const Scenario s = default_scenario(3);
  MeasurementOptions o;
  o.noise = false;
  std::mt19937_64 rng(2);
  const Vec4 x = ground_truth_step(7, 22.22, kPi / 10, 0.5, road_start());
  const auto lms = s.landmarks();
  for (int rep = 0; rep < 20; ++rep) {
    for (const auto& z : generate_measurements(x, s, rng, o)) {
      if (z.origin == kOriginClutter) continue;
      const Vec5 ref = z.origin == kOriginLos
                           ? measure(x, s.bs, LandmarkType::BS, s.bs)
                           : measure(x, lms[static_cast<std::size_t>(z.origin)].pos,
                                     lms[static_cast<std::size_t>(z.origin)].type, s.bs);
      CHECK(z.z == ref);
    }
  }
}

TEST_CASE("noisy measurements stay close to their origin") {
  const Scenario s = default_scenario(3);
  std::mt19937_64 rng(4);
  const Vec4 x = ground_truth_step(7, 22.22, kPi / 10, 0.5, road_start());
  const auto lms = s.landmarks();
  const Mat5 info = s.meas_cov.inverse();
  double mean_d = 0.0;
  int n = 0;
  for (int rep = 0; rep < 2000; ++rep) {
    for (const auto& z : generate_measurements(x, s, rng)) {
      if (z.origin == kOriginClutter) continue;
      const Vec5 ref = z.origin == kOriginLos
                           ? measure(x, s.bs, LandmarkType::BS, s.bs)
                           : measure(x, lms[static_cast<std::size_t>(z.origin)].pos,
                                     lms[static_cast<std::size_t>(z.origin)].type, s.bs);
      const Vec5 r = measurement_residual(z.z, ref);
      mean_d += r.dot(info * r);
      ++n;
    }
  }
  CHECK(mean_d / n == doctest::Approx(5.0).epsilon(0.03));
}

TEST_CASE("clutter count and marginals") {
  Scenario s = default_scenario(5);
  // move the UE out of range so only clutter remains
  const Vec4 x(5000, 5000, 0, 0);
  std::mt19937_64 rng(6);
  std::vector<double> d, az, el, daz, del;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    for (const auto& z : generate_measurements(x, s, rng)) {
      REQUIRE(z.origin == kOriginClutter);
      d.push_back(z.z(0));
      az.push_back(z.z(1));
      el.push_back(z.z(2));
      daz.push_back(z.z(3));
      del.push_back(z.z(4));
    }
  }
  CHECK(static_cast<double>(d.size()) / draws == doctest::Approx(1.0).epsilon(0.01));
  CHECK(uniform_p_value(d, 0, 200) > 1e-3);
  CHECK(uniform_p_value(az, -kPi, kPi) > 1e-3);
  CHECK(uniform_p_value(el, -kPi / 2, kPi / 2) > 1e-3);
  CHECK(uniform_p_value(daz, -kPi, kPi) > 1e-3);
  CHECK(uniform_p_value(del, -kPi / 2, kPi / 2) > 1e-3);
}

TEST_CASE("generation is deterministic per seed") {
  const Scenario s = default_scenario(9);
  std::mt19937_64 a(77), b(77);
  for (std::size_t k = 0; k < 40; ++k) {
    const Vec4 x = ground_truth_step(k, 22.22, kPi / 10, 0.5, road_start());
    const auto za = generate_measurements(x, s, a);
    const auto zb = generate_measurements(x, s, b);
    REQUIRE(za.size() == zb.size());
    for (std::size_t i = 0; i < za.size(); ++i) {
      CHECK(za[i].z == zb[i].z);
      CHECK(za[i].origin == zb[i].origin);
    }
  }
}
