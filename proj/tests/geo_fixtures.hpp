// Random in-FOV geometries around the default road.
#pragma once

#include <numbers>
#include <random>

#include "ekphd/geometry.hpp"

namespace fixture {

using ekphd::Vec3;
using ekphd::Vec4;

inline const Vec3 kBs{0.0, 0.0, 40.0};

struct Geometry {
  Vec4 ue;
  Vec3 va;
  Vec3 sp;
};

/// UE within 150 m of the BS on the ground, a vertical wall beyond both of
/// them, a scatterer within 50 m of the UE.
inline Geometry random_geometry(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double pi = std::numbers::pi;
  Geometry g;
  const double r = 10.0 + 140.0 * u(rng);
  const double phi = 2 * pi * (u(rng) - 0.5);
  g.ue = Vec4(r * std::cos(phi), r * std::sin(phi), 2 * pi * (u(rng) - 0.5), 600 * (u(rng) - 0.5));

  // wall normal roughly pointing away from the UE so that both sit on one side
  const double psi = phi + (u(rng) - 0.5) * 1.2;
  const Vec3 n(std::cos(psi), std::sin(psi), 0.0);
  const double ue_off = n.dot(Vec3(g.ue(0), g.ue(1), 0.0));
  const double wall = std::max(ue_off, 0.0) + 20.0 + 100.0 * u(rng);
  g.va = kBs + 2.0 * (wall - n.dot(kBs)) * n;

  for (;;) {
    const Vec3 d(u(rng) - 0.5, u(rng) - 0.5, 0.0);
    const Vec3 sp(g.ue(0) + 90.0 * d(0), g.ue(1) + 90.0 * d(1), 40.0 * u(rng));
    const Vec3 p(g.ue(0), g.ue(1), 0.0);
    if ((sp - p).norm() <= 50.0 && (sp - p).head<2>().norm() > 3.0 && (sp - kBs).norm() > 3.0) {
      g.sp = sp;
      break;
    }
  }
  return g;
}

}  // namespace fixture
