#pragma once

// Random start generators shared by the unit and acceptance tests.

#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include "windtree/field.hpp"
#include "windtree/flow.hpp"

namespace testsupport {

using windtree::PhasePoint;
using windtree::Rational;
using windtree::Vec2;

inline bool inside_any(const windtree::ObstacleField<Rational>& field, const Vec2<Rational>& p) {
  std::vector<windtree::PlacedShape<Rational>> shapes;
  const auto i = windtree::floor_int(Rational(p.x + Rational(1, 2)));
  const auto j = windtree::floor_int(Rational(p.y + Rational(1, 2)));
  field.shapes_at({i, j}, shapes);
  for (const auto& s : shapes) {
    const auto& r = std::get<windtree::Rect<Rational>>(s.shape);
    if (p.x >= r.left() && p.x <= r.right() && p.y >= r.bottom() && p.y <= r.top()) return true;
  }
  return false;
}

inline bool inside_any(const windtree::ObstacleField<double>& field, const Vec2<double>& p, double slack = 1e-9) {
  std::vector<windtree::PlacedShape<double>> shapes;
  std::int64_t ci = std::llround(p.x), cj = std::llround(p.y);
  if (field.lattice() == windtree::Lattice::Triangular) {
    cj = std::llround(p.y * 2 / std::sqrt(3.0));
    ci = std::llround(p.x - 0.5 * static_cast<double>(cj));
  }
  for (std::int64_t i = ci - 2; i <= ci + 2; ++i)
    for (std::int64_t j = cj - 2; j <= cj + 2; ++j) {
      shapes.clear();
      field.shapes_at({i, j}, shapes);
      for (const auto& s : shapes) {
        if (const auto* r = std::get_if<windtree::Rect<double>>(&s.shape)) {
          if (p.x >= r->left() - slack && p.x <= r->right() + slack && p.y >= r->bottom() - slack &&
              p.y <= r->top() + slack)
            return true;
        } else {
          const auto& d = std::get<windtree::Disk>(s.shape);
          if (windtree::norm(p - d.center) <= d.radius + slack) return true;
        }
      }
    }
  return false;
}

/// Rational position with denominator 1024 in |x|,|y| < radius outside every
/// obstacle, and a primitive integer direction with components in [-20, 20].
inline PhasePoint<Rational> exact_start(const windtree::ObstacleField<Rational>& field, std::mt19937_64& rng,
                                        int radius = 4) {
  std::uniform_int_distribution<int> coord(-1024 * radius + 1, 1024 * radius - 1), comp(-20, 20);
  while (true) {
    const Vec2<Rational> pos{Rational(coord(rng), 1024), Rational(coord(rng), 1024)};
    if (inside_any(field, pos)) continue;
    const int dx = comp(rng), dy = comp(rng);
    if (std::gcd(dx, dy) != 1) continue;
    return {pos, {Rational(dx), Rational(dy)}};
  }
}

inline PhasePoint<double> to_float(const PhasePoint<Rational>& p) {
  const auto d = windtree::to_double(p.dir);
  const double n = windtree::norm(d);
  return {windtree::to_double(p.pos), {d.x / n, d.y / n}};
}

inline PhasePoint<double> float_start(const windtree::ObstacleField<double>& field, std::mt19937_64& rng,
                                      double radius = 4) {
  std::uniform_real_distribution<double> coord(-radius, radius), ang(0, 2 * M_PI);
  while (true) {
    const Vec2<double> pos{coord(rng), coord(rng)};
    if (inside_any(field, pos)) continue;
    const double a = ang(rng);
    return {pos, {std::cos(a), std::sin(a)}};
  }
}

}  // namespace testsupport
