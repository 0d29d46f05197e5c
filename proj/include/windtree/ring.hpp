#pragma once

// Polygonal ring gauges: |x|+|y| on the square lattice, the hexagonal gauge on
// the triangular one. The level-N polygon passes through the centers of the
// sites at lattice distance N.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "windtree/geometry.hpp"
#include "windtree/table.hpp"

namespace windtree {

template <class S>
class RingGauge {
 public:
  /// Parameter interval [lo, hi] of the line p + s*d inside the level polygon.
  struct Clip {
    bool empty = true;
    S lo{};
    S hi{};
    bool sliding = false;  // the line runs along an edge line of the polygon
  };

  static RingGauge diamond() {
    RingGauge g;
    g.normals_ = {{S(1), S(1)}, {S(-1), S(1)}, {S(-1), S(-1)}, {S(1), S(-1)}};
    g.vertices_ = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return g;
  }

  static RingGauge hexagonal() {
    static_assert(!is_exact_v<S>, "the hexagonal gauge is irrational");
    constexpr double r3 = 1.7320508075688772935;
    RingGauge g;
    g.normals_ = {{1, 1 / r3}, {0, 2 / r3}, {-1, 1 / r3}, {-1, -1 / r3}, {0, -2 / r3}, {1, -1 / r3}};
    g.vertices_ = {{1, 0}, {0.5, r3 / 2}, {-0.5, r3 / 2}, {-1, 0}, {-0.5, -r3 / 2}, {0.5, -r3 / 2}};
    return g;
  }

  static RingGauge for_lattice(Lattice lattice) {
    if (lattice == Lattice::Square) return diamond();
    if constexpr (is_exact_v<S>) throw std::invalid_argument("exact engine supports the square lattice only");
    else return hexagonal();
  }

  S value(const Vec2<S>& p) const {
    S best = dot(normals_[0], p);
    for (std::size_t k = 1; k < normals_.size(); ++k) best = std::max(best, dot(normals_[k], p));
    return best;
  }

  Clip clip(const Vec2<S>& p, const Direction<S>& d, const S& level) const {
    Clip c;
    std::optional<S> lo, hi;
    const S tol = tolerance<S>();
    for (const auto& a : normals_) {
      const S num = level - dot(a, p);
      const S den = dot(a, d);
      if (is_zero(den)) {
        if (num < -tol) return c;
        if (!(num > tol)) c.sliding = true;
        continue;
      }
      const S s = num / den;
      if (den > 0) {
        if (!hi || s < *hi) hi = s;
      } else {
        if (!lo || s > *lo) lo = s;
      }
    }
    if (!lo || !hi || *lo > *hi) return c;
    c.empty = false;
    c.lo = *lo;
    c.hi = *hi;
    return c;
  }

  /// Counterclockwise vertices of the level polygon.
  std::vector<Vec2<double>> polygon(double level) const {
    std::vector<Vec2<double>> out;
    for (const auto& v : vertices_) out.push_back({v.x * level, v.y * level});
    return out;
  }

  /// Unit outward normal of the polygon face whose support attains value(p).
  Vec2<double> outward_normal(const Vec2<double>& p) const {
    std::size_t arg = 0;
    double best = -1e300;
    for (std::size_t k = 0; k < normals_.size(); ++k) {
      const double v = to_double(normals_[k].x) * p.x + to_double(normals_[k].y) * p.y;
      if (v > best) {
        best = v;
        arg = k;
      }
    }
    const Vec2<double> n = to_double(normals_[arg]);
    const double len = norm(n);
    return {n.x / len, n.y / len};
  }

  const std::vector<Vec2<S>>& normals() const { return normals_; }

 private:
  std::vector<Vec2<S>> normals_;
  std::vector<Vec2<double>> vertices_;
};

}  // namespace windtree
