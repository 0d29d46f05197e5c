#pragma once

// Ray/obstacle primitives shared by the float and exact engines.
//
// Every routine is a template over the scalar type S: `double` for the float
// engine and `Rational` for the exact one. The float engine treats values
// within kSingularTolerance of a vertex (or of tangency) as singular; the exact
// engine uses equality.

#include <cmath>
#include <optional>
#include <stdexcept>

#include "windtree/rational.hpp"

namespace windtree {

inline constexpr double kSingularTolerance = 1e-12;

template <class S>
struct Vec2 {
  S x{};
  S y{};

  bool operator==(const Vec2&) const = default;
};

/// Float engine: unit vector. Exact engine: primitive integer vector
/// (gcd(|dx|,|dy|) = 1) stored as rationals with denominator 1.
template <class S>
using Direction = Vec2<S>;

template <class S>
Vec2<S> operator+(const Vec2<S>& a, const Vec2<S>& b) { return {a.x + b.x, a.y + b.y}; }
template <class S>
Vec2<S> operator-(const Vec2<S>& a, const Vec2<S>& b) { return {a.x - b.x, a.y - b.y}; }
template <class S>
Vec2<S> operator-(const Vec2<S>& a) { return {-a.x, -a.y}; }
template <class S>
Vec2<S> operator*(const S& k, const Vec2<S>& a) { return {k * a.x, k * a.y}; }
template <class S>
S dot(const Vec2<S>& a, const Vec2<S>& b) { return a.x * b.x + a.y * b.y; }
template <class S>
S cross(const Vec2<S>& a, const Vec2<S>& b) { return a.x * b.y - a.y * b.x; }

inline double norm(const Vec2<double>& a) { return std::hypot(a.x, a.y); }

template <class S>
Vec2<double> to_double(const Vec2<S>& v) { return {to_double(v.x), to_double(v.y)}; }

template <class S>
S tolerance() {
  if constexpr (is_exact_v<S>) return S(0);
  else return kSingularTolerance;
}

inline bool near(double a, double b) { return std::abs(a - b) <= kSingularTolerance; }
inline bool near(const Rational& a, const Rational& b) { return a == b; }

template <class S>
bool is_zero(const S& v) { return near(v, S(0)); }

/// Axis-aligned rectangle obstacle of width 2*half_w and height 2*half_h.
template <class S>
struct Rect {
  Vec2<S> center;
  S half_w{};
  S half_h{};

  S left() const { return center.x - half_w; }
  S right() const { return center.x + half_w; }
  S bottom() const { return center.y - half_h; }
  S top() const { return center.y + half_h; }
};

struct Disk {
  Vec2<double> center;
  double radius = 0.0;
};

enum class HitKind { Regular, Corner, Tangent };

template <class S>
struct Hit {
  S t{};  // ray parameter; a path length when |dir| = 1
  Vec2<S> point;
  Vec2<S> normal;  // outward
  HitKind kind = HitKind::Regular;
};

namespace detail {

// One face of a rectangle: the line coord == level, bounded by [lo, hi] in the
// other coordinate. `axis_x` selects vertical faces.
template <class S>
void face_hit(const Vec2<S>& o, const Direction<S>& d, bool axis_x, const S& level, int outward,
              const S& lo, const S& hi, std::optional<Hit<S>>& best) {
  const S& oc = axis_x ? o.x : o.y;
  const S& dc = axis_x ? d.x : d.y;
  const S& ow = axis_x ? o.y : o.x;
  const S& dw = axis_x ? d.y : d.x;
  // Only faces whose outward normal opposes the motion can be entered.
  if (outward > 0 ? !(dc < 0 && oc >= level) : !(dc > 0 && oc <= level)) return;
  S t = (level - oc) / dc;
  if (!(t > 0)) return;
  S w = ow + t * dw;
  const S tol = tolerance<S>();
  if (w < lo - tol || w > hi + tol) return;
  if (best && !(t < best->t)) return;
  Hit<S> h;
  h.t = t;
  h.point = axis_x ? Vec2<S>{level, w} : Vec2<S>{w, level};
  h.normal = axis_x ? Vec2<S>{S(outward), S(0)} : Vec2<S>{S(0), S(outward)};
  if (near(w, lo) || near(w, hi))
    h.kind = is_zero(dw) ? HitKind::Tangent : HitKind::Corner;
  best = h;
}

}  // namespace detail

/// First point where the ray origin + t*dir (t > 0) meets the boundary of
/// `rect`, with the outward normal of the struck side. The origin must lie
/// outside the open rectangle; points on its boundary are allowed.
template <class S>
std::optional<Hit<S>> ray_rect_intersection(const Vec2<S>& origin, const Direction<S>& dir,
                                            const Rect<S>& rect) {
  std::optional<Hit<S>> best;
  detail::face_hit(origin, dir, true, rect.right(), +1, rect.bottom(), rect.top(), best);
  detail::face_hit(origin, dir, true, rect.left(), -1, rect.bottom(), rect.top(), best);
  detail::face_hit(origin, dir, false, rect.top(), +1, rect.left(), rect.right(), best);
  detail::face_hit(origin, dir, false, rect.bottom(), -1, rect.left(), rect.right(), best);
  return best;
}

/// Specular reflection off a side of an axis-aligned rectangle. Rejects corner
/// (non-axis) normals and directions that do not point into the side.
template <class S>
Direction<S> reflect_rect(const Direction<S>& dir, const Vec2<S>& normal) {
  const bool vertical = normal.y == 0 && (normal.x == 1 || normal.x == -1);
  const bool horizontal = normal.x == 0 && (normal.y == 1 || normal.y == -1);
  if (!vertical && !horizontal)
    throw std::invalid_argument("reflect_rect: normal must be axis aligned (corner hits are singular)");
  if (!(dot(dir, normal) < 0)) throw std::invalid_argument("reflect_rect: direction does not point into the side");
  return vertical ? Direction<S>{-dir.x, dir.y} : Direction<S>{dir.x, -dir.y};
}

/// First intersection of a unit-speed ray with a disk. Grazing lines whose
/// discriminant is below the tangency tolerance come back as HitKind::Tangent.
inline std::optional<Hit<double>> ray_disk_intersection(const Vec2<double>& origin,
                                                        const Direction<double>& dir,
                                                        const Disk& disk) {
  const Vec2<double> oc = origin - disk.center;
  const double b = dot(oc, dir);
  if (b >= 0) return std::nullopt;  // moving away from (or perpendicular to) the center
  const double c = dot(oc, oc) - disk.radius * disk.radius;
  const double disc = b * b - c;
  if (disc < -kSingularTolerance) return std::nullopt;
  Hit<double> h;
  if (disc < kSingularTolerance) {
    h.kind = HitKind::Tangent;
    h.t = -b;
  } else {
    h.t = -b - std::sqrt(disc);
  }
  if (!(h.t > 0)) return std::nullopt;
  h.point = origin + h.t * dir;
  const Vec2<double> n = h.point - disk.center;
  const double len = norm(n);
  h.normal = {n.x / len, n.y / len};
  return h;
}

/// dir - 2 (dir . n) n with n normalized first.
inline Direction<double> reflect_disk(const Direction<double>& dir, const Vec2<double>& normal) {
  const double len = norm(normal);
  const Vec2<double> n{normal.x / len, normal.y / len};
  const double dn = dot(dir, n);
  if (!(dn < 0)) throw std::invalid_argument("reflect_disk: direction does not point into the disk");
  return {dir.x - 2 * dn * n.x, dir.y - 2 * dn * n.y};
}

}  // namespace windtree
