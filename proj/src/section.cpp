#include "windtree/section.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "windtree/parallel.hpp"
#include "windtree/random.hpp"

namespace windtree {

const char* to_string(Side side) { return side == Side::Inner ? "inner" : "outer"; }

const char* to_string(ReturnStatus status) {
  switch (status) {
    case ReturnStatus::Returned: return "returned";
    case ReturnStatus::Escaped: return "escaped";
    case ReturnStatus::BudgetExceeded: return "budget";
    case ReturnStatus::Singular: return "singular";
  }
  return "?";
}

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

template <class S>
std::vector<Vec2<S>> level_polygon(Lattice lattice, std::int64_t n) {
  if (lattice == Lattice::Square) {
    const S v(n);
    return {{v, S(0)}, {S(0), v}, {-v, S(0)}, {S(0), -v}};
  }
  if constexpr (is_exact_v<S>) {
    throw std::invalid_argument("exact sections need the square lattice");
  } else {
    return RingGauge<double>::hexagonal().polygon(static_cast<double>(n));
  }
}

double point_segment_distance(const Vec2<double>& p, const Vec2<double>& a, const Vec2<double>& b) {
  const Vec2<double> ab = b - a;
  const double len2 = dot(ab, ab);
  double u = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  return norm(p - (a + u * ab));
}

template <class S>
S abs_s(const S& v) {
  return v < 0 ? S(-v) : v;
}

// Smallest |x| over [lo, hi].
template <class S>
S min_abs(const S& lo, const S& hi) {
  if (lo <= 0 && hi >= 0) return S(0);
  return std::min(abs_s(lo), abs_s(hi));
}

// Parameter interval of the segment a + u (b - a), u in [0, 1], inside a
// closed rectangle (Liang-Barsky).
template <class S>
std::optional<std::pair<S, S>> clip_segment(const Vec2<S>& a, const Vec2<S>& b, const Rect<S>& r) {
  S lo(0), hi(1);
  const Vec2<S> d = b - a;
  auto edge = [&](const S& p, const S& q) {
    // p*u <= q
    if (p == 0) return q >= 0;
    const S u = q / p;
    if (p < 0) lo = std::max(lo, u);
    else hi = std::min(hi, u);
    return lo <= hi;
  };
  if (!edge(S(-d.x), S(a.x - r.left())) || !edge(d.x, S(r.right() - a.x)) || !edge(S(-d.y), S(a.y - r.bottom())) ||
      !edge(d.y, S(r.top() - a.y)))
    return std::nullopt;
  return std::pair{lo, hi};
}

std::optional<std::pair<double, double>> clip_segment(const Vec2<double>& a, const Vec2<double>& b, const Disk& k) {
  const Vec2<double> d = b - a;
  const Vec2<double> f = a - k.center;
  const double qa = dot(d, d), qb = 2 * dot(f, d), qc = dot(f, f) - k.radius * k.radius;
  const double disc = qb * qb - 4 * qa * qc;
  if (disc <= 0) return std::nullopt;
  const double root = std::sqrt(disc);
  const double u0 = std::max(0.0, (-qb - root) / (2 * qa));
  const double u1 = std::min(1.0, (-qb + root) / (2 * qa));
  if (!(u0 < u1)) return std::nullopt;
  return std::pair{u0, u1};
}

template <class S>
Vec2<double> path_point(const SectionPiece<S>& p, bool last) {
  if (p.arc) {
    const double a = p.arc->angle0 + (last ? p.arc->sweep : 0.0);
    return {p.arc->disk.center.x + p.arc->disk.radius * std::cos(a),
            p.arc->disk.center.y + p.arc->disk.radius * std::sin(a)};
  }
  return to_double(last ? p.path.back() : p.path.front());
}

template <class S>
double polyline_length(const std::vector<Vec2<S>>& path) {
  double len = 0;
  for (std::size_t k = 1; k < path.size(); ++k) len += norm(to_double(path[k] - path[k - 1]));
  return len;
}

}  // namespace

template <class S>
Vec2<double> SectionPiece<S>::start() const {
  return path_point(*this, false);
}

template <class S>
Vec2<double> SectionPiece<S>::end() const {
  return path_point(*this, true);
}

template <class S>
bool SectionCurve<S>::is_ring_shape(const ShapeOf<S>& shape) const {
  const S level(n_);
  return std::visit(
      [&](const auto& sh) -> bool {
        if constexpr (std::is_same_v<std::decay_t<decltype(sh)>, Disk>) {
          if constexpr (is_exact_v<S>) {
            return false;
          } else {
            double max_g = -1e300;
            for (const auto& a : gauge_.normals()) max_g = std::max(max_g, dot(a, sh.center) + sh.radius * norm(a));
            if (!(max_g > level)) return false;
            if (gauge_.value(sh.center) < level) return true;
            for (std::size_t k = 0; k < polygon_.size(); ++k)
              if (point_segment_distance(sh.center, polygon_[k], polygon_[(k + 1) % polygon_.size()]) < sh.radius)
                return true;
            return false;
          }
        } else {
          // Rectangles live on the square lattice, where the gauge is |x|+|y|.
          const S min_g = min_abs(sh.left(), sh.right()) + min_abs(sh.bottom(), sh.top());
          const S max_g = std::max(abs_s(sh.left()), abs_s(sh.right())) + std::max(abs_s(sh.bottom()), abs_s(sh.top()));
          return min_g < level && max_g > level;
        }
      },
      shape);
}

template <class S>
SectionCurve<S>::SectionCurve(const ObstacleField<S>& field, std::int64_t n)
    : field_(&field), n_(n), gauge_(RingGauge<S>::for_lattice(field.lattice())) {
  if (n < 1) throw std::invalid_argument("section level must be at least 1");
  polygon_ = level_polygon<S>(field.lattice(), n);
  const S level(n);

  // Shapes near the polygon, with coincident disks (shared cluster corners)
  // kept once.
  std::vector<PlacedShape<S>> shapes;
  {
    std::vector<PlacedShape<S>> all;
    const std::int64_t span = n + 3;
    for (std::int64_t i = -span; i <= span; ++i)
      for (std::int64_t j = -span; j <= span; ++j) {
        const auto ring = ring_index(field.lattice(), {i, j});
        if (ring >= n - 2 && ring <= n + 2) field.shapes_at({i, j}, all);
      }
    for (auto& s : all) {
      if (!is_ring_shape(s.shape)) continue;
      if constexpr (!is_exact_v<S>) {
        if (const auto* d = std::get_if<Disk>(&s.shape)) {
          const bool dup = std::any_of(shapes.begin(), shapes.end(), [&](const PlacedShape<S>& o) {
            const auto* od = std::get_if<Disk>(&o.shape);
            return od && norm(od->center - d->center) < kSingularTolerance && od->radius == d->radius;
          });
          if (dup) continue;
        }
      }
      shapes.push_back(std::move(s));
    }
  }

  std::vector<SectionPiece<S>> pieces;

  // Diagonal pieces: polygon edges minus the chords covered by ring shapes.
  for (std::size_t k = 0; k < polygon_.size(); ++k) {
    const Vec2<S>& a = polygon_[k];
    const Vec2<S>& b = polygon_[(k + 1) % polygon_.size()];
    std::vector<std::pair<S, S>> covered;
    for (const auto& s : shapes) {
      std::visit(
          [&](const auto& sh) {
            if (auto iv = clip_segment(a, b, sh); iv && iv->first < iv->second) covered.push_back(*iv);
          },
          s.shape);
    }
    std::sort(covered.begin(), covered.end());
    S cursor(0);
    auto emit = [&](const S& u0, const S& u1) {
      if (!(u0 < u1)) return;
      SectionPiece<S> p;
      p.kind = PieceKind::Diagonal;
      p.path = {a + u0 * (b - a), a + u1 * (b - a)};
      p.normal = gauge_.normals()[k];
      p.length = polyline_length(p.path);
      pieces.push_back(std::move(p));
    };
    for (const auto& [u0, u1] : covered) {
      emit(cursor, u0);
      cursor = std::max(cursor, u1);
    }
    emit(cursor, S(1));
  }

  // Obstacle arcs: boundary parts outside the polygon.
  for (const auto& s : shapes) {
    if constexpr (!is_exact_v<S>) {
      if (const auto* d = std::get_if<Disk>(&s.shape)) {
        std::vector<double> angles;
        for (std::size_t k = 0; k < polygon_.size(); ++k) {
          const Vec2<double>& a = polygon_[k];
          const Vec2<double> e = polygon_[(k + 1) % polygon_.size()] - a;
          const Vec2<double> f = a - d->center;
          const double qa = dot(e, e), qb = 2 * dot(f, e), qc = dot(f, f) - d->radius * d->radius;
          const double disc = qb * qb - 4 * qa * qc;
          if (disc <= 0) continue;
          for (double u : {(-qb - std::sqrt(disc)) / (2 * qa), (-qb + std::sqrt(disc)) / (2 * qa)}) {
            if (u < 0 || u > 1) continue;
            const Vec2<double> q = (a + u * e) - d->center;
            double ang = std::atan2(q.y, q.x);
            if (ang < 0) ang += kTwoPi;
            angles.push_back(ang);
          }
        }
        std::sort(angles.begin(), angles.end());
        angles.erase(std::unique(angles.begin(), angles.end(),
                                 [](double x, double y) { return std::abs(x - y) < kSingularTolerance; }),
                     angles.end());
        if (angles.size() < 2) throw std::logic_error("ring disk does not cross the section polygon");
        for (std::size_t k = 0; k < angles.size(); ++k) {
          const double a0 = angles[k];
          const double a1 = k + 1 < angles.size() ? angles[k + 1] : angles[0] + kTwoPi;
          const double mid = 0.5 * (a0 + a1);
          const Vec2<double> q{d->center.x + d->radius * std::cos(mid), d->center.y + d->radius * std::sin(mid)};
          if (!(gauge_.value(q) > level)) continue;
          SectionPiece<S> p;
          p.kind = PieceKind::Arc;
          p.site = s.site;
          p.arc = ArcOfDisk{*d, a0, a1 - a0};
          p.length = d->radius * (a1 - a0);
          pieces.push_back(std::move(p));
        }
        continue;
      }
    }
    const auto& r = std::get<Rect<S>>(s.shape);
    const std::array<Vec2<S>, 4> corners{
        Vec2<S>{r.right(), r.bottom()}, {r.right(), r.top()}, {r.left(), r.top()}, {r.left(), r.bottom()}};
    // Split the boundary where the gauge is kinked (axis crossings) and where
    // it crosses the level, then keep the pieces outside.
    struct Sub {
      Vec2<S> a, b;
      bool outside;
    };
    std::vector<Sub> subs;
    for (std::size_t k = 0; k < 4; ++k) {
      const Vec2<S>& a = corners[k];
      const Vec2<S>& b = corners[(k + 1) % 4];
      const Vec2<S> e = b - a;
      std::vector<S> cuts{S(0), S(1)};
      if (e.x != 0) {
        const S u = -a.x / e.x;
        if (u > 0 && u < 1) cuts.push_back(u);
      }
      if (e.y != 0) {
        const S u = -a.y / e.y;
        if (u > 0 && u < 1) cuts.push_back(u);
      }
      std::sort(cuts.begin(), cuts.end());
      std::vector<S> all = cuts;
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const S g0 = gauge_.value(a + cuts[c] * e);
        const S g1 = gauge_.value(a + cuts[c + 1] * e);
        if ((g0 < level && g1 > level) || (g0 > level && g1 < level))
          all.push_back(cuts[c] + (level - g0) / (g1 - g0) * (cuts[c + 1] - cuts[c]));
      }
      std::sort(all.begin(), all.end());
      for (std::size_t c = 0; c + 1 < all.size(); ++c) {
        if (!(all[c] < all[c + 1])) continue;
        const Vec2<S> p0 = a + all[c] * e, p1 = a + all[c + 1] * e;
        const S mid = (all[c] + all[c + 1]) / S(2);
        subs.push_back({p0, p1, gauge_.value(a + mid * e) > level});
      }
    }
    std::size_t first = subs.size();
    for (std::size_t k = 0; k < subs.size(); ++k)
      if (subs[k].outside && !subs[(k + subs.size() - 1) % subs.size()].outside) {
        first = k;
        break;
      }
    if (first == subs.size()) throw std::logic_error("ring rectangle has no outer boundary part");
    for (std::size_t step = 0; step < subs.size();) {
      const std::size_t k = (first + step) % subs.size();
      if (!subs[k].outside) {
        ++step;
        continue;
      }
      SectionPiece<S> p;
      p.kind = PieceKind::Arc;
      p.site = s.site;
      p.path.push_back(subs[k].a);
      while (step < subs.size() && subs[(first + step) % subs.size()].outside) {
        p.path.push_back(subs[(first + step) % subs.size()].b);
        ++step;
      }
      p.length = polyline_length(p.path);
      pieces.push_back(std::move(p));
    }
  }

  // Counterclockwise order around the origin, starting with the piece that
  // crosses the positive x axis.
  auto mid_angle = [](const SectionPiece<S>& p) {
    Vec2<double> m;
    if (p.arc) {
      const double a = p.arc->angle0 + 0.5 * p.arc->sweep;
      m = {p.arc->disk.center.x + p.arc->disk.radius * std::cos(a),
           p.arc->disk.center.y + p.arc->disk.radius * std::sin(a)};
    } else {
      m = 0.5 * (p.start() + p.end());
    }
    double ang = std::atan2(m.y, m.x);
    return ang < 0 ? ang + kTwoPi : ang;
  };
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t k = 0; k < pieces.size(); ++k) order.push_back({mid_angle(pieces[k]), k});
  std::sort(order.begin(), order.end());
  for (const auto& [ang, k] : order) pieces_.push_back(std::move(pieces[k]));
  auto head = std::find_if(pieces_.begin(), pieces_.end(), [](const SectionPiece<S>& p) {
    return p.start().x > 0 && p.start().y <= 0 && p.end().y > 0;
  });
  if (head != pieces_.end()) std::rotate(pieces_.begin(), head, pieces_.end());

  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const auto& next = pieces_[(k + 1) % pieces_.size()];
    if (norm(pieces_[k].end() - next.start()) > 1e-9) throw std::logic_error("section curve is not closed");
    pieces_[k].offset = total_length_;
    total_length_ += pieces_[k].length;
    if (pieces_[k].kind == PieceKind::Diagonal) diagonal_length_ += pieces_[k].length;
  }
}

template <class S>
double SectionCurve<S>::locate(const Vec2<double>& p) const {
  double best = 1e300, s = 0;
  for (const auto& piece : pieces_) {
    if (piece.arc) {
      const auto& arc = *piece.arc;
      const Vec2<double> q = p - arc.disk.center;
      double rel = std::atan2(q.y, q.x) - arc.angle0;
      rel = std::fmod(rel, kTwoPi);
      if (rel < 0) rel += kTwoPi;
      if (rel > arc.sweep) rel = rel - arc.sweep < kTwoPi - rel ? arc.sweep : 0.0;
      const double a = arc.angle0 + rel;
      const Vec2<double> on{arc.disk.center.x + arc.disk.radius * std::cos(a),
                            arc.disk.center.y + arc.disk.radius * std::sin(a)};
      if (const double dist = norm(p - on); dist < best) {
        best = dist;
        s = piece.offset + arc.disk.radius * rel;
      }
      continue;
    }
    double along = 0;
    for (std::size_t k = 1; k < piece.path.size(); ++k) {
      const Vec2<double> a = to_double(piece.path[k - 1]), b = to_double(piece.path[k]);
      const Vec2<double> ab = b - a;
      const double len = norm(ab);
      const double u = std::clamp(dot(p - a, ab) / (len * len), 0.0, 1.0);
      if (const double dist = norm(p - (a + u * ab)); dist < best) {
        best = dist;
        s = piece.offset + along + u * len;
      }
      along += len;
    }
  }
  return s;
}

template <class S>
SectionPoint<S> reversed(const SectionPoint<S>& p) {
  SectionPoint<S> r = p;
  if (p.kind == PieceKind::Diagonal) {
    r.dir = -p.dir;
    r.side = p.side == Side::Inner ? Side::Outer : Side::Inner;
    return r;
  }
  const Direction<S> back = -p.dir;
  if constexpr (is_exact_v<S>) {
    r.dir = reflect_rect(back, p.normal);
  } else {
    const double len = norm(p.normal);
    const Vec2<double> nn{p.normal.x / len, p.normal.y / len};
    const double dn = dot(back, nn);
    r.dir = {back.x - 2 * dn * nn.x, back.y - 2 * dn * nn.y};
    const double dl = norm(r.dir);
    r.dir = {r.dir.x / dl, r.dir.y / dl};
  }
  r.side = Side::Outer;
  return r;
}

namespace {

constexpr int kMaxRedraws = 10'000;
constexpr std::int64_t kExactPositionDenominator = 1 << 20;
constexpr double kExactDirectionScale = 64.0;

// Rounds a unit direction to a primitive integer vector.
std::optional<Direction<Rational>> integer_direction(const Vec2<double>& d) {
  auto x = static_cast<std::int64_t>(std::llround(d.x * kExactDirectionScale));
  auto y = static_cast<std::int64_t>(std::llround(d.y * kExactDirectionScale));
  const std::int64_t g = std::gcd(x, y);
  if (g == 0) return std::nullopt;
  return Direction<Rational>{Rational(x / g), Rational(y / g)};
}

}  // namespace

template <class S>
SectionPoint<S> sample_point(const SectionCurve<S>& curve, Side side, std::uint64_t seed, std::uint64_t index,
                             std::uint64_t attempt) {
  SampleRng rng(seed, index, attempt);
  const double pool = side == Side::Inner ? curve.diagonal_length() : curve.total_length();
  if (!(pool > 0)) throw std::invalid_argument("section curve has no pieces to sample on this side");

  for (int draw = 0; draw < kMaxRedraws; ++draw) {
    double ell = rng.uniform() * pool;
    const SectionPiece<S>* piece = nullptr;
    for (const auto& p : curve.pieces()) {
      if (side == Side::Inner && p.kind != PieceKind::Diagonal) continue;
      piece = &p;
      if (ell < p.length) break;
      ell -= p.length;
    }
    if (!piece || ell < kSingularTolerance || ell > piece->length - kSingularTolerance) continue;

    SectionPoint<S> sp;
    sp.side = side;
    sp.kind = piece->kind;
    sp.s = piece->offset + ell;
    Vec2<double> normal;  // unit normal on the chosen side
    if (piece->arc) {
      if constexpr (!is_exact_v<S>) {
        const auto& arc = *piece->arc;
        const double a = arc.angle0 + ell / arc.disk.radius;
        normal = {std::cos(a), std::sin(a)};
        sp.pos = {arc.disk.center.x + arc.disk.radius * normal.x, arc.disk.center.y + arc.disk.radius * normal.y};
        sp.normal = normal;
      }
    } else {
      std::size_t seg = 1;
      double len = 0;
      for (; seg < piece->path.size(); ++seg) {
        len = norm(to_double(piece->path[seg] - piece->path[seg - 1]));
        if (ell <= len) break;
        ell -= len;
      }
      if (seg == piece->path.size()) continue;
      if (ell < kSingularTolerance || ell > len - kSingularTolerance) continue;
      const Vec2<S>& a = piece->path[seg - 1];
      const Vec2<S>& b = piece->path[seg];
      const Vec2<double> e = to_double(b - a);
      if (piece->kind == PieceKind::Diagonal) {
        sp.normal = piece->normal;
        const Vec2<double> n = to_double(piece->normal);
        normal = {n.x / norm(n), n.y / norm(n)};
        if (side == Side::Inner) normal = -normal;
      } else {
        normal = {e.y / len, -e.x / len};  // right of a counterclockwise walk
        sp.normal = {b.y - a.y, a.x - b.x};
        if constexpr (is_exact_v<S>) {
          // Faces are axis aligned; keep the unit normal.
          sp.normal = {sp.normal.x > 0 ? S(1) : sp.normal.x < 0 ? S(-1) : S(0),
                       sp.normal.y > 0 ? S(1) : sp.normal.y < 0 ? S(-1) : S(0)};
        } else {
          sp.normal = normal;
        }
      }
      if constexpr (is_exact_v<S>) {
        auto k = static_cast<std::int64_t>(std::llround(ell / len * static_cast<double>(kExactPositionDenominator)));
        k = std::clamp<std::int64_t>(k, 1, kExactPositionDenominator - 1);
        sp.pos = a + Rational(k, kExactPositionDenominator) * (b - a);
      } else {
        sp.pos = a + (ell / len) * (b - a);
      }
    }

    const double theta = std::asin(2 * rng.uniform() - 1);
    if (!(std::cos(theta) > kSingularTolerance)) continue;
    const Vec2<double> tangent{-normal.y, normal.x};
    Vec2<double> d{std::cos(theta) * normal.x + std::sin(theta) * tangent.x,
                   std::cos(theta) * normal.y + std::sin(theta) * tangent.y};
    const double dl = norm(d);
    d = {d.x / dl, d.y / dl};
    if constexpr (is_exact_v<S>) {
      auto id = integer_direction(d);
      if (!id) continue;
      Vec2<Rational> side_normal = sp.normal;
      if (side == Side::Inner) side_normal = -side_normal;
      if (!(dot(*id, side_normal) > 0)) continue;
      sp.dir = *id;
    } else {
      sp.dir = d;
    }
    return sp;
  }
  throw std::runtime_error("section sampling failed to find a regular point");
}

template <class S>
std::vector<SectionPoint<S>> sample_section(const SectionCurve<S>& curve, Side side, std::size_t n,
                                            std::uint64_t seed) {
  std::vector<SectionPoint<S>> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(sample_point(curve, side, seed, k));
  return out;
}

template <class S>
ReturnOutcome<S> first_return(const SectionCurve<S>& curve, const SectionPoint<S>& sp, std::int64_t m,
                              const Budget& budget) {
  if (m <= curve.level()) throw std::invalid_argument("escape level M must exceed the section level N");
  const auto& gauge = curve.gauge();
  const auto& field = curve.field();
  const S level(curve.level());
  bool radius_capped = static_cast<double>(m) > budget.max_radius;
  const S escape = radius_capped ? scalar_from<S>(budget.max_radius) : S(m);
  const S max_param = scalar_from<S>(budget.max_path_length / norm(to_double(sp.dir)));
  const S first_skip = is_exact_v<S> ? S(0) : scalar_from<S>(1e-9);

  ReturnOutcome<S> out;
  PhasePoint<S> st{sp.pos, sp.dir};
  bool first = true;
  auto finish = [&](ReturnStatus status) {
    out.status = status;
    return out;
  };

  while (true) {
    if (out.collisions >= budget.max_collisions) return finish(ReturnStatus::BudgetExceeded);
    const auto cm = gauge.clip(st.pos, st.dir, escape);
    S limit = cm.empty ? S(0) : std::max(cm.hi, S(0));
    bool to_exit = true;
    if (S rest = max_param - out.time; rest < limit) {
      limit = std::max(rest, S(0));
      to_exit = false;
    }
    const auto c = next_collision(field, st, limit);
    const S flight_end = c ? c->hit.t : limit;
    const S skip = first ? first_skip : S(0);

    const auto cn = gauge.clip(st.pos, st.dir, level);
    if (!cn.empty) {
      if (cn.sliding && cn.hi > skip && cn.lo <= flight_end) return finish(ReturnStatus::Singular);
      std::optional<S> cross;
      Side side = Side::Inner;
      if (cn.lo > skip && cn.lo <= flight_end) {
        cross = cn.lo;
      } else if (cn.hi > skip && cn.hi <= flight_end) {
        cross = cn.hi;
        side = Side::Outer;
      }
      if (cross) {
        if (near(cn.lo, cn.hi) || (c && near(*cross, flight_end))) return finish(ReturnStatus::Singular);
        SectionPoint<S> rp;
        rp.pos = st.pos + *cross * st.dir;
        rp.dir = st.dir;
        rp.side = side;
        rp.kind = PieceKind::Diagonal;
        const auto& normals = gauge.normals();
        rp.normal = normals[0];
        for (const auto& a : normals)
          if (dot(a, rp.pos) > dot(rp.normal, rp.pos)) rp.normal = a;
        rp.s = curve.locate(to_double(rp.pos));
        out.time = out.time + *cross;
        out.point = rp;
        return finish(ReturnStatus::Returned);
      }
    }

    if (!c) {
      out.time = out.time + limit;
      return finish(to_exit && !radius_capped ? ReturnStatus::Escaped : ReturnStatus::BudgetExceeded);
    }
    if (c->hit.kind != HitKind::Regular) return finish(ReturnStatus::Singular);
    out.time = out.time + c->hit.t;
    st.pos = c->hit.point;
    st.dir = reflect(st.dir, c->hit, c->shape);
    ++out.collisions;
    first = false;
    if (curve.is_ring_shape(c->shape)) {
      const S g = gauge.value(st.pos);
      if (near(g, level)) return finish(ReturnStatus::Singular);
      if (g > level) {
        SectionPoint<S> rp;
        rp.pos = st.pos;
        rp.dir = st.dir;
        rp.side = Side::Outer;
        rp.kind = PieceKind::Arc;
        rp.normal = c->hit.normal;
        rp.s = curve.locate(to_double(rp.pos));
        out.point = rp;
        return finish(ReturnStatus::Returned);
      }
    }
  }
}

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials) {
  if (trials <= 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1 + z * z / n;
  const double center = (p + z * z / (2 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  return {std::clamp(center - half, 0.0, p), std::clamp(center + half, p, 1.0)};
}

template <class S>
FractionEstimate recurrence_fraction(const ObstacleField<S>& field, std::int64_t n, std::int64_t m,
                                     const RecurrenceOptions& options) {
  if (m <= n) throw std::invalid_argument("escape level M must exceed the section level N");
  if (options.n_samples < 1) throw std::invalid_argument("need at least one sample");
  const SectionCurve<S> curve(field, n);
  struct Tally {
    ReturnStatus status = ReturnStatus::BudgetExceeded;
    std::int64_t singular = 0;
  };
  std::vector<Tally> tally(static_cast<std::size_t>(options.n_samples));
  parallel_for(tally.size(), options.threads, [&](std::size_t k) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      const auto sp = sample_point(curve, Side::Outer, options.seed, k, attempt);
      const auto r = first_return(curve, sp, m, options.budget);
      if (r.status != ReturnStatus::Singular) {
        tally[k].status = r.status;
        return;
      }
      if (++tally[k].singular > kMaxRedraws) throw TooManySingular("sample keeps landing on singular orbits");
    }
  });

  FractionEstimate e;
  e.n = n;
  e.m = m;
  e.seed = options.seed;
  e.n_samples = options.n_samples;
  for (const auto& t : tally) {
    e.singular += t.singular;
    if (t.status == ReturnStatus::Returned) ++e.returned;
    else if (t.status == ReturnStatus::Escaped) ++e.escaped;
    else ++e.budget;
  }
  if (e.singular * 100 > e.n_samples + e.singular)
    throw TooManySingular("more than 1% of section samples were singular (" + std::to_string(e.singular) + " of " +
                          std::to_string(e.n_samples + e.singular) + "); check obstacle geometry and tolerances");
  e.point = static_cast<double>(e.returned) / static_cast<double>(e.n_samples);
  const auto ci = wilson_interval(e.returned, e.n_samples);
  e.ci_low = ci.low;
  e.ci_high = ci.high;
  return e;
}

AnnulusCertificate find_annulus_width(const RationalPair& e, std::int64_t n, const AnnulusSearch& search,
                                      const RecurrenceOptions& options) {
  if (!(search.epsilon > 0 && search.epsilon < 1)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (n < 1) throw std::invalid_argument("section level must be at least 1");
  if (!is_odd_over_even(e))
    throw std::invalid_argument("obstacle dimensions " + to_string(e.a()) + " x " + to_string(e.b()) +
                                " are not odd-over-even");
  const ObstacleField<double> field(TableConfig::constant(RectObstacle{e.a(), e.b()}));
  AnnulusCertificate cert;
  std::int64_t m = 2 * n;
  for (int k = 0; k < search.max_doublings; ++k, m *= 2) {
    cert.trace.push_back(recurrence_fraction(field, n, m, options));
    if (cert.trace.back().ci_low >= 1 - search.epsilon) {
      cert.certified = true;
      cert.width = m;
      cert.estimate = cert.trace.back();
      return cert;
    }
  }
  if (!cert.trace.empty()) cert.estimate = cert.trace.back();
  return cert;
}

template struct SectionPiece<double>;
template struct SectionPiece<Rational>;
template class SectionCurve<double>;
template class SectionCurve<Rational>;

#define WINDTREE_INSTANTIATE(S)                                                                                 \
  template SectionPoint<S> reversed(const SectionPoint<S>&);                                                    \
  template SectionPoint<S> sample_point(const SectionCurve<S>&, Side, std::uint64_t, std::uint64_t,             \
                                        std::uint64_t);                                                         \
  template std::vector<SectionPoint<S>> sample_section(const SectionCurve<S>&, Side, std::size_t, std::uint64_t); \
  template ReturnOutcome<S> first_return(const SectionCurve<S>&, const SectionPoint<S>&, std::int64_t,          \
                                         const Budget&);                                                        \
  template FractionEstimate recurrence_fraction(const ObstacleField<S>&, std::int64_t, std::int64_t,            \
                                                const RecurrenceOptions&);

WINDTREE_INSTANTIATE(double)
WINDTREE_INSTANTIATE(Rational)

#undef WINDTREE_INSTANTIATE

}  // namespace windtree
