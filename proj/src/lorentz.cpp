#include "windtree/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "windtree/parallel.hpp"
#include "windtree/random.hpp"

namespace windtree {

namespace {

constexpr double kRowHeight = 0.86602540378443864676;

// Parameter interval where the full line o + t d meets a closed shape.
std::optional<std::pair<double, double>> chord(const Vec2<double>& o, const Vec2<double>& d,
                                               const ShapeOf<double>& shape) {
  if (const auto* k = std::get_if<Disk>(&shape)) {
    const Vec2<double> f = o - k->center;
    const double b = dot(f, d);
    const double disc = b * b - (dot(f, f) - k->radius * k->radius);
    if (disc < 0) return std::nullopt;
    const double root = std::sqrt(disc);
    return std::pair{-b - root, -b + root};
  }
  const auto& r = std::get<Rect<double>>(shape);
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  auto slab = [&](double oc, double dc, double a, double b) {
    if (dc == 0) return oc >= a && oc <= b;
    double t0 = (a - oc) / dc, t1 = (b - oc) / dc;
    if (t0 > t1) std::swap(t0, t1);
    lo = std::max(lo, t0);
    hi = std::min(hi, t1);
    return lo <= hi;
  };
  if (!slab(o.x, d.x, r.left(), r.right()) || !slab(o.y, d.y, r.bottom(), r.top())) return std::nullopt;
  return std::pair{lo, hi};
}

double shape_gap(const ShapeOf<double>& a, const ShapeOf<double>& b) {
  const auto* da = std::get_if<Disk>(&a);
  const auto* db = std::get_if<Disk>(&b);
  auto rect_point = [](const Rect<double>& r, const Vec2<double>& p) {
    const double gx = std::max({r.left() - p.x, 0.0, p.x - r.right()});
    const double gy = std::max({r.bottom() - p.y, 0.0, p.y - r.top()});
    return std::hypot(gx, gy);
  };
  if (da && db) return norm(da->center - db->center) - da->radius - db->radius;
  if (da) return rect_point(std::get<Rect<double>>(b), da->center) - da->radius;
  if (db) return rect_point(std::get<Rect<double>>(a), db->center) - db->radius;
  const auto& ra = std::get<Rect<double>>(a);
  const auto& rb = std::get<Rect<double>>(b);
  const double gx = std::abs(ra.center.x - rb.center.x) - ra.half_w - rb.half_w;
  const double gy = std::abs(ra.center.y - rb.center.y) - ra.half_h - rb.half_h;
  if (gx < 0 && gy < 0) return std::max(gx, gy);
  return std::hypot(std::max(gx, 0.0), std::max(gy, 0.0));
}

bool same_disk(const ShapeOf<double>& a, const ShapeOf<double>& b) {
  const auto* da = std::get_if<Disk>(&a);
  const auto* db = std::get_if<Disk>(&b);
  return da && db && norm(da->center - db->center) < kSingularTolerance && da->radius == db->radius;
}

}  // namespace

HorizonReport horizon_probe(const ObstacleField<double>& field, std::int64_t n_lines, double probe_length,
                            std::uint64_t seed, unsigned threads) {
  if (!(probe_length > 0)) throw std::invalid_argument("probe length must be positive");
  struct LineResult {
    ProbeLine line;
    double max_gap = 0.0;
    std::size_t chords = 0;
  };
  std::vector<LineResult> lines(static_cast<std::size_t>(std::max<std::int64_t>(n_lines, 0)));
  parallel_for(lines.size(), threads, [&](std::size_t k) {
    SampleRng rng(seed, k);
    const double u = rng.uniform() - 0.5, v = rng.uniform() - 0.5;
    const double angle = 2 * std::numbers::pi * rng.uniform();
    Vec2<double> o{u, v};
    if (field.lattice() == Lattice::Triangular) o = {u + 0.5 * v, kRowHeight * v};
    const Vec2<double> d{std::cos(angle), std::sin(angle)};

    std::vector<Site> sites, seen;
    std::vector<PlacedShape<double>> shapes;
    for (const auto& cell : traverse_cells(o, d, probe_length)) {
      sites.clear();
      field.candidate_sites(cell.cell.i, cell.cell.j, sites);
      for (const auto& s : sites) {
        if (std::find(seen.begin(), seen.end(), s) != seen.end()) continue;
        seen.push_back(s);
        field.shapes_at(s, shapes);
      }
    }
    std::vector<std::pair<double, double>> chords;
    for (const auto& s : shapes)
      if (auto c = chord(o, d, s.shape); c && c->second >= 0 && c->first <= probe_length)
        chords.push_back({std::max(c->first, 0.0), std::min(c->second, probe_length)});
    std::sort(chords.begin(), chords.end());

    LineResult& out = lines[k];
    out.line = {o, angle};
    double cursor = 0.0;
    for (const auto& [a, b] : chords) {
      if (a > cursor) {
        out.max_gap = std::max(out.max_gap, a - cursor);
        ++out.chords;
      } else if (out.chords == 0) {
        ++out.chords;  // the line starts inside an obstacle
      }
      cursor = std::max(cursor, b);
    }
    out.max_gap = std::max(out.max_gap, probe_length - cursor);
  });

  HorizonReport rep;
  rep.n_lines = n_lines;
  rep.probe_length = probe_length;
  for (const auto& l : lines) {
    rep.max_gap_observed = std::max(rep.max_gap_observed, l.max_gap);
    if (l.chords < 2) rep.unbounded_suspects.push_back(l.line);
  }
  rep.min_obstacle_separation = min_obstacle_separation(field);
  return rep;
}

double min_obstacle_separation(const ObstacleField<double>& field, std::int64_t window) {
  std::vector<PlacedShape<double>> shapes;
  for (std::int64_t i = -window; i <= window; ++i)
    for (std::int64_t j = -window; j <= window; ++j) field.shapes_at({i, j}, shapes);
  std::vector<PlacedShape<double>> unique;
  for (auto& s : shapes)
    if (std::none_of(unique.begin(), unique.end(), [&](const auto& u) { return same_disk(u.shape, s.shape); }))
      unique.push_back(std::move(s));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < unique.size(); ++a)
    for (std::size_t b = a + 1; b < unique.size(); ++b) {
      // Pairs more than two lattice steps apart cannot be the closest pair.
      if (std::abs(unique[a].site.i - unique[b].site.i) > 2 || std::abs(unique[a].site.j - unique[b].site.j) > 2)
        continue;
      best = std::min(best, shape_gap(unique[a].shape, unique[b].shape));
    }
  return best;
}

HorizonStability horizon_stability(const ObstacleField<double>& field, std::int64_t n_lines, double short_length,
                                   double long_length, std::uint64_t seed, unsigned threads) {
  HorizonStability out;
  out.short_probe = horizon_probe(field, n_lines, short_length, seed, threads);
  out.long_probe = horizon_probe(field, n_lines, long_length, seed, threads);
  out.stable = out.short_probe.unbounded_suspects.empty() && out.long_probe.unbounded_suspects.empty() &&
               out.long_probe.max_gap_observed <= 1.1 * out.short_probe.max_gap_observed;
  return out;
}

TableConfig triangular_lorentz_table(double radius) {
  return TableConfig::constant(DiskObstacle{radius}, Lattice::Triangular);
}

TableConfig five_disk_lorentz_table(const FiveDiskObstacle& cluster) {
  return TableConfig::constant(cluster, Lattice::Square);
}

FractionEstimate lorentz_recurrence(const ObstacleField<double>& field, std::int64_t n, std::int64_t m,
                                    const RecurrenceOptions& options) {
  return recurrence_fraction(field, n, m, options);
}

}  // namespace windtree
