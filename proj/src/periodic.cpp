#include "windtree/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "windtree/parallel.hpp"
#include "windtree/ring.hpp"
#include "windtree/section.hpp"

namespace windtree {

DirectionSlope DirectionSlope::reduced(std::int64_t p, std::int64_t q) {
  if (q == 0) throw std::invalid_argument("slope denominator must be nonzero");
  if (q < 0) {
    p = -p;
    q = -q;
  }
  const std::int64_t g = std::gcd(p, q);
  return {p / g, q / g};
}

std::string DirectionSlope::str() const { return std::to_string(p) + "/" + std::to_string(q); }

const char* to_string(OrbitStatus status) {
  switch (status) {
    case OrbitStatus::Periodic: return "periodic";
    case OrbitStatus::Escaped: return "escaped";
    case OrbitStatus::Budget: return "budget";
    case OrbitStatus::Singular: return "singular";
  }
  return "?";
}

namespace {

double l1(const Vec2<double>& p) { return std::abs(p.x) + std::abs(p.y); }

// Smallest |x|+|y| along the segment a -> b (attained at an end or an axis
// crossing).
double segment_min_l1(const Vec2<double>& a, const Vec2<double>& b) {
  double best = std::min(l1(a), l1(b));
  const Vec2<double> d = b - a;
  for (double u : {d.x != 0 ? -a.x / d.x : -1.0, d.y != 0 ? -a.y / d.y : -1.0})
    if (u > 0 && u < 1) best = std::min(best, l1(a + u * d));
  return best;
}

bool inside_closed_obstacle(const ObstacleField<Rational>& field, const Vec2<Rational>& p) {
  std::vector<PlacedShape<Rational>> shapes;
  field.shapes_at({floor_int(Rational(p.x + Rational(1, 2))), floor_int(Rational(p.y + Rational(1, 2)))}, shapes);
  for (const auto& s : shapes) {
    const auto& r = std::get<Rect<Rational>>(s.shape);
    if (p.x >= r.left() && p.x <= r.right() && p.y >= r.bottom() && p.y <= r.top()) return true;
  }
  return false;
}

}  // namespace

OrbitResult exact_orbit(const ObstacleField<Rational>& field, const ExactPhase& start, std::int64_t bound,
                        const Budget& budget, std::vector<ExactPhase>* visited) {
  field.table().square_tiling_denominator();
  if (boost::multiprecision::denominator(start.dir.x) != 1 || boost::multiprecision::denominator(start.dir.y) != 1 || (start.dir.x == 0 && start.dir.y == 0))
    throw std::invalid_argument("exact orbits need a nonzero integer direction");

  const auto gauge = RingGauge<Rational>::diamond();
  const Rational level(bound);
  const double speed = norm(to_double(start.dir));
  const Rational max_param = scalar_from<Rational>(budget.max_path_length / speed);

  OrbitResult r;
  r.min_excursion = r.max_excursion = l1(to_double(start.pos));
  if (!(gauge.value(start.pos) < level)) {
    r.status = OrbitStatus::Escaped;
    return r;
  }

  ExactPhase st = start;
  Rational time(0);
  std::uint64_t collisions = 0;
  std::optional<ExactPhase> anchor;
  Rational anchor_time;
  std::uint64_t anchor_collisions = 0;

  while (true) {
    if (collisions >= budget.max_collisions) {
      r.status = OrbitStatus::Budget;
      r.collisions = collisions;
      return r;
    }
    const auto clip = gauge.clip(st.pos, st.dir, level);
    Rational limit = clip.empty ? Rational(0) : std::max(clip.hi, Rational(0));
    bool to_exit = true;
    if (Rational rest = max_param - time; rest < limit) {
      limit = std::max(rest, Rational(0));
      to_exit = false;
    }
    const auto c = next_collision(field, st, limit);
    const Vec2<double> from = to_double(st.pos);
    if (!c) {
      r.min_excursion = std::min(r.min_excursion, segment_min_l1(from, to_double(st.pos + limit * st.dir)));
      r.status = to_exit ? OrbitStatus::Escaped : OrbitStatus::Budget;
      r.collisions = collisions;
      return r;
    }
    if (c->hit.kind != HitKind::Regular) {
      r.status = OrbitStatus::Singular;
      r.collisions = collisions;
      return r;
    }
    time += c->hit.t;
    st.pos = c->hit.point;
    st.dir = reflect(st.dir, c->hit, c->shape);
    ++collisions;
    const Vec2<double> to = to_double(st.pos);
    r.min_excursion = std::min(r.min_excursion, segment_min_l1(from, to));
    r.max_excursion = std::max(r.max_excursion, l1(to));

    if (!anchor) {
      anchor = st;
      anchor_time = time;
      anchor_collisions = collisions;
      if (visited) visited->push_back(st);
    } else if (st == *anchor) {
      r.status = OrbitStatus::Periodic;
      r.period_time = time - anchor_time;
      r.period_length = to_double(r.period_time) * speed;
      r.collisions = collisions - anchor_collisions;
      return r;
    } else if (visited) {
      visited->push_back(st);
    }
  }
}

namespace {

std::optional<ExactPhase> random_start(const ObstacleField<Rational>& field, const DirectionSlope& slope,
                                       std::int64_t q_tiling, std::int64_t radius, SampleRng& rng) {
  const std::int64_t den = rng.integer(1, 64 * q_tiling);
  const std::int64_t span = radius * den;
  const Vec2<Rational> pos{Rational(rng.integer(-span, span), den), Rational(rng.integer(-span, span), den)};
  if (!(abs(pos.x) + abs(pos.y) < Rational(radius))) return std::nullopt;
  if (inside_closed_obstacle(field, pos)) return std::nullopt;
  const std::int64_t sx = (rng.bits() & 1) ? 1 : -1;
  const std::int64_t sy = (rng.bits() & 1) ? 1 : -1;
  return ExactPhase{pos, {Rational(sx * slope.q), Rational(sy * slope.p)}};
}

}  // namespace

DirectionReport check_direction_periodicity(const ObstacleField<Rational>& field, const DirectionSlope& slope,
                                            const PeriodicityOptions& options) {
  const std::int64_t q_tiling = field.table().square_tiling_denominator();
  const std::int64_t radius = options.start_radius > 0 ? options.start_radius : std::max<std::int64_t>(1, options.bound / 2);
  struct Slot {
    std::optional<Witness> witness;
    std::int64_t singular = 0;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(std::max<std::int64_t>(options.n_samples, 0)));
  parallel_for(slots.size(), options.threads, [&](std::size_t k) {
    for (int attempt = 0; attempt <= options.max_redraws; ++attempt) {
      SampleRng rng(options.seed, k, static_cast<std::uint64_t>(attempt));
      std::optional<ExactPhase> start;
      for (int tries = 0; tries < 1000 && !start; ++tries)
        start = options.sampler ? options.sampler(rng) : random_start(field, slope, q_tiling, radius, rng);
      if (!start) continue;
      const OrbitResult res = exact_orbit(field, *start, options.bound, options.budget);
      if (res.status == OrbitStatus::Singular) {
        ++slots[k].singular;
        continue;
      }
      slots[k].witness = Witness{*start, res};
      return;
    }
  });

  DirectionReport rep;
  rep.slope = slope;
  rep.n_samples = options.n_samples;
  for (auto& s : slots) {
    rep.singular += s.singular;
    if (!s.witness) continue;
    ++rep.n_valid;
    switch (s.witness->result.status) {
      case OrbitStatus::Periodic: ++rep.periodic; break;
      case OrbitStatus::Escaped: ++rep.escaped; break;
      default: ++rep.budget; break;
    }
    rep.witnesses.push_back(std::move(*s.witness));
  }
  rep.fraction = rep.n_valid > 0 ? static_cast<double>(rep.periodic) / static_cast<double>(rep.n_valid) : 0.0;
  if (rep.n_valid == 0)
    rep.diagnostic = "no valid starts: all " + std::to_string(rep.singular) +
                     " draws were singular (corner hits); the start line is degenerate";
  return rep;
}

std::vector<DirectionReport> scan_periodic_directions(const ObstacleField<Rational>& field, std::int64_t max_q,
                                                      const PeriodicityOptions& options) {
  if (max_q < 1) throw std::invalid_argument("max_q must be at least 1");
  std::vector<DirectionReport> out;
  for (std::int64_t q = 1; q <= max_q; ++q)
    for (std::int64_t p = 0; p <= q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      out.push_back(check_direction_periodicity(field, {p, q}, options));
    }
  std::stable_sort(out.begin(), out.end(), [](const DirectionReport& a, const DirectionReport& b) {
    if (a.fraction != b.fraction) return a.fraction > b.fraction;
    return std::pair{a.slope.q, a.slope.p} < std::pair{b.slope.q, b.slope.p};
  });
  return out;
}

TableConfig annulus_table(const AnnulusPeriodicity& experiment) {
  if (experiment.margin < 1 || experiment.ring - experiment.margin < 0)
    throw std::invalid_argument("annulus margin must be in [1, ring]");
  return TableConfig::annulus_patched(RectObstacle{experiment.e.a(), experiment.e.b()},
                                      {{experiment.ring - experiment.margin, experiment.ring + experiment.margin}}, {},
                                      experiment.background);
}

AnnulusPeriodicityReport run_annulus_periodicity(const AnnulusPeriodicity& experiment,
                                                 const PeriodicityOptions& options) {
  if (!is_odd_over_even(experiment.e)) throw std::invalid_argument("annulus obstacle must be odd-over-even");
  const ObstacleField<Rational> field(annulus_table(experiment));
  const SectionCurve<Rational> curve(field, experiment.ring);
  const DirectionSlope slope = experiment.slope;

  PeriodicityOptions opts = options;
  // Sites beyond the annulus start at |i|+|j| = ring + margin, so every
  // obstacle point there has |x|+|y| > ring + margin - 1.
  opts.bound = experiment.ring + experiment.margin - 1;
  opts.sampler = [&curve, slope](SampleRng& rng) -> std::optional<ExactPhase> {
    const auto sp = sample_point(curve, Side::Inner, rng.bits(), 0);
    const std::int64_t sx = (rng.bits() & 1) ? 1 : -1;
    const std::int64_t sy = (rng.bits() & 1) ? 1 : -1;
    const Direction<Rational> d{Rational(sx * slope.q), Rational(sy * slope.p)};
    if (dot(d, sp.normal) == 0) return std::nullopt;
    return ExactPhase{sp.pos, d};
  };

  AnnulusPeriodicityReport out;
  out.report = check_direction_periodicity(field, slope, opts);
  const double floor_level = static_cast<double>(experiment.ring - experiment.margin) - 0.5;
  for (const auto& w : out.report.witnesses)
    if (w.result.status == OrbitStatus::Periodic && w.result.min_excursion > floor_level) ++out.stayed_inside;
  return out;
}

}  // namespace windtree
