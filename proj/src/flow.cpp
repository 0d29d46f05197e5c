#include "windtree/flow.hpp"

#include <algorithm>

namespace windtree {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Start: return "start";
    case EventKind::Collision: return "collision";
    case EventKind::SectionCrossing: return "section";
    case EventKind::Singular: return "singular";
    case EventKind::End: return "end";
  }
  return "?";
}

const char* to_string(FlowStatus status) {
  switch (status) {
    case FlowStatus::Stopped: return "stopped";
    case FlowStatus::Budget: return "budget";
    case FlowStatus::Singular: return "singular";
  }
  return "?";
}

const char* to_string(BudgetLimit limit) {
  switch (limit) {
    case BudgetLimit::None: return "none";
    case BudgetLimit::Collisions: return "collisions";
    case BudgetLimit::PathLength: return "path_length";
    case BudgetLimit::Radius: return "radius";
    case BudgetLimit::Time: return "time";
  }
  return "?";
}

template <class S>
std::vector<CellVisit<S>> traverse_cells(const Vec2<S>& origin, const Direction<S>& dir, const S& t_begin,
                                         const S& t_end) {
  const S half = S(1) / S(2);
  struct Column {
    std::int64_t i;
    S ta, tb;
  };
  std::vector<Column> columns;
  if (dir.x == 0) {
    for (std::int64_t i = ceil_int(S(origin.x - half)); i <= floor_int(S(origin.x + half)); ++i)
      columns.push_back({i, t_begin, t_end});
  } else {
    const S xa = origin.x + t_begin * dir.x;
    const S xb = origin.x + t_end * dir.x;
    const S lo = std::min(xa, xb), hi = std::max(xa, xb);
    for (std::int64_t i = ceil_int(S(lo - half)); i <= floor_int(S(hi + half)); ++i) {
      S ta = (S(i) - half - origin.x) / dir.x;
      S tb = (S(i) + half - origin.x) / dir.x;
      if (tb < ta) std::swap(ta, tb);
      ta = std::max(ta, t_begin);
      tb = std::min(tb, t_end);
      if (ta > tb) continue;
      columns.push_back({i, ta, tb});
    }
  }

  std::vector<CellVisit<S>> out;
  for (const auto& c : columns) {
    const S ya = origin.y + c.ta * dir.y;
    const S yb = origin.y + c.tb * dir.y;
    const S lo = std::min(ya, yb), hi = std::max(ya, yb);
    for (std::int64_t j = ceil_int(S(lo - half)); j <= floor_int(S(hi + half)); ++j) {
      S enter = c.ta;
      if (dir.y != 0) {
        const S edge = dir.y > 0 ? S(S(j) - half) : S(S(j) + half);
        enter = std::max(enter, S((edge - origin.y) / dir.y));
      }
      out.push_back({{c.i, j}, enter});
    }
  }
  std::sort(out.begin(), out.end(), [](const CellVisit<S>& a, const CellVisit<S>& b) {
    if (a.t_enter != b.t_enter) return a.t_enter < b.t_enter;
    return a.cell < b.cell;
  });
  return out;
}

template <class S>
std::optional<Collision<S>> next_collision(const ObstacleField<S>& field, const PhasePoint<S>& p, const S& max_t) {
  std::optional<Collision<S>> best;
  std::vector<Site> sites;
  std::vector<Site> tested;
  std::vector<PlacedShape<S>> shapes;

  using std::abs;
  const S span = std::max(abs(p.dir.x), abs(p.dir.y));
  S chunk = S(4) / span;
  S t0 = S(0);
  while (t0 < max_t) {
    const S t1 = std::min(S(t0 + chunk), max_t);
    for (const auto& cell : traverse_cells(p.pos, p.dir, t0, t1)) {
      if (best && cell.t_enter > best->hit.t) return best;
      sites.clear();
      field.candidate_sites(cell.cell.i, cell.cell.j, sites);
      for (const auto& site : sites) {
        if (!field.own_cell_only()) {
          if (std::find(tested.begin(), tested.end(), site) != tested.end()) continue;
          tested.push_back(site);
        }
        shapes.clear();
        field.shapes_at(site, shapes);
        for (const auto& s : shapes) {
          auto h = intersect<S>(p.pos, p.dir, s.shape);
          if (!h || h->t > max_t) continue;
          if (!best || h->t < best->hit.t) best = Collision<S>{*h, s.site, s.part, s.shape};
        }
      }
    }
    if (best && best->hit.t <= t1) return best;
    t0 = t1;
    chunk = chunk * 2;
  }
  return best;
}

template <class S>
Event<S> next_event(const ObstacleField<S>& field, const PhasePoint<S>& p, const Budget& budget) {
  const auto gauge = RingGauge<S>::diamond();
  const auto clip = gauge.clip(p.pos, p.dir, scalar_from<S>(budget.max_radius));
  S horizon = clip.empty ? S(0) : std::max(clip.hi, S(0));
  const S by_length = scalar_from<S>(budget.max_path_length / norm(to_double(p.dir)));
  horizon = std::min(horizon, by_length);
  Event<S> ev;
  if (auto c = next_collision(field, p, horizon)) {
    ev.kind = c->hit.kind == HitKind::Regular ? EventKind::Collision : EventKind::Singular;
    ev.time = c->hit.t;
    ev.point = c->hit.point;
    ev.dir = ev.kind == EventKind::Collision ? reflect(p.dir, c->hit, c->shape) : p.dir;
    ev.site = c->site;
    ev.hit = c->hit.kind;
    return ev;
  }
  ev.kind = EventKind::End;
  ev.time = horizon;
  ev.point = p.pos + horizon * p.dir;
  ev.dir = p.dir;
  return ev;
}

template <class S>
FlowResult<S> flow_until(const ObstacleField<S>& field, const PhasePoint<S>& start, const EventPredicate<S>& stop,
                         const FlowOptions<S>& options) {
  FlowResult<S> r;
  r.final = start;
  const auto gauge = RingGauge<S>::diamond();
  const S radius = scalar_from<S>(options.budget.max_radius);
  const double speed = norm(to_double(start.dir));
  const S max_param = scalar_from<S>(options.budget.max_path_length / speed);
  auto record = [&](EventKind kind, const std::optional<Site>& site, HitKind hit) {
    if (options.record) r.trajectory.push_back({kind, r.time, r.final.pos, r.final.dir, site, hit});
  };
  record(EventKind::Start, std::nullopt, HitKind::Regular);

  while (true) {
    if (r.collisions >= options.budget.max_collisions) {
      r.status = FlowStatus::Budget;
      r.limit = BudgetLimit::Collisions;
      return r;
    }
    const auto clip = gauge.clip(r.final.pos, r.final.dir, radius);
    S limit = clip.empty ? S(0) : std::max(clip.hi, S(0));
    BudgetLimit reason = BudgetLimit::Radius;
    if (S rest = max_param - r.time; rest < limit) {
      limit = rest;
      reason = BudgetLimit::PathLength;
    }
    if (options.max_time) {
      if (S rest = *options.max_time - r.time; !(limit < rest)) {
        limit = rest;
        reason = BudgetLimit::Time;
      }
    }
    if (limit < 0) limit = S(0);

    auto c = next_collision(field, r.final, limit);
    if (!c) {
      r.final.pos = r.final.pos + limit * r.final.dir;
      r.time = r.time + limit;
      r.status = FlowStatus::Budget;
      r.limit = reason;
      record(EventKind::End, std::nullopt, HitKind::Regular);
      return r;
    }
    r.final.pos = c->hit.point;
    r.time = r.time + c->hit.t;
    if (c->hit.kind != HitKind::Regular) {
      r.status = FlowStatus::Singular;
      record(EventKind::Singular, c->site, c->hit.kind);
      return r;
    }
    r.final.dir = reflect(r.final.dir, c->hit, c->shape);
    ++r.collisions;
    Event<S> ev{EventKind::Collision, r.time, r.final.pos, r.final.dir, c->site, HitKind::Regular};
    if (options.record) r.trajectory.push_back(ev);
    if (stop && stop(ev)) {
      r.status = FlowStatus::Stopped;
      return r;
    }
  }
}

#define WINDTREE_INSTANTIATE(S)                                                                                   \
  template std::vector<CellVisit<S>> traverse_cells(const Vec2<S>&, const Direction<S>&, const S&, const S&);     \
  template std::optional<Collision<S>> next_collision(const ObstacleField<S>&, const PhasePoint<S>&, const S&);  \
  template Event<S> next_event(const ObstacleField<S>&, const PhasePoint<S>&, const Budget&);                     \
  template FlowResult<S> flow_until(const ObstacleField<S>&, const PhasePoint<S>&, const EventPredicate<S>&,      \
                                    const FlowOptions<S>&);

WINDTREE_INSTANTIATE(double)
WINDTREE_INSTANTIATE(Rational)

#undef WINDTREE_INSTANTIATE

}  // namespace windtree
