#pragma once

// Event-driven billiard flow on an infinite table.
//
// Time is the ray parameter: the path length in the float engine (unit
// directions), and path length divided by |dir| in the exact engine (integer
// directions, whose norm never changes on rectangle tables).

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "windtree/field.hpp"
#include "windtree/geometry.hpp"
#include "windtree/ring.hpp"

namespace windtree {

template <class S>
struct CellVisit {
  Site cell;  // unit cell [i-1/2, i+1/2] x [j-1/2, j+1/2]
  S t_enter{};
};

/// Closed unit cells met by the segment origin + t*dir, t in [t_begin, t_end],
/// ordered by entry time (ties by (i, j)). Cells touched only along an edge or
/// at a corner are included.
template <class S>
std::vector<CellVisit<S>> traverse_cells(const Vec2<S>& origin, const Direction<S>& dir, const S& t_begin,
                                         const S& t_end);

template <class S>
std::vector<CellVisit<S>> traverse_cells(const Vec2<S>& origin, const Direction<S>& dir, const S& max_len) {
  return traverse_cells(origin, dir, S(0), max_len);
}

template <class S>
struct PhasePoint {
  Vec2<S> pos;
  Direction<S> dir;

  bool operator==(const PhasePoint&) const = default;
};

template <class S>
struct Collision {
  Hit<S> hit;
  Site site;
  std::uint8_t part = 0;
  ShapeOf<S> shape;
};

/// Earliest obstacle hit along the ray within parameter max_t.
template <class S>
std::optional<Collision<S>> next_collision(const ObstacleField<S>& field, const PhasePoint<S>& p, const S& max_t);

enum class EventKind { Start, Collision, SectionCrossing, Singular, End };

const char* to_string(EventKind kind);

template <class S>
struct Event {
  EventKind kind = EventKind::Start;
  S time{};
  Vec2<S> point;
  Direction<S> dir;  // outgoing direction
  std::optional<Site> site;
  HitKind hit = HitKind::Regular;
};

struct Budget {
  std::uint64_t max_collisions = 1'000'000;
  double max_path_length = 1e6;
  double max_radius = 1e3;  // cap on |x| + |y|
};

/// One step of the flow: the next Collision or Singular event, or End when no
/// obstacle is met before the path-length or radius budget runs out.
template <class S>
Event<S> next_event(const ObstacleField<S>& field, const PhasePoint<S>& p, const Budget& budget);

enum class FlowStatus { Stopped, Budget, Singular };
enum class BudgetLimit { None, Collisions, PathLength, Radius, Time };

const char* to_string(FlowStatus status);
const char* to_string(BudgetLimit limit);

template <class S>
struct FlowOptions {
  Budget budget;
  std::optional<S> max_time;  // stop exactly at this time (engine units)
  bool record = true;
};

template <class S>
struct FlowResult {
  std::vector<Event<S>> trajectory;
  PhasePoint<S> final;
  FlowStatus status = FlowStatus::Budget;
  BudgetLimit limit = BudgetLimit::None;
  S time{};
  std::uint64_t collisions = 0;
};

template <class S>
using EventPredicate = std::function<bool(const Event<S>&)>;

/// Flows from `start`, reflecting at every collision, until `stop` accepts a
/// collision event, a budget runs out, or a singular (corner/tangent) hit.
template <class S>
FlowResult<S> flow_until(const ObstacleField<S>& field, const PhasePoint<S>& start, const EventPredicate<S>& stop,
                         const FlowOptions<S>& options);

/// Path length covered in `time` engine units along `dir`.
template <class S>
double path_length(const S& time, const Direction<S>& dir) {
  if constexpr (is_exact_v<S>) return to_double(time) * norm(to_double(dir));
  else return time;
}

extern template std::vector<CellVisit<double>> traverse_cells(const Vec2<double>&, const Direction<double>&,
                                                              const double&, const double&);
extern template std::vector<CellVisit<Rational>> traverse_cells(const Vec2<Rational>&, const Direction<Rational>&,
                                                                const Rational&, const Rational&);

}  // namespace windtree
