#pragma once

// The section curves D_N, their cross-section measure, the first-return map
// and the recurrence statistics built on it.
//
// D_N is the boundary of the region made of the level-N ring polygon (the
// diamond |x|+|y| <= N, or the hexagon on the triangular lattice) together
// with every obstacle that meets the polygon's interior. It consists of
// diagonal pieces on the polygon outside all obstacles, and obstacle arcs: the
// parts of those obstacles' boundaries lying outside the polygon.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "windtree/field.hpp"
#include "windtree/flow.hpp"
#include "windtree/ring.hpp"

namespace windtree {

enum class Side { Inner, Outer };
enum class PieceKind { Diagonal, Arc };

const char* to_string(Side side);

struct ArcOfDisk {
  Disk disk;
  double angle0 = 0.0;  // counterclockwise from angle0 to angle0 + sweep
  double sweep = 0.0;
};

template <class S>
struct SectionPiece {
  PieceKind kind = PieceKind::Diagonal;
  /// Diagonal pieces and rectangle arcs: a polyline, counterclockwise around
  /// the origin. Empty for disk arcs.
  std::vector<Vec2<S>> path;
  std::optional<ArcOfDisk> arc;
  Site site{};
  /// Diagonal pieces: outward normal of the polygon edge (not normalized in
  /// the exact engine).
  Vec2<S> normal;
  double length = 0.0;
  double offset = 0.0;  // arc-length coordinate of the first point

  Vec2<double> start() const;
  Vec2<double> end() const;
};

template <class S>
class SectionCurve {
 public:
  SectionCurve(const ObstacleField<S>& field, std::int64_t n);

  std::int64_t level() const { return n_; }
  const std::vector<SectionPiece<S>>& pieces() const { return pieces_; }
  double total_length() const { return total_length_; }
  double diagonal_length() const { return diagonal_length_; }
  const RingGauge<S>& gauge() const { return gauge_; }
  const ObstacleField<S>& field() const { return *field_; }

  /// True when a shape meets the open region inside the level polygon, which
  /// makes the outside part of its boundary part of the curve.
  bool is_ring_shape(const ShapeOf<S>& shape) const;

  /// Arc-length coordinate of the curve point nearest to p.
  double locate(const Vec2<double>& p) const;

 private:
  const ObstacleField<S>* field_;
  std::int64_t n_;
  RingGauge<S> gauge_;
  std::vector<Vec2<S>> polygon_;
  std::vector<SectionPiece<S>> pieces_;
  double total_length_ = 0.0;
  double diagonal_length_ = 0.0;
};

template <class S>
struct SectionPoint {
  Vec2<S> pos;
  Direction<S> dir;
  Side side = Side::Outer;
  PieceKind kind = PieceKind::Diagonal;
  /// Outward obstacle normal on arcs, outward polygon normal on diagonals.
  Vec2<S> normal;
  double s = 0.0;
};

/// The same point with the flow reversed: the phase point from which the
/// backward orbit leaves the curve.
template <class S>
SectionPoint<S> reversed(const SectionPoint<S>& p);

/// One draw from the cross-section measure: base point uniform in arc length
/// (diagonal pieces only on the Inner side), angle to the side normal with
/// density cos(theta)/2. Points within the singular tolerance of a junction or
/// polyline vertex are redrawn. The exact engine samples rational points and
/// primitive integer directions of norm at most about 64.
template <class S>
SectionPoint<S> sample_point(const SectionCurve<S>& curve, Side side, std::uint64_t seed, std::uint64_t index,
                             std::uint64_t attempt = 0);

template <class S>
std::vector<SectionPoint<S>> sample_section(const SectionCurve<S>& curve, Side side, std::size_t n,
                                            std::uint64_t seed);

enum class ReturnStatus { Returned, Escaped, BudgetExceeded, Singular };

const char* to_string(ReturnStatus status);

template <class S>
struct ReturnOutcome {
  ReturnStatus status = ReturnStatus::BudgetExceeded;
  std::optional<SectionPoint<S>> point;
  S time{};
  std::uint64_t collisions = 0;
};

/// Flows from `sp` until the orbit crosses D_N again (Returned), reaches the
/// level-M polygon (Escaped), hits a corner, grazes an obstacle or slides
/// along the curve (Singular), or runs out of budget.
template <class S>
ReturnOutcome<S> first_return(const SectionCurve<S>& curve, const SectionPoint<S>& sp, std::int64_t m,
                              const Budget& budget);

struct FractionEstimate {
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t n_samples = 0;
  std::int64_t returned = 0;
  std::int64_t escaped = 0;
  std::int64_t budget = 0;
  std::int64_t singular = 0;  // redrawn, not part of n_samples
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::uint64_t seed = 0;
};

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

/// 95% Wilson score interval for `successes` out of `trials`.
WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials);

class TooManySingular : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RecurrenceOptions {
  std::int64_t n_samples = 10'000;
  std::uint64_t seed = 0;
  Budget budget;
  unsigned threads = 1;
};

/// Fraction of Outer-side samples of D_N that return before reaching level
/// M. Singular samples are redrawn; more than 1% singular draws throws
/// TooManySingular.
template <class S>
FractionEstimate recurrence_fraction(const ObstacleField<S>& field, std::int64_t n, std::int64_t m,
                                     const RecurrenceOptions& options);

struct AnnulusCertificate {
  bool certified = false;
  std::int64_t width = 0;  // the accepted M
  FractionEstimate estimate;
  std::vector<FractionEstimate> trace;
};

struct AnnulusSearch {
  double epsilon = 0.5;
  int max_doublings = 6;  // M runs over 2N, 4N, ..., 2^max_doublings N
};

/// Doubling search for the first M whose recurrence estimate on the full
/// table W_e has ci_low >= 1 - epsilon.
AnnulusCertificate find_annulus_width(const RationalPair& e, std::int64_t n, const AnnulusSearch& search,
                                      const RecurrenceOptions& options);

extern template class SectionCurve<double>;
extern template class SectionCurve<Rational>;

}  // namespace windtree
