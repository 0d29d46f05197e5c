#pragma once

// Exact periodic-orbit detection on square-tiled tables.
//
// Orbits run in rational arithmetic with a fixed integer direction class. The
// state (collision point, outgoing direction) is recorded at every collision;
// the dynamics is invertible, so the first repeated state is the first
// recorded one and a periodic orbit is detected when the orbit comes back to
// it exactly.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "windtree/field.hpp"
#include "windtree/flow.hpp"
#include "windtree/random.hpp"

namespace windtree {

using ExactPhase = PhasePoint<Rational>;

/// Slope p/q in lowest terms, q > 0; orbits move along (+-q, +-p).
struct DirectionSlope {
  std::int64_t p = 0;
  std::int64_t q = 1;

  static DirectionSlope reduced(std::int64_t p, std::int64_t q);
  std::string str() const;
  auto operator<=>(const DirectionSlope&) const = default;
};

enum class OrbitStatus { Periodic, Escaped, Budget, Singular };

const char* to_string(OrbitStatus status);

struct OrbitResult {
  OrbitStatus status = OrbitStatus::Budget;
  Rational period_time;       // parameter time of one period
  double period_length = 0;   // Euclidean length of one period
  std::uint64_t collisions = 0;  // per period when Periodic, total otherwise
  double min_excursion = 0;   // extreme |x|+|y| over the start and collision points
  double max_excursion = 0;
};

/// Runs the exact orbit from `start` until the first collision state repeats
/// (Periodic), the orbit crosses |x|+|y| = bound (Escaped), hits a corner
/// (Singular) or exhausts the budget. Throws std::invalid_argument unless the
/// table is square tiled. `visited`, if given, receives every distinct
/// collision state in order.
OrbitResult exact_orbit(const ObstacleField<Rational>& field, const ExactPhase& start, std::int64_t bound,
                        const Budget& budget, std::vector<ExactPhase>* visited = nullptr);

/// Start draw for custom sampling; returning nullopt asks for a redraw.
using StartSampler = std::function<std::optional<ExactPhase>(SampleRng&)>;

struct PeriodicityOptions {
  std::int64_t n_samples = 100;
  std::int64_t bound = 40;
  /// Starts lie in |x|+|y| < start_radius; 0 means bound / 2.
  std::int64_t start_radius = 0;
  std::uint64_t seed = 0;
  Budget budget{200'000, 1e6, 1e3};
  int max_redraws = 50;
  unsigned threads = 1;
  StartSampler sampler;  // overrides the default random rational starts
};

struct Witness {
  ExactPhase start;
  OrbitResult result;
};

struct DirectionReport {
  DirectionSlope slope;
  std::int64_t n_samples = 0;
  std::int64_t n_valid = 0;  // samples with a non-singular start found
  std::int64_t periodic = 0;
  std::int64_t escaped = 0;
  std::int64_t budget = 0;
  std::int64_t singular = 0;  // singular draws that were redrawn
  double fraction = 0;        // periodic / n_valid
  std::vector<Witness> witnesses;
  std::string diagnostic;
};

/// Random rational starts (denominators up to 64 Q) moving along a random
/// sign variant of (q, p); singular orbits are redrawn.
DirectionReport check_direction_periodicity(const ObstacleField<Rational>& field, const DirectionSlope& slope,
                                            const PeriodicityOptions& options);

/// check_direction_periodicity over every reduced p/q with 1 <= q <= max_q and
/// 0 <= p <= q, sorted by periodic fraction (descending), then by (q, p).
std::vector<DirectionReport> scan_periodic_directions(const ObstacleField<Rational>& field, std::int64_t max_q,
                                                      const PeriodicityOptions& options);

struct AnnulusPeriodicity {
  RationalPair e;
  DirectionSlope slope;
  std::int64_t ring = 8;    // starts on D_ring
  std::int64_t margin = 4;  // the table equals W_e for ring - margin <= |i|+|j| < ring + margin
  TableConfig background = TableConfig::constant(EmptyObstacle{});
};

struct AnnulusPeriodicityReport {
  DirectionReport report;
  std::int64_t stayed_inside = 0;  // periodic orbits that never left the annulus
};

/// Starts on the diagonal pieces of D_ring of the patched table, moving along
/// the slope; each orbit must be periodic within |x|+|y| < ring + margin.
AnnulusPeriodicityReport run_annulus_periodicity(const AnnulusPeriodicity& experiment,
                                                 const PeriodicityOptions& options);

TableConfig annulus_table(const AnnulusPeriodicity& experiment);

}  // namespace windtree
