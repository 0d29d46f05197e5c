#pragma once

// Lorentz-gas tables (disk scatterers) and empirical horizon probes.

#include <cstdint>
#include <vector>

#include "windtree/field.hpp"
#include "windtree/section.hpp"

namespace windtree {

struct ProbeLine {
  Vec2<double> origin;
  double angle = 0.0;
};

struct HorizonReport {
  std::int64_t n_lines = 0;
  double probe_length = 0.0;
  double max_gap_observed = 0.0;
  /// Lines meeting fewer than two obstacles within the probe length.
  std::vector<ProbeLine> unbounded_suspects;
  /// Smallest boundary distance between distinct obstacles near the origin;
  /// +infinity for a table without obstacles.
  double min_obstacle_separation = 0.0;
};

/// Casts random lines (uniform angle, origin uniform in the lattice's
/// fundamental cell) and measures the gaps between consecutive obstacle
/// chords along [0, probe_length], counting the leading and trailing gaps.
HorizonReport horizon_probe(const ObstacleField<double>& field, std::int64_t n_lines, double probe_length,
                            std::uint64_t seed, unsigned threads = 1);

/// Boundary-to-boundary distance minimized over obstacle pairs whose sites
/// lie within `window` lattice steps of the origin. Coincident disks count
/// once. Negative when obstacles overlap.
double min_obstacle_separation(const ObstacleField<double>& field, std::int64_t window = 6);

struct HorizonStability {
  HorizonReport short_probe;
  HorizonReport long_probe;
  /// No suspects at either length and the max gap grew by at most 10%.
  bool stable = false;
};

HorizonStability horizon_stability(const ObstacleField<double>& field, std::int64_t n_lines, double short_length,
                                   double long_length, std::uint64_t seed, unsigned threads = 1);

/// Disk radius of the triangular example: the disjointness limit 1/2 less a
/// 2% margin.
inline constexpr double kTriangularDefaultRadius = 0.49;

TableConfig triangular_lorentz_table(double radius = kTriangularDefaultRadius);
TableConfig five_disk_lorentz_table(const FiveDiskObstacle& cluster = FiveDiskObstacle::standard());

/// Recurrence fraction on a disk table; the same estimator as the wind-tree
/// one with the ring polygon of the table's lattice.
FractionEstimate lorentz_recurrence(const ObstacleField<double>& field, std::int64_t n, std::int64_t m,
                                    const RecurrenceOptions& options);

}  // namespace windtree
