#pragma once

// Obstacle configurations on the square and triangular lattices.
//
// A TableConfig assigns an ObstacleSpec to every lattice site, lazily: nothing
// is enumerated up front, so tables are infinite and random access. Every spec
// a table can produce is interned in a small palette; the engines precompute
// per-palette geometry and look sites up by index.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <variant>
#include <vector>

#include "windtree/geometry.hpp"
#include "windtree/rational.hpp"

namespace windtree {

enum class Lattice { Square, Triangular };

struct Site {
  std::int64_t i = 0;
  std::int64_t j = 0;

  auto operator<=>(const Site&) const = default;
};

struct SiteHash {
  std::size_t operator()(const Site& s) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(s.i) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(s.j) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

struct EmptyObstacle {
  bool operator==(const EmptyObstacle&) const = default;
};

/// Axis-aligned a x b rectangle centered on the site, (a, b) in (0,1)^2.
struct RectObstacle {
  Rational a;
  Rational b;

  bool operator==(const RectObstacle&) const = default;
};

struct DiskObstacle {
  double radius = 0.0;

  bool operator==(const DiskObstacle&) const = default;
};

struct ClusterDisk {
  Vec2<double> offset;
  double radius = 0.0;

  bool operator==(const ClusterDisk&) const = default;
};

/// Union of five disks attached to one site.
struct FiveDiskObstacle {
  std::array<ClusterDisk, 5> disks;

  /// One disk at the site plus four at the (+-1/2, +-1/2) cell corners.
  static FiveDiskObstacle standard(double center_radius = 0.4, double corner_radius = 0.15);

  bool operator==(const FiveDiskObstacle&) const = default;
};

using ObstacleSpec = std::variant<EmptyObstacle, RectObstacle, DiskObstacle, FiveDiskObstacle>;

/// Largest |dx| or |dy| of any obstacle point from its site.
double obstacle_reach(const ObstacleSpec& spec);

Vec2<double> site_position(Lattice lattice, const Site& site);

/// Lattice graph distance to the origin: |i|+|j| on the square lattice, the
/// hexagonal distance (|i|+|j|+|i+j|)/2 on the triangular one.
std::int64_t ring_index(Lattice lattice, const Site& site);

/// All square-lattice sites with |i|+|j| = N, counterclockwise from (N, 0).
std::vector<Site> ring_sites(std::int64_t n);

/// Reduced rational dimensions (p/q, r/s).
struct RationalPair {
  std::int64_t p = 0, q = 1, r = 0, s = 1;

  static RationalPair from(const Rational& a, const Rational& b);
  Rational a() const { return Rational(p, q); }
  Rational b() const { return Rational(r, s); }
  auto operator<=>(const RationalPair&) const = default;
};

/// True iff p and r are odd and q and s are even. Throws std::invalid_argument
/// unless gcd(p,q) = gcd(r,s) = 1, 0 < p < q and 0 < r < s.
bool is_odd_over_even(const RationalPair& dims);

/// Side-length denominator Q of the common square tiling: the lcm of all
/// q and s. Throws std::invalid_argument for an empty family or a member that
/// fails is_odd_over_even.
std::int64_t tiling_denominator(const std::vector<RationalPair>& family);

class TableConfig {
 public:
  struct Weighted {
    ObstacleSpec spec;
    double weight = 1.0;
  };
  /// Sites with inner <= ring_index < outer.
  struct Annulus {
    std::int64_t inner = 0;
    std::int64_t outer = 0;
  };

  static TableConfig constant(ObstacleSpec spec, Lattice lattice = Lattice::Square);
  /// Independent draws: the spec at (i,j) is a function of hash(seed, i, j).
  static TableConfig iid(const std::vector<Weighted>& weights, std::uint64_t seed,
                         Lattice lattice = Lattice::Square);
  /// `base` on every annulus, `patch` on its sites elsewhere, `background`
  /// everywhere else.
  static TableConfig annulus_patched(ObstacleSpec base, std::vector<Annulus> annuli,
                                     const std::map<Site, ObstacleSpec>& patch,
                                     const TableConfig& background);
  static TableConfig explicit_sites(const std::map<Site, ObstacleSpec>& sites, ObstacleSpec fallback,
                                    Lattice lattice = Lattice::Square);

  Lattice lattice() const { return lattice_; }
  const ObstacleSpec& obstacle_at(const Site& site) const { return palette_[spec_index(site)]; }
  std::uint32_t spec_index(const Site& site) const;

  /// Every spec this table can place (zero-weight entries excluded).
  const std::vector<ObstacleSpec>& palette() const { return palette_; }
  double reach() const { return reach_; }
  bool rectangles_only() const;
  bool has_curved_obstacles() const;

  /// Rectangle dimensions appearing in the palette.
  std::vector<RationalPair> rectangle_family() const;

  /// Tiling denominator Q if the table is square tiled; throws
  /// std::invalid_argument with the reason otherwise.
  std::int64_t square_tiling_denominator() const;

 private:
  struct ConstantGen {
    std::uint32_t spec;
  };
  struct IidGen {
    std::vector<std::uint32_t> specs;
    std::vector<double> cumulative;
    std::uint64_t seed = 0;
  };
  struct AnnulusGen {
    std::uint32_t base = 0;
    std::vector<Annulus> annuli;
    std::unordered_map<Site, std::uint32_t, SiteHash> patch;
    std::shared_ptr<const TableConfig> background;
    std::vector<std::uint32_t> background_remap;
  };
  struct ExplicitGen {
    std::unordered_map<Site, std::uint32_t, SiteHash> sites;
    std::uint32_t fallback = 0;
  };
  using Generator = std::variant<ConstantGen, IidGen, AnnulusGen, ExplicitGen>;

  explicit TableConfig(Lattice lattice) : lattice_(lattice) {}
  std::uint32_t intern(const ObstacleSpec& spec);
  void finalize();

  Lattice lattice_;
  std::vector<ObstacleSpec> palette_;
  Generator gen_;
  double reach_ = 0.0;
};

/// Checks the spec on its own (dimension ranges, disjointness of a full table).
/// Throws std::invalid_argument describing the violation.
void validate_obstacle(const ObstacleSpec& spec, Lattice lattice);

/// 64-bit finalizer used for site hashing and per-sample seeding.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace windtree
