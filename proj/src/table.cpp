#include "windtree/table.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace windtree {

namespace {

constexpr double kSqrt3Half = 0.86602540378443864676;

std::string describe(const Rational& q) { return to_string(q); }

// Minimum gap between the disks of a full-occupancy five-disk table, ignoring
// disks with identical center and radius (neighbouring sites share corners).
double five_disk_full_gap(const FiveDiskObstacle& f) {
  std::vector<Disk> disks;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j)
      for (const auto& d : f.disks) {
        Disk placed{{i + d.offset.x, j + d.offset.y}, d.radius};
        bool dup = std::any_of(disks.begin(), disks.end(), [&](const Disk& o) {
          return o.center == placed.center && o.radius == placed.radius;
        });
        if (!dup) disks.push_back(placed);
      }
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < disks.size(); ++a)
    for (std::size_t b = a + 1; b < disks.size(); ++b)
      gap = std::min(gap, norm(disks[a].center - disks[b].center) - disks[a].radius - disks[b].radius);
  return gap;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(mix64(seed) ^ a) ^ (b * 0xD6E8FEB86659FD93ULL));
}

FiveDiskObstacle FiveDiskObstacle::standard(double center_radius, double corner_radius) {
  FiveDiskObstacle f;
  f.disks[0] = {{0.0, 0.0}, center_radius};
  f.disks[1] = {{0.5, 0.5}, corner_radius};
  f.disks[2] = {{-0.5, 0.5}, corner_radius};
  f.disks[3] = {{-0.5, -0.5}, corner_radius};
  f.disks[4] = {{0.5, -0.5}, corner_radius};
  return f;
}

double obstacle_reach(const ObstacleSpec& spec) {
  struct {
    double operator()(const EmptyObstacle&) const { return 0.0; }
    double operator()(const RectObstacle& r) const {
      return std::max(to_double(r.a), to_double(r.b)) / 2;
    }
    double operator()(const DiskObstacle& d) const { return d.radius; }
    double operator()(const FiveDiskObstacle& f) const {
      double m = 0;
      for (const auto& d : f.disks)
        m = std::max({m, std::abs(d.offset.x) + d.radius, std::abs(d.offset.y) + d.radius});
      return m;
    }
  } visitor;
  return std::visit(visitor, spec);
}

Vec2<double> site_position(Lattice lattice, const Site& site) {
  if (lattice == Lattice::Square) return {static_cast<double>(site.i), static_cast<double>(site.j)};
  return {static_cast<double>(site.i) + 0.5 * static_cast<double>(site.j),
          kSqrt3Half * static_cast<double>(site.j)};
}

std::int64_t ring_index(Lattice lattice, const Site& s) {
  if (lattice == Lattice::Square) return std::abs(s.i) + std::abs(s.j);
  return (std::abs(s.i) + std::abs(s.j) + std::abs(s.i + s.j)) / 2;
}

std::vector<Site> ring_sites(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("ring_sites: N must be >= 1");
  std::vector<Site> out;
  out.reserve(static_cast<std::size_t>(4 * n));
  for (std::int64_t k = 0; k < n; ++k) out.push_back({n - k, k});
  for (std::int64_t k = 0; k < n; ++k) out.push_back({-k, n - k});
  for (std::int64_t k = 0; k < n; ++k) out.push_back({-n + k, -k});
  for (std::int64_t k = 0; k < n; ++k) out.push_back({k, -n + k});
  return out;
}

RationalPair RationalPair::from(const Rational& a, const Rational& b) {
  auto small = [](const BigInt& v) {
    if (abs(v) > BigInt(std::numeric_limits<std::int64_t>::max() / 4))
      throw std::invalid_argument("dimension has too large a numerator or denominator");
    return v.convert_to<std::int64_t>();
  };
  RationalPair r;
  r.p = small(boost::multiprecision::numerator(a));
  r.q = small(boost::multiprecision::denominator(a));
  r.r = small(boost::multiprecision::numerator(b));
  r.s = small(boost::multiprecision::denominator(b));
  return r;
}

bool is_odd_over_even(const RationalPair& d) {
  if (std::gcd(d.p, d.q) != 1 || std::gcd(d.r, d.s) != 1)
    throw std::invalid_argument("dimensions must be reduced fractions");
  if (!(0 < d.p && d.p < d.q && 0 < d.r && d.r < d.s))
    throw std::invalid_argument("dimensions must satisfy 0 < p < q and 0 < r < s");
  return d.p % 2 != 0 && d.r % 2 != 0 && d.q % 2 == 0 && d.s % 2 == 0;
}

std::int64_t tiling_denominator(const std::vector<RationalPair>& family) {
  if (family.empty()) throw std::invalid_argument("square tiling needs at least one rectangle dimension");
  std::int64_t q = 1;
  for (const auto& d : family) {
    if (!is_odd_over_even(d))
      throw std::invalid_argument("dimensions " + std::to_string(d.p) + "/" + std::to_string(d.q) + ", " +
                                  std::to_string(d.r) + "/" + std::to_string(d.s) +
                                  " are not odd-over-even, so the table is not square tiled");
    q = std::lcm(q, std::lcm(d.q, d.s));
  }
  return q;
}

void validate_obstacle(const ObstacleSpec& spec, Lattice lattice) {
  if (const auto* r = std::get_if<RectObstacle>(&spec)) {
    if (lattice != Lattice::Square) throw std::invalid_argument("rectangle obstacles need the square lattice");
    if (!(r->a > 0 && r->a < 1 && r->b > 0 && r->b < 1))
      throw std::invalid_argument("rectangle dimensions " + describe(r->a) + " x " + describe(r->b) +
                                  " must lie in (0,1)^2");
  } else if (const auto* d = std::get_if<DiskObstacle>(&spec)) {
    // Nearest-neighbour distance is 1 on both lattices.
    if (!(d->radius > 0 && d->radius < 0.5))
      throw std::invalid_argument("disk radius must lie in (0, 1/2) for disjoint obstacles");
  } else if (const auto* f = std::get_if<FiveDiskObstacle>(&spec)) {
    if (lattice != Lattice::Square) throw std::invalid_argument("five-disk obstacles need the square lattice");
    for (const auto& d : f->disks)
      if (!(d.radius > 0)) throw std::invalid_argument("five-disk radii must be positive");
    if (obstacle_reach(spec) >= 1.0) throw std::invalid_argument("five-disk cluster must fit within one cell of its site");
    if (!(five_disk_full_gap(*f) > 0))
      throw std::invalid_argument("five-disk cluster overlaps itself or its neighbours on the full table");
  }
}

std::uint32_t TableConfig::intern(const ObstacleSpec& spec) {
  validate_obstacle(spec, lattice_);
  for (std::uint32_t k = 0; k < palette_.size(); ++k)
    if (palette_[k] == spec) return k;
  palette_.push_back(spec);
  return static_cast<std::uint32_t>(palette_.size() - 1);
}

void TableConfig::finalize() {
  reach_ = 0.0;
  for (const auto& s : palette_) reach_ = std::max(reach_, obstacle_reach(s));
}

TableConfig TableConfig::constant(ObstacleSpec spec, Lattice lattice) {
  TableConfig t(lattice);
  t.gen_ = ConstantGen{t.intern(spec)};
  t.finalize();
  return t;
}

TableConfig TableConfig::iid(const std::vector<Weighted>& weights, std::uint64_t seed, Lattice lattice) {
  TableConfig t(lattice);
  IidGen g;
  g.seed = seed;
  double total = 0;
  for (const auto& w : weights) {
    if (!(w.weight >= 0) || !std::isfinite(w.weight)) throw std::invalid_argument("weights must be finite and >= 0");
    total += w.weight;
  }
  if (!(total > 0)) throw std::invalid_argument("random table needs a positive total weight");
  double acc = 0;
  for (const auto& w : weights) {
    if (w.weight == 0) continue;
    acc += w.weight / total;
    g.specs.push_back(t.intern(w.spec));
    g.cumulative.push_back(acc);
  }
  g.cumulative.back() = 1.0;
  t.gen_ = std::move(g);
  t.finalize();
  return t;
}

TableConfig TableConfig::annulus_patched(ObstacleSpec base, std::vector<Annulus> annuli,
                                         const std::map<Site, ObstacleSpec>& patch,
                                         const TableConfig& background) {
  TableConfig t(background.lattice());
  AnnulusGen g;
  g.base = t.intern(base);
  for (const auto& a : annuli)
    if (a.inner < 0 || a.outer <= a.inner) throw std::invalid_argument("annulus needs 0 <= inner < outer");
  g.annuli = std::move(annuli);
  for (const auto& [site, spec] : patch) g.patch.emplace(site, t.intern(spec));
  g.background = std::make_shared<const TableConfig>(background);
  for (const auto& spec : background.palette()) g.background_remap.push_back(t.intern(spec));
  t.gen_ = std::move(g);
  t.finalize();
  return t;
}

TableConfig TableConfig::explicit_sites(const std::map<Site, ObstacleSpec>& sites, ObstacleSpec fallback,
                                        Lattice lattice) {
  TableConfig t(lattice);
  ExplicitGen g;
  g.fallback = t.intern(fallback);
  for (const auto& [site, spec] : sites) g.sites.emplace(site, t.intern(spec));
  t.gen_ = std::move(g);
  t.finalize();
  return t;
}

std::uint32_t TableConfig::spec_index(const Site& site) const {
  struct {
    const Site& site;
    Lattice lattice;
    std::uint32_t operator()(const ConstantGen& g) const { return g.spec; }
    std::uint32_t operator()(const IidGen& g) const {
      const std::uint64_t h = hash_combine(g.seed, static_cast<std::uint64_t>(site.i),
                                           static_cast<std::uint64_t>(site.j));
      const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
      const auto it = std::upper_bound(g.cumulative.begin(), g.cumulative.end(), u);
      const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - g.cumulative.begin()), g.specs.size() - 1);
      return g.specs[k];
    }
    std::uint32_t operator()(const AnnulusGen& g) const {
      const std::int64_t r = ring_index(lattice, site);
      for (const auto& a : g.annuli)
        if (a.inner <= r && r < a.outer) return g.base;
      if (auto it = g.patch.find(site); it != g.patch.end()) return it->second;
      return g.background_remap[g.background->spec_index(site)];
    }
    std::uint32_t operator()(const ExplicitGen& g) const {
      if (auto it = g.sites.find(site); it != g.sites.end()) return it->second;
      return g.fallback;
    }
  } visitor{site, lattice_};
  return std::visit(visitor, gen_);
}

bool TableConfig::rectangles_only() const {
  return std::all_of(palette_.begin(), palette_.end(), [](const ObstacleSpec& s) {
    return std::holds_alternative<EmptyObstacle>(s) || std::holds_alternative<RectObstacle>(s);
  });
}

bool TableConfig::has_curved_obstacles() const {
  return std::any_of(palette_.begin(), palette_.end(), [](const ObstacleSpec& s) {
    return std::holds_alternative<DiskObstacle>(s) || std::holds_alternative<FiveDiskObstacle>(s);
  });
}

std::vector<RationalPair> TableConfig::rectangle_family() const {
  std::vector<RationalPair> out;
  for (const auto& s : palette_)
    if (const auto* r = std::get_if<RectObstacle>(&s)) out.push_back(RationalPair::from(r->a, r->b));
  return out;
}

std::int64_t TableConfig::square_tiling_denominator() const {
  if (lattice_ != Lattice::Square) throw std::invalid_argument("square tiling needs the square lattice");
  if (!rectangles_only()) throw std::invalid_argument("square tiling needs rectangle (or empty) obstacles only");
  return tiling_denominator(rectangle_family());
}

}  // namespace windtree
