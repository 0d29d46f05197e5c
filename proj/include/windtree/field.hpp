#pragma once

// Placed obstacle geometry over a TableConfig, for one engine scalar type.

#include <cstdint>
#include <optional>
#include <type_traits>
#include <variant>
#include <vector>

#include "windtree/geometry.hpp"
#include "windtree/table.hpp"

namespace windtree {

template <class S>
using ShapeOf = std::conditional_t<is_exact_v<S>, std::variant<Rect<Rational>>, std::variant<Rect<double>, Disk>>;

template <class S>
struct PlacedShape {
  Site site;
  std::uint8_t part = 0;  // index within a multi-disk obstacle
  ShapeOf<S> shape;
};

template <class S>
std::optional<Hit<S>> intersect(const Vec2<S>& origin, const Direction<S>& dir, const ShapeOf<S>& shape) {
  return std::visit(
      [&](const auto& s) -> std::optional<Hit<S>> {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, Disk>) return ray_disk_intersection(origin, dir, s);
        else return ray_rect_intersection(origin, dir, s);
      },
      shape);
}

template <class S>
Direction<S> reflect(const Direction<S>& dir, const Hit<S>& hit, const ShapeOf<S>& shape) {
  if constexpr (is_exact_v<S>) {
    return reflect_rect(dir, hit.normal);
  } else {
    if (std::holds_alternative<Disk>(shape)) {
      Direction<double> out = reflect_disk(dir, hit.normal);
      const double len = norm(out);
      return {out.x / len, out.y / len};
    }
    return reflect_rect(dir, hit.normal);
  }
}

template <class S>
class ObstacleField {
 public:
  /// The exact engine accepts square-lattice rectangle tables only and throws
  /// std::invalid_argument otherwise.
  explicit ObstacleField(TableConfig table);

  const TableConfig& table() const { return table_; }
  Lattice lattice() const { return table_.lattice(); }

  Vec2<S> site_center(const Site& site) const;

  /// Appends the placed shapes of the obstacle at `site`.
  void shapes_at(const Site& site, std::vector<PlacedShape<S>>& out) const;

  /// Appends every site whose obstacle can meet the closed unit cell centered
  /// at (gx, gy).
  void candidate_sites(std::int64_t gx, std::int64_t gy, std::vector<Site>& out) const;

  /// True when every obstacle lies inside the open cell of its own site, so
  /// the narrow phase needs only the cell being traversed.
  bool own_cell_only() const { return own_cell_only_; }

 private:
  TableConfig table_;
  std::vector<std::vector<ShapeOf<S>>> templates_;
  bool own_cell_only_ = true;
};

extern template class ObstacleField<double>;
extern template class ObstacleField<Rational>;

}  // namespace windtree
