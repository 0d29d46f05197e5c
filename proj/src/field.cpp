#include "windtree/field.hpp"

#include <cmath>

namespace windtree {

namespace {
constexpr double kRowHeight = 0.86602540378443864676;
}

template <class S>
ObstacleField<S>::ObstacleField(TableConfig table) : table_(std::move(table)) {
  if constexpr (is_exact_v<S>) {
    if (table_.lattice() != Lattice::Square || !table_.rectangles_only())
      throw std::invalid_argument("the exact engine needs a square-lattice table of rectangles");
  }
  for (const auto& spec : table_.palette()) {
    std::vector<ShapeOf<S>> shapes;
    if (const auto* r = std::get_if<RectObstacle>(&spec)) {
      if constexpr (is_exact_v<S>) {
        shapes.push_back(Rect<Rational>{{Rational(0), Rational(0)}, Rational(r->a / 2), Rational(r->b / 2)});
      } else {
        shapes.push_back(Rect<double>{{0.0, 0.0}, to_double(r->a) / 2, to_double(r->b) / 2});
      }
    } else if constexpr (!is_exact_v<S>) {
      if (const auto* d = std::get_if<DiskObstacle>(&spec)) {
        shapes.push_back(Disk{{0.0, 0.0}, d->radius});
      } else if (const auto* f = std::get_if<FiveDiskObstacle>(&spec)) {
        for (const auto& c : f->disks) shapes.push_back(Disk{c.offset, c.radius});
      }
    }
    templates_.push_back(std::move(shapes));
  }
  own_cell_only_ = table_.lattice() == Lattice::Square && table_.reach() < 0.5;
}

template <class S>
Vec2<S> ObstacleField<S>::site_center(const Site& site) const {
  if constexpr (is_exact_v<S>) {
    return {Rational(site.i), Rational(site.j)};
  } else {
    return site_position(table_.lattice(), site);
  }
}

template <class S>
void ObstacleField<S>::shapes_at(const Site& site, std::vector<PlacedShape<S>>& out) const {
  const auto& tmpl = templates_[table_.spec_index(site)];
  if (tmpl.empty()) return;
  const Vec2<S> c = site_center(site);
  std::uint8_t part = 0;
  for (const auto& shape : tmpl) {
    PlacedShape<S> placed{site, part++, shape};
    std::visit([&](auto& s) { s.center = s.center + c; }, placed.shape);
    out.push_back(std::move(placed));
  }
}

template <class S>
void ObstacleField<S>::candidate_sites(std::int64_t gx, std::int64_t gy, std::vector<Site>& out) const {
  if (own_cell_only_) {
    out.push_back({gx, gy});
    return;
  }
  if (table_.lattice() == Lattice::Square) {
    for (std::int64_t di = -1; di <= 1; ++di)
      for (std::int64_t dj = -1; dj <= 1; ++dj) out.push_back({gx + di, gy + dj});
    return;
  }
  const double reach = table_.reach();
  const double xlo = static_cast<double>(gx) - 0.5 - reach, xhi = static_cast<double>(gx) + 0.5 + reach;
  const double ylo = static_cast<double>(gy) - 0.5 - reach, yhi = static_cast<double>(gy) + 0.5 + reach;
  const auto jlo = static_cast<std::int64_t>(std::ceil(ylo / kRowHeight));
  const auto jhi = static_cast<std::int64_t>(std::floor(yhi / kRowHeight));
  for (std::int64_t j = jlo; j <= jhi; ++j) {
    const double shift = 0.5 * static_cast<double>(j);
    const auto ilo = static_cast<std::int64_t>(std::ceil(xlo - shift));
    const auto ihi = static_cast<std::int64_t>(std::floor(xhi - shift));
    for (std::int64_t i = ilo; i <= ihi; ++i) out.push_back({i, j});
  }
}

template class ObstacleField<double>;
template class ObstacleField<Rational>;

}  // namespace windtree
