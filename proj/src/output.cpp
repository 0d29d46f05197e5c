#include "windtree/output.hpp"

#include <cmath>

#include <fmt/format.h>

namespace windtree {

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

template <class S>
std::string trajectory_csv(const std::vector<Event<S>>& events) {
  std::string out = "time,x,y,dx,dy,kind,site\n";
  for (const auto& ev : events) {
    Vec2<double> d = to_double(ev.dir);
    const double speed = norm(d);
    d = {d.x / speed, d.y / speed};
    const Vec2<double> p = to_double(ev.point);
    out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},", path_length(ev.time, ev.dir), p.x, p.y, d.x, d.y,
                       ev.kind == EventKind::Singular && ev.hit == HitKind::Tangent ? "tangent"
                       : ev.kind == EventKind::Singular                             ? "corner"
                                                                                    : to_string(ev.kind));
    if (ev.site) out += fmt::format("{}:{}", ev.site->i, ev.site->j);
    out += '\n';
  }
  return out;
}

template std::string trajectory_csv(const std::vector<Event<double>>&);
template std::string trajectory_csv(const std::vector<Event<Rational>>&);

std::string svg_figure(const ObstacleField<double>& field, const std::vector<std::vector<Vec2<double>>>& paths,
                       const SvgWindow& w) {
  const double scale = 800.0 / std::max(w.xmax - w.xmin, w.ymax - w.ymin);
  auto sx = [&](double x) { return (x - w.xmin) * scale; };
  auto sy = [&](double y) { return (w.ymax - y) * scale; };
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      (w.xmax - w.xmin) * scale, (w.ymax - w.ymin) * scale);

  std::vector<PlacedShape<double>> shapes;
  const auto lo = static_cast<std::int64_t>(std::floor(std::min(w.xmin, w.ymin))) - 2;
  const auto hi = static_cast<std::int64_t>(std::ceil(std::max(w.xmax, w.ymax))) + 2;
  for (std::int64_t i = lo; i <= hi; ++i)
    for (std::int64_t j = lo; j <= hi; ++j) field.shapes_at({i, j}, shapes);
  for (const auto& s : shapes) {
    if (const auto* d = std::get_if<Disk>(&s.shape)) {
      if (d->center.x + d->radius < w.xmin || d->center.x - d->radius > w.xmax || d->center.y + d->radius < w.ymin ||
          d->center.y - d->radius > w.ymax)
        continue;
      out += fmt::format("<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"{:.3f}\" fill=\"#9aa\" stroke=\"#333\"/>\n",
                         sx(d->center.x), sy(d->center.y), d->radius * scale);
    } else {
      const auto& r = std::get<Rect<double>>(s.shape);
      if (r.right() < w.xmin || r.left() > w.xmax || r.top() < w.ymin || r.bottom() > w.ymax) continue;
      out += fmt::format(
          "<rect x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" fill=\"#9aa\" stroke=\"#333\"/>\n",
          sx(r.left()), sy(r.top()), 2 * r.half_w * scale, 2 * r.half_h * scale);
    }
  }
  for (const auto& path : paths) {
    if (path.size() < 2) continue;
    out += "<polyline fill=\"none\" stroke=\"#c22\" stroke-width=\"1\" points=\"";
    for (const auto& p : path) out += fmt::format("{:.3f},{:.3f} ", sx(p.x), sy(p.y));
    out += "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

Json to_json(const FractionEstimate& e) {
  return {{"N", e.n},           {"M", e.m},       {"n", e.n_samples},   {"returned", e.returned},
          {"escaped", e.escaped}, {"singular", e.singular}, {"budget", e.budget}, {"point", e.point},
          {"ci_low", e.ci_low}, {"ci_high", e.ci_high}, {"seed", e.seed}};
}

Json to_json(const AnnulusCertificate& c) {
  Json trace = Json::array();
  for (const auto& t : c.trace) trace.push_back(to_json(t));
  Json out{{"certified", c.certified}};
  out["N1"] = c.certified ? Json(c.width) : Json(nullptr);
  out["certificate"] = c.trace.empty() ? Json(nullptr) : to_json(c.estimate);
  out["trace"] = std::move(trace);
  return out;
}

Json to_json(const ExactPhase& p) {
  return {{"x", to_string(p.pos.x)}, {"y", to_string(p.pos.y)}, {"dx", to_string(p.dir.x)}, {"dy", to_string(p.dir.y)}};
}

Json to_json(const OrbitResult& r) {
  Json out{{"status", to_string(r.status)}, {"collisions", r.collisions}};
  if (r.status == OrbitStatus::Periodic) {
    out["period_time"] = to_string(r.period_time);
    out["period_length"] = r.period_length;
  }
  out["min_excursion"] = r.min_excursion;
  out["max_excursion"] = r.max_excursion;
  return out;
}

Json to_json(const DirectionReport& r, std::size_t max_witnesses) {
  Json witnesses = Json::array();
  for (std::size_t k = 0; k < r.witnesses.size() && k < max_witnesses; ++k) {
    Json w = to_json(r.witnesses[k].result);
    w["start"] = to_json(r.witnesses[k].start);
    witnesses.push_back(std::move(w));
  }
  Json out{{"slope", r.slope.str()}, {"samples", r.n_samples}, {"valid", r.n_valid},   {"periodic", r.periodic},
           {"escaped", r.escaped},   {"singular", r.singular}, {"budget", r.budget}, {"fraction", r.fraction},
           {"witnesses", std::move(witnesses)}};
  if (!r.diagnostic.empty()) out["diagnostic"] = r.diagnostic;
  return out;
}

Json to_json(const HorizonReport& r, std::size_t max_suspects) {
  Json suspects = Json::array();
  for (std::size_t k = 0; k < r.unbounded_suspects.size() && k < max_suspects; ++k) {
    const auto& l = r.unbounded_suspects[k];
    suspects.push_back({{"origin", {l.origin.x, l.origin.y}}, {"angle", l.angle}});
  }
  Json out{{"n_lines", r.n_lines},
           {"probe_length", r.probe_length},
           {"max_gap_observed", r.max_gap_observed},
           {"n_unbounded_suspects", r.unbounded_suspects.size()},
           {"unbounded_suspects", std::move(suspects)}};
  out["min_obstacle_separation"] =
      std::isfinite(r.min_obstacle_separation) ? Json(r.min_obstacle_separation) : Json(nullptr);
  return out;
}

}  // namespace windtree
