#pragma once

// Serialization: trajectory CSV, SVG figures and JSON-lines records.

#include <string>
#include <vector>

#include "windtree/config.hpp"
#include "windtree/field.hpp"
#include "windtree/flow.hpp"
#include "windtree/lorentz.hpp"
#include "windtree/periodic.hpp"
#include "windtree/section.hpp"

namespace windtree {

/// "time,x,y,dx,dy,kind,site" header plus one line per event; time is the
/// path length, numbers use 17 significant digits.
template <class S>
std::string trajectory_csv(const std::vector<Event<S>>& events);

struct SvgWindow {
  double xmin = -5, xmax = 5, ymin = -5, ymax = 5;
};

/// Obstacles of the window (rectangles or circles) with the paths drawn as
/// polylines on top.
std::string svg_figure(const ObstacleField<double>& field, const std::vector<std::vector<Vec2<double>>>& paths,
                       const SvgWindow& window);

Json to_json(const FractionEstimate& e);
Json to_json(const AnnulusCertificate& c);
Json to_json(const OrbitResult& r);
Json to_json(const DirectionReport& r, std::size_t max_witnesses = 10);
Json to_json(const HorizonReport& r, std::size_t max_suspects = 10);
Json to_json(const ExactPhase& p);

std::string format_number(double v);

extern template std::string trajectory_csv(const std::vector<Event<double>>&);
extern template std::string trajectory_csv(const std::vector<Event<Rational>>&);

}  // namespace windtree
