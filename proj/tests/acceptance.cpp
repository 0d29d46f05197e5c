// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "json.hpp"
#include "oracles.hpp"
#include "support.hpp"
#include "windtree/cli.hpp"
#include "windtree/flow.hpp"
#include "windtree/lorentz.hpp"
#include "windtree/periodic.hpp"
#include "windtree/section.hpp"

using namespace windtree;
using Json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const RectObstacle kHalf{Rational(1, 2), Rational(1, 2)};

TableConfig random_rects(std::uint64_t seed) {
  return TableConfig::iid(
      {{kHalf, 0.5}, {EmptyObstacle{}, 0.3}, {RectObstacle{Rational(3, 4), Rational(1, 6)}, 0.2}}, seed);
}

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail, double seconds) {
  if (!pass) ++failures;
  std::printf("%s %2d %s: %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
}

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

struct Criterion {
  int id;
  std::string name;
  std::function<std::pair<bool, std::string>()> body;
};

fs::path work_dir() {
  static const fs::path d = [] {
    fs::path p = fs::temp_directory_path() / ("windtree_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return d;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- 1 ----------------------------------------------------------------------

std::pair<bool, std::string> geometry_oracles() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-2, 2), half(0.01, 0.49), ang(0, 2 * M_PI);
  long rect_bad = 0, rect_hits = 0;
  for (int k = 0; k < 100'000;) {
    const Rect<double> r{{u(rng), u(rng)}, half(rng), half(rng)};
    const Vec2<double> o{u(rng) * 2, u(rng) * 2};
    if (o.x >= r.left() && o.x <= r.right() && o.y >= r.bottom() && o.y <= r.top()) continue;
    ++k;
    const double a = ang(rng);
    const Vec2<double> d{std::cos(a), std::sin(a)};
    const auto got = ray_rect_intersection(o, d, r);
    const auto want = oracle::ray_rect(o, d, r, 1e-12);
    if (bool(got) != bool(want)) {
      ++rect_bad;
      continue;
    }
    if (!got) continue;
    ++rect_hits;
    const bool ok = std::abs(got->t - want->t) <= 1e-9 * std::max(1.0, want->t) &&
                    (got->kind != HitKind::Regular) == want->at_vertex &&
                    (want->at_vertex || got->normal == want->normal);
    rect_bad += !ok;
  }

  std::uniform_int_distribution<int> coord(-16, 16), comp(-4, 4);
  const Rect<Rational> xr{{Rational(0), Rational(0)}, Rational(1, 4), Rational(3, 8)};
  long exact_bad = 0, vertex_hits = 0;
  for (int k = 0; k < 20'000;) {
    const Vec2<Rational> o{Rational(coord(rng), 8), Rational(coord(rng), 8)};
    if (o.x >= xr.left() && o.x <= xr.right() && o.y >= xr.bottom() && o.y <= xr.top()) continue;
    const Vec2<Rational> d{Rational(comp(rng)), Rational(comp(rng))};
    if (d.x == 0 && d.y == 0) continue;
    ++k;
    const auto got = ray_rect_intersection(o, d, xr);
    const auto want = oracle::ray_rect(o, d, xr, Rational(0));
    if (bool(got) != bool(want)) {
      ++exact_bad;
      continue;
    }
    if (!got) continue;
    vertex_hits += want->at_vertex;
    exact_bad += !(got->t == want->t && (got->kind != HitKind::Regular) == want->at_vertex &&
                   (want->at_vertex || got->normal == want->normal));
  }

  std::uniform_real_distribution<double> pos(-50, 50), len(0, 12);
  long cell_bad = 0;
  for (int k = 0; k < 100'000; ++k) {
    const double a = ang(rng);
    const Vec2<double> o{pos(rng), pos(rng)}, d{std::cos(a), std::sin(a)};
    const double l = len(rng);
    const auto got = traverse_cells(o, d, l);
    const auto want = oracle::cells_met(o, d, l);
    bool ok = got.size() == want.size();
    for (std::size_t j = 0; ok && j < got.size(); ++j) {
      const auto it = want.find(got[j].cell);
      ok = it != want.end() && std::abs(got[j].t_enter - it->second) <= 1e-9 &&
           (j == 0 || got[j].t_enter >= got[j - 1].t_enter);
    }
    cell_bad += !ok;
  }
  std::uniform_int_distribution<int> gpos(-24, 24), glen(0, 8);
  for (int k = 0; k < 5'000;) {
    const Vec2<Rational> o{Rational(gpos(rng), 4), Rational(gpos(rng), 4)};
    const Vec2<Rational> d{Rational(comp(rng)), Rational(comp(rng))};
    if (d.x == 0 && d.y == 0) continue;
    ++k;
    const Rational l(glen(rng), 2);
    const auto got = traverse_cells(o, d, l);
    const auto want = oracle::cells_met(o, d, l);
    bool ok = got.size() == want.size();
    for (std::size_t j = 0; ok && j < got.size(); ++j) {
      const auto it = want.find(got[j].cell);
      ok = it != want.end() && got[j].t_enter == it->second;
    }
    cell_bad += !ok;
  }
  const bool pass = rect_bad == 0 && exact_bad == 0 && cell_bad == 0 && rect_hits > 1000 && vertex_hits > 10;
  return {pass, fmt("ray_rect 1e5 float (%ld hits) + 2e4 exact (%ld vertex hits), traverse_cells 1e5 float + 5e3 "
                    "exact; mismatches %ld/%ld/%ld",
                    rect_hits, vertex_hits, rect_bad, exact_bad, cell_bad)};
}

// ---- 2 ----------------------------------------------------------------------

std::pair<bool, std::string> exact_float_agreement() {
  const ObstacleField<Rational> we(TableConfig::constant(kHalf));
  const ObstacleField<double> wf(TableConfig::constant(kHalf));
  FlowOptions<Rational> eo;
  eo.budget = {1000, 1e12, 1e9};
  eo.record = false;
  FlowOptions<double> fo;
  fo.budget = {1000, 1e12, 1e9};
  fo.record = false;
  std::mt19937_64 rng(102);
  int compared = 0, skipped = 0;
  double worst = 0;
  while (compared < 100) {
    const auto start = testsupport::exact_start(we, rng);
    const auto e = flow_until<Rational>(we, start, nullptr, eo);
    if (e.status == FlowStatus::Singular) {
      ++skipped;
      continue;
    }
    const auto f = flow_until<double>(wf, testsupport::to_float(start), nullptr, fo);
    const double err = f.collisions == e.collisions ? norm(to_double(e.final.pos) - f.final.pos) : INFINITY;
    worst = std::max(worst, err);
    ++compared;
  }
  return {worst <= 1e-6,
          fmt("100 trajectories x 1000 collisions, max position error %.3g (limit 1e-6), %d singular starts redrawn",
              worst, skipped)};
}

// ---- 3 ----------------------------------------------------------------------

std::pair<bool, std::string> reversibility() {
  std::mt19937_64 rng(103);
  const ObstacleField<double> ff(random_rects(31));
  double worst = 0;
  int float_done = 0;
  while (float_done < 1000) {
    const auto p = testsupport::float_start(ff, rng);
    FlowOptions<double> o;
    o.max_time = 200.0;
    o.record = false;
    const auto fwd = flow_until<double>(ff, p, nullptr, o);
    if (fwd.status == FlowStatus::Singular) continue;
    const auto back = flow_until<double>(ff, {fwd.final.pos, -fwd.final.dir}, nullptr, o);
    const double err = back.status == FlowStatus::Singular ? INFINITY : norm(back.final.pos - p.pos) / 200.0;
    worst = std::max(worst, err);
    ++float_done;
  }
  const ObstacleField<Rational> xf(random_rects(31));
  int exact_bad = 0, exact_done = 0;
  while (exact_done < 1000) {
    const auto p = testsupport::exact_start(xf, rng);
    FlowOptions<Rational> o;
    o.max_time = Rational(10);
    o.record = false;
    const auto fwd = flow_until<Rational>(xf, p, nullptr, o);
    if (fwd.status == FlowStatus::Singular) continue;
    const auto back = flow_until<Rational>(xf, {fwd.final.pos, -fwd.final.dir}, nullptr, o);
    exact_bad += !(back.final.pos == p.pos && back.final.dir == -p.dir);
    ++exact_done;
  }
  return {worst <= 1e-9 && exact_bad == 0,
          fmt("1000 float (max error / path length %.3g, limit 1e-9) and 1000 exact (%d not identical)", worst,
              exact_bad)};
}

// ---- 4 ----------------------------------------------------------------------

std::pair<bool, std::string> direction_invariant() {
  std::mt19937_64 rng(104);
  std::vector<ObstacleField<double>> fields;
  fields.emplace_back(TableConfig::constant(kHalf));
  fields.emplace_back(random_rects(41));
  fields.emplace_back(random_rects(42));
  fields.emplace_back(TableConfig::iid({{RectObstacle{Rational(1, 10), Rational(9, 10)}, 1}, {EmptyObstacle{}, 1}}, 43));
  std::uint64_t total = 0, violations = 0;
  for (std::size_t k = 0; total < 1'000'000; ++k) {
    const auto& f = fields[k % fields.size()];
    const auto p = testsupport::float_start(f, rng);
    FlowOptions<double> o;
    o.budget = {10'000, 1e12, 1e9};
    o.record = false;
    const auto r = flow_until<double>(
        f, p,
        [&](const Event<double>& ev) {
          violations += std::abs(ev.dir.x) != std::abs(p.dir.x) || std::abs(ev.dir.y) != std::abs(p.dir.y);
          return false;
        },
        o);
    total += r.collisions;
  }
  return {violations == 0, fmt("%llu collisions on 4 rectangle tables, %llu direction changes",
                               static_cast<unsigned long long>(total), static_cast<unsigned long long>(violations))};
}

// ---- 5 ----------------------------------------------------------------------

std::pair<bool, std::string> recurrence_trend() {
  const ObstacleField<double> w(TableConfig::constant(kHalf));
  RecurrenceOptions o;
  o.n_samples = 10'000;
  o.seed = 105;
  o.threads = 0;
  std::vector<FractionEstimate> est;
  std::string detail;
  for (std::int64_t m : {4, 8, 16, 32}) {
    est.push_back(recurrence_fraction(w, 2, m, o));
    detail += fmt("M=%lld %.4f [%.4f,%.4f] ", static_cast<long long>(m), est.back().point, est.back().ci_low,
                  est.back().ci_high);
  }
  bool monotone = true, high = false;
  for (std::size_t k = 0; k < est.size(); ++k) {
    if (k > 0) monotone &= est[k].ci_high >= est[k - 1].ci_low;
    high |= est[k].ci_low >= 0.9;
  }
  detail += fmt("; nondecreasing within CIs: %s; some ci_low >= 0.9: %s", monotone ? "yes" : "no", high ? "yes" : "no");
  return {monotone && high, detail};
}

// ---- 6 ----------------------------------------------------------------------

std::pair<bool, std::string> annulus_certificate() {
  const std::string out = (work_dir() / "annulus.json").string();
  const int code = run_cli({"annulus", "--e", "1/2,1/2", "--N", "1", "--epsilon", "0.5", "--n", "10000", "--seed",
                            "106", "--threads", "0", "--out", out});
  if (code != 0) return {false, fmt("annulus command exited with %d", code)};
  const Json rec = Json::parse(slurp(out));
  const bool certified = rec["certified"].get<bool>();
  const double low = certified ? rec["certificate"]["ci_low"].get<double>() : 0.0;
  return {certified && low >= 0.5,
          fmt("certified %s, N1 = %s, ci_low %.4f (need >= 0.5)", certified ? "yes" : "no", rec["N1"].dump().c_str(),
              low)};
}

// ---- 7 and 8 ----------------------------------------------------------------

std::vector<DirectionReport> scan;

std::pair<bool, std::string> periodicity() {
  const ObstacleField<Rational> w(TableConfig::constant(kHalf));
  const ExactPhase trap{{Rational(1, 2), Rational(0)}, {Rational(1), Rational(0)}};
  const auto r = exact_orbit(w, trap, 10, Budget{});
  const bool trap_ok = r.status == OrbitStatus::Periodic && r.period_length == 1.0 && r.collisions == 2;

  PeriodicityOptions o;
  o.n_samples = 100;
  o.seed = 107;
  o.threads = 0;
  scan = scan_periodic_directions(w, 8, o);
  std::string full;
  for (const auto& d : scan)
    if (d.n_valid == 100 && d.periodic == 100) full += (full.empty() ? "" : " ") + d.slope.str();
  return {trap_ok && !full.empty(),
          fmt("trap orbit %s (length %.17g, %llu collisions); slopes with 100/100 periodic: %s",
              to_string(r.status), r.period_length, static_cast<unsigned long long>(r.collisions),
              full.empty() ? "none" : full.c_str())};
}

std::pair<bool, std::string> annulus_periodicity() {
  // The fully periodic slope whose witness orbits spread over the fewest
  // rings; the margin covers that spread.
  const DirectionReport* best = nullptr;
  double best_spread = INFINITY;
  for (const auto& d : scan) {
    if (d.n_valid != 100 || d.periodic != 100 || d.witnesses.empty()) continue;
    double spread = 0;
    for (const auto& wit : d.witnesses) spread = std::max(spread, wit.result.max_excursion - wit.result.min_excursion);
    if (spread < best_spread) {
      best_spread = spread;
      best = &d;
    }
  }
  if (!best) return {false, "no fully periodic slope available from the scan"};
  AnnulusPeriodicity ex;
  ex.e = RationalPair::from(Rational(1, 2), Rational(1, 2));
  ex.slope = best->slope;
  ex.ring = 12;
  ex.margin = static_cast<std::int64_t>(std::ceil(best_spread)) + 1;
  ex.background = TableConfig::iid({{kHalf, 0.5}, {EmptyObstacle{}, 0.5}}, 108);
  PeriodicityOptions o;
  o.n_samples = 200;
  o.seed = 108;
  o.threads = 0;
  const auto rep = run_annulus_periodicity(ex, o);
  const bool pass = rep.report.n_valid >= 100 && rep.report.periodic == rep.report.n_valid &&
                    rep.stayed_inside == rep.report.n_valid;
  return {pass, fmt("slope %s, ring %lld, margin %lld: %lld/%lld periodic, %lld stayed in the annulus",
                    ex.slope.str().c_str(), static_cast<long long>(ex.ring), static_cast<long long>(ex.margin),
                    static_cast<long long>(rep.report.periodic), static_cast<long long>(rep.report.n_valid),
                    static_cast<long long>(rep.stayed_inside))};
}

// ---- 9 ----------------------------------------------------------------------

std::pair<bool, std::string> section_invertibility() {
  const ObstacleField<Rational> w(random_rects(109));
  const SectionCurve<Rational> c(w, 2);
  int checked = 0, bad = 0;
  for (std::uint64_t k = 0; checked < 1000 && k < 20'000; ++k) {
    const auto sp = sample_point(c, k % 2 ? Side::Inner : Side::Outer, 109, k);
    const auto r = first_return(c, sp, 12, Budget{});
    if (r.status != ReturnStatus::Returned) continue;
    const auto back = first_return(c, reversed(*r.point), 12, Budget{});
    const auto want = reversed(sp);
    bad += !(back.status == ReturnStatus::Returned && back.point->pos == want.pos && back.point->dir == want.dir);
    ++checked;
  }
  return {checked == 1000 && bad == 0, fmt("%d returned samples (N=2, M=12), %d not mapped back exactly", checked, bad)};
}

// ---- 10 ---------------------------------------------------------------------

std::pair<bool, std::string> lorentz() {
  const ObstacleField<double> tri(triangular_lorentz_table());
  const double sep = min_obstacle_separation(tri);
  const auto h = horizon_stability(tri, 1000, 50, 200, 110, 0);

  const ObstacleField<double> empty(TableConfig::constant(EmptyObstacle{}));
  RecurrenceOptions o;
  o.n_samples = 1000;
  o.seed = 110;
  o.threads = 0;
  const auto rec = lorentz_recurrence(empty, 2, 8, o);
  const auto probe = horizon_probe(empty, 200, 100, 110, 0);
  const bool all_unbounded = probe.unbounded_suspects.size() == 200;
  return {sep > 0 && h.stable && rec.point == 0.0 && all_unbounded,
          fmt("triangular r=0.49: separation %.3g, max gap %.3f at 50 and %.3f at 200, stable %s; empty table: "
              "recurrence %.1f, %zu/200 lines unbounded",
              sep, h.short_probe.max_gap_observed, h.long_probe.max_gap_observed, h.stable ? "yes" : "no", rec.point,
              probe.unbounded_suspects.size())};
}

// ---- 11 ---------------------------------------------------------------------

std::pair<bool, std::string> replay_determinism() {
  const std::string cli = WINDTREE_CLI_PATH;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate_float", "simulate --preset random-wind-tree --start 1/3,1/7,2,1 --budget-collisions 500"},
      {"simulate_exact", "simulate --preset wind-tree --engine exact --start 1/3,1/7,2,1 --budget-collisions 300"},
      {"recurrence", "recurrence --preset wind-tree --N 2 --M 4,8 --n 2000 --seed 11"},
      {"annulus", "annulus --N 1 --epsilon 0.5 --n 1000 --seed 11"},
      {"periodic_orbit", "periodic orbit --preset wind-tree --start 1/3,1/7,1,3"},
      {"periodic_direction", "periodic direction --preset wind-tree --slope 1/3 --n 40 --seed 11"},
      {"periodic_scan", "periodic scan --preset wind-tree --max-q 4 --n 20 --seed 11"},
      {"periodic_annulus", "periodic annulus --preset random-wind-tree --slope 1/1 --ring 8 --margin 3 --n 40"},
      {"lorentz_horizon", "lorentz horizon --preset lorentz-triangular --lines 300 --seed 11"},
      {"lorentz_recurrence", "lorentz recurrence --preset lorentz-five-disk --N 2 --M 6 --n 1000 --seed 11"},
  };
  std::string bad;
  for (const auto& [name, args] : commands) {
    const fs::path out = work_dir() / (name + ".out");
    const std::string first = cli + " " + args + " --threads 1 --out " + out.string() + " >/dev/null 2>&1";
    if (std::system(first.c_str()) != 0) {
      bad += " " + name + "(run)";
      continue;
    }
    const std::string original = slurp(out);
    for (int threads : {1, 8}) {
      const fs::path again = work_dir() / (name + ".t" + std::to_string(threads) + ".out");
      const std::string cmd = cli + " replay " + out.string() + ".manifest.json --threads " + std::to_string(threads) +
                              " --out " + again.string() + " >/dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0 || slurp(again) != original || original.empty())
        bad += " " + name + "(threads " + std::to_string(threads) + ")";
    }
  }
  return {bad.empty(), fmt("%zu commands replayed at threads 1 and 8; differing:%s", commands.size(),
                           bad.empty() ? " none" : bad.c_str())};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "geometry oracle equivalence", geometry_oracles},
      {2, "exact/float engine agreement", exact_float_agreement},
      {3, "time reversibility", reversibility},
      {4, "four-direction invariant", direction_invariant},
      {5, "recurrence trend", recurrence_trend},
      {6, "annulus certificate", annulus_certificate},
      {7, "periodicity", periodicity},
      {8, "annulus periodicity", annulus_periodicity},
      {9, "section map invertibility", section_invertibility},
      {10, "lorentz tables", lorentz},
      {11, "replay determinism", replay_determinism},
  };
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::pair<bool, std::string> result;
    try {
      result = c.body();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    report(c.id, c.name, result.first, result.second,
           std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::error_code ec;
  fs::remove_all(work_dir(), ec);
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
