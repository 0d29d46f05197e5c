#include "windtree/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "windtree/config.hpp"
#include "windtree/lorentz.hpp"
#include "windtree/output.hpp"
#include "windtree/periodic.hpp"
#include "windtree/section.hpp"

namespace windtree {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::string preset;
  std::string config_inline;
  std::string out;
  std::uint64_t seed = 0;
  std::string engine = "float";
  unsigned threads = 1;
  std::uint64_t budget_collisions = 1'000'000;
  double budget_length = 1e6;
  double budget_radius = 1e3;

  Budget budget() const { return {budget_collisions, budget_length, budget_radius}; }
  bool exact() const { return engine == "exact"; }
};

struct Outcome {
  int exit = kExitOk;
  Json config = nullptr;
  std::vector<std::string> outputs;
  Json summary = Json::object();
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "table configuration file (JSON)")->envname("WINDTREE_CONFIG");
  app->add_option("--preset", c.preset, "built-in table preset")->envname("WINDTREE_PRESET");
  app->add_option("--config-inline", c.config_inline, "table configuration as a JSON string")->group("");
  app->add_option("--seed", c.seed, "random seed")->envname("WINDTREE_SEED");
  app->add_option("--engine", c.engine, "float or exact")
      ->check(CLI::IsMember({"float", "exact"}))
      ->envname("WINDTREE_ENGINE");
  app->add_option("--threads", c.threads, "worker threads (0 = all cores)")->envname("WINDTREE_THREADS");
  app->add_option("--budget-collisions", c.budget_collisions, "collision budget per trajectory")
      ->envname("WINDTREE_BUDGET_COLLISIONS");
  app->add_option("--budget-length", c.budget_length, "path-length budget per trajectory")
      ->envname("WINDTREE_BUDGET_LENGTH");
  app->add_option("--budget-radius", c.budget_radius, "cap on |x|+|y|")->envname("WINDTREE_BUDGET_RADIUS");
  app->add_option("--out", c.out, "output file")->required()->envname("WINDTREE_OUT");
}

std::pair<Json, TableConfig> load_table(const Common& c) {
  Json doc;
  if (!c.config_inline.empty()) {
    try {
      doc = Json::parse(c.config_inline);
    } catch (const Json::parse_error& e) {
      throw ConfigError(std::string("--config-inline: ") + e.what());
    }
  } else if (!c.config.empty()) {
    doc = read_config_file(c.config);
  } else if (!c.preset.empty()) {
    doc = preset(c.preset);
  } else {
    throw ConfigError("no table given: pass --config FILE or --preset NAME");
  }
  return {doc, table_from_json(doc)};
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  return out;
}

std::array<Rational, 4> parse_start(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) throw UsageError("--start expects x,y,dx,dy");
  std::array<Rational, 4> v;
  for (std::size_t k = 0; k < 4; ++k) {
    try {
      v[k] = parse_rational(parts[k]);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--start: ") + e.what());
    }
  }
  if (v[2] == 0 && v[3] == 0) throw UsageError("--start: direction must be nonzero");
  return v;
}

// Scales a rational direction to a primitive integer vector.
Direction<Rational> primitive_direction(const Rational& dx, const Rational& dy) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  const BigInt l = boost::multiprecision::lcm(denominator(dx), denominator(dy));
  BigInt x = numerator(dx) * (l / denominator(dx));
  BigInt y = numerator(dy) * (l / denominator(dy));
  const BigInt g = boost::multiprecision::gcd(x, y);
  return {Rational(BigInt(x / g)), Rational(BigInt(y / g))};
}

Direction<double> unit_direction(const Rational& dx, const Rational& dy) {
  const Vec2<double> d{to_double(dx), to_double(dy)};
  return {d.x / norm(d), d.y / norm(d)};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path + ": cannot open output file");
  out << text;
  if (!out) throw std::runtime_error(path + ": write failed");
}

std::string jsonl(const std::vector<Json>& records) {
  std::string out;
  for (const auto& r : records) out += r.dump() + "\n";
  return out;
}

template <class S>
bool inside_open_obstacle(const ObstacleField<S>& field, const Vec2<S>& p) {
  std::vector<Site> sites;
  std::vector<PlacedShape<S>> shapes;
  const Vec2<double> q = to_double(p);
  if (field.lattice() == Lattice::Square) {
    field.candidate_sites(static_cast<std::int64_t>(std::llround(q.x)), static_cast<std::int64_t>(std::llround(q.y)),
                          sites);
  } else {
    for (std::int64_t j = static_cast<std::int64_t>(std::floor(q.y / 0.8660254037844386)) - 1;
         j <= static_cast<std::int64_t>(std::ceil(q.y / 0.8660254037844386)) + 1; ++j)
      for (std::int64_t i = static_cast<std::int64_t>(std::floor(q.x - 0.5 * static_cast<double>(j))) - 1;
           i <= static_cast<std::int64_t>(std::ceil(q.x - 0.5 * static_cast<double>(j))) + 1; ++i)
        sites.push_back({i, j});
  }
  for (const auto& s : sites) field.shapes_at(s, shapes);
  for (const auto& s : shapes) {
    const bool inside = std::visit(
        [&](const auto& sh) {
          if constexpr (std::is_same_v<std::decay_t<decltype(sh)>, Disk>) {
            return norm(q - sh.center) < sh.radius;
          } else {
            return p.x > sh.left() && p.x < sh.right() && p.y > sh.bottom() && p.y < sh.top();
          }
        },
        s.shape);
    if (inside) return true;
  }
  return false;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string start;
  std::optional<double> max_time;
  bool svg = false;
  std::string window;
};

template <class S>
Outcome simulate_with(const Common& c, const SimulateArgs& a, const Json& doc, const TableConfig& table) {
  const ObstacleField<S> field(table);
  const auto v = parse_start(a.start);
  PhasePoint<S> start;
  if constexpr (is_exact_v<S>) {
    start = {{v[0], v[1]}, primitive_direction(v[2], v[3])};
  } else {
    start = {{to_double(v[0]), to_double(v[1])}, unit_direction(v[2], v[3])};
  }
  if (inside_open_obstacle(field, start.pos)) throw UsageError("--start lies inside an obstacle");
  FlowOptions<S> opts;
  opts.budget = c.budget();
  if (a.max_time) opts.max_time = scalar_from<S>(*a.max_time / norm(to_double(start.dir)));
  const auto result = flow_until<S>(field, start, nullptr, opts);
  write_file(c.out, trajectory_csv(result.trajectory));

  Outcome o;
  o.config = doc;
  o.outputs.push_back(c.out);
  if (a.svg) {
    SvgWindow w;
    if (!a.window.empty()) {
      const auto parts = split(a.window, ',');
      if (parts.size() != 4) throw UsageError("--window expects xmin,xmax,ymin,ymax");
      w = {std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3])};
    }
    std::vector<Vec2<double>> path;
    for (const auto& ev : result.trajectory) path.push_back(to_double(ev.point));
    const ObstacleField<double> drawing(table);
    write_file(c.out + ".svg", svg_figure(drawing, {path}, w));
    o.outputs.push_back(c.out + ".svg");
  }
  o.summary = {{"status", to_string(result.status)},
               {"limit", to_string(result.limit)},
               {"collisions", result.collisions},
               {"path_length", path_length(result.time, result.final.dir)}};
  return o;
}

Outcome cmd_simulate(const Common& c, const SimulateArgs& a) {
  auto [doc, table] = load_table(c);
  if (c.exact()) return simulate_with<Rational>(c, a, doc, table);
  return simulate_with<double>(c, a, doc, table);
}

// ---- recurrence -------------------------------------------------------------

struct RecurrenceArgs {
  std::int64_t n_level = 2;
  std::vector<std::int64_t> m_levels;
  std::int64_t samples = 10'000;
};

template <class S>
std::vector<FractionEstimate> estimates(const ObstacleField<S>& field, const Common& c, const RecurrenceArgs& a) {
  RecurrenceOptions opts{a.samples, c.seed, c.budget(), c.threads};
  std::vector<FractionEstimate> out;
  for (std::int64_t m : a.m_levels) out.push_back(recurrence_fraction(field, a.n_level, m, opts));
  return out;
}

Outcome recurrence_records(const Common& c, const std::vector<FractionEstimate>& est, const Json& doc) {
  std::vector<Json> records;
  bool budget_dominated = false;
  for (const auto& e : est) {
    records.push_back(to_json(e));
    budget_dominated |= 2 * e.budget > e.n_samples;
  }
  write_file(c.out, jsonl(records));
  Outcome o;
  o.config = doc;
  o.outputs.push_back(c.out);
  o.exit = budget_dominated ? kExitNotCertified : kExitOk;
  o.summary = {{"records", records.size()}, {"budget_dominated", budget_dominated}};
  return o;
}

Outcome cmd_recurrence(const Common& c, const RecurrenceArgs& a) {
  auto [doc, table] = load_table(c);
  if (c.exact()) return recurrence_records(c, estimates(ObstacleField<Rational>(table), c, a), doc);
  return recurrence_records(c, estimates(ObstacleField<double>(table), c, a), doc);
}

// ---- annulus ----------------------------------------------------------------

struct AnnulusArgs {
  std::string e = "1/2,1/2";
  std::int64_t n_level = 1;
  double epsilon = 0.5;
  std::int64_t samples = 10'000;
  int max_doublings = 6;
};

RationalPair parse_pair(const std::string& text, const char* flag) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw UsageError(std::string(flag) + " expects a,b (fractions)");
  try {
    return RationalPair::from(parse_rational(parts[0]), parse_rational(parts[1]));
  } catch (const std::invalid_argument& err) {
    throw UsageError(std::string(flag) + ": " + err.what());
  }
}

Outcome cmd_annulus(const Common& c, const AnnulusArgs& a) {
  if (!(a.epsilon > 0 && a.epsilon < 1)) throw UsageError("--epsilon must lie in (0, 1)");
  const RationalPair e = parse_pair(a.e, "--e");
  if (!is_odd_over_even(e))
    throw UsageError("obstacle " + to_string(e.a()) + "," + to_string(e.b()) +
                     " is rejected: numerators must be odd and denominators even");
  const auto cert = find_annulus_width(e, a.n_level, {a.epsilon, a.max_doublings},
                                       {a.samples, c.seed, c.budget(), c.threads});
  Json record = to_json(cert);
  record["e"] = to_string(e.a()) + "," + to_string(e.b());
  record["epsilon"] = a.epsilon;
  write_file(c.out, record.dump() + "\n");
  Outcome o;
  o.config = {{"lattice", "square"},
              {"generator", {{"kind", "constant"}, {"obstacle", obstacle_to_json(RectObstacle{e.a(), e.b()})}}}};
  o.outputs.push_back(c.out);
  o.exit = cert.certified ? kExitOk : kExitNotCertified;
  o.summary = {{"certified", cert.certified}, {"N1", cert.certified ? Json(cert.width) : Json(nullptr)}};
  return o;
}

// ---- periodic ---------------------------------------------------------------

struct PeriodicArgs {
  std::string mode;
  std::string start;
  std::int64_t bound = 40;
  std::string slope = "1/1";
  std::int64_t samples = 100;
  std::int64_t start_radius = 0;
  std::int64_t max_q = 8;
  std::string e = "1/2,1/2";
  std::int64_t ring = 8;
  std::int64_t margin = 4;
};

DirectionSlope parse_slope(const std::string& text) {
  const auto parts = split(text, '/');
  try {
    if (parts.size() == 1) return DirectionSlope::reduced(std::stoll(parts[0]), 1);
    if (parts.size() == 2) {
      const auto s = DirectionSlope::reduced(std::stoll(parts[0]), std::stoll(parts[1]));
      if (s.p < 0) throw UsageError("--slope must be non-negative (sign variants are sampled)");
      return s;
    }
  } catch (const std::logic_error&) {
  }
  throw UsageError("--slope expects p/q with q > 0");
}

Outcome cmd_periodic(const Common& c, const PeriodicArgs& a) {
  PeriodicityOptions opts;
  opts.n_samples = a.samples;
  opts.bound = a.bound;
  opts.start_radius = a.start_radius;
  opts.seed = c.seed;
  opts.budget = c.budget();
  opts.threads = c.threads;

  Outcome o;
  o.outputs.push_back(c.out);
  std::vector<Json> records;
  auto dominated = [](const DirectionReport& r) { return r.n_valid > 0 && 2 * r.budget > r.n_valid; };

  if (a.mode == "annulus") {
    AnnulusPeriodicity ex;
    ex.e = parse_pair(a.e, "--e");
    ex.slope = parse_slope(a.slope);
    ex.ring = a.ring;
    ex.margin = a.margin;
    Json background_doc = nullptr;
    if (!c.config.empty() || !c.preset.empty() || !c.config_inline.empty()) {
      auto [doc, table] = load_table(c);
      background_doc = doc;
      ex.background = table;
    }
    if (ex.background.lattice() != Lattice::Square || !ex.background.rectangles_only())
      throw ConfigError("annulus background must be a square-lattice rectangle table");
    const auto rep = run_annulus_periodicity(ex, opts);
    Json r = to_json(rep.report);
    r["ring"] = ex.ring;
    r["margin"] = ex.margin;
    r["stayed_inside"] = rep.stayed_inside;
    records.push_back(r);
    o.config = background_doc;
    o.exit = dominated(rep.report) ? kExitNotCertified : kExitOk;
  } else {
    auto [doc, table] = load_table(c);
    o.config = doc;
    try {
      table.square_tiling_denominator();
    } catch (const std::invalid_argument& err) {
      throw ConfigError(std::string("table is not square tiled: ") + err.what());
    }
    const ObstacleField<Rational> field(table);
    if (a.mode == "orbit") {
      const auto v = parse_start(a.start);
      const ExactPhase start{{v[0], v[1]}, primitive_direction(v[2], v[3])};
      if (inside_open_obstacle(field, start.pos)) throw UsageError("--start lies inside an obstacle");
      const auto res = exact_orbit(field, start, a.bound, c.budget());
      Json r = to_json(res);
      r["start"] = to_json(start);
      records.push_back(r);
      o.exit = res.status == OrbitStatus::Budget ? kExitNotCertified : kExitOk;
    } else if (a.mode == "direction") {
      const auto rep = check_direction_periodicity(field, parse_slope(a.slope), opts);
      records.push_back(to_json(rep));
      o.exit = dominated(rep) ? kExitNotCertified : kExitOk;
    } else {
      bool any_dominated = false;
      for (const auto& rep : scan_periodic_directions(field, a.max_q, opts)) {
        records.push_back(to_json(rep, 3));
        any_dominated |= dominated(rep);
      }
      o.exit = any_dominated ? kExitNotCertified : kExitOk;
    }
  }
  write_file(c.out, jsonl(records));
  o.summary = {{"records", records.size()}};
  return o;
}

// ---- lorentz ----------------------------------------------------------------

struct LorentzArgs {
  std::string mode;
  std::int64_t lines = 1000;
  std::vector<double> probe_lengths{50.0, 200.0};
  RecurrenceArgs recurrence;
};

Outcome cmd_lorentz(const Common& c, const LorentzArgs& a) {
  if (c.exact()) throw UsageError("Lorentz tables need the float engine");
  auto [doc, table] = load_table(c);
  const ObstacleField<double> field(table);
  if (a.mode == "recurrence") return recurrence_records(c, estimates(field, c, a.recurrence), doc);

  std::vector<Json> records;
  std::vector<HorizonReport> reports;
  for (double len : a.probe_lengths) {
    reports.push_back(horizon_probe(field, a.lines, len, c.seed, c.threads));
    records.push_back(to_json(reports.back()));
  }
  if (reports.size() >= 2) {
    const auto& s = reports.front();
    const auto& l = reports.back();
    const bool stable = s.unbounded_suspects.empty() && l.unbounded_suspects.empty() &&
                        l.max_gap_observed <= 1.1 * s.max_gap_observed;
    records.push_back({{"stable_max_gap", stable}});
  }
  write_file(c.out, jsonl(records));
  Outcome o;
  o.config = doc;
  o.outputs.push_back(c.out);
  o.summary = {{"records", records.size()}};
  return o;
}

// ---- manifests --------------------------------------------------------------

// The resolved options of a subcommand (command line and environment) as an
// explicit argument list.
std::vector<std::string> canonical_args(const CLI::App* sub) {
  std::vector<std::string> out{sub->get_name()};
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    if (!opt->nonpositional()) {
      for (const auto& r : opt->results()) out.push_back(r);
      continue;
    }
    const std::string flag = "--" + opt->get_lnames().front();
    if (opt->get_expected_min() == 0) {
      out.push_back(flag);
      continue;
    }
    for (const auto& r : opt->results()) {
      out.push_back(flag);
      out.push_back(r);
    }
  }
  return out;
}

void write_manifest(const Common& c, const CLI::App* sub, const Outcome& o, double seconds) {
  Json m;
  m["tool"] = kToolName;
  m["version"] = kToolVersion;
  m["command"] = sub->get_name();
  m["args"] = canonical_args(sub);
  m["config"] = o.config;
  m["seed"] = c.seed;
  m["engine"] = c.engine;
  m["threads"] = c.threads;
  m["budgets"] = {{"max_collisions", c.budget_collisions},
                  {"max_path_length", c.budget_length},
                  {"max_radius", c.budget_radius}};
  m["outputs"] = o.outputs;
  m["result"] = o.summary;
  m["exit_code"] = o.exit;
  m["wall_time_seconds"] = seconds;
  write_file(c.out + ".manifest.json", m.dump(2) + "\n");
}

std::vector<std::string> replay_args(const std::string& manifest_path, const std::string& out,
                                     const std::optional<unsigned>& threads) {
  Json m;
  try {
    m = read_config_file(manifest_path);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("manifest ") + e.what());
  }
  if (!m.contains("args") || !m["args"].is_array() || m["args"].empty())
    throw ConfigError(manifest_path + ": manifest has no args");
  std::vector<std::string> args;
  const auto& old = m["args"];
  args.push_back(old[0].get<std::string>());
  auto is_dropped = [](const std::string& flag) {
    return flag == "--config" || flag == "--preset" || flag == "--config-inline" || flag == "--out" ||
           (flag == "--threads");
  };
  for (std::size_t k = 1; k < old.size(); ++k) {
    const std::string a = old[k].get<std::string>();
    if (is_dropped(a)) {
      ++k;  // drop its value
      continue;
    }
    args.push_back(a);
  }
  if (m.contains("config") && !m["config"].is_null()) {
    args.push_back("--config-inline");
    args.push_back(m["config"].dump());
  }
  args.push_back("--out");
  args.push_back(out.empty() ? m["outputs"][0].get<std::string>() : out);
  args.push_back("--threads");
  args.push_back(std::to_string(threads ? *threads : m["threads"].get<unsigned>()));
  return args;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Random wind-tree and Lorentz gas billiards: simulation, recurrence and periodicity experiments",
               kToolName};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  Common common;
  SimulateArgs sim;
  RecurrenceArgs rec;
  AnnulusArgs ann;
  PeriodicArgs per;
  LorentzArgs lor;
  std::string manifest_path;
  std::string replay_out;
  std::optional<unsigned> replay_threads;

  auto* simulate = app.add_subcommand("simulate", "flow one trajectory and dump its events as CSV");
  add_common(simulate, common);
  simulate->add_option("--start", sim.start, "x,y,dx,dy (fractions allowed)")->required();
  simulate->add_option("--max-time", sim.max_time, "stop after this path length");
  simulate->add_flag("--svg", sim.svg, "also write <out>.svg");
  simulate->add_option("--window", sim.window, "SVG window xmin,xmax,ymin,ymax");

  auto* recurrence = app.add_subcommand("recurrence", "estimate the return fraction to D_N before level M");
  add_common(recurrence, common);
  recurrence->add_option("--N", rec.n_level, "section level")->required();
  recurrence->add_option("--M", rec.m_levels, "escape levels, comma separated")->required()->delimiter(',');
  recurrence->add_option("--n", rec.samples, "samples per estimate");

  auto* annulus = app.add_subcommand("annulus", "search the annulus width N1(N, epsilon) on W_e");
  add_common(annulus, common);
  annulus->add_option("--e", ann.e, "obstacle dimensions a,b");
  annulus->add_option("--N", ann.n_level, "section level");
  annulus->add_option("--epsilon", ann.epsilon, "allowed non-return fraction");
  annulus->add_option("--n", ann.samples, "samples per estimate");
  annulus->add_option("--max-doublings", ann.max_doublings, "search cap: M up to 2^k N");

  auto* periodic = app.add_subcommand("periodic", "exact periodic orbits on square-tiled tables");
  add_common(periodic, common);
  periodic->add_option("mode", per.mode, "orbit, direction, scan or annulus")
      ->required()
      ->check(CLI::IsMember({"orbit", "direction", "scan", "annulus"}));
  periodic->add_option("--start", per.start, "orbit start x,y,dx,dy");
  periodic->add_option("--bound", per.bound, "escape bound on |x|+|y|");
  periodic->add_option("--slope", per.slope, "direction slope p/q");
  periodic->add_option("--n", per.samples, "sampled starts");
  periodic->add_option("--start-radius", per.start_radius, "starts lie in |x|+|y| < radius (default bound/2)");
  periodic->add_option("--max-q", per.max_q, "largest slope denominator for scan");
  periodic->add_option("--e", per.e, "annulus obstacle dimensions a,b");
  periodic->add_option("--ring", per.ring, "annulus mode: starts on D_ring");
  periodic->add_option("--margin", per.margin, "annulus mode: half width in lattice rings");

  auto* lorentz = app.add_subcommand("lorentz", "horizon probes and recurrence on disk tables");
  add_common(lorentz, common);
  lorentz->add_option("mode", lor.mode, "horizon or recurrence")
      ->required()
      ->check(CLI::IsMember({"horizon", "recurrence"}));
  lorentz->add_option("--lines", lor.lines, "probe lines");
  lorentz->add_option("--probe-len", lor.probe_lengths, "probe lengths, comma separated")->delimiter(',');
  lorentz->add_option("--N", lor.recurrence.n_level, "section level");
  lorentz->add_option("--M", lor.recurrence.m_levels, "escape levels, comma separated")->delimiter(',');
  lorentz->add_option("--n", lor.recurrence.samples, "samples per estimate");

  auto* replay = app.add_subcommand("replay", "re-run a command from its manifest");
  replay->add_option("manifest", manifest_path, "manifest file")->required();
  replay->add_option("--out", replay_out, "output file (default: the recorded one)");
  replay->add_option("--threads", replay_threads, "worker threads");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (replay->parsed()) return run_cli(replay_args(manifest_path, replay_out, replay_threads));

    const auto t0 = std::chrono::steady_clock::now();
    const CLI::App* sub = app.get_subcommands().front();
    Outcome o;
    if (simulate->parsed()) o = cmd_simulate(common, sim);
    else if (recurrence->parsed()) o = cmd_recurrence(common, rec);
    else if (annulus->parsed()) o = cmd_annulus(common, ann);
    else if (periodic->parsed()) o = cmd_periodic(common, per);
    else if (lorentz->parsed()) {
      if (lor.mode == "recurrence" && lor.recurrence.m_levels.empty()) throw UsageError("recurrence needs --M");
      o = cmd_lorentz(common, lor);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(common, sub, o, seconds);
    return o.exit;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace windtree
