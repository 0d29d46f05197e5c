#include "windtree/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "windtree/rational.hpp"

namespace windtree {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

const Json& field(const Json& node, const char* key, const std::string& path) {
  if (!node.is_object()) fail(path, "expected an object");
  auto it = node.find(key);
  if (it == node.end()) fail(path + "." + key, "missing");
  return *it;
}

std::string string_field(const Json& node, const char* key, const std::string& path) {
  const Json& v = field(node, key, path);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

// Exact value from a fraction string or a JSON integer.
Rational exact_field(const Json& node, const char* key, const std::string& path) {
  const Json& v = field(node, key, path);
  const std::string where = path + "." + key;
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (!v.is_string()) fail(where, "expected a fraction string such as \"1/2\"");
  try {
    return parse_rational(v.get<std::string>());
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

double real_field(const Json& node, const char* key, const std::string& path) {
  const Json& v = field(node, key, path);
  if (v.is_number()) return v.get<double>();
  return to_double(exact_field(node, key, path));
}

std::int64_t int_field(const Json& node, const char* key, const std::string& path) {
  const Json& v = field(node, key, path);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

Site site_field(const Json& node, const std::string& path) {
  const Json& v = field(node, "site", path);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    fail(path + ".site", "expected [i, j] integers");
  return {v[0].get<std::int64_t>(), v[1].get<std::int64_t>()};
}

Lattice lattice_of(const Json& doc) {
  if (!doc.contains("lattice")) return Lattice::Square;
  const std::string name = string_field(doc, "lattice", "config");
  if (name == "square") return Lattice::Square;
  if (name == "triangular") return Lattice::Triangular;
  fail("config.lattice", "unknown lattice '" + name + "' (square or triangular)");
}

std::map<Site, ObstacleSpec> site_list(const Json& node, const char* key, const std::string& path) {
  std::map<Site, ObstacleSpec> out;
  if (!node.contains(key)) return out;
  const Json& list = node.at(key);
  if (!list.is_array()) fail(path + "." + key, "expected an array");
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string item = path + "." + key + "[" + std::to_string(k) + "]";
    out[site_field(list[k], item)] = obstacle_from_json(field(list[k], "obstacle", item), item + ".obstacle");
  }
  return out;
}

TableConfig generator_from_json(const Json& gen, Lattice lattice, const std::string& path) {
  const std::string kind = string_field(gen, "kind", path);
  try {
    if (kind == "constant") return TableConfig::constant(obstacle_from_json(field(gen, "obstacle", path), path + ".obstacle"), lattice);
    if (kind == "iid") {
      const Json& ws = field(gen, "weights", path);
      if (!ws.is_array() || ws.empty()) fail(path + ".weights", "expected a non-empty array");
      std::vector<TableConfig::Weighted> weights;
      for (std::size_t k = 0; k < ws.size(); ++k) {
        const std::string item = path + ".weights[" + std::to_string(k) + "]";
        weights.push_back({obstacle_from_json(field(ws[k], "obstacle", item), item + ".obstacle"),
                           real_field(ws[k], "weight", item)});
      }
      const Json& seed = field(gen, "seed", path);
      if (!seed.is_number_unsigned()) fail(path + ".seed", "expected a non-negative integer");
      return TableConfig::iid(weights, seed.get<std::uint64_t>(), lattice);
    }
    if (kind == "annulus") {
      const ObstacleSpec base = obstacle_from_json(field(gen, "base", path), path + ".base");
      std::vector<TableConfig::Annulus> annuli;
      const Json& as = field(gen, "annuli", path);
      if (!as.is_array()) fail(path + ".annuli", "expected an array");
      for (std::size_t k = 0; k < as.size(); ++k) {
        const std::string item = path + ".annuli[" + std::to_string(k) + "]";
        annuli.push_back({int_field(as[k], "inner", item), int_field(as[k], "outer", item)});
      }
      const TableConfig background =
          gen.contains("background") ? generator_from_json(gen.at("background"), lattice, path + ".background")
                                     : TableConfig::constant(EmptyObstacle{}, lattice);
      return TableConfig::annulus_patched(base, annuli, site_list(gen, "patch", path), background);
    }
    if (kind == "explicit") {
      const ObstacleSpec fallback = gen.contains("default") ? obstacle_from_json(gen.at("default"), path + ".default")
                                                            : ObstacleSpec{EmptyObstacle{}};
      return TableConfig::explicit_sites(site_list(gen, "sites", path), fallback, lattice);
    }
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  fail(path + ".kind", "unknown generator '" + kind + "' (constant, iid, annulus, explicit)");
}

}  // namespace

ObstacleSpec obstacle_from_json(const Json& node, const std::string& path) {
  const std::string type = string_field(node, "type", path);
  if (type == "empty") return EmptyObstacle{};
  if (type == "rect") {
    const Rational a = exact_field(node, "a", path);
    const Rational b = exact_field(node, "b", path);
    if (a == 0 && b == 0) return EmptyObstacle{};
    if (!(a > 0 && a < 1)) fail(path + ".a", "rectangle width must lie in (0, 1)");
    if (!(b > 0 && b < 1)) fail(path + ".b", "rectangle height must lie in (0, 1)");
    return RectObstacle{a, b};
  }
  if (type == "disk") return DiskObstacle{real_field(node, "r", path)};
  if (type == "five_disk") {
    if (!node.contains("disks")) {
      const double big = node.contains("R") ? real_field(node, "R", path) : 0.4;
      const double small = node.contains("r") ? real_field(node, "r", path) : 0.15;
      return FiveDiskObstacle::standard(big, small);
    }
    const Json& ds = node.at("disks");
    if (!ds.is_array() || ds.size() != 5) fail(path + ".disks", "expected exactly five disks");
    FiveDiskObstacle f;
    for (std::size_t k = 0; k < 5; ++k) {
      const std::string item = path + ".disks[" + std::to_string(k) + "]";
      const Json& off = field(ds[k], "offset", item);
      if (!off.is_array() || off.size() != 2 || !off[0].is_number() || !off[1].is_number())
        fail(item + ".offset", "expected [x, y]");
      f.disks[k] = {{off[0].get<double>(), off[1].get<double>()}, real_field(ds[k], "r", item)};
    }
    return f;
  }
  fail(path + ".type", "unknown obstacle type '" + type + "' (empty, rect, disk, five_disk)");
}

Json obstacle_to_json(const ObstacleSpec& spec) {
  struct {
    Json operator()(const EmptyObstacle&) const { return {{"type", "empty"}}; }
    Json operator()(const RectObstacle& r) const { return {{"type", "rect"}, {"a", to_string(r.a)}, {"b", to_string(r.b)}}; }
    Json operator()(const DiskObstacle& d) const { return {{"type", "disk"}, {"r", d.radius}}; }
    Json operator()(const FiveDiskObstacle& f) const {
      Json disks = Json::array();
      for (const auto& d : f.disks) disks.push_back({{"offset", {d.offset.x, d.offset.y}}, {"r", d.radius}});
      return {{"type", "five_disk"}, {"disks", disks}};
    }
  } visitor;
  return std::visit(visitor, spec);
}

TableConfig table_from_json(const Json& doc) {
  if (!doc.is_object()) fail("config", "expected an object");
  const Lattice lattice = lattice_of(doc);
  return generator_from_json(field(doc, "generator", "config"), lattice, "config.generator");
}

Json read_config_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file + ": cannot open config file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(file + ": " + e.what());
  }
}

namespace {

const std::map<std::string, const char*>& presets() {
  static const std::map<std::string, const char*> table{
      {"wind-tree", R"({"lattice": "square",
        "generator": {"kind": "constant", "obstacle": {"type": "rect", "a": "1/2", "b": "1/2"}}})"},
      {"random-wind-tree", R"({"lattice": "square",
        "generator": {"kind": "iid", "seed": 1, "weights": [
          {"obstacle": {"type": "rect", "a": "1/2", "b": "1/2"}, "weight": 0.5},
          {"obstacle": {"type": "empty"}, "weight": 0.5}]}})"},
      {"annulus-experiment", R"({"lattice": "square",
        "generator": {"kind": "annulus", "base": {"type": "rect", "a": "1/2", "b": "1/2"},
          "annuli": [{"inner": 4, "outer": 12}],
          "background": {"kind": "iid", "seed": 1, "weights": [
            {"obstacle": {"type": "rect", "a": "1/2", "b": "1/2"}, "weight": 0.5},
            {"obstacle": {"type": "empty"}, "weight": 0.5}]}}})"},
      {"lorentz-triangular", R"({"lattice": "triangular",
        "generator": {"kind": "constant", "obstacle": {"type": "disk", "r": 0.49}}})"},
      {"lorentz-five-disk", R"({"lattice": "square",
        "generator": {"kind": "constant", "obstacle": {"type": "five_disk", "R": 0.4, "r": 0.15}}})"},
      {"empty", R"({"lattice": "square", "generator": {"kind": "constant", "obstacle": {"type": "empty"}}})"},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : presets()) out.push_back(name);
  return out;
}

Json preset(const std::string& name) {
  auto it = presets().find(name);
  if (it == presets().end()) {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("preset '" + name + "' is unknown (known: " + known + ")");
  }
  return Json::parse(it->second);
}

}  // namespace windtree
