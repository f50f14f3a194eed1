#include "auxcell/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

#include "auxcell/error.hpp"

namespace auxcell {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct PresetDef {
  const char* name;
  const char* summary;
};

constexpr PresetDef kPresets[] = {
    {"example1", "auxetic two-material cell, plain multipliers, V1=30% V3=4%, target (0.1,-0.1,0.1)"},
    {"example2", "auxetic two-material cell, plain multipliers, V1=33% V3=1%, target (0.1,-0.1,0.1)"},
    {"example3", "augmented Lagrangian, V1=38.5% V3=9.65%, target (0.2,-0.1,0.2)"},
    {"example4", "augmented Lagrangian, V1=53% V3=7%, target (0.2,-0.1,0.2)"},
};

ObjectiveSpec make_objective(double a1111, double a1122, double a2222, double w1111, double w1122,
                             double w2222) {
  ObjectiveSpec spec;
  spec.entries.push_back(ObjectiveEntry::parse("1111", a1111, w1111));
  spec.entries.push_back(ObjectiveEntry::parse("1122", a1122, w1122));
  spec.entries.push_back(ObjectiveEntry::parse("2222", a2222, w2222));
  return spec;
}

PatternSpec circles(int rows, int cols, double radius, Eigen::Vector2d offset, bool holes) {
  PatternSpec p;
  p.kind = PatternSpec::Kind::Circles;
  p.rows = rows;
  p.cols = cols;
  p.radius = radius;
  p.offset = offset;
  p.holes = holes;
  return p;
}

/// Four crossed slits of length `length` and half-width `width` cut from the
/// matrix: each slit separates two squares that rotate against each other,
/// which is the classic auxetic mechanism.
PatternSpec slits(double length, double width) {
  const double h = 0.5 * length;
  PatternSpec p;
  p.kind = PatternSpec::Kind::Struts;
  p.segments = {{-h, 0.0, h, 0.0}, {0.5, -h, 0.5, h}, {0.0, 0.5 - h, 0.0, 0.5 + h}, {0.5 - h, 0.5, 0.5 + h, 0.5}};
  p.radius = width;
  p.holes = true;
  return p;
}

Config base_config() {
  Config c;
  c.phases = {PhaseModuli{0.91, 0.3}, PhaseModuli{1e-4, 0.3}, PhaseModuli{1.82, 0.3}, PhaseModuli{1e-4, 0.3}};
  c.objective = make_objective(0.1, -0.1, 0.1, 1.0, 30.0, 1.0);
  c.volume_targets = {0.30, std::nullopt, 0.04, std::nullopt};
  c.mode = ConstraintMode::Plain;
  c.init[0] = slits(0.6, 0.1);
  c.init[1] = circles(2, 2, 0.06, Eigen::Vector2d::Zero(), true);
  return c;
}

// ---- JSON reading helpers ----

[[noreturn]] void fail(const std::string& key, const std::string& message) {
  throw ConfigError(key + ": " + message);
}

void check_keys(const json& node, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!node.is_object()) fail(where.empty() ? "<root>" : where, "expected an object");
  const std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& item : node.items()) {
    if (!names.count(item.key())) {
      fail(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
    }
  }
}

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) fail(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(key, "must be finite");
  return x;
}

int get_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) fail(key, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) fail(key, "out of range");
  return static_cast<int>(x);
}

bool get_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) fail(key, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) fail(key, "expected a string");
  return v.get<std::string>();
}

template <typename Fn>
void with(const json& node, const char* name, Fn&& fn) {
  auto it = node.find(name);
  if (it != node.end()) fn(*it);
}

PlaneModel parse_plane(const std::string& s, const std::string& key) {
  if (s == "stress") return PlaneModel::Stress;
  if (s == "strain") return PlaneModel::Strain;
  fail(key, "expected \"stress\" or \"strain\"");
}

ConstraintMode parse_mode(const std::string& s, const std::string& key) {
  if (s == "plain") return ConstraintMode::Plain;
  if (s == "augmented") return ConstraintMode::Augmented;
  fail(key, "expected \"plain\" or \"augmented\"");
}

PatternSpec parse_pattern(const json& node, const std::string& where) {
  check_keys(node, where,
             {"kind", "rows", "cols", "radius", "offset", "stagger", "inner_radius", "outer_radius", "value",
              "path", "segments", "holes", "noise"});
  PatternSpec p;
  with(node, "kind", [&](const json& v) {
    try {
      p.kind = PatternSpec::parse_kind(get_string(v, where + ".kind"));
    } catch (const ConfigError& e) {
      fail(where + ".kind", e.what());
    }
  });
  with(node, "rows", [&](const json& v) { p.rows = get_int(v, where + ".rows"); });
  with(node, "cols", [&](const json& v) { p.cols = get_int(v, where + ".cols"); });
  with(node, "radius", [&](const json& v) { p.radius = get_number(v, where + ".radius"); });
  with(node, "offset", [&](const json& v) {
    if (!v.is_array() || v.size() != 2) fail(where + ".offset", "expected [x, y]");
    p.offset = Eigen::Vector2d(get_number(v[0], where + ".offset[0]"), get_number(v[1], where + ".offset[1]"));
  });
  with(node, "stagger", [&](const json& v) { p.stagger = get_bool(v, where + ".stagger"); });
  with(node, "inner_radius", [&](const json& v) { p.inner_radius = get_number(v, where + ".inner_radius"); });
  with(node, "outer_radius", [&](const json& v) { p.outer_radius = get_number(v, where + ".outer_radius"); });
  with(node, "value", [&](const json& v) { p.value = get_number(v, where + ".value"); });
  with(node, "path", [&](const json& v) { p.path = get_string(v, where + ".path"); });
  with(node, "segments", [&](const json& v) {
    if (!v.is_array()) fail(where + ".segments", "expected an array of [x0, y0, x1, y1]");
    p.segments.clear();
    for (std::size_t k = 0; k < v.size(); ++k) {
      const std::string key = where + ".segments[" + std::to_string(k) + "]";
      if (!v[k].is_array() || v[k].size() != 4) fail(key, "expected [x0, y0, x1, y1]");
      std::array<double, 4> seg{};
      for (int c = 0; c < 4; ++c) seg[c] = get_number(v[k][c], key);
      p.segments.push_back(seg);
    }
  });
  with(node, "holes", [&](const json& v) { p.holes = get_bool(v, where + ".holes"); });
  with(node, "noise", [&](const json& v) { p.noise = get_number(v, where + ".noise"); });
  return p;
}

ordered_json pattern_json(const PatternSpec& p) {
  ordered_json j;
  j["kind"] = PatternSpec::kind_name(p.kind);
  j["rows"] = p.rows;
  j["cols"] = p.cols;
  j["radius"] = p.radius;
  j["offset"] = {p.offset.x(), p.offset.y()};
  j["stagger"] = p.stagger;
  j["inner_radius"] = p.inner_radius;
  j["outer_radius"] = p.outer_radius;
  j["value"] = p.value;
  j["path"] = p.path;
  j["segments"] = ordered_json::array();
  for (const auto& seg : p.segments) j["segments"].push_back({seg[0], seg[1], seg[2], seg[3]});
  j["holes"] = p.holes;
  j["noise"] = p.noise;
  return j;
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t k = 0; k < end; ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

PhaseSet Config::phase_set() const {
  PhaseSet set;
  for (int k = 0; k < 4; ++k) {
    set.tensors[k] = isotropic_tensor(phases[k].young, phases[k].poisson, plane);
    set.constrained[k] = volume_targets[k].has_value();
    set.volume_targets[k] = volume_targets[k].value_or(0.0);
  }
  set.epsilon = numerics.epsilon_factor / static_cast<double>(mesh_n);
  return set;
}

void Config::validate() const {
  if (mesh_n < 2 || mesh_n % 2 != 0) fail("mesh.n", "must be an even integer >= 2");
  for (int k = 0; k < 4; ++k) {
    const std::string key = "phases[" + std::to_string(k) + "]";
    try {
      isotropic_tensor(phases[k].young, phases[k].poisson, plane);
    } catch (const ConfigError& e) {
      fail(key, e.what());
    }
    if (volume_targets[k] && !(*volume_targets[k] >= 0.0 && *volume_targets[k] <= 1.0)) {
      fail("volume_targets[" + std::to_string(k) + "]", "must lie in [0, 1]");
    }
  }
  try {
    objective.validate();
  } catch (const ConfigError& e) {
    fail("objective", e.what());
  }
  if (!(constraint.beta_step >= 0.0)) fail("constraint.beta_step", "must be >= 0");
  if (!(constraint.beta0 > 0.0)) fail("constraint.beta0", "must be > 0");
  if (!(constraint.gamma >= 1.0)) fail("constraint.gamma", "must be >= 1");
  if (constraint.beta_update_every < 0) fail("constraint.beta_update_every", "must be >= 0");
  if (!(constraint.beta_max >= constraint.beta0)) fail("constraint.beta_max", "must be >= beta0");
  if (iterations < 0) fail("iterations", "must be >= 0");
  if (snapshot_every < 0) fail("snapshot_every", "must be >= 0");
  for (int i = 0; i < 2; ++i) {
    const std::string key = i == 0 ? "init.phi1" : "init.phi2";
    const PatternSpec& p = init[i];
    if (p.rows < 1 || p.cols < 1) fail(key, "rows and cols must be >= 1");
    if (!(p.radius > 0.0)) fail(key + ".radius", "must be > 0");
    if (!(p.inner_radius >= 0.0 && p.outer_radius > p.inner_radius)) {
      fail(key, "need 0 <= inner_radius < outer_radius");
    }
    if (!(p.noise >= 0.0)) fail(key + ".noise", "must be >= 0");
    if (p.kind == PatternSpec::Kind::FromFile && p.path.empty()) fail(key + ".path", "required for kind from-file");
    if (p.kind == PatternSpec::Kind::Struts && p.segments.empty()) {
      fail(key + ".segments", "required for kind struts");
    }
  }
  const auto& n = numerics;
  if (!(n.epsilon_factor > 0.0)) fail("numerics.epsilon_factor", "must be > 0");
  if (!(n.alpha_factor > 0.0)) fail("numerics.alpha_factor", "must be > 0");
  if (!(n.cg_tolerance > 0.0 && n.cg_tolerance < 1.0)) fail("numerics.cg_tolerance", "must lie in (0, 1)");
  if (n.reinit_every < 0) fail("numerics.reinit_every", "must be >= 0");
  if (n.reinit_steps < 0) fail("numerics.reinit_steps", "must be >= 0");
  if (n.line_search_trials < 1) fail("numerics.line_search_trials", "must be >= 1");
  if (!(n.line_search_shrink > 0.0 && n.line_search_shrink < 1.0)) {
    fail("numerics.line_search_shrink", "must lie in (0, 1)");
  }
  if (!(n.fallback_step >= 0.0 && n.fallback_step <= 1.0)) fail("numerics.fallback_step", "must lie in [0, 1]");
  if (n.stagnation_limit < 1) fail("numerics.stagnation_limit", "must be >= 1");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : kPresets) names.emplace_back(p.name);
  return names;
}

std::string preset_summary(const std::string& name) {
  for (const auto& p : kPresets) {
    if (name == p.name) return p.summary;
  }
  throw ConfigError("preset: unknown preset '" + name + "'");
}

Config preset(const std::string& name) {
  Config c = base_config();
  c.preset = name;
  if (name == "example1") return c;
  if (name == "example2") {
    c.volume_targets = {0.33, std::nullopt, 0.01, std::nullopt};
    c.init[1] = circles(2, 2, 0.03, Eigen::Vector2d::Zero(), true);
    return c;
  }
  if (name == "example3" || name == "example4") {
    c.mode = ConstraintMode::Augmented;
    c.objective = make_objective(0.2, -0.1, 0.2, 1.0, 10.0, 1.0);
    if (name == "example3") {
      c.volume_targets = {0.385, std::nullopt, 0.0965, std::nullopt};
      c.init[0] = slits(0.6, 0.09);
      c.init[1] = circles(2, 2, 0.088, Eigen::Vector2d::Zero(), true);
    } else {
      c.volume_targets = {0.53, std::nullopt, 0.07, std::nullopt};
      c.init[0] = slits(0.6, 0.07);
      c.init[1] = circles(2, 2, 0.075, Eigen::Vector2d::Zero(), true);
    }
    return c;
  }
  throw ConfigError("preset: unknown preset '" + name + "'");
}

Config parse_config(const std::string& text) {
  const bool blank = std::all_of(text.begin(), text.end(), [](unsigned char ch) { return std::isspace(ch); });
  if (blank) return preset("example1");

  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    // Drop nlohmann's "[json.exception...] parse error at ...: " prefix; the position is reported here.
    std::string detail = e.what();
    if (const auto pos = detail.find(": "); pos != std::string::npos) detail = detail.substr(pos + 2);
    throw ConfigError("parse error at line " + std::to_string(line) + ", column " + std::to_string(column) +
                      ": " + detail);
  }
  check_keys(root, "",
             {"preset", "mesh", "plane", "phases", "objective", "volume_targets", "constraint", "iterations",
              "snapshot_every", "init", "numerics", "seed"});

  Config c = preset(root.contains("preset") ? get_string(root["preset"], "preset") : "example1");

  with(root, "mesh", [&](const json& v) {
    check_keys(v, "mesh", {"n"});
    with(v, "n", [&](const json& x) { c.mesh_n = get_int(x, "mesh.n"); });
  });
  with(root, "plane", [&](const json& v) { c.plane = parse_plane(get_string(v, "plane"), "plane"); });
  with(root, "phases", [&](const json& v) {
    if (!v.is_array() || v.size() != 4) fail("phases", "expected an array of four phases");
    for (int k = 0; k < 4; ++k) {
      const std::string key = "phases[" + std::to_string(k) + "]";
      check_keys(v[k], key, {"E", "nu"});
      with(v[k], "E", [&](const json& x) { c.phases[k].young = get_number(x, key + ".E"); });
      with(v[k], "nu", [&](const json& x) { c.phases[k].poisson = get_number(x, key + ".nu"); });
    }
  });
  with(root, "objective", [&](const json& v) {
    if (!v.is_array()) fail("objective", "expected an array of entries");
    ObjectiveSpec spec;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const std::string key = "objective[" + std::to_string(k) + "]";
      check_keys(v[k], key, {"entry", "target", "weight"});
      if (!v[k].contains("entry") || !v[k].contains("target")) fail(key, "entry and target are required");
      const std::string label = get_string(v[k]["entry"], key + ".entry");
      const double target = get_number(v[k]["target"], key + ".target");
      const double weight = v[k].contains("weight") ? get_number(v[k]["weight"], key + ".weight") : 1.0;
      try {
        spec.entries.push_back(ObjectiveEntry::parse(label, target, weight));
      } catch (const ConfigError& e) {
        fail(key + ".entry", e.what());
      }
    }
    c.objective = spec;
  });
  with(root, "volume_targets", [&](const json& v) {
    if (!v.is_array() || v.size() != 4) fail("volume_targets", "expected an array of four numbers or nulls");
    for (int k = 0; k < 4; ++k) {
      if (v[k].is_null()) {
        c.volume_targets[k].reset();
      } else {
        c.volume_targets[k] = get_number(v[k], "volume_targets[" + std::to_string(k) + "]");
      }
    }
  });
  with(root, "constraint", [&](const json& v) {
    check_keys(v, "constraint", {"mode", "beta_step", "beta0", "gamma", "beta_update_every", "beta_max"});
    with(v, "mode", [&](const json& x) { c.mode = parse_mode(get_string(x, "constraint.mode"), "constraint.mode"); });
    with(v, "beta_step", [&](const json& x) { c.constraint.beta_step = get_number(x, "constraint.beta_step"); });
    with(v, "beta0", [&](const json& x) { c.constraint.beta0 = get_number(x, "constraint.beta0"); });
    with(v, "gamma", [&](const json& x) { c.constraint.gamma = get_number(x, "constraint.gamma"); });
    with(v, "beta_update_every",
         [&](const json& x) { c.constraint.beta_update_every = get_int(x, "constraint.beta_update_every"); });
    with(v, "beta_max", [&](const json& x) { c.constraint.beta_max = get_number(x, "constraint.beta_max"); });
  });
  with(root, "iterations", [&](const json& v) { c.iterations = get_int(v, "iterations"); });
  with(root, "snapshot_every", [&](const json& v) { c.snapshot_every = get_int(v, "snapshot_every"); });
  with(root, "init", [&](const json& v) {
    check_keys(v, "init", {"phi1", "phi2"});
    with(v, "phi1", [&](const json& x) { c.init[0] = parse_pattern(x, "init.phi1"); });
    with(v, "phi2", [&](const json& x) { c.init[1] = parse_pattern(x, "init.phi2"); });
  });
  with(root, "numerics", [&](const json& v) {
    check_keys(v, "numerics",
               {"epsilon_factor", "alpha_factor", "cg_tolerance", "cg_max_iterations", "reinit_every",
                "reinit_steps", "line_search_trials", "line_search_shrink", "fallback_step", "stagnation_limit", "descent_safeguard"});
    auto& n = c.numerics;
    with(v, "epsilon_factor", [&](const json& x) { n.epsilon_factor = get_number(x, "numerics.epsilon_factor"); });
    with(v, "alpha_factor", [&](const json& x) { n.alpha_factor = get_number(x, "numerics.alpha_factor"); });
    with(v, "cg_tolerance", [&](const json& x) { n.cg_tolerance = get_number(x, "numerics.cg_tolerance"); });
    with(v, "cg_max_iterations",
         [&](const json& x) { n.cg_max_iterations = get_int(x, "numerics.cg_max_iterations"); });
    with(v, "reinit_every", [&](const json& x) { n.reinit_every = get_int(x, "numerics.reinit_every"); });
    with(v, "reinit_steps", [&](const json& x) { n.reinit_steps = get_int(x, "numerics.reinit_steps"); });
    with(v, "line_search_trials",
         [&](const json& x) { n.line_search_trials = get_int(x, "numerics.line_search_trials"); });
    with(v, "line_search_shrink",
         [&](const json& x) { n.line_search_shrink = get_number(x, "numerics.line_search_shrink"); });
    with(v, "fallback_step", [&](const json& x) { n.fallback_step = get_number(x, "numerics.fallback_step"); });
    with(v, "stagnation_limit",
         [&](const json& x) { n.stagnation_limit = get_int(x, "numerics.stagnation_limit"); });
    with(v, "descent_safeguard",
         [&](const json& x) { n.descent_safeguard = get_bool(x, "numerics.descent_safeguard"); });
  });
  with(root, "seed", [&](const json& v) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail("seed", "expected a non-negative integer");
    }
    c.seed = v.get<std::uint64_t>();
  });

  c.validate();
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string serialize_config(const Config& c) {
  ordered_json j;
  j["preset"] = c.preset;
  j["mesh"] = {{"n", c.mesh_n}};
  j["plane"] = c.plane == PlaneModel::Stress ? "stress" : "strain";
  j["phases"] = ordered_json::array();
  for (const auto& p : c.phases) j["phases"].push_back({{"E", p.young}, {"nu", p.poisson}});
  j["objective"] = ordered_json::array();
  for (const auto& e : c.objective.entries) {
    j["objective"].push_back({{"entry", e.label()}, {"target", e.target}, {"weight", e.weight}});
  }
  j["volume_targets"] = ordered_json::array();
  for (const auto& v : c.volume_targets) {
    j["volume_targets"].push_back(v ? ordered_json(*v) : ordered_json(nullptr));
  }
  j["constraint"] = {{"mode", c.mode == ConstraintMode::Plain ? "plain" : "augmented"},
                     {"beta_step", c.constraint.beta_step},
                     {"beta0", c.constraint.beta0},
                     {"gamma", c.constraint.gamma},
                     {"beta_update_every", c.constraint.beta_update_every},
                     {"beta_max", c.constraint.beta_max}};
  j["iterations"] = c.iterations;
  j["snapshot_every"] = c.snapshot_every;
  j["init"] = {{"phi1", pattern_json(c.init[0])}, {"phi2", pattern_json(c.init[1])}};
  const auto& n = c.numerics;
  j["numerics"] = {{"epsilon_factor", n.epsilon_factor},
                   {"alpha_factor", n.alpha_factor},
                   {"cg_tolerance", n.cg_tolerance},
                   {"cg_max_iterations", n.cg_max_iterations},
                   {"reinit_every", n.reinit_every},
                   {"reinit_steps", n.reinit_steps},
                   {"line_search_trials", n.line_search_trials},
                   {"line_search_shrink", n.line_search_shrink},
                   {"fallback_step", n.fallback_step},
                   {"stagnation_limit", n.stagnation_limit},
                   {"descent_safeguard", n.descent_safeguard}};
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

}  // namespace auxcell
