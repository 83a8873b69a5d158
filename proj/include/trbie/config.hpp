#pragma once
/**
 * @file config.hpp
 * @brief JSON run configuration: parsing and validation into library types.
 *
 * Every violation raises ConfigError whose message starts with the JSON
 * path of the offending field, e.g. "problem.scatterers[1].radius: must be
 * positive". The full schema is documented in docs/config.md.
 */

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trbie/assembly.hpp"
#include "trbie/errors.hpp"
#include "trbie/geometry.hpp"
#include "trbie/oracle.hpp"
#include "trbie/ssm.hpp"

namespace trbie {

enum class Task { eigs, scan, forward, oracle, selftest };

inline Task parse_task(const std::string& s) {
  if (s == "eigs") return Task::eigs;
  if (s == "scan") return Task::scan;
  if (s == "forward") return Task::forward;
  if (s == "oracle") return Task::oracle;
  if (s == "selftest") return Task::selftest;
  throw ConfigError("task: unknown task '" + s + "' (expected eigs, scan, forward, oracle or selftest)");
}

inline const char* to_string(Task t) {
  switch (t) {
    case Task::eigs: return "eigs";
    case Task::scan: return "scan";
    case Task::forward: return "forward";
    case Task::oracle: return "oracle";
    default: return "selftest";
  }
}

struct EigsTask {
  ContourSpec contour;
  SsmParams ssm;
};

struct ScanTask {
  double omega_min = 0.0, omega_max = 0.0;
  int n_samples = 0;
  Incident incident;

  /// Midpoints of n equal sub-intervals (endpoints are often cutoffs).
  std::vector<double> samples() const {
    std::vector<double> w(n_samples);
    for (int i = 0; i < n_samples; ++i) w[i] = omega_min + (i + 0.5) * (omega_max - omega_min) / n_samples;
    return w;
  }
};

struct ForwardTask {
  double omega = 0.0;
  Incident incident;
};

struct OracleTask {
  double radius = 0.0;
  int n_min = 0, n_max = 0;
  std::vector<CharKind> kinds;
  Formulation formulation = Formulation::mueller;
  Rect region;
};

struct RunConfig {
  Task task = Task::selftest;
  std::uint64_t seed = 1;
  std::string output_dir;  // empty: current directory
  std::vector<Scatterer> scatterers;
  ProblemSpec problem;  // mesh built from `scatterers`
  std::optional<EigsTask> eigs;
  std::optional<ScanTask> scan;
  std::optional<ForwardTask> forward;
  std::optional<OracleTask> oracle;
};

namespace config_detail {

using json = nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) { throw ConfigError(path + ": " + msg); }

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "must be an object");
  if (!j.contains(key)) fail(path + "." + key, "is required");
  return j.at(key);
}

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

inline double positive(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x > 0.0)) fail(path, "must be positive");
  return x;
}

inline int integer(const json& v, const std::string& path, int lo, int hi) {
  if (!v.is_number_integer()) fail(path, "must be an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi) fail(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(x);
}

inline std::string string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "must be a string");
  return v.get<std::string>();
}

inline Vec2 point(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "must be a [x, y] pair");
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

// Unknown keys are rejected so typos do not silently fall back to defaults.
inline void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(path, "must be an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : keys) ok = ok || k == a;
    if (!ok) fail(path + "." + k, "unknown field");
  }
}

inline Material material(const json& j, const std::string& path) {
  only_keys(j, path, {"rho", "shear"});
  return {positive(require(j, "rho", path), path + ".rho"), positive(require(j, "shear", path), path + ".shear")};
}

inline Rect rect(const json& j, const std::string& path) {
  only_keys(j, path, {"re_min", "re_max", "im_min", "im_max", "n_quad_per_side"});
  Rect r{number(require(j, "re_min", path), path + ".re_min"), number(require(j, "re_max", path), path + ".re_max"),
         number(require(j, "im_min", path), path + ".im_min"), number(require(j, "im_max", path), path + ".im_max")};
  if (!(r.re_min < r.re_max)) fail(path, "re_min must be below re_max");
  if (!(r.im_min < r.im_max)) fail(path, "im_min must be below im_max");
  return r;
}

inline Scatterer scatterer(const json& j, const std::string& path) {
  const std::string type = string(require(j, "type", path), path + ".type");
  Scatterer s;
  if (type == "circle") {
    only_keys(j, path, {"type", "center", "radius", "panels"});
    Circle c{point(require(j, "center", path), path + ".center"), positive(require(j, "radius", path), path + ".radius")};
    s.shape = c;
    s.n_panels = integer(require(j, "panels", path), path + ".panels", 8, 1 << 20);
  } else if (type == "polyline") {
    only_keys(j, path, {"type", "vertices", "panels_per_edge"});
    const json& v = require(j, "vertices", path);
    if (!v.is_array() || v.size() < 3) fail(path + ".vertices", "needs at least 3 vertices");
    Polyline p;
    for (std::size_t i = 0; i < v.size(); ++i) p.vertices.push_back(point(v[i], path + ".vertices[" + std::to_string(i) + "]"));
    s.shape = p;
    s.n_panels = integer(require(j, "panels_per_edge", path), path + ".panels_per_edge", 1, 1 << 20);
  } else {
    fail(path + ".type", "must be 'circle' or 'polyline'");
  }
  return s;
}

inline Incident incident(const json& j, const std::string& path) {
  const std::string type = string(require(j, "type", path), path + ".type");
  Incident inc;
  if (type == "waveguide_mode") {
    only_keys(j, path, {"type", "mode", "direction"});
    inc.kind = Incident::Kind::waveguide_mode;
    inc.mode = j.contains("mode") ? integer(j.at("mode"), path + ".mode", 0, 10000) : 0;
    inc.direction = j.contains("direction") ? integer(j.at("direction"), path + ".direction", -1, 1) : 1;
    if (inc.direction == 0) fail(path + ".direction", "must be +1 or -1");
  } else if (type == "plane_wave") {
    only_keys(j, path, {"type", "angle"});
    inc.kind = Incident::Kind::plane_wave;
    inc.angle = j.contains("angle") ? number(j.at("angle"), path + ".angle") : std::numbers::pi / 2.0;
  } else {
    fail(path + ".type", "must be 'waveguide_mode' or 'plane_wave'");
  }
  return inc;
}

inline CharKind char_kind(const json& v, const std::string& path) {
  const std::string s = string(v, path);
  if (s == "fictitious_outgoing") return CharKind::fictitious_outgoing;
  if (s == "fictitious_incoming") return CharKind::fictitious_incoming;
  if (s == "true_freespace") return CharKind::true_freespace;
  fail(path, "must be fictitious_outgoing, fictitious_incoming or true_freespace");
}

inline Formulation formulation(const json& v, const std::string& path) {
  const std::string s = string(v, path);
  if (s == "mueller") return Formulation::mueller;
  if (s == "pmchwt") return Formulation::pmchwt;
  fail(path, "must be 'mueller' or 'pmchwt'");
}

}  // namespace config_detail

inline const char* to_string(CharKind k) {
  switch (k) {
    case CharKind::fictitious_outgoing: return "fictitious_outgoing";
    case CharKind::fictitious_incoming: return "fictitious_incoming";
    default: return "true_freespace";
  }
}

/// Parses and validates a configuration document; builds the mesh.
/// A given `task` overrides (and must agree with) the document's "task" field.
inline RunConfig parse_config(const nlohmann::json& root, std::optional<Task> task = std::nullopt) {
  using namespace config_detail;
  RunConfig cfg;
  only_keys(root, "config", {"task", "seed", "output_dir", "problem", "eigs", "scan", "forward", "oracle", "description"});
  if (root.contains("task")) {
    cfg.task = parse_task(string(root.at("task"), "task"));
    if (task && *task != cfg.task)
      fail("task", std::string("config is for '") + to_string(cfg.task) + "' but '" + to_string(*task) + "' was requested");
  } else if (task) {
    cfg.task = *task;
  } else {
    fail("config.task", "is required");
  }
  if (root.contains("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) fail("seed", "must be a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (root.contains("output_dir")) cfg.output_dir = string(root.at("output_dir"), "output_dir");
  const bool needs_problem = cfg.task == Task::eigs || cfg.task == Task::scan || cfg.task == Task::forward;
  if (needs_problem) {
    const json& p = require(root, "problem", "config");
    only_keys(p, "problem", {"domain", "formulation", "kernel_mode", "exterior", "interior", "scatterers", "g1_rel_tol"});
    ProblemSpec& spec = cfg.problem;
    const std::string dom = string(require(p, "domain", "problem"), "problem.domain");
    if (dom == "freespace") spec.domain = DomainKind::freespace;
    else if (dom == "waveguide") spec.domain = DomainKind::waveguide;
    else fail("problem.domain", "must be 'freespace' or 'waveguide'");
    spec.formulation = p.contains("formulation") ? formulation(p.at("formulation"), "problem.formulation") : Formulation::mueller;
    if (p.contains("kernel_mode")) {
      const std::string km = string(p.at("kernel_mode"), "problem.kernel_mode");
      if (km == "outgoing") spec.kernel_mode = KernelMode::outgoing;
      else if (km == "incoming") spec.kernel_mode = KernelMode::incoming;
      else fail("problem.kernel_mode", "must be 'outgoing' or 'incoming'");
    }
    spec.exterior = material(require(p, "exterior", "problem"), "problem.exterior");
    spec.interior = material(require(p, "interior", "problem"), "problem.interior");
    if (p.contains("g1_rel_tol")) spec.g1_rel_tol = positive(p.at("g1_rel_tol"), "problem.g1_rel_tol");
    const json& sc = require(p, "scatterers", "problem");
    if (!sc.is_array() || sc.empty()) fail("problem.scatterers", "must be a non-empty array");
    for (std::size_t i = 0; i < sc.size(); ++i)
      cfg.scatterers.push_back(scatterer(sc[i], "problem.scatterers[" + std::to_string(i) + "]"));
    try {
      spec.mesh = build_mesh(cfg.scatterers, spec.domain == DomainKind::waveguide);
    } catch (const ConfigError& e) {
      fail("problem.scatterers", e.what());
    }
  }
  switch (cfg.task) {
    case Task::eigs: {
      const json& e = require(root, "eigs", "config");
      only_keys(e, "eigs", {"contour", "ssm"});
      EigsTask t;
      const json& c = require(e, "contour", "eigs");
      t.contour.rect = rect(c, "eigs.contour");
      if (c.contains("n_quad_per_side")) t.contour.n_quad_per_side = integer(c.at("n_quad_per_side"), "eigs.contour.n_quad_per_side", 1, 1024);
      if (e.contains("ssm")) {
        const json& s = e.at("ssm");
        only_keys(s, "eigs.ssm", {"L", "m", "sv_threshold", "residual_threshold", "class_eps_rel"});
        if (s.contains("L")) t.ssm.L = integer(s.at("L"), "eigs.ssm.L", 1, 512);
        if (s.contains("m")) t.ssm.m = integer(s.at("m"), "eigs.ssm.m", 1, 256);
        if (s.contains("sv_threshold")) t.ssm.sv_threshold = positive(s.at("sv_threshold"), "eigs.ssm.sv_threshold");
        if (s.contains("residual_threshold")) t.ssm.residual_threshold = positive(s.at("residual_threshold"), "eigs.ssm.residual_threshold");
        if (s.contains("class_eps_rel")) t.ssm.class_eps_rel = positive(s.at("class_eps_rel"), "eigs.ssm.class_eps_rel");
      }
      if (t.ssm.m * t.ssm.L > 512) fail("eigs.ssm", "m * L must not exceed 512");
      t.ssm.seed = cfg.seed;
      if (cfg.problem.domain == DomainKind::waveguide) {
        try {
          validate_waveguide_contour(t.contour.rect, std::sqrt(cfg.problem.exterior.rho / cfg.problem.exterior.shear));
        } catch (const ConfigError& err) {
          fail("eigs.contour", err.what());
        }
      }
      cfg.eigs = t;
      break;
    }
    case Task::scan: {
      const json& s = require(root, "scan", "config");
      only_keys(s, "scan", {"omega_min", "omega_max", "n_samples", "incident"});
      ScanTask t;
      t.omega_min = positive(require(s, "omega_min", "scan"), "scan.omega_min");
      t.omega_max = positive(require(s, "omega_max", "scan"), "scan.omega_max");
      if (!(t.omega_min < t.omega_max)) fail("scan", "omega_min must be below omega_max");
      t.n_samples = integer(require(s, "n_samples", "scan"), "scan.n_samples", 1, 100000);
      t.incident = s.contains("incident") ? incident(s.at("incident"), "scan.incident") : Incident{};
      if (cfg.problem.domain != DomainKind::waveguide) fail("problem.domain", "scan needs a waveguide problem");
      if (t.incident.kind != Incident::Kind::waveguide_mode) fail("scan.incident.type", "scan needs a waveguide_mode incident field");
      cfg.scan = t;
      break;
    }
    case Task::forward: {
      const json& f = require(root, "forward", "config");
      only_keys(f, "forward", {"omega", "incident"});
      ForwardTask t;
      t.omega = positive(require(f, "omega", "forward"), "forward.omega");
      t.incident = incident(require(f, "incident", "forward"), "forward.incident");
      try {
        check_incident(cfg.problem, t.omega, t.incident);
      } catch (const ConfigError& err) {
        fail("forward.incident", err.what());
      }
      cfg.forward = t;
      break;
    }
    case Task::oracle: {
      const json& o = require(root, "oracle", "config");
      only_keys(o, "oracle", {"radius", "n_min", "n_max", "kinds", "formulation", "region", "exterior", "interior"});
      OracleTask t;
      t.radius = positive(require(o, "radius", "oracle"), "oracle.radius");
      t.n_min = o.contains("n_min") ? integer(o.at("n_min"), "oracle.n_min", 0, special::kMaxOrder - 1) : 0;
      t.n_max = integer(require(o, "n_max", "oracle"), "oracle.n_max", 0, special::kMaxOrder - 1);
      if (t.n_min > t.n_max) fail("oracle.n_min", "must not exceed n_max");
      const json& k = require(o, "kinds", "oracle");
      if (!k.is_array() || k.empty()) fail("oracle.kinds", "must be a non-empty array");
      for (std::size_t i = 0; i < k.size(); ++i) t.kinds.push_back(char_kind(k[i], "oracle.kinds[" + std::to_string(i) + "]"));
      if (o.contains("formulation")) t.formulation = formulation(o.at("formulation"), "oracle.formulation");
      t.region = rect(require(o, "region", "oracle"), "oracle.region");
      cfg.problem.exterior = material(require(o, "exterior", "oracle"), "oracle.exterior");
      cfg.problem.interior = material(require(o, "interior", "oracle"), "oracle.interior");
      cfg.oracle = t;
      break;
    }
    case Task::selftest:
      break;
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path, std::optional<Task> task = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  return parse_config(root, task);
}

}  // namespace trbie
