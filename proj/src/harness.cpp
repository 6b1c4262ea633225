#include "nsf/harness.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nsf/errors.hpp"

namespace nsf {

namespace {

using Issues = std::vector<std::string>;

[[noreturn]] void throw_issues(const Issues& issues) {
  std::string msg;
  for (const auto& s : issues) msg += (msg.empty() ? "" : "\n") + s;
  throw Error(Errc::Validation, msg);
}

Json parse_json(const std::string& text, const std::string& name) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::Validation, fmt::format("{}: malformed JSON: {}", name, e.what()));
  }
}

const Json& section(const Json& root, const std::string& key, Issues& issues, bool required = true) {
  static const Json empty = Json::object();
  if (!root.contains(key)) {
    if (required) issues.push_back(fmt::format("{}: required section missing", key));
    return empty;
  }
  if (!root[key].is_object()) {
    issues.push_back(fmt::format("{}: expected an object", key));
    return empty;
  }
  return root[key];
}

template <class T>
void get(const Json& j, const std::string& path, const std::string& key, T& out, Issues& issues) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) {
      issues.push_back(fmt::format("{}.{}: expected a boolean", path, key));
      return;
    }
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) {
      issues.push_back(fmt::format("{}.{}: expected an integer", path, key));
      return;
    }
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) {
      issues.push_back(fmt::format("{}.{}: expected a string", path, key));
      return;
    }
  } else {
    if (!v.is_number()) {
      issues.push_back(fmt::format("{}.{}: expected a number", path, key));
      return;
    }
  }
  out = v.get<T>();
}

Mesh1D parse_mesh(const Json& root, Issues& issues) {
  const Json& m = section(root, "mesh", issues);
  Mesh1D mesh;
  long long n = static_cast<long long>(mesh.n_cells);
  get(m, "mesh", "x0", mesh.x_left, issues);
  get(m, "mesh", "x1", mesh.x_right, issues);
  get(m, "mesh", "n", n, issues);
  if (!(mesh.x_right > mesh.x_left))
    issues.push_back(fmt::format("mesh.x1: must exceed x0 = {}, got {}", mesh.x_left, mesh.x_right));
  if (n < 1) issues.push_back(fmt::format("mesh.n: need at least one cell, got {}", n));
  mesh.n_cells = static_cast<std::size_t>(std::max<long long>(n, 1));
  return mesh;
}

SolverConfig parse_config(const Json& root, Issues& issues) {
  const Json& c = section(root, "config", issues);
  SolverConfig cfg;
  const std::string p = "config";
  get(c, p, "epsilon", cfg.epsilon, issues);
  get(c, p, "delta", cfg.delta, issues);
  get(c, p, "Gamma", cfg.Gamma, issues);
  get(c, p, "d", cfg.d, issues);
  get(c, p, "cfl", cfg.cfl, issues);
  get(c, p, "t_end", cfg.t_end, issues);
  get(c, p, "g", cfg.g, issues);
  get(c, p, "rho_floor", cfg.rho_floor, issues);
  get(c, p, "theta_floor", cfg.theta_floor, issues);
  get(c, p, "theta_bar", cfg.theta_bar, issues);
  get(c, p, "dt_fixed", cfg.dt_fixed, issues);
  std::string policy = "full";
  get(c, p, "dt_policy", policy, issues);
  if (policy == "full") cfg.dt_policy = DtPolicy::Full;
  else if (policy == "hyperbolic") cfg.dt_policy = DtPolicy::Hyperbolic;
  else issues.push_back(fmt::format("config.dt_policy: expected \"full\" or \"hyperbolic\", got \"{}\"", policy));

  if (!(cfg.epsilon >= 0.0)) issues.push_back(fmt::format("config.epsilon: must be nonnegative, got {}", cfg.epsilon));
  if (!(cfg.delta >= 0.0)) issues.push_back(fmt::format("config.delta: must be nonnegative, got {}", cfg.delta));
  if (!(cfg.Gamma > 2.0)) issues.push_back(fmt::format("config.Gamma: must exceed 2, got {}", cfg.Gamma));
  if (cfg.d < 1 || cfg.d > 3) issues.push_back(fmt::format("config.d: must be 1, 2 or 3, got {}", cfg.d));
  if (!(cfg.cfl > 0.0 && cfg.cfl < 1.0)) issues.push_back(fmt::format("config.cfl: must lie in (0, 1), got {}", cfg.cfl));
  if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end))
    issues.push_back(fmt::format("config.t_end: must be finite and nonnegative, got {}", cfg.t_end));
  if (!(cfg.rho_floor > 0.0)) issues.push_back(fmt::format("config.rho_floor: must be positive, got {}", cfg.rho_floor));
  if (!(cfg.theta_floor > 0.0 && cfg.theta_floor < 1.0))
    issues.push_back(fmt::format("config.theta_floor: must lie in (0, 1), got {}", cfg.theta_floor));
  if (!(cfg.theta_bar > 0.0)) issues.push_back(fmt::format("config.theta_bar: must be positive, got {}", cfg.theta_bar));
  if (!(cfg.dt_fixed >= 0.0)) issues.push_back(fmt::format("config.dt_fixed: must be nonnegative, got {}", cfg.dt_fixed));
  return cfg;
}

BoundarySpec parse_boundary(const Json& root, const Mesh1D& mesh, Issues& issues,
                            std::array<std::size_t, 2>& json_index) {
  const Json& b = section(root, "boundary", issues);
  BoundaryFace left, right;
  left.wall = right.wall = true;
  json_index = {0, 1};
  if (!b.contains("faces")) {
    issues.push_back("boundary.faces: required");
    return make_boundary(mesh, left, right);
  }
  const Json& faces = b["faces"];
  if (!faces.is_array() || faces.size() != 2) {
    issues.push_back("boundary.faces: a 1D domain needs exactly two faces");
    return make_boundary(mesh, left, right);
  }
  const double tol = 1e-12 * mesh.length();
  std::array<bool, 2> seen{false, false};
  for (std::size_t k = 0; k < 2; ++k) {
    const std::string path = fmt::format("boundary.faces[{}]", k);
    const Json& f = faces[k];
    if (!f.is_object()) {
      issues.push_back(fmt::format("{}: expected an object", path));
      continue;
    }
    BoundaryFace face;
    double pos = std::numeric_limits<double>::quiet_NaN();
    get(f, path, "pos", pos, issues);
    get(f, path, "u_b", face.u_b, issues);
    get(f, path, "rho_b", face.rho_b, issues);
    get(f, path, "F_ib", face.F_ib, issues);
    get(f, path, "wall", face.wall, issues);
    std::size_t side;
    if (std::abs(pos - mesh.x_left) <= tol) side = 0;
    else if (std::abs(pos - mesh.x_right) <= tol) side = 1;
    else {
      issues.push_back(fmt::format("{}.pos: {} is not a mesh end ({} or {})", path, pos, mesh.x_left, mesh.x_right));
      continue;
    }
    if (seen[side]) {
      issues.push_back(fmt::format("{}.pos: face at {} given twice", path, pos));
      continue;
    }
    seen[side] = true;
    json_index[side] = k;
    (side == 0 ? left : right) = face;
  }
  BoundarySpec spec = make_boundary(mesh, left, right);
  for (std::size_t side = 0; side < 2; ++side) {
    const BoundaryFace& f = spec.faces[side];
    const std::string path = fmt::format("boundary.faces[{}]", json_index[side]);
    if (f.kind != FaceKind::In) continue;
    if (std::isnan(f.rho_b)) issues.push_back(fmt::format("{}.rho_b: required on an inflow face [E1]", path));
    if (std::isnan(f.F_ib)) issues.push_back(fmt::format("{}.F_ib: required on an inflow face [ws12]", path));
  }
  return spec;
}

// Rewrites "faces[k]" in admissibility issues to the JSON path of the face.
std::vector<std::string> boundary_issues(const AdmissibilityReport& rep, const std::array<std::size_t, 2>& idx) {
  std::vector<std::string> out;
  for (const auto& s : rep.issues) {
    std::string t = s;
    for (std::size_t k = 0; k < 2; ++k) {
      const std::string from = fmt::format("faces[{}]", k);
      if (t.rfind(from, 0) == 0) {
        t = fmt::format("boundary.faces[{}]", idx[k]) + t.substr(from.size());
        break;
      }
    }
    out.push_back(t);
  }
  return out;
}

FieldInit parse_field(const Json& init, const std::string& key, std::size_t n, Issues& issues) {
  const std::string path = "initial." + key;
  if (!init.contains(key)) {
    issues.push_back(fmt::format("{}: required", path));
    return std::vector<double>(n, 1.0);
  }
  const Json& v = init[key];
  if (v.is_number()) return std::vector<double>(n, v.get<double>());
  if (v.is_string()) {
    try {
      return Expr::parse(v.get<std::string>());
    } catch (const Error& e) {
      issues.push_back(fmt::format("{}: {}", path, e.what()));
      return std::vector<double>(n, 1.0);
    }
  }
  if (v.is_array()) {
    if (v.size() != n) {
      issues.push_back(fmt::format("{}: array has {} values for {} cells", path, v.size(), n));
      return std::vector<double>(n, 1.0);
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) {
      if (!v[i].is_number()) {
        issues.push_back(fmt::format("{}[{}]: expected a number", path, i));
        return std::vector<double>(n, 1.0);
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  issues.push_back(fmt::format("{}: expected an expression, a number or an array", path));
  return std::vector<double>(n, 1.0);
}

std::vector<double> sample(const FieldInit& f, const Mesh1D& mesh) {
  if (const auto* values = std::get_if<std::vector<double>>(&f)) return *values;
  const Expr& e = std::get<Expr>(f);
  std::vector<double> out(mesh.n_cells);
  for (std::size_t i = 0; i < mesh.n_cells; ++i) out[i] = e(mesh.center(i));
  return out;
}

std::string check_issue(const std::string& section_name, const CheckItem& c) {
  if (c.label.empty()) return fmt::format("{}: {} failed ({})", section_name, c.name, c.detail);
  return fmt::format("{}: {} failed ({}) [{}]", section_name, c.name, c.detail, c.label);
}

}  // namespace

std::vector<double> output_schedule(double t_end, const std::vector<double>& times, double every) {
  std::vector<double> out;
  for (double t : times)
    if (t > 0.0 && t < t_end) out.push_back(t);
  if (every > 0.0) {
    const auto k = static_cast<long long>(std::floor(t_end / every + 1e-9));
    for (long long i = 1; i <= k; ++i) {
      const double t = static_cast<double>(i) * every;
      if (t < t_end * (1.0 - 1e-12)) out.push_back(t);
    }
  }
  if (t_end > 0.0) out.push_back(t_end);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Scenario parse_scenario(const std::string& json_text, const std::string& name) {
  const Json root = parse_json(json_text, name);
  if (!root.is_object()) throw Error(Errc::Validation, fmt::format("{}: top level must be an object", name));
  Issues issues;
  Scenario sc;
  sc.name = name;
  Problem& P = sc.problem;
  P.mesh = parse_mesh(root, issues);
  P.cfg = parse_config(root, issues);

  const std::size_t eos_start = issues.size();
  const Json& eos_j = section(root, "eos", issues);
  P.eos = eos_from_json(eos_j, "eos", issues);
  if (issues.size() == eos_start) {
    sc.eos_checks = check_eos(P.eos);
    for (const auto& c : sc.eos_checks)
      if (!c.pass) issues.push_back(check_issue("eos", c));
  }
  const std::size_t transport_start = issues.size();
  P.transport = transport_from_json(root.contains("transport") ? root["transport"] : Json(), "transport", issues);
  if (!root.contains("transport") && eos_j.contains("lambda_exp") && eos_j["lambda_exp"].is_number())
    P.transport.lambda_exp = eos_j["lambda_exp"].get<double>();
  if (issues.size() == transport_start && P.cfg.theta_floor > 0.0) {
    sc.transport_checks = check_transport(P.transport, P.cfg.theta_floor, 1.0 / P.cfg.theta_floor);
    for (const auto& c : sc.transport_checks)
      if (!c.pass) issues.push_back(check_issue("transport", c));
  }

  std::array<std::size_t, 2> idx{};
  P.boundary = parse_boundary(root, P.mesh, issues, idx);
  sc.admissibility = admissibility_check(P.eos, P.boundary);
  for (const auto& s : boundary_issues(sc.admissibility, idx))
    if (std::find(issues.begin(), issues.end(), s) == issues.end()) issues.push_back(s);

  const Json& init = section(root, "initial", issues);
  sc.rho0 = parse_field(init, "rho", P.mesh.n_cells, issues);
  sc.u0 = parse_field(init, "u", P.mesh.n_cells, issues);
  sc.theta0 = parse_field(init, "theta", P.mesh.n_cells, issues);
  {
    const auto rho = sample(sc.rho0, P.mesh);
    const auto u = sample(sc.u0, P.mesh);
    const auto th = sample(sc.theta0, P.mesh);
    for (std::size_t i = 0; i < rho.size(); ++i) {
      if (!(rho[i] > 0.0) || !std::isfinite(rho[i])) {
        issues.push_back(fmt::format("initial.rho: density must be positive and finite, got {} at x = {}", rho[i],
                                     P.mesh.center(i)));
        break;
      }
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (!std::isfinite(u[i])) {
        issues.push_back(fmt::format("initial.u: velocity must be finite, got {} at x = {}", u[i], P.mesh.center(i)));
        break;
      }
    }
    for (std::size_t i = 0; i < th.size(); ++i) {
      if (std::isnan(th[i])) {
        issues.push_back(fmt::format("initial.theta: temperature is NaN at x = {}", P.mesh.center(i)));
        break;
      }
    }
  }

  std::vector<double> times;
  double every = 0.0;
  if (root.contains("output")) {
    const Json& o = section(root, "output", issues, false);
    if (o.contains("times")) {
      if (!o["times"].is_array()) issues.push_back("output.times: expected an array of numbers");
      else
        for (std::size_t i = 0; i < o["times"].size(); ++i) {
          if (!o["times"][i].is_number()) issues.push_back(fmt::format("output.times[{}]: expected a number", i));
          else times.push_back(o["times"][i].get<double>());
        }
    }
    get(o, "output", "every", every, issues);
    if (every < 0.0) issues.push_back(fmt::format("output.every: must be nonnegative, got {}", every));
  }
  sc.output_times = output_schedule(P.cfg.t_end, times, every);

  if (!issues.empty()) throw_issues(issues);
  return sc;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(read_text_file(path), path); }

BoundaryAudit audit_boundary_text(const std::string& json_text) {
  const Json root = parse_json(json_text, "scenario");
  if (!root.is_object()) throw Error(Errc::Validation, "scenario: top level must be an object");
  Issues issues;
  const Mesh1D mesh = parse_mesh(root, issues);
  const Json& eos_j = section(root, "eos", issues);
  const EosSpec eos = eos_from_json(eos_j, "eos", issues);
  std::array<std::size_t, 2> idx{};
  BoundaryAudit out;
  out.spec = parse_boundary(root, mesh, issues, idx);
  if (!issues.empty()) throw_issues(issues);
  out.report = admissibility_check(eos, out.spec);
  out.report.issues = boundary_issues(out.report, idx);
  return out;
}

InitialData initial_state(const Scenario& sc) {
  const Problem& P = sc.problem;
  InitialData d;
  d.state.t = 0.0;
  d.state.rho = sample(sc.rho0, P.mesh);
  d.state.u = sample(sc.u0, P.mesh);
  d.state.theta = sample(sc.theta0, P.mesh);
  const double lo = P.cfg.theta_floor, hi = 1.0 / P.cfg.theta_floor;
  for (double& t : d.state.theta) {
    const double c = std::clamp(t, lo, hi);
    if (c != t) {
      ++d.theta_clamps;
      t = c;
    }
  }
  return d;
}

}  // namespace nsf
