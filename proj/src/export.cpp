#include "nsf/export.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "nsf/errors.hpp"

namespace nsf {

namespace {

// Non-finite values become strings so that documents stay valid JSON.
Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json term_map(const std::map<std::string, double>& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m) j[k] = num(v);
  return j;
}

}  // namespace

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

std::string state_file_name(double t) { return fmt::format("state_{:.6f}.csv", t); }

std::string state_csv(const Mesh1D& mesh, const FieldState& s) {
  std::string out = "x,rho,u,theta\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out += fmt::format("{},{},{},{}\n", format_double(mesh.center(i)), format_double(s.rho[i]),
                       format_double(s.u[i]), format_double(s.theta[i]));
  return out;
}

std::string fluxes_csv(const Trajectory& tr) {
  static const RecordField fields[] = {&StepRecord::mass_in, &StepRecord::mass_out, &StepRecord::f_ib,
                                       &StepRecord::eint_out, &StepRecord::delta_out, &StepRecord::s_in,
                                       &StepRecord::s_out};
  std::string out = "t,mass_in,mass_out,f_ib,eint_out,delta_out,s_in,s_out\n";
  double acc[std::size(fields)] = {};
  for (const StepRecord& r : tr.steps) {
    out += format_double(r.t1);
    for (std::size_t k = 0; k < std::size(fields); ++k) {
      acc[k] += r.*fields[k];
      out += "," + format_double(acc[k]);
    }
    out += "\n";
  }
  return out;
}

std::string budget_csv(const std::vector<BudgetRow>& rows) {
  std::string out = "t0,t1,mass_res,energy_res,entropy_prod\n";
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{},{}\n", format_double(r.t0), format_double(r.t1), format_double(r.mass_res),
                       format_double(r.energy_res), format_double(r.entropy_prod));
  return out;
}

std::string relative_energy_csv(const RelEnergyTrace& trace) {
  std::string out = "t,rel_energy,kinetic,bregman\n";
  for (std::size_t k = 0; k < trace.times.size(); ++k)
    out += fmt::format("{},{},{},{}\n", format_double(trace.times[k]), format_double(trace.integrals[k]),
                       format_double(trace.kinetic[k]), format_double(trace.bregman[k]));
  return out;
}

Json check_items_json(const std::vector<CheckItem>& items) {
  Json arr = Json::array();
  for (const auto& c : items)
    arr.push_back({{"name", c.name}, {"label", c.label}, {"pass", c.pass}, {"detail", c.detail}});
  return arr;
}

Json admissibility_json(const BoundarySpec& spec, const AdmissibilityReport& rep) {
  Json faces = Json::array();
  for (const auto& v : rep.faces) {
    const BoundaryFace& f = spec.faces[v.index];
    Json j = {{"pos", f.pos}, {"kind", to_string(v.kind)}, {"u_b", f.u_b}, {"u_dot_n", v.u_dot_n}};
    if (v.kind == FaceKind::In) {
      j["rho_b"] = num(f.rho_b);
      j["F_ib"] = num(f.F_ib);
      j["margin"] = num(v.margin);
      j["F_tau"] = num(v.F_tau);
      j["pass"] = v.pass;
    }
    faces.push_back(j);
  }
  return {{"pass", rep.pass}, {"sup_margin", num(rep.sup_margin)}, {"faces", faces}, {"issues", rep.issues}};
}

Json budget_report_json(const BudgetReport& r) {
  Json verdicts = Json::array();
  for (const auto& v : r.verdicts)
    verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"value", num(v.value)}, {"tol", num(v.tol)}});
  return {{"window", {num(r.t0), num(r.t1)}},
          {"steps", r.steps},
          {"mass_residual", num(r.mass_residual)},
          {"energy_residual", num(r.energy_residual)},
          {"entropy_production", num(r.entropy_production)},
          {"boundary_terms", term_map(r.boundary_terms)},
          {"energy_terms", term_map(r.energy_terms)},
          {"entropy_terms", term_map(r.entropy_terms)},
          {"apriori", term_map(r.apriori)},
          {"verdicts", verdicts},
          {"pass", r.pass}};
}

Json convergence_json(const ConvergenceResult& r, bool pass) {
  Json levels = Json::array();
  for (std::size_t k = 0; k < r.resolutions.size(); ++k)
    levels.push_back({{"n", r.resolutions[k]},
                      {"dt", num(r.dts[k])},
                      {"l1_rho", num(r.errors[k].rho)},
                      {"l1_u", num(r.errors[k].u)},
                      {"l1_theta", num(r.errors[k].theta)},
                      {"energy_residual", num(r.energy_residuals[k])}});
  return {{"case", to_string(r.kind)},
          {"levels", levels},
          {"orders", {{"rho", num(r.orders.rho)}, {"u", num(r.orders.u)}, {"theta", num(r.orders.theta)}}},
          {"energy_order", num(r.energy_order)},
          {"probe_residuals", r.probe_residuals},
          {"flags", r.flags},
          {"pass", pass}};
}

Json weak_strong_json(const WeakStrongStudy& st, bool pass) {
  Json runs = Json::array();
  for (std::size_t k = 0; k < st.results.size(); ++k) {
    const auto& r = st.results[k];
    Json trace = Json::array();
    for (std::size_t i = 0; i < r.trace.times.size(); ++i)
      trace.push_back({num(r.trace.times[i]), num(r.trace.integrals[i])});
    runs.push_back({{"n", st.coarse[k]},
                    {"reference", r.trace.reference_label},
                    {"final", num(st.final_values[k])},
                    {"eta", num(r.fit.eta)},
                    {"L", num(r.fit.L)},
                    {"trace", trace}});
  }
  return {{"runs", runs},
          {"decreasing", st.decreasing},
          {"rates_nonnegative", st.rates_nonnegative},
          {"eta_decreasing", st.eta_decreasing},
          {"pass", pass}};
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, fmt::format("{}: cannot open for writing", path));
  out << content;
  out.close();
  if (!out) throw Error(Errc::Io, fmt::format("{}: write failed", path));
}

void export_trajectory(const Trajectory& tr, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::Io, fmt::format("{}: cannot create directory: {}", dir, ec.message()));
  for (const FieldState& s : tr.states)
    write_text_file((fs::path(dir) / state_file_name(s.t)).string(), state_csv(tr.mesh, s));
  write_text_file((fs::path(dir) / "fluxes.csv").string(), fluxes_csv(tr));
}

}  // namespace nsf
