#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "nsf/nsf.h"

namespace {

using json = nlohmann::json;

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

int report_error(nsf_status st) {
  std::fprintf(stderr, "error (%d): %s\n", static_cast<int>(st), nsf_last_error());
  return kExitError;
}

// Takes ownership of a library string.
std::string take(char* s) {
  std::string out = s ? s : "";
  nsf_string_free(s);
  return out;
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) {
    std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
    return false;
  }
  return true;
}

const char* verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

std::string num(const json& v) {
  if (v.is_number()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
    return buf;
  }
  return v.is_string() ? v.get<std::string>() : v.dump();
}

int cmd_check_eos(const std::string& path) {
  nsf_eos* eos = nullptr;
  if (nsf_status st = nsf_eos_load(path.c_str(), &eos); st != NSF_OK) return report_error(st);
  char* rep = nullptr;
  int pass = 0;
  nsf_status st = nsf_eos_check(eos, &rep, &pass);
  nsf_eos_destroy(eos);
  if (st != NSF_OK) return report_error(st);
  for (const auto& item : json::parse(take(rep))) {
    std::string label = item["label"].get<std::string>();
    std::printf("%s  %s%s  (%s)\n", verdict(item["pass"].get<bool>()), item["name"].get<std::string>().c_str(),
                label.empty() ? "" : (" [" + label + "]").c_str(), item["detail"].get<std::string>().c_str());
  }
  return pass ? 0 : kExitFail;
}

int cmd_audit_boundary(const std::string& path) {
  char* rep = nullptr;
  int pass = 0;
  if (nsf_status st = nsf_audit_boundary_file(path.c_str(), &rep, &pass); st != NSF_OK) return report_error(st);
  const json j = json::parse(take(rep));
  for (const auto& f : j["faces"]) {
    std::printf("face x=%s  %-4s  u_b.n=%s", num(f["pos"]).c_str(), f["kind"].get<std::string>().c_str(),
                num(f["u_dot_n"]).c_str());
    if (f.contains("margin"))
      std::printf("  margin=%s  F_tau=%s  %s", num(f["margin"]).c_str(), num(f["F_tau"]).c_str(),
                  verdict(f["pass"].get<bool>()));
    std::printf("\n");
  }
  for (const auto& s : j["issues"]) std::printf("  %s\n", s.get<std::string>().c_str());
  std::printf("%s  admissibility (sup margin %s)\n", verdict(pass != 0), num(j["sup_margin"]).c_str());
  return pass ? 0 : kExitFail;
}

struct Loaded {
  nsf_scenario* sc = nullptr;
  nsf_trajectory* tr = nullptr;
  ~Loaded() {
    nsf_trajectory_destroy(tr);
    nsf_scenario_destroy(sc);
  }
};

int load_and_run(const std::string& path, Loaded& l, bool& aborted) {
  if (nsf_status st = nsf_scenario_load(path.c_str(), &l.sc); st != NSF_OK) return report_error(st);
  nsf_status st = nsf_run(l.sc, &l.tr);
  aborted = st == NSF_ERR_NUMERIC && l.tr;
  if (aborted) std::fprintf(stderr, "run aborted: %s\n", nsf_last_error());
  else if (st != NSF_OK) return report_error(st);
  return 0;
}

int cmd_run(const std::string& path, const std::string& out) {
  Loaded l;
  bool aborted = false;
  if (int rc = load_and_run(path, l, aborted)) return rc;
  if (nsf_status st = nsf_trajectory_export(l.tr, out.c_str()); st != NSF_OK) return report_error(st);
  size_t n_states = 0, n_steps = 0;
  int ab = 0;
  nsf_trajectory_info(l.tr, &n_states, &n_steps, &ab);
  std::printf("%s  run: %zu steps, %zu states written to %s\n", verdict(!ab), n_steps, n_states, out.c_str());
  return ab ? kExitFail : 0;
}

int cmd_audit(const std::string& path, const std::string& out, const std::string& csv_path) {
  Loaded l;
  bool aborted = false;
  if (int rc = load_and_run(path, l, aborted)) return rc;
  char* rep = nullptr;
  char* csv = nullptr;
  int pass = 0;
  if (nsf_status st = nsf_audit(l.sc, l.tr, &rep, csv_path.empty() ? nullptr : &csv, &pass); st != NSF_OK)
    return report_error(st);
  const std::string text = take(rep);
  if (!out.empty() && !write_file(out, text + "\n")) return kExitError;
  if (!csv_path.empty() && !write_file(csv_path, take(csv))) return kExitError;
  const json j = json::parse(text);
  for (const auto& v : j["verdicts"])
    std::printf("%s  %s = %s (tol %s)\n", verdict(v["pass"].get<bool>()), v["name"].get<std::string>().c_str(),
                num(v["value"]).c_str(), num(v["tol"]).c_str());
  return pass ? 0 : kExitFail;
}

int cmd_converge(const std::string& kind, const std::vector<size_t>& ns, double t_end, double dt_over_h,
                 const std::string& out) {
  char* rep = nullptr;
  int pass = 0;
  if (nsf_status st = nsf_converge(kind.c_str(), ns.data(), ns.size(), t_end, dt_over_h, &rep, &pass); st != NSF_OK)
    return report_error(st);
  const std::string text = take(rep);
  if (!out.empty() && !write_file(out, text + "\n")) return kExitError;
  const json j = json::parse(text);
  for (const auto& lv : j["levels"])
    std::printf("n=%-5s dt=%-10s L1 rho=%-10s u=%-10s theta=%-10s energy_res=%s\n", num(lv["n"]).c_str(),
                num(lv["dt"]).c_str(), num(lv["l1_rho"]).c_str(), num(lv["l1_u"]).c_str(),
                num(lv["l1_theta"]).c_str(), num(lv["energy_residual"]).c_str());
  for (const char* f : {"rho", "u", "theta"}) {
    const double o = j["orders"][f].get<double>();
    std::printf("%s  order %s = %.3f (expected [0.8, 1.5])\n", verdict(o >= 0.8 && o <= 1.5), f, o);
  }
  std::printf("     energy residual order = %s\n", num(j["energy_order"]).c_str());
  for (const auto& f : j["flags"]) std::printf("flag: %s\n", f.get<std::string>().c_str());
  return pass ? 0 : kExitFail;
}

int cmd_weak_strong(const std::string& path, const std::vector<size_t>& ns, double t_end, double every,
                    const std::string& out, const std::string& csv_path) {
  nsf_scenario* sc = nullptr;
  if (nsf_status st = nsf_scenario_load(path.c_str(), &sc); st != NSF_OK) return report_error(st);
  char* rep = nullptr;
  char* csv = nullptr;
  int pass = 0;
  nsf_status st = nsf_weak_strong(sc, ns.data(), ns.size(), t_end, every, &rep, csv_path.empty() ? nullptr : &csv,
                                  &pass);
  nsf_scenario_destroy(sc);
  if (st != NSF_OK) return report_error(st);
  const std::string text = take(rep);
  if (!out.empty() && !write_file(out, text + "\n")) return kExitError;
  if (!csv_path.empty() && !write_file(csv_path, take(csv))) return kExitError;
  const json j = json::parse(text);
  for (const auto& r : j["runs"])
    std::printf("n=%-5s E(t_end)=%-12s eta=%-12s L=%s\n", num(r["n"]).c_str(), num(r["final"]).c_str(),
                num(r["eta"]).c_str(), num(r["L"]).c_str());
  std::printf("%s  relative energy decreases under refinement\n", verdict(j["decreasing"].get<bool>()));
  std::printf("%s  Gronwall rates nonnegative\n", verdict(j["rates_nonnegative"].get<bool>()));
  return pass ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressible Navier-Stokes-Fourier toolkit for open 1D domains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", nsf_version());

  std::string path, out, csv, kind = "thermal_relaxation";
  std::vector<size_t> ns{32, 64, 128};
  double t_end = 0.0, every = 0.025, dt_over_h = 0.8;
  int rc = 0;

  auto* eos = app.add_subcommand("check-eos", "check EOS and transport invariants of an eos.json");
  eos->add_option("file", path, "EOS document")->required()->check(CLI::ExistingFile);
  eos->callback([&] { rc = cmd_check_eos(path); });

  auto* bnd = app.add_subcommand("audit-boundary", "classify boundary faces and check inflow admissibility");
  bnd->add_option("scenario", path, "scenario file")->required()->check(CLI::ExistingFile);
  bnd->callback([&] { rc = cmd_audit_boundary(path); });

  auto* run = app.add_subcommand("run", "integrate a scenario and export states");
  run->add_option("scenario", path, "scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory")->required();
  run->callback([&] { rc = cmd_run(path, out); });

  auto* aud = app.add_subcommand("audit", "run a scenario and audit mass, energy and entropy budgets");
  aud->add_option("scenario", path, "scenario file")->required()->check(CLI::ExistingFile);
  aud->add_option("--out", out, "report JSON path");
  aud->add_option("--csv", csv, "windowed budget CSV path");
  aud->callback([&] { rc = cmd_audit(path, out, csv); });

  auto* conv = app.add_subcommand("converge", "manufactured-solution convergence study");
  conv->add_option("--case", kind, "thermal_relaxation, acoustic_smooth or throughflow");
  conv->add_option("--n", ns, "resolutions, each twice the previous")->delimiter(',');
  conv->add_option("--t-end", t_end, "final time (default 1)");
  conv->add_option("--dt-over-h", dt_over_h, "time step per unit cell width");
  conv->add_option("--out", out, "report JSON path");
  conv->callback([&] { rc = cmd_converge(kind, ns, t_end > 0.0 ? t_end : 1.0, dt_over_h, out); });

  auto* ws = app.add_subcommand("weak-strong", "relative energy against a 4x finer reference");
  ws->add_option("scenario", path, "scenario file")->required()->check(CLI::ExistingFile);
  ws->add_option("--n", ns, "coarse resolutions")->delimiter(',');
  ws->add_option("--t-end", t_end, "final time (default 0.25)");
  ws->add_option("--every", every, "output spacing");
  ws->add_option("--out", out, "report JSON path");
  ws->add_option("--csv", csv, "relative energy trace CSV of the finest coarse run");
  ws->callback([&] { rc = cmd_weak_strong(path, ns, t_end > 0.0 ? t_end : 0.25, every, out, csv); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }
  return rc;
}
