#include "nsf/nsf.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "nsf/budgets.hpp"
#include "nsf/eos_io.hpp"
#include "nsf/errors.hpp"
#include "nsf/export.hpp"
#include "nsf/harness.hpp"
#include "nsf/studies.hpp"

struct nsf_eos {
  nsf::EosSpec eos;
  nsf::TransportSpec transport;
};

struct nsf_scenario {
  nsf::Scenario sc;
};

struct nsf_trajectory {
  nsf::Trajectory tr;
};

namespace {

thread_local std::string g_last_error;

nsf_status to_status(nsf::Errc c) {
  switch (c) {
    case nsf::Errc::Domain: return NSF_ERR_DOMAIN;
    case nsf::Errc::Validation: return NSF_ERR_VALIDATION;
    case nsf::Errc::Io: return NSF_ERR_IO;
    case nsf::Errc::Misuse: return NSF_ERR_MISUSE;
    case nsf::Errc::Numeric: return NSF_ERR_NUMERIC;
    case nsf::Errc::Internal: return NSF_ERR_INTERNAL;
  }
  return NSF_ERR_INTERNAL;
}

template <class F>
nsf_status guard(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const nsf::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return NSF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NSF_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return NSF_ERR_INTERNAL;
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw nsf::Error(nsf::Errc::Misuse, what);
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

NSF_API const char* nsf_version(void) { return "1.0.0"; }

NSF_API const char* nsf_last_error(void) { return g_last_error.c_str(); }

NSF_API void nsf_string_free(char* s) { std::free(s); }

NSF_API nsf_status nsf_eos_from_json(const char* json, nsf_eos** out) {
  return guard([&] {
    require(json && out, "nsf_eos_from_json: null argument");
    *out = nullptr;
    auto doc = nsf::parse_eos_document(json);
    *out = new nsf_eos{doc.eos, doc.transport};
    return NSF_OK;
  });
}

NSF_API nsf_status nsf_eos_load(const char* path, nsf_eos** out) {
  return guard([&] {
    require(path && out, "nsf_eos_load: null argument");
    *out = nullptr;
    auto doc = nsf::load_eos_document(path);
    *out = new nsf_eos{doc.eos, doc.transport};
    return NSF_OK;
  });
}

NSF_API void nsf_eos_destroy(nsf_eos* eos) { delete eos; }

NSF_API nsf_status nsf_eos_thermo(const nsf_eos* eos, double rho, double theta, double out[3]) {
  return guard([&] {
    require(eos && out, "nsf_eos_thermo: null argument");
    const auto d = nsf::thermo_derivs(eos->eos, rho, theta);
    out[0] = d.p;
    out[1] = d.e;
    out[2] = d.s;
    return NSF_OK;
  });
}

NSF_API nsf_status nsf_eos_check(const nsf_eos* eos, char** report_json, int* all_pass) {
  return guard([&] {
    require(eos && report_json && all_pass, "nsf_eos_check: null argument");
    auto items = nsf::check_eos(eos->eos);
    for (auto& c : nsf::check_transport(eos->transport)) items.push_back(std::move(c));
    bool pass = true;
    for (const auto& c : items) pass = pass && c.pass;
    *report_json = dup_string(nsf::check_items_json(items).dump(2));
    *all_pass = pass ? 1 : 0;
    return NSF_OK;
  });
}

NSF_API nsf_status nsf_scenario_load(const char* path, nsf_scenario** out) {
  return guard([&] {
    require(path && out, "nsf_scenario_load: null argument");
    *out = nullptr;
    *out = new nsf_scenario{nsf::load_scenario(path)};
    return NSF_OK;
  });
}

NSF_API nsf_status nsf_scenario_from_json(const char* json, nsf_scenario** out) {
  return guard([&] {
    require(json && out, "nsf_scenario_from_json: null argument");
    *out = nullptr;
    *out = new nsf_scenario{nsf::parse_scenario(json)};
    return NSF_OK;
  });
}

NSF_API void nsf_scenario_destroy(nsf_scenario* sc) { delete sc; }

NSF_API nsf_status nsf_audit_boundary_file(const char* path, char** report_json, int* pass) {
  return guard([&] {
    require(path && report_json && pass, "nsf_audit_boundary_file: null argument");
    const auto audit = nsf::audit_boundary_text(nsf::read_text_file(path));
    *report_json = dup_string(nsf::admissibility_json(audit.spec, audit.report).dump(2));
    *pass = audit.report.pass ? 1 : 0;
    return NSF_OK;
  });
}

NSF_API nsf_status nsf_run(const nsf_scenario* sc, nsf_trajectory** out) {
  return guard([&] {
    require(sc && out, "nsf_run: null argument");
    *out = nullptr;
    const auto init = nsf::initial_state(sc->sc);
    auto* t = new nsf_trajectory{nsf::run(sc->sc.problem, init.state, sc->sc.output_times)};
    *out = t;
    if (t->tr.aborted) {
      g_last_error = t->tr.abort_reason;
      return NSF_ERR_NUMERIC;
    }
    return NSF_OK;
  });
}

NSF_API void nsf_trajectory_destroy(nsf_trajectory* tr) { delete tr; }

NSF_API nsf_status nsf_trajectory_info(const nsf_trajectory* tr, size_t* n_states, size_t* n_steps, int* aborted) {
  return guard([&] {
    require(tr, "nsf_trajectory_info: null trajectory");
    if (n_states) *n_states = tr->tr.states.size();
    if (n_steps) *n_steps = tr->tr.steps.size();
    if (aborted) *aborted = tr->tr.aborted ? 1 : 0;
    return NSF_OK;
  });
}

NSF_API nsf_status nsf_trajectory_state(const nsf_trajectory* tr, size_t k, double* t, double* rho, double* u,
                                        double* theta, size_t n_cells) {
  return guard([&] {
    require(tr, "nsf_trajectory_state: null trajectory");
    require(k < tr->tr.states.size(), "nsf_trajectory_state: state index out of range");
    const auto& s = tr->tr.states[k];
    require(n_cells == s.size(), "nsf_trajectory_state: n_cells does not match the mesh");
    if (t) *t = s.t;
    for (size_t i = 0; i < n_cells; ++i) {
      if (rho) rho[i] = s.rho[i];
      if (u) u[i] = s.u[i];
      if (theta) theta[i] = s.theta[i];
    }
    return NSF_OK;
  });
}

NSF_API nsf_status nsf_trajectory_export(const nsf_trajectory* tr, const char* dir) {
  return guard([&] {
    require(tr && dir, "nsf_trajectory_export: null argument");
    nsf::export_trajectory(tr->tr, dir);
    return NSF_OK;
  });
}

NSF_API nsf_status nsf_audit(const nsf_scenario* sc, const nsf_trajectory* tr, char** report_json, char** csv,
                             int* pass) {
  return guard([&] {
    require(sc && tr && report_json && pass, "nsf_audit: null argument");
    const auto& P = sc->sc.problem;
    require(tr->tr.mesh.n_cells == P.mesh.n_cells, "nsf_audit: trajectory does not belong to this scenario");
    const auto rep = nsf::audit(P, tr->tr, nsf::full_window(tr->tr));
    nsf::Json j = nsf::budget_report_json(rep);
    j["scenario"] = sc->sc.name;
    j["rejections"] = tr->tr.rejections;
    j["floor_hits"] = tr->tr.floor_hits;
    j["aborted"] = tr->tr.aborted;
    const bool ok = rep.pass && !tr->tr.aborted;
    j["pass"] = ok;
    std::string text = j.dump(2);
    std::string table;
    if (csv) table = nsf::budget_csv(nsf::windowed_budgets(P, tr->tr));
    *report_json = dup_string(text);
    if (csv) *csv = dup_string(table);
    *pass = ok ? 1 : 0;
    return NSF_OK;
  });
}

NSF_API nsf_status nsf_converge(const char* kind, const size_t* resolutions, size_t count, double t_end,
                                double dt_over_h, char** report_json, int* pass) {
  return guard([&] {
    require(kind && resolutions && report_json && pass, "nsf_converge: null argument");
    require(t_end > 0.0 && dt_over_h > 0.0, "nsf_converge: t_end and dt_over_h must be positive");
    const auto c = nsf::manufactured_case(nsf::mms_kind_from_string(kind));
    std::vector<std::size_t> ns(resolutions, resolutions + count);
    const auto r = nsf::convergence_study(c, ns, {t_end, dt_over_h});
    bool ok = true;
    for (double p : r.probe_residuals) ok = ok && p < 1e-6;
    for (double o : {r.orders.rho, r.orders.u, r.orders.theta}) ok = ok && o >= 0.8 && o <= 1.5;
    *report_json = dup_string(nsf::convergence_json(r, ok).dump(2));
    *pass = ok ? 1 : 0;
    return NSF_OK;
  });
}

NSF_API nsf_status nsf_weak_strong(const nsf_scenario* sc, const size_t* coarse, size_t count, double t_end,
                                   double every, char** report_json, char** csv, int* pass) {
  return guard([&] {
    require(sc && coarse && report_json && pass, "nsf_weak_strong: null argument");
    require(count >= 2, "nsf_weak_strong: need at least two coarse resolutions");
    nsf::WeakStrongOptions opt;
    opt.coarse.assign(coarse, coarse + count);
    opt.t_end = t_end;
    opt.every = every;
    const auto st = nsf::weak_strong_study(sc->sc, opt);
    const bool ok = st.decreasing && st.rates_nonnegative;
    std::string text = nsf::weak_strong_json(st, ok).dump(2);
    std::string table;
    if (csv) table = nsf::relative_energy_csv(st.results.back().trace);
    *report_json = dup_string(text);
    if (csv) *csv = dup_string(table);
    *pass = ok ? 1 : 0;
    return NSF_OK;
  });
}

}  // extern "C"
