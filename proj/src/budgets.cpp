#include "nsf/budgets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "nsf/errors.hpp"
#include "nsf/numerics.hpp"

namespace nsf {

namespace {

void check_window(const Trajectory& tr, Window w) {
  if (w.first > w.last || w.last >= tr.states.size())
    throw Error(Errc::Misuse, fmt::format("window [{}, {}] outside a trajectory of {} states", w.first,
                                          w.last, tr.states.size()));
}

// Sum of a record field over the steps of a window.
double sum_field(const Trajectory& tr, Window w, RecordField f) {
  const std::size_t a = tr.state_step[w.first], b = tr.state_step[w.last];
  std::vector<double> v;
  v.reserve(b - a);
  for (std::size_t k = a; k < b; ++k) v.push_back(tr.steps[k].*f);
  return pairwise_sum(v);
}

double delta_potential(const SolverConfig& cfg, double rho) {
  return std::pow(rho, cfg.Gamma) / (cfg.Gamma - 1.0) + rho * rho;
}

}  // namespace

Window full_window(const Trajectory& tr) {
  if (tr.states.empty()) throw Error(Errc::Misuse, "empty trajectory");
  return {0, tr.states.size() - 1};
}

double total_mass(const Mesh1D& mesh, const FieldState& s) { return mesh.h() * pairwise_sum(s.rho); }

double energy_storage(const Problem& P, const FieldState& s) {
  const SolverConfig& cfg = P.cfg;
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = s.rho[i];
    const double du = s.u[i] - P.boundary.u_b_at(P.mesh, P.mesh.center(i));
    v[i] = 0.5 * r * du * du + energy_density(P.eos, r, s.theta[i]) + cfg.delta * r * s.theta[i] +
           cfg.delta * delta_potential(cfg, r);
  }
  return P.mesh.h() * pairwise_sum(v);
}

double total_entropy(const Problem& P, const FieldState& s) {
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    v[i] = entropy_density(P.eos, s.rho[i], s.theta[i]) + P.cfg.delta * s.rho[i] * std::log(s.theta[i]);
  return P.mesh.h() * pairwise_sum(v);
}

double mass_budget(const Problem& P, const Trajectory& tr, Window w) {
  check_window(tr, w);
  const double dM = total_mass(P.mesh, tr.states[w.last]) - total_mass(P.mesh, tr.states[w.first]);
  return dM + sum_field(tr, w, &StepRecord::mass_in) + sum_field(tr, w, &StepRecord::mass_out) -
         sum_field(tr, w, &StepRecord::mass_src);
}

TermBreakdown energy_budget(const Problem& P, const Trajectory& tr, Window w) {
  check_window(tr, w);
  TermBreakdown b;
  const double e0 = energy_storage(P, tr.states[w.first]);
  const double e1 = energy_storage(P, tr.states[w.last]);
  b.terms["storage_change"] = e1 - e0;
  double lhs = e1 - e0;
  for (auto f : {&StepRecord::f_ib, &StepRecord::eint_out, &StepRecord::delta_out, &StepRecord::delta_in_lhs}) {
    const double v = sum_field(tr, w, f);
    lhs += v;
    for (const auto& [name, field] : kRecordFields)
      if (field == f) b.terms[name] = v;
  }
  double rhs = 0.0;
  for (auto f : {&StepRecord::vol_conv, &StepRecord::vol_kin, &StepRecord::vol_visc, &StepRecord::vol_grav,
                 &StepRecord::vol_reg, &StepRecord::delta_in_rhs, &StepRecord::eps_corr,
                 &StepRecord::src_energy}) {
    const double v = sum_field(tr, w, f);
    rhs += v;
    for (const auto& [name, field] : kRecordFields)
      if (field == f) b.terms[name] = v;
  }
  b.residual = lhs - rhs;
  return b;
}

TermBreakdown entropy_budget(const Problem& P, const Trajectory& tr, Window w) {
  check_window(tr, w);
  TermBreakdown b;
  const double dS = total_entropy(P, tr.states[w.last]) - total_entropy(P, tr.states[w.first]);
  b.terms["storage_change"] = dS;
  double prod = dS;
  for (auto f : {&StepRecord::s_out, &StepRecord::s_in}) {
    const double v = sum_field(tr, w, f);
    prod += v;
    for (const auto& [name, field] : kRecordFields)
      if (field == f) b.terms[name] = v;
  }
  for (auto f : {&StepRecord::d_visc, &StepRecord::d_heat, &StepRecord::d_delta, &StepRecord::d_epsdelta,
                 &StepRecord::d_eps_theta, &StepRecord::d_eps_rho, &StepRecord::src_entropy}) {
    const double v = sum_field(tr, w, f);
    prod -= v;
    for (const auto& [name, field] : kRecordFields)
      if (field == f) b.terms[name] = v;
  }
  b.residual = prod;
  return b;
}

AprioriMonitor apriori_monitor(const Problem& P, const Trajectory& tr) {
  const SolverConfig& cfg = P.cfg;
  const double tb = cfg.theta_bar;
  AprioriMonitor m;
  auto& sup_energy = m.series["E15_sup_ballistic_energy"];
  auto& diss = m.series["E15_dissipation"];
  auto& inflow = m.series["E15_inflow_theta"];
  auto& outflow = m.series["E15_outflow_ballistic"];
  auto& d_m3 = m.series["E16_delta_theta_m3"];
  auto& e_t5 = m.series["E16_eps_theta5"];
  auto& d_bd = m.series["E16_delta_boundary"];
  auto& ed_r = m.series["E16_epsdelta_grad_rho"];
  double running = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    const FieldState& s = tr.states[k];
    m.times.push_back(s.t);
    running = std::max(running, energy_storage(P, s) - tb * total_entropy(P, s));
    sup_energy.push_back(running);
    const Window w{0, k};
    diss.push_back(tb * (sum_field(tr, w, &StepRecord::d_visc) + sum_field(tr, w, &StepRecord::d_heat)));
    inflow.push_back(sum_field(tr, w, &StepRecord::in_theta));
    outflow.push_back(sum_field(tr, w, &StepRecord::eint_out) - tb * sum_field(tr, w, &StepRecord::s_out));
    d_m3.push_back(cfg.delta * sum_field(tr, w, &StepRecord::int_theta_m3));
    e_t5.push_back(cfg.epsilon * sum_field(tr, w, &StepRecord::int_theta5));
    d_bd.push_back(cfg.delta * sum_field(tr, w, &StepRecord::bdry_delta));
    ed_r.push_back(cfg.epsilon * cfg.delta * sum_field(tr, w, &StepRecord::int_epsdelta_rho));
  }
  return m;
}

BudgetReport audit(const Problem& P, const Trajectory& tr, Window w, const BudgetTolerances& tol) {
  check_window(tr, w);
  BudgetReport r;
  r.t0 = tr.states[w.first].t;
  r.t1 = tr.states[w.last].t;
  r.steps = tr.state_step[w.last] - tr.state_step[w.first];
  r.mass_residual = mass_budget(P, tr, w);
  const TermBreakdown eb = energy_budget(P, tr, w);
  const TermBreakdown sb = entropy_budget(P, tr, w);
  r.energy_residual = eb.residual;
  r.entropy_production = sb.residual;
  r.energy_terms = eb.terms;
  r.entropy_terms = sb.terms;
  r.boundary_terms["gamma_in_mass_influx"] = sum_field(tr, w, &StepRecord::mass_in);
  r.boundary_terms["gamma_out_mass_efflux"] = sum_field(tr, w, &StepRecord::mass_out);
  r.boundary_terms["gamma_in_energy_influx"] = sum_field(tr, w, &StepRecord::f_ib);
  r.boundary_terms["gamma_out_eint_efflux"] = sum_field(tr, w, &StepRecord::eint_out);
  r.boundary_terms["gamma_out_entropy_efflux"] = sum_field(tr, w, &StepRecord::s_out);
  r.boundary_terms["gamma_in_entropy"] = sum_field(tr, w, &StepRecord::s_in);
  const AprioriMonitor m = apriori_monitor(P, tr);
  for (const auto& [name, series] : m.series) r.apriori[name] = series[w.last];

  const double mass_tol = tol.mass_per_step * static_cast<double>(std::max<std::size_t>(r.steps, 1));
  r.verdicts.push_back({"mass_identity", std::abs(r.mass_residual) <= mass_tol, r.mass_residual, mass_tol});
  double scale = 0.0;
  for (std::size_t k = w.first; k <= w.last; ++k) scale = std::max(scale, std::abs(energy_storage(P, tr.states[k])));
  const double energy_tol = tol.energy * scale;
  r.verdicts.push_back({"energy_inequality", r.energy_residual <= energy_tol, r.energy_residual, energy_tol});
  const double entropy_tol = tol.entropy * P.mesh.length() * (r.t1 - r.t0);
  r.verdicts.push_back(
      {"entropy_inequality", r.entropy_production >= -entropy_tol, r.entropy_production, entropy_tol});
  bool finite = true;
  for (const auto& [name, v] : r.apriori) finite = finite && std::isfinite(v);
  r.verdicts.push_back({"apriori_finite", finite, 0.0, 0.0});
  for (const auto& v : r.verdicts) r.pass = r.pass && v.pass;
  return r;
}

std::vector<BudgetRow> windowed_budgets(const Problem& P, const Trajectory& tr) {
  std::vector<BudgetRow> rows;
  for (std::size_t k = 1; k < tr.states.size(); ++k) {
    const Window w{k - 1, k};
    rows.push_back({tr.states[k - 1].t, tr.states[k].t, mass_budget(P, tr, w), energy_budget(P, tr, w).residual,
                    entropy_budget(P, tr, w).residual});
  }
  return rows;
}

GronwallFit gronwall_fit(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw Error(Errc::Misuse, "time and value series differ in length");
  GronwallFit fit;
  if (values.empty()) return fit;
  std::vector<double> t, y;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] > 0.0) {
      t.push_back(times[k]);
      y.push_back(std::log(values[k]));
    }
  }
  if (t.size() >= 2) fit.L = std::max(0.0, ls_slope(t, y));
  double env = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k)
    env = std::max(env, values[k] * std::exp(-fit.L * (times[k] - times[0])));
  fit.eta = std::max(0.0, env - values[0]);
  return fit;
}

FieldState average_to_coarse(const Problem& fine, const FieldState& s, const Mesh1D& coarse) {
  const Mesh1D& fm = fine.mesh;
  if (coarse.n_cells == 0 || fm.n_cells % coarse.n_cells != 0 || fm.x_left != coarse.x_left ||
      fm.x_right != coarse.x_right)
    throw Error(Errc::Misuse, fmt::format("fine mesh of {} cells does not nest a coarse mesh of {} cells",
                                          fm.n_cells, coarse.n_cells));
  const std::size_t k = fm.n_cells / coarse.n_cells;
  const double dl = fine.cfg.delta;
  FieldState out;
  out.t = s.t;
  for (std::size_t c = 0; c < coarse.n_cells; ++c) {
    std::vector<double> r(k), m(k), E(k);
    double tmin = std::numeric_limits<double>::infinity(), tmax = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t i = c * k + j;
      r[j] = s.rho[i];
      m[j] = s.rho[i] * s.u[i];
      E[j] = energy_density(fine.eos, s.rho[i], s.theta[i]) + dl * s.rho[i] * s.theta[i];
      tmin = std::min(tmin, s.theta[i]);
      tmax = std::max(tmax, s.theta[i]);
    }
    const double rho = pairwise_sum(r) / static_cast<double>(k);
    const double mom = pairwise_sum(m) / static_cast<double>(k);
    const double en = pairwise_sum(E) / static_cast<double>(k);
    out.rho.push_back(rho);
    out.u.push_back(mom / rho);
    out.theta.push_back(theta_from_energy(fine.eos, rho, en / rho, dl, 0.5 * tmin, 2.0 * tmax,
                                          std::sqrt(tmin * tmax)));
  }
  return out;
}

WeakStrongResult weak_strong_trace(const Problem& coarse, const Trajectory& coarse_run, const Problem& fine,
                                   const Trajectory& fine_run) {
  if (coarse_run.states.size() != fine_run.states.size())
    throw Error(Errc::Misuse, "coarse and fine runs have different output schedules");
  WeakStrongResult res;
  res.trace.reference_label = fmt::format("cell-averaged {}-cell run", fine.mesh.n_cells);
  for (std::size_t k = 0; k < coarse_run.states.size(); ++k) {
    const FieldState& cs = coarse_run.states[k];
    if (std::abs(cs.t - fine_run.states[k].t) > 1e-12 * std::max(1.0, cs.t))
      throw Error(Errc::Misuse, fmt::format("output times differ at index {}", k));
    const FieldState ref = fine.mesh.n_cells == coarse.mesh.n_cells
                               ? fine_run.states[k]
                               : average_to_coarse(fine, fine_run.states[k], coarse.mesh);
    const RelEnergySample e = relative_energy_integral(coarse.eos, cs, ref, coarse.mesh);
    res.trace.times.push_back(cs.t);
    res.trace.integrals.push_back(e.value);
    res.trace.kinetic.push_back(e.kinetic_part);
    res.trace.bregman.push_back(e.bregman_part);
  }
  res.fit = gronwall_fit(res.trace.times, res.trace.integrals);
  return res;
}

}  // namespace nsf
