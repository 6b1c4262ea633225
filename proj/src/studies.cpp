#include "nsf/studies.hpp"

#include <cmath>
#include <future>

#include <fmt/format.h>

#include "nsf/errors.hpp"
#include "nsf/numerics.hpp"

namespace nsf {

namespace {

struct LevelResult {
  double dt = 0.0;
  FieldErrors err;
  double energy = 0.0;
};

LevelResult run_level(const MmsCase& c, std::size_t n, const ConvergenceOptions& opt) {
  Problem P = mms_problem(c, n);
  P.cfg.dt_fixed = opt.dt_over_h * P.mesh.h();
  const FieldState s0 = mms_exact(c, P.mesh, 0.0);
  const Trajectory tr = run(P, s0, {opt.t_end});
  if (tr.aborted)
    throw Error(Errc::Numeric, fmt::format("{} run on {} cells aborted: {}", to_string(c.kind), n, tr.abort_reason));
  LevelResult r;
  r.dt = P.cfg.dt_fixed;
  r.err = l1_errors(P.mesh, tr.states.back(), mms_exact(c, P.mesh, opt.t_end));
  r.energy = energy_budget(P, tr, full_window(tr)).residual;
  return r;
}

double order_of(const std::vector<double>& h, const std::vector<double>& e) {
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < h.size(); ++k) {
    lx.push_back(std::log(h[k]));
    ly.push_back(std::log(std::abs(e[k])));
  }
  return ls_slope(lx, ly);
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(std::abs(v[k]) < std::abs(v[k - 1]))) return false;
  return true;
}

std::vector<double> sample_init(const FieldInit& f, const Mesh1D& mesh) {
  const Expr& e = std::get<Expr>(f);
  std::vector<double> out(mesh.n_cells);
  for (std::size_t i = 0; i < mesh.n_cells; ++i) out[i] = e(mesh.center(i));
  return out;
}

}  // namespace

FieldErrors l1_errors(const Mesh1D& mesh, const FieldState& a, const FieldState& b) {
  std::vector<double> er(a.size()), eu(a.size()), et(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    er[i] = std::abs(a.rho[i] - b.rho[i]);
    eu[i] = std::abs(a.u[i] - b.u[i]);
    et[i] = std::abs(a.theta[i] - b.theta[i]);
  }
  return {mesh.h() * pairwise_sum(er), mesh.h() * pairwise_sum(eu), mesh.h() * pairwise_sum(et)};
}

ConvergenceResult convergence_study(const MmsCase& c, const std::vector<std::size_t>& resolutions,
                                    const ConvergenceOptions& opt) {
  if (resolutions.size() < 3) throw Error(Errc::Misuse, "a convergence study needs at least three resolutions");
  for (std::size_t k = 1; k < resolutions.size(); ++k)
    if (resolutions[k] != 2 * resolutions[k - 1])
      throw Error(Errc::Misuse, "resolutions must refine by a factor of 2");
  ConvergenceResult res;
  res.kind = c.kind;
  res.resolutions = resolutions;
  res.probe_residuals = {mms_residual_probe(c, 0.0), mms_residual_probe(c, opt.t_end)};

  std::vector<std::future<LevelResult>> jobs;
  for (std::size_t n : resolutions) jobs.push_back(std::async(std::launch::async, run_level, std::cref(c), n, opt));
  std::vector<double> h, er, eu, et;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const LevelResult r = jobs[k].get();
    res.dts.push_back(r.dt);
    res.errors.push_back(r.err);
    res.energy_residuals.push_back(r.energy);
    h.push_back((c.x_right - c.x_left) / static_cast<double>(resolutions[k]));
    er.push_back(r.err.rho);
    eu.push_back(r.err.u);
    et.push_back(r.err.theta);
  }
  res.orders = {order_of(h, er), order_of(h, eu), order_of(h, et)};
  res.energy_order = order_of(h, res.energy_residuals);
  if (!strictly_decreasing(er)) res.flags.push_back("rho error is not monotone under refinement");
  if (!strictly_decreasing(eu)) res.flags.push_back("u error is not monotone under refinement");
  if (!strictly_decreasing(et)) res.flags.push_back("theta error is not monotone under refinement");
  if (!strictly_decreasing(res.energy_residuals))
    res.flags.push_back("energy residual is not monotone under refinement");
  return res;
}

WeakStrongStudy weak_strong_study(const Scenario& sc, const WeakStrongOptions& opt) {
  if (!sc.admissibility.pass)
    throw Error(Errc::Misuse, "inflow data fail the admissibility check; the weak-strong experiment is refused");
  if (!std::holds_alternative<Expr>(sc.rho0) || !std::holds_alternative<Expr>(sc.u0) ||
      !std::holds_alternative<Expr>(sc.theta0))
    throw Error(Errc::Misuse, "the weak-strong study needs initial data given as expressions");
  if (opt.refine < 4) throw Error(Errc::Misuse, "the reference must be at least 4 times finer");
  const std::vector<double> times = output_schedule(opt.t_end, {}, opt.every);

  auto one = [&](std::size_t n) {
    Problem coarse = sc.problem;
    coarse.mesh.n_cells = n;
    coarse.cfg.t_end = opt.t_end;
    Problem fine = coarse;
    fine.mesh.n_cells = n * opt.refine;
    FieldState f0;
    f0.rho = sample_init(sc.rho0, fine.mesh);
    f0.u = sample_init(sc.u0, fine.mesh);
    f0.theta = sample_init(sc.theta0, fine.mesh);
    const FieldState c0 = average_to_coarse(fine, f0, coarse.mesh);
    const Trajectory ft = run(fine, f0, times);
    const Trajectory ct = run(coarse, c0, times);
    if (ft.aborted) throw Error(Errc::Numeric, fmt::format("reference run on {} cells aborted: {}", fine.mesh.n_cells, ft.abort_reason));
    if (ct.aborted) throw Error(Errc::Numeric, fmt::format("run on {} cells aborted: {}", n, ct.abort_reason));
    return weak_strong_trace(coarse, ct, fine, ft);
  };
  std::vector<std::future<WeakStrongResult>> jobs;
  for (std::size_t n : opt.coarse) jobs.push_back(std::async(std::launch::async, one, n));
  WeakStrongStudy st;
  st.coarse = opt.coarse;
  for (auto& j : jobs) st.results.push_back(j.get());
  st.rates_nonnegative = true;
  std::vector<double> etas;
  for (const auto& r : st.results) {
    st.final_values.push_back(r.trace.integrals.back());
    st.rates_nonnegative = st.rates_nonnegative && r.fit.L >= 0.0;
    etas.push_back(r.fit.eta);
  }
  st.decreasing = strictly_decreasing(st.final_values);
  st.eta_decreasing = true;
  for (std::size_t k = 1; k < etas.size(); ++k) st.eta_decreasing = st.eta_decreasing && etas[k] <= etas[k - 1];
  return st;
}

}  // namespace nsf
