#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "nsf/boundary.hpp"
#include "nsf/budgets.hpp"
#include "nsf/eos_io.hpp"
#include "nsf/errors.hpp"
#include "nsf/harness.hpp"
#include "nsf/relent.hpp"
#include "nsf/studies.hpp"

using namespace nsf;

namespace {

const std::string kRoot = NSF_SOURCE_DIR;
const char* kScenarios[] = {"closed_box_heat", "acoustic_box", "throughflow", "reversed_flow", "table_throughflow"};
const double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t seed() {
  const char* s = std::getenv("NSF_SEED");
  return s ? std::strtoull(s, nullptr, 10) : 20240611ULL;
}

EosSpec iconic() { return make_iconic(1.0, 1.0); }
EosSpec table() { return load_eos_document(kRoot + "/data/eos_table.json").eos; }

Scenario scenario(const std::string& name) { return load_scenario(kRoot + "/scenarios/" + name + ".json"); }

Outcome eos_consistency(std::mt19937_64& rng) {
  const auto t0 = Clock::now();
  std::uniform_real_distribution<double> U(0.1, 10.0);
  double worst = 0.0;
  for (const EosSpec& e : {iconic(), table()}) {
    for (int k = 0; k < 10000; ++k) {
      const auto [a, b] = gibbs_residual(e, U(rng), U(rng));
      worst = std::max({worst, std::abs(a), std::abs(b)});
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-10 && secs < 5.0,
          fmt::format("max |Gibbs residual| = {:.2e} over 2x10^4 states, {:.2f} s", worst, secs)};
}

Outcome convexity(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> L(std::log(0.05), std::log(20.0));
  int violations = 0;
  double worst = -kInf;
  for (const EosSpec& e : {iconic(), table()}) {
    for (int k = 0; k < 10000; ++k) {
      const double r1 = std::exp(L(rng)), r2 = std::exp(L(rng));
      const double S1 = entropy_density(e, r1, std::exp(L(rng))), S2 = entropy_density(e, r2, std::exp(L(rng)));
      const double E1 = extended_internal_energy(e, r1, S1), E2 = extended_internal_energy(e, r2, S2);
      const double Em = extended_internal_energy(e, 0.5 * (r1 + r2), 0.5 * (S1 + S2));
      const double gap = Em - 0.5 * (E1 + E2);
      const double tol = 1e-9 * std::max(1.0, 0.5 * (E1 + E2));
      worst = std::max(worst, gap / std::max(1.0, 0.5 * (E1 + E2)));
      if (!(gap <= tol)) ++violations;
    }
  }
  // domain boundary and the values at rho = 0
  const EosSpec third = table(), plain = iconic();
  const double rad = 1.0;  // a (3S / 4a)^{4/3} at S = 4/3, a = 1
  bool edges = third.third_law && !plain.third_law;
  edges = edges && extended_internal_energy(third, 0.0, 0.0) == 0.0;
  edges = edges && extended_internal_energy(third, 1.0, -1.0) == kInf;
  edges = edges && extended_internal_energy(third, 0.0, -1.0) == kInf;
  edges = edges && extended_internal_energy(third, -1.0, 1.0) == kInf;
  edges = edges && std::abs(extended_internal_energy(third, 0.0, 4.0 / 3.0) - rad) < 1e-12;
  edges = edges && extended_internal_energy(plain, -1.0, 1.0) == kInf;
  edges = edges && std::abs(extended_internal_energy(plain, 0.0, 4.0 / 3.0) - rad) < 1e-12;
  edges = edges && extended_internal_energy(plain, 0.0, -2.0) == 0.0;
  // rho = 0 values agree with the limit rho -> 0+ in both modes
  double lim_err = 0.0;
  for (const EosSpec* e : {&third, &plain})
    for (double S : {0.1, 4.0 / 3.0, 5.0}) {
      const double v0 = extended_internal_energy(*e, 0.0, S);
      const double vr = extended_internal_energy(*e, 1e-9, S);
      lim_err = std::max(lim_err, std::abs(vr - v0) / v0);
    }
  edges = edges && lim_err < 1e-4;
  return {violations == 0 && edges,
          fmt::format("{} violations in 2x10^4 midpoint tests (max relative gap {:.2e}); boundary values {}, "
                      "rho -> 0 limit error {:.1e}",
                      violations, worst, edges ? "ok" : "wrong", lim_err)};
}

Outcome bregman(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.1, 5.0), V(-2.0, 2.0);
  double worst = 0.0, worst3 = 0.0;
  for (const EosSpec& e : {iconic(), table()}) {
    for (int k = 0; k < 1000; ++k) {
      const ThermoState a{U(rng), V(rng), U(rng)}, b{U(rng), V(rng), U(rng)}, c{U(rng), V(rng), U(rng)};
      const double s = relative_energy_standard(e, a, b).value;
      const auto ca = to_conservative(e, a), cb = to_conservative(e, b), cc = to_conservative(e, c);
      const double q = relative_energy_conservative(e, ca, cb).value;
      worst = std::max(worst, std::abs(s - q) / std::max(1.0, std::abs(s)));
      const auto gb = total_energy_gradient(e, cb), gc = total_energy_gradient(e, cc);
      const double cross = (gb.d_rho - gc.d_rho) * (ca.rho - cb.rho) + (gb.d_m - gc.d_m) * (ca.m - cb.m) +
                           (gb.d_S - gc.d_S) * (ca.S - cb.S);
      const double lhs = relative_energy_conservative(e, ca, cc).value;
      const double rhs = q + relative_energy_conservative(e, cb, cc).value + cross;
      worst3 = std::max(worst3, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
  }
  return {worst <= 1e-9 && worst3 <= 1e-9,
          fmt::format("max relative gap {:.2e}; three-point identity {:.2e}", worst, worst3)};
}

Outcome ballistic(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.1, 10.0), O(0.0, 1.0);
  double worst = 0.0;
  for (const EosSpec& e : {iconic(), table()}) {
    for (int k = 0; k < 1000; ++k) {
      const double rb = U(rng), th = U(rng), off = O(rng);
      double best = kInf, arg = 0.0;
      // grid offset so that theta itself is generally not a node
      for (int j = 0; j < 10000; ++j) {
        const double tt = th * (0.5 + 1e-4 * (j + off));
        const double f = ballistic_free_energy(e, rb, tt, th);
        if (f < best) {
          best = f;
          arg = tt;
        }
      }
      worst = std::max(worst, std::abs(arg / th - 1.0));
    }
  }
  return {worst <= 1e-4 + 1e-12, fmt::format("max |argmin / theta - 1| = {:.1e} on a 10^4-point grid", worst)};
}

Outcome admissibility() {
  const EosSpec e = iconic();
  auto rep = [&](double rho_b, double F) {
    BoundaryFace l, r;
    l.u_b = r.u_b = 1.0;
    l.rho_b = rho_b;
    l.F_ib = F;
    return admissibility_check(e, make_boundary(Mesh1D{}, l, r));
  };
  std::vector<std::string> bad;
  const auto a = rep(1.0, -2.0);
  if (!(a.pass && a.faces[0].margin == -0.5)) bad.push_back("F_ib=-2 PASS");
  const auto b = rep(1.0, -1.0);
  if (!(!b.pass && b.faces[0].margin == 0.5)) bad.push_back("F_ib=-1 FAIL");
  const auto c = rep(1.0, 1.0);
  if (c.pass || c.faces[0].flux_negative) bad.push_back("F_ib=+1 FAIL");
  const auto d = rep(1.0, -1.5);
  if (d.pass || d.faces[0].F_tau != 0.0) bad.push_back("borderline FAIL");
  const auto split = cold_heat_flux_split(e, 1.0, -1.0, -2.0);
  if (!(split.first == -1.5 && split.second == 0.5)) bad.push_back("cold/heat split");
  auto rejected_with = [&](const char* file, const char* label) {
    try {
      load_scenario(kRoot + "/tests/data/" + file);
    } catch (const Error& err) {
      return std::string(err.what()).find(label) != std::string::npos;
    }
    return false;
  };
  if (!rejected_with("bad_ws14bis.json", "ws14bis")) bad.push_back("scenario ws14bis");
  if (!rejected_with("bad_rho_b.json", "E1")) bad.push_back("scenario E1");
  if (!rejected_with("borderline.json", "ws14bis")) bad.push_back("scenario borderline");
  std::string detail = "margins -0.5/+0.5, ws12 and borderline verdicts, scenario rejections";
  for (const auto& s : bad) detail += "; wrong: " + s;
  return {bad.empty(), detail};
}

Outcome mass_identity() {
  double worst = 0.0, slowest = 0.0;
  std::size_t largest = 0;
  std::vector<std::string> failures;
  for (const char* name : kScenarios) {
    const Scenario sc = scenario(name);
    const auto t0 = Clock::now();
    const Trajectory tr = run(sc.problem, initial_state(sc).state, sc.output_times, true);
    const double secs = seconds_since(t0);
    if (tr.aborted) failures.push_back(fmt::format("{} aborted: {}", name, tr.abort_reason));
    for (const auto& row : windowed_budgets(sc.problem, tr)) worst = std::max(worst, std::abs(row.mass_res));
    slowest = std::max(slowest, secs);
    largest = std::max(largest, sc.problem.mesh.n_cells);
    if (secs >= 30.0) failures.push_back(fmt::format("{} took {:.1f} s", name, secs));
  }
  std::string detail = fmt::format("max per-step residual {:.2e} over {} scenarios, n <= {}, slowest {:.1f} s",
                                   worst, std::size(kScenarios), largest, slowest);
  for (const auto& f : failures) detail += "; " + f;
  return {failures.empty() && worst <= 1e-11 && largest <= 256, detail};
}

Outcome entropy_inequality() {
  double worst = kInf;
  std::vector<std::string> failures;
  for (const char* name : kScenarios) {
    for (double reg : {0.0, 1e-3}) {
      Scenario sc = scenario(name);
      Problem& P = sc.problem;
      P.cfg.epsilon = P.cfg.delta = reg;
      const Trajectory tr = run(P, initial_state(sc).state, sc.output_times);
      if (tr.aborted) {
        failures.push_back(fmt::format("{} aborted", name));
        continue;
      }
      for (const auto& row : windowed_budgets(P, tr)) {
        const double tol = 1e-8 * P.mesh.length() * (row.t1 - row.t0);
        worst = std::min(worst, row.entropy_prod / (P.mesh.length() * (row.t1 - row.t0)));
        if (row.entropy_prod < -tol)
          failures.push_back(fmt::format("{} (eps = delta = {}) window [{}, {}]: {:.3e}", name, reg, row.t0,
                                         row.t1, row.entropy_prod));
      }
      const double total = entropy_budget(P, tr, full_window(tr)).residual;
      if (total < -1e-8 * P.mesh.length() * P.cfg.t_end)
        failures.push_back(fmt::format("{} (eps = delta = {}) total {:.3e}", name, reg, total));
    }
  }
  std::string detail =
      fmt::format("min scaled production {:.3e} over {} runs and all output windows", worst, 2 * std::size(kScenarios));
  for (const auto& f : failures) detail += "; " + f;
  return {failures.empty(), detail};
}

ConvergenceResult g_mms;

Outcome energy_order() {
  const auto& r = g_mms;
  std::string levels;
  for (std::size_t k = 0; k < r.resolutions.size(); ++k)
    levels += fmt::format("{}n={}: {:.3e}", k ? ", " : "", r.resolutions[k], r.energy_residuals[k]);
  return {r.energy_order >= 1.0, fmt::format("observed order {:.2f} ({})", r.energy_order, levels)};
}

Outcome mms_convergence(double secs) {
  const auto& r = g_mms;
  bool ok = secs < 120.0;
  for (double o : {r.orders.rho, r.orders.u, r.orders.theta}) ok = ok && o >= 0.8 && o <= 1.5;
  for (double p : r.probe_residuals) ok = ok && p < 1e-6;
  std::string detail = fmt::format("orders rho {:.3f}, u {:.3f}, theta {:.3f}; {:.1f} s", r.orders.rho,
                                   r.orders.u, r.orders.theta, secs);
  for (const auto& f : r.flags) detail += "; flag: " + f;
  return {ok, detail};
}

Outcome comparison(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int broken = 0;
  double lo_seen = kInf, hi_seen = 0.0;
  bool bounded = true;
  for (int pair = 0; pair < 100; ++pair) {
    Problem P;
    P.mesh = Mesh1D{0.0, 1.0, 16 + static_cast<std::size_t>(U(rng) * 48.0)};
    P.eos = pair % 2 ? iconic() : table();
    BoundaryFace l, r;
    l.wall = r.wall = true;
    P.boundary = make_boundary(P.mesh, l, r);
    P.cfg.dt_policy = DtPolicy::Hyperbolic;
    const std::size_t n = P.mesh.n_cells;
    FieldState sub{0.0, std::vector<double>(n), std::vector<double>(n, 0.0), std::vector<double>(n)};
    FieldState sup = sub;
    const double k1 = 1.0 + 4.0 * U(rng), ph = 6.283 * U(rng);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = P.mesh.center(i);
      sub.rho[i] = sup.rho[i] = 0.5 + U(rng);
      sub.theta[i] = 0.5 + U(rng) + 0.3 * std::sin(k1 * x + ph);
      sup.theta[i] = sub.theta[i] + 0.5 * U(rng);
    }
    const double th_min = *std::min_element(sub.theta.begin(), sub.theta.end());
    const double th_max = *std::max_element(sup.theta.begin(), sup.theta.end());
    const double dt = 0.5 * P.mesh.h();
    for (int s = 0; s < 200; ++s) {
      sub = temperature_subproblem_step(P, sub, dt);
      sup = temperature_subproblem_step(P, sup, dt);
      for (std::size_t i = 0; i < n; ++i) {
        if (sub.theta[i] > sup.theta[i]) ++broken;
        lo_seen = std::min(lo_seen, sub.theta[i]);
        hi_seen = std::max(hi_seen, sup.theta[i]);
        if (sub.theta[i] < th_min - 1e-12 || sup.theta[i] > th_max + 1e-12 ||
            sub.theta[i] < P.cfg.theta_floor || sup.theta[i] > 1.0 / P.cfg.theta_floor)
          bounded = false;
      }
    }
  }
  return {broken == 0 && bounded,
          fmt::format("{} ordering violations over 100 pairs x 200 steps; theta in [{:.3f}, {:.3f}], bounds {}",
                      broken, lo_seen, hi_seen, bounded ? "held" : "violated")};
}

Outcome weak_strong() {
  const Scenario sc = scenario("throughflow");
  WeakStrongOptions opt;
  opt.coarse = {32, 64, 128};
  opt.t_end = 0.25;
  const auto st = weak_strong_study(sc, opt);
  std::string vals;
  for (std::size_t k = 0; k < st.coarse.size(); ++k)
    vals += fmt::format("{}n={}: E={:.3e} L={:.2f}", k ? ", " : "", st.coarse[k], st.final_values[k],
                        st.results[k].fit.L);
  return {st.decreasing && st.rates_nonnegative, vals};
}

}  // namespace

int main() {
  std::mt19937_64 rng(seed());
  int failed = 0;
  auto report = [&](const char* name, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  };

  report("eos_gibbs_consistency", [&] { return eos_consistency(rng); });
  report("internal_energy_convexity", [&] { return convexity(rng); });
  report("bregman_equivalence", [&] { return bregman(rng); });
  report("ballistic_free_energy_minimum", [&] { return ballistic(rng); });
  report("admissibility_gate", [] { return admissibility(); });
  report("discrete_mass_identity", [] { return mass_identity(); });
  report("entropy_inequality", [] { return entropy_inequality(); });

  double mms_secs = 0.0;
  bool mms_ok = true;
  try {
    const auto t0 = Clock::now();
    g_mms = convergence_study(manufactured_case(MmsKind::ThermalRelaxation), {32, 64, 128});
    mms_secs = seconds_since(t0);
  } catch (const std::exception& e) {
    std::printf("FAIL  energy_budget_order: error: %s\n", e.what());
    std::printf("FAIL  mms_convergence: error: %s\n", e.what());
    failed += 2;
    mms_ok = false;
  }
  if (mms_ok) report("energy_budget_order", [] { return energy_order(); });
  report("comparison_principle", [&] { return comparison(rng); });
  report("weak_strong_stability", [] { return weak_strong(); });
  if (mms_ok) report("mms_convergence", [&] { return mms_convergence(mms_secs); });

  std::printf("%d of 11 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
