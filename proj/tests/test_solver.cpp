#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "nsf/budgets.hpp"
#include "nsf/errors.hpp"
#include "nsf/solver.hpp"

using namespace nsf;
using doctest::Approx;

namespace {

Problem closed_box(std::size_t n, double a = 1.0) {
  Problem P;
  P.mesh = Mesh1D{0.0, 1.0, n};
  P.eos = make_iconic(a, 1.0);
  BoundaryFace l, r;
  l.wall = r.wall = true;
  P.boundary = make_boundary(P.mesh, l, r);
  P.cfg.dt_policy = DtPolicy::Hyperbolic;
  return P;
}

Problem channel(std::size_t n, double u_b, double rho_b, double F_ib) {
  Problem P = closed_box(n);
  BoundaryFace l, r;
  l.u_b = r.u_b = u_b;
  l.rho_b = rho_b;
  l.F_ib = F_ib;
  P.boundary = make_boundary(P.mesh, l, r);
  return P;
}

FieldState uniform(std::size_t n, double rho, double u, double theta) {
  return FieldState{0.0, std::vector<double>(n, rho), std::vector<double>(n, u), std::vector<double>(n, theta)};
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("viscous stress") {
  TransportSpec ts;
  ts.mu0 = 0.5;
  ts.lambda_exp = 0.5;  // mu(1) = 1
  SolverConfig cfg;
  CHECK(viscous_stress(ts, cfg, 1.0, 1.0) == Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(viscous_stress(ts, cfg, 1.0, 0.0) == 0.0);
  cfg.d = 2;
  ts.eta0 = 0.5;  // eta(1) = 1
  CHECK(viscous_stress(ts, cfg, 1.0, 1.0) == Approx(2.0).epsilon(1e-14));
}

TEST_CASE("heat flux") {
  TransportSpec ts;
  SolverConfig cfg;
  CHECK(heat_flux(ts, cfg, 1.0, 1.0) == Approx(-2.0).epsilon(1e-14));
  CHECK(heat_flux(ts, cfg, 1.0, 0.0) == 0.0);
  cfg.delta = 1.0;
  cfg.Gamma = 3.0;
  CHECK(heat_flux(ts, cfg, 1.0, 1.0) == Approx(-4.0).epsilon(1e-14));
}

TEST_CASE("kirchhoff potential differentiates to the conductivity") {
  TransportSpec ts;
  SolverConfig cfg;
  cfg.delta = 0.1;
  for (double t : {0.3, 1.0, 2.5}) {
    const double h = 1e-5 * t;
    const double dk = (kirchhoff(ts, cfg, t + h) - kirchhoff(ts, cfg, t - h)) / (2.0 * h);
    CHECK(dk == Approx(-heat_flux(ts, cfg, t, 1.0)).epsilon(1e-8));
  }
}

TEST_CASE("convective fluxes") {
  Problem P = channel(4, 1.0, 2.0, -10.0);
  FieldState s = uniform(4, 1.0, 1.0, 1.0);
  s.rho = {1.0, 2.0, 3.0, 4.0};
  const FaceFluxes f = convective_fluxes(P, s);
  REQUIRE(f.mass.size() == 5);
  CHECK(f.mass[0] == Approx(2.0));  // rho_b u_b, outward flux 2 u_b.n = -2
  CHECK(f.mass[2] == Approx(2.0));  // upwind: left cell
  CHECK(f.mass[4] == Approx(4.0));

  Problem box = closed_box(6);
  const FaceFluxes g = convective_fluxes(box, uniform(6, 1.3, 0.0, 0.8));
  for (double v : g.mass) CHECK(v == 0.0);
  for (std::size_t k = 1; k < g.momentum.size(); ++k) CHECK(g.momentum[k] == g.momentum[0]);
}

TEST_CASE("continuity step") {
  Problem P = closed_box(16);
  FieldState s = uniform(16, 1.7, 0.0, 1.0);
  CHECK(max_diff(continuity_step(P, s, 0.01), s.rho) <= 1e-15);

  Problem C = channel(16, 0.5, 1.2, -10.0);
  C.cfg.epsilon = 0.1;
  FieldState t = uniform(16, 1.2, 0.5, 1.0);
  CHECK(max_diff(continuity_step(C, t, 0.01), t.rho) <= 1e-14);

  // mass changes by the net boundary flux
  C.cfg.epsilon = 0.0;
  FieldState v = uniform(16, 1.0, 0.5, 1.0);
  const auto r = continuity_step(C, v, 0.01);
  double dm = 0.0;
  for (std::size_t i = 0; i < 16; ++i) dm += (r[i] - v.rho[i]) * C.mesh.h();
  CHECK(dm == Approx(0.01 * (1.2 * 0.5 - r.back() * 0.5)).epsilon(1e-10));
}

TEST_CASE("momentum step") {
  Problem P = closed_box(16);
  FieldState s = uniform(16, 1.0, 0.0, 1.0);
  const auto u = momentum_step(P, s, s.rho, s.theta, 0.01);
  CHECK(max_diff(u, s.u) == 0.0);
  P.cfg.delta = 0.5;
  CHECK(max_diff(momentum_step(P, s, s.rho, s.theta, 0.01), s.u) == 0.0);
  P.cfg.g = -1.0;
  const auto ug = momentum_step(P, s, s.rho, s.theta, 0.01);
  CHECK(ug[8] < 0.0);
}

TEST_CASE("internal energy step") {
  Problem P = closed_box(32);
  FieldState s = uniform(32, 1.0, 0.0, 1.0);
  for (std::size_t i = 0; i < 32; ++i) s.theta[i] = 1.0 + 0.3 * std::sin(3.0 * P.mesh.center(i));
  auto total = [&](const std::vector<double>& th) {
    double E = 0.0;
    for (std::size_t i = 0; i < 32; ++i) E += energy_density(P.eos, s.rho[i], th[i]) * P.mesh.h();
    return E;
  };
  const auto th = internal_energy_step(P, s, s.rho, 0.01);
  CHECK(std::abs(total(th) - total(s.theta)) < 1e-12);
  CHECK(*std::max_element(th.begin(), th.end()) <= *std::max_element(s.theta.begin(), s.theta.end()));

  // delta / theta^2 source on a uniform state
  Problem D = closed_box(8);
  D.cfg.delta = 0.2;
  FieldState u = uniform(8, 1.0, 0.0, 1.0);
  const double dt = 1e-5;
  const auto t1 = internal_energy_step(D, u, u.rho, dt);
  const double gain = energy_density(D.eos, 1.0, t1[3]) + 0.2 * t1[3] - energy_density(D.eos, 1.0, 1.0) - 0.2;
  CHECK(gain == Approx(0.2 * dt).epsilon(1e-4));

  // uniform compression u = -x: rho e grows by (rho e + p) per unit time
  Problem Q = closed_box(32, 1.0);
  Q.transport.mu0 = 0.0;
  BoundaryFace l, r;
  l.wall = true;
  r.u_b = -1.0;
  r.rho_b = 1.0;
  r.F_ib = -10.0;
  Q.boundary = make_boundary(Q.mesh, l, r);
  FieldState c = uniform(32, 1.0, 0.0, 1.0);
  for (std::size_t i = 0; i < 32; ++i) c.u[i] = -Q.mesh.center(i);
  const auto tc = internal_energy_step(Q, c, c.rho, dt);
  const double rate = (energy_density(Q.eos, 1.0, tc[16]) - energy_density(Q.eos, 1.0, 1.0)) / dt;
  CHECK(rate == Approx(energy_density(Q.eos, 1.0, 1.0) + pressure(Q.eos, 1.0, 1.0)).epsilon(1e-3));
}

TEST_CASE("stable time step") {
  Problem P = closed_box(32, 0.0);
  P.transport.mu0 = 0.0;
  P.transport.kappa0 = 0.0;
  P.cfg.dt_policy = DtPolicy::Full;
  FieldState s = uniform(32, 1.0, 0.0, 1.0);
  CHECK(stable_dt(P, s) == Approx(P.cfg.cfl * P.mesh.h() / std::sqrt(10.0 / 3.0)).epsilon(1e-12));

  Problem H = closed_box(32);
  H.transport.kappa0 = 100.0;
  H.cfg.dt_policy = DtPolicy::Full;
  Problem H2 = H;
  H2.mesh.n_cells = 64;
  H2.boundary = make_boundary(H2.mesh, H.boundary.faces[0], H.boundary.faces[1]);
  const double r = stable_dt(H, s) / stable_dt(H2, uniform(64, 1.0, 0.0, 1.0));
  CHECK(r == Approx(4.0).epsilon(1e-12));
}

TEST_CASE("rest equilibrium is a fixed point") {
  Problem P = closed_box(32);
  FieldState s = uniform(32, 1.0, 0.0, 1.0);
  const StepResult r = step(P, s, 0.01);
  CHECK(max_diff(r.state.rho, s.rho) <= 1e-13);
  CHECK(max_diff(r.state.u, s.u) <= 1e-13);
  CHECK(max_diff(r.state.theta, s.theta) <= 1e-13);
  CHECK(r.state.t == Approx(0.01));

  P.cfg.t_end = 1.0;
  const Trajectory tr = run(P, s, {1.0});
  REQUIRE_FALSE(tr.aborted);
  CHECK(max_diff(tr.states.back().theta, s.theta) <= 1e-10);
  CHECK(max_diff(tr.states.back().u, s.u) <= 1e-10);
  CHECK(max_diff(tr.states.back().rho, s.rho) <= 1e-10);
}

TEST_CASE("t_end = 0 keeps only the initial state") {
  Problem P = closed_box(8);
  const FieldState s = uniform(8, 1.0, 0.0, 1.0);
  const Trajectory tr = run(P, s, {0.0});
  REQUIRE(tr.states.size() == 1);
  CHECK(tr.steps.empty());
  CHECK(tr.states[0].theta == s.theta);
}

TEST_CASE("outputs land on the requested times") {
  Problem P = closed_box(16);
  FieldState s = uniform(16, 1.0, 0.0, 1.0);
  for (std::size_t i = 0; i < 16; ++i) s.theta[i] = 1.0 + 0.2 * std::cos(3.14159 * P.mesh.center(i));
  const Trajectory tr = run(P, s, {0.05, 0.02, 0.1});
  REQUIRE(tr.states.size() == 4);
  CHECK(tr.states[1].t == Approx(0.02).epsilon(1e-14));
  CHECK(tr.states[3].t == Approx(0.1).epsilon(1e-14));
  const Trajectory every = run(P, s, {0.02}, true);
  CHECK(every.states.size() == every.steps.size() + 1);
}

TEST_CASE("rejections end in an abort") {
  Problem P = closed_box(16);
  P.cfg.rho_floor = 1.0 - 1e-7;
  P.cfg.dt_fixed = 1.0;
  FieldState s = uniform(16, 1.0, 0.0, 1.0);
  for (std::size_t i = 0; i < 16; ++i) s.u[i] = P.mesh.center(i) - 0.5;
  CHECK_THROWS_AS(step(P, s, 1.0), Error);
  const Trajectory tr = run(P, s, {1.0});
  CHECK(tr.aborted);
  CHECK(tr.abort_reason.find("rejected") != std::string::npos);
  CHECK(tr.states.size() == 1);
}

TEST_CASE("mismatched state arrays are misuse") {
  Problem P = closed_box(8);
  try {
    step(P, uniform(4, 1.0, 0.0, 1.0), 0.01);
    FAIL("expected misuse");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Misuse);
  }
}

TEST_CASE("temperature subproblem") {
  Problem P = closed_box(32);
  const FieldState flat = uniform(32, 1.0, 0.0, 1.4);
  const FieldState f1 = temperature_subproblem_step(P, flat, 0.01);
  CHECK(max_diff(f1.theta, flat.theta) <= 1e-13);
  CHECK(f1.rho == flat.rho);
  CHECK(f1.u == flat.u);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.5, 2.0), D(0.0, 0.5);
  FieldState lo = uniform(32, 1.0, 0.0, 1.0), hi = lo;
  for (std::size_t i = 0; i < 32; ++i) {
    lo.theta[i] = U(rng);
    hi.theta[i] = lo.theta[i] + D(rng);
  }
  for (int k = 0; k < 50; ++k) {
    lo = temperature_subproblem_step(P, lo, 0.005);
    hi = temperature_subproblem_step(P, hi, 0.005);
    for (std::size_t i = 0; i < 32; ++i) REQUIRE(lo.theta[i] <= hi.theta[i]);
  }
}

TEST_CASE("records telescope into the mass identity") {
  Problem P = channel(32, 0.5, 1.0, -2.0);
  FieldState s = uniform(32, 1.0, 0.5, 1.0);
  for (std::size_t i = 0; i < 32; ++i) s.theta[i] = 1.0 + 0.1 * std::sin(3.14159 * P.mesh.center(i));
  const Trajectory tr = run(P, s, {0.1}, true);
  REQUIRE_FALSE(tr.aborted);
  double m0 = total_mass(P.mesh, tr.states.front());
  for (std::size_t k = 0; k < tr.steps.size(); ++k) {
    const double m1 = total_mass(P.mesh, tr.states[k + 1]);
    const auto& r = tr.steps[k];
    CHECK(std::abs(m1 - m0 + r.mass_in + r.mass_out - r.mass_src) <= 1e-11);
    m0 = m1;
  }
}
