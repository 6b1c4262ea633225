#include "nsf/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "nsf/errors.hpp"
#include "nsf/numerics.hpp"

namespace nsf {

const std::array<std::pair<const char*, RecordField>, 31> kRecordFields = {{
    {"t0", &StepRecord::t0},
    {"t1", &StepRecord::t1},
    {"mass_in", &StepRecord::mass_in},
    {"mass_out", &StepRecord::mass_out},
    {"mass_src", &StepRecord::mass_src},
    {"f_ib", &StepRecord::f_ib},
    {"eint_out", &StepRecord::eint_out},
    {"delta_out", &StepRecord::delta_out},
    {"delta_in_lhs", &StepRecord::delta_in_lhs},
    {"vol_conv", &StepRecord::vol_conv},
    {"vol_kin", &StepRecord::vol_kin},
    {"vol_visc", &StepRecord::vol_visc},
    {"vol_grav", &StepRecord::vol_grav},
    {"vol_reg", &StepRecord::vol_reg},
    {"delta_in_rhs", &StepRecord::delta_in_rhs},
    {"eps_corr", &StepRecord::eps_corr},
    {"src_energy", &StepRecord::src_energy},
    {"s_out", &StepRecord::s_out},
    {"s_in", &StepRecord::s_in},
    {"d_visc", &StepRecord::d_visc},
    {"d_heat", &StepRecord::d_heat},
    {"d_delta", &StepRecord::d_delta},
    {"d_epsdelta", &StepRecord::d_epsdelta},
    {"d_eps_theta", &StepRecord::d_eps_theta},
    {"d_eps_rho", &StepRecord::d_eps_rho},
    {"src_entropy", &StepRecord::src_entropy},
    {"in_theta", &StepRecord::in_theta},
    {"int_theta_m3", &StepRecord::int_theta_m3},
    {"int_theta5", &StepRecord::int_theta5},
    {"bdry_delta", &StepRecord::bdry_delta},
    {"int_epsdelta_rho", &StepRecord::int_epsdelta_rho},
}};

namespace {

class StageFailure : public Error {
 public:
  StageFailure(const std::string& what, bool floor) : Error(Errc::Numeric, what), floor(floor) {}
  bool floor;
};

double deviatoric_factor(int d) { return 2.0 * (1.0 - 1.0 / static_cast<double>(d)); }

double sigma(const Problem& P, double theta) {
  const auto c = transport_coefficients(P.transport, theta);
  return (c.mu + P.cfg.delta * theta) * deviatoric_factor(P.cfg.d) + c.eta;
}

double dsigma(const Problem& P, double theta) {
  const auto c = transport_derivatives(P.transport, theta);
  return (c.mu + P.cfg.delta) * deviatoric_factor(P.cfg.d) + c.eta;
}

double conductivity(const Problem& P, double theta) {
  const double G = P.cfg.Gamma;
  return transport_coefficients(P.transport, theta).kappa +
         P.cfg.delta * (std::pow(theta, G) + 1.0 / theta);
}

double delta_pressure(const SolverConfig& cfg, double rho) {
  return cfg.delta * (std::pow(rho, cfg.Gamma) + rho * rho);
}

double face_speed(const BoundaryFace& f) { return f.kind == FaceKind::Wall ? 0.0 : f.u_b; }

std::vector<double> face_velocities(const Problem& P, const std::vector<double>& u) {
  const std::size_t n = u.size();
  std::vector<double> uf(n + 1);
  uf[0] = face_speed(P.boundary.faces[0]);
  uf[n] = face_speed(P.boundary.faces[1]);
  for (std::size_t f = 1; f < n; ++f) uf[f] = 0.5 * (u[f - 1] + u[f]);
  return uf;
}

std::vector<double> cell_divergence(const std::vector<double>& uf, double h) {
  std::vector<double> du(uf.size() - 1);
  for (std::size_t i = 0; i < du.size(); ++i) du[i] = (uf[i + 1] - uf[i]) / h;
  return du;
}

std::vector<double> rho_gradient(const Problem& P, const std::vector<double>& rho) {
  const std::size_t n = rho.size();
  const double h = P.mesh.h();
  const auto& L = P.boundary.faces[0];
  const auto& R = P.boundary.faces[1];
  const double gl = L.kind == FaceKind::In ? L.rho_b : rho[0];
  const double gr = R.kind == FaceKind::In ? R.rho_b : rho[n - 1];
  std::vector<double> rx(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = i == 0 ? gl : rho[i - 1];
    const double b = i + 1 == n ? gr : rho[i + 1];
    rx[i] = (b - a) / (2.0 * h);
  }
  return rx;
}

struct Sources {
  std::vector<double> fr, fm, fe;
};

Sources eval_sources(const Problem& P, double t) {
  const std::size_t n = P.mesh.n_cells;
  Sources s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  if (P.source) P.source(t, P.mesh, s.fr, s.fm, s.fe);
  return s;
}

// Boundary face f (0 left, 1 right) adjacent cell index.
std::size_t cell_of(std::size_t f, std::size_t n) { return f == 0 ? 0 : n - 1; }

std::vector<double> solve_continuity(const Problem& P, const std::vector<double>& rho_old,
                                     const std::vector<double>& uf, const Sources& src, double dt) {
  const std::size_t n = rho_old.size();
  const double h = P.mesh.h();
  const double c = dt / h;
  const double k = P.cfg.epsilon / h;
  std::vector<double> lo(n, 0.0), di(n, 1.0), up(n, 0.0), rhs(n), rho(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = rho_old[i] + dt * src.fr[i];
  for (std::size_t f = 1; f < n; ++f) {
    const std::size_t l = f - 1, r = f;
    const double ap = std::max(uf[f], 0.0), am = std::max(-uf[f], 0.0);
    di[l] += c * (ap + k);
    up[l] -= c * (am + k);
    di[r] += c * (am + k);
    lo[r] -= c * (ap + k);
  }
  for (std::size_t f = 0; f < 2; ++f) {
    const BoundaryFace& b = P.boundary.faces[f];
    const std::size_t i = cell_of(f, n);
    if (b.kind == FaceKind::In) rhs[i] -= c * b.rho_b * b.u_dot_n();
    else if (b.kind == FaceKind::Out) di[i] += c * b.u_dot_n();
  }
  if (!solve_tridiagonal(lo, di, up, rhs, rho)) throw StageFailure("singular continuity system", false);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(rho[i])) throw StageFailure("non-finite density", false);
    if (rho[i] < P.cfg.rho_floor)
      throw StageFailure(fmt::format("density {} below floor in cell {}", rho[i], i), true);
  }
  return rho;
}

std::vector<double> solve_energy(const Problem& P, const std::vector<double>& rho_old,
                                 const std::vector<double>& theta_old, const std::vector<double>& rho,
                                 const std::vector<double>& uf, const std::vector<double>& du,
                                 const std::vector<double>& rx, const Sources& src, double dt) {
  const std::size_t n = rho.size();
  const SolverConfig& cfg = P.cfg;
  const double h = P.mesh.h();
  const double c = dt / h;
  const double dl = cfg.delta, ep = cfg.epsilon, G = cfg.Gamma;

  std::vector<double> E_old(n);
  for (std::size_t i = 0; i < n; ++i)
    E_old[i] = energy_density(P.eos, rho_old[i], theta_old[i]) + dl * rho_old[i] * theta_old[i];

  // density-only source part
  std::vector<double> s_fixed(n);
  for (std::size_t i = 0; i < n; ++i)
    s_fixed[i] = ep * dl * (G * std::pow(rho[i], G - 2.0) + 2.0) * rx[i] * rx[i] + src.fe[i];

  std::vector<double> th = theta_old;
  std::vector<double> E(n), dE(n), K(n), dK(n), R(n), lo(n), di(n), up(n), step(n);
  for (int it = 0; it < cfg.newton_max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      const ThermoDerivs d = caloric_derivs(P.eos, rho[i], th[i]);
      E[i] = rho[i] * (d.e + dl * th[i]);
      dE[i] = rho[i] * (d.e_theta + dl);
      K[i] = kirchhoff(P.transport, cfg, th[i]);
      dK[i] = conductivity(P, th[i]);
      const double t2 = th[i] * th[i];
      const double src_v = sigma(P, th[i]) * du[i] * du[i] - d.p * du[i] + dl / t2 -
                           ep * t2 * t2 * th[i] + s_fixed[i];
      const double src_d = dsigma(P, th[i]) * du[i] * du[i] - d.p_theta * du[i] - 2.0 * dl / (t2 * th[i]) -
                           5.0 * ep * t2 * t2;
      R[i] = E[i] - E_old[i] - dt * src_v;
      di[i] = dE[i] - dt * src_d;
      lo[i] = 0.0;
      up[i] = 0.0;
    }
    for (std::size_t f = 1; f < n; ++f) {
      const std::size_t l = f - 1, r = f;
      const double ap = std::max(uf[f], 0.0), am = std::max(-uf[f], 0.0);
      const double Gf = ap * E[l] - am * E[r] - (K[r] - K[l]) / h;
      const double gl = ap * dE[l] + dK[l] / h;
      const double gr = -am * dE[r] - dK[r] / h;
      R[l] += c * Gf;
      R[r] -= c * Gf;
      di[l] += c * gl;
      up[l] += c * gr;
      lo[r] -= c * gl;
      di[r] -= c * gr;
    }
    for (std::size_t f = 0; f < 2; ++f) {
      const BoundaryFace& b = P.boundary.faces[f];
      const std::size_t i = cell_of(f, n);
      if (b.kind == FaceKind::In) {
        R[i] += c * b.F_ib;
      } else if (b.kind == FaceKind::Out) {
        R[i] += c * b.u_dot_n() * E[i];
        di[i] += c * b.u_dot_n() * dE[i];
      }
    }
    if (!solve_tridiagonal(lo, di, up, R, step)) throw StageFailure("singular energy Jacobian", false);
    double lam = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(step[i])) throw StageFailure("non-finite Newton update", false);
      if (step[i] > 0.8 * th[i]) lam = std::min(lam, 0.8 * th[i] / step[i]);
      if (step[i] < -4.0 * th[i]) lam = std::min(lam, -4.0 * th[i] / step[i]);
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dth = lam * step[i];
      th[i] -= dth;
      change = std::max(change, std::abs(dth) / th[i]);
    }
    if (lam == 1.0 && change < cfg.newton_tol) {
      for (std::size_t i = 0; i < n; ++i)
        if (th[i] < cfg.theta_floor)
          throw StageFailure(fmt::format("temperature {} below floor in cell {}", th[i], i), true);
      return th;
    }
  }
  throw StageFailure(fmt::format("energy Newton iteration did not converge in {} steps", cfg.newton_max_iter),
                     false);
}

std::vector<double> solve_momentum(const Problem& P, const FieldState& s, const std::vector<double>& rho,
                                   const std::vector<double>& th, const std::vector<double>& uf,
                                   const std::vector<double>& du, const std::vector<double>& rx,
                                   const Sources& src, double dt) {
  const std::size_t n = rho.size();
  const SolverConfig& cfg = P.cfg;
  const double h = P.mesh.h();
  const double c = dt / h;

  std::vector<double> pd(n), sg(n);
  for (std::size_t i = 0; i < n; ++i) {
    pd[i] = pressure(P.eos, rho[i], th[i]) + delta_pressure(cfg, rho[i]);
    sg[i] = sigma(P, th[i]);
  }
  // momentum and pressure fluxes in +x at faces
  std::vector<double> M(n + 1, 0.0), Pf(n + 1);
  for (std::size_t f = 1; f < n; ++f) {
    const double ap = std::max(uf[f], 0.0), am = std::max(-uf[f], 0.0);
    const double mass = ap * rho[f - 1] - am * rho[f];
    M[f] = mass * (uf[f] > 0.0 ? s.u[f - 1] : s.u[f]);
    Pf[f] = 0.5 * (pd[f - 1] + pd[f]);
  }
  for (std::size_t f = 0; f < 2; ++f) {
    const BoundaryFace& b = P.boundary.faces[f];
    const std::size_t i = cell_of(f, n);
    const std::size_t face = f == 0 ? 0 : n;
    double outward = 0.0;
    if (b.kind == FaceKind::In) {
      outward = b.rho_b * b.u_dot_n() * b.u_b;
      Pf[face] = pressure(P.eos, b.rho_b, th[i]) + delta_pressure(cfg, b.rho_b);
    } else {
      if (b.kind == FaceKind::Out) outward = rho[i] * b.u_dot_n() * s.u[i];
      Pf[face] = pd[i];
    }
    M[face] = b.normal * outward;
  }

  std::vector<double> lo(n, 0.0), di(n), up(n, 0.0), rhs(n), u(n);
  for (std::size_t i = 0; i < n; ++i) {
    di[i] = rho[i];
    rhs[i] = s.rho[i] * s.u[i] - c * (M[i + 1] - M[i]) - c * (Pf[i + 1] - Pf[i]) +
             dt * (rho[i] * cfg.g - cfg.epsilon * rx[i] * du[i] + src.fm[i]);
  }
  const double v = dt / (h * h);
  for (std::size_t f = 1; f < n; ++f) {
    const double sf = 0.5 * (sg[f - 1] + sg[f]);
    di[f - 1] += v * sf;
    up[f - 1] -= v * sf;
    di[f] += v * sf;
    lo[f] -= v * sf;
  }
  for (std::size_t f = 0; f < 2; ++f) {
    const std::size_t i = cell_of(f, n);
    const double ub = face_speed(P.boundary.faces[f]);
    di[i] += 2.0 * v * sg[i];
    rhs[i] += 2.0 * v * sg[i] * ub;
  }
  if (!solve_tridiagonal(lo, di, up, rhs, u)) throw StageFailure("singular momentum system", false);
  for (double x : u)
    if (!std::isfinite(x)) throw StageFailure("non-finite velocity", false);
  return u;
}

void accumulate(const Problem& P, const FieldState& ns, const std::vector<double>& du,
                const std::vector<double>& rx, const Sources& src, double wdt, StepRecord& rec) {
  const std::size_t n = ns.size();
  const SolverConfig& cfg = P.cfg;
  const double h = P.mesh.h();
  const double dl = cfg.delta, ep = cfg.epsilon, G = cfg.Gamma;
  const double gub = P.boundary.u_b_gradient(P.mesh);

  std::vector<double> gt(n), K(n), ed(n), sd(n);
  std::vector<double> c_mass(n), c_conv(n), c_kin(n), c_visc(n), c_grav(n), c_reg(n), c_eps(n), c_src(n);
  std::vector<double> c_dv(n), c_dd(n), c_ded(n), c_det(n), c_ss(n), c_m3(n), c_t5(n), c_edr(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ns.rho[i], u = ns.u[i], th = ns.theta[i];
    const ThermoDerivs d = thermo_derivs(P.eos, r, th);
    ed[i] = d.e + dl * th;
    sd[i] = d.s + dl * std::log(th);
    const double g = ed[i] - th * sd[i] + d.p / r;
    gt[i] = g / th;
    K[i] = kirchhoff(P.transport, cfg, th);
    const double ub = P.boundary.u_b_at(P.mesh, P.mesh.center(i));
    const double pdl = d.p + delta_pressure(cfg, r);
    const double sgm = sigma(P, th);
    const double t2 = th * th;
    const double w_rho = (G * std::pow(r, G - 2.0) + 2.0) * rx[i] * rx[i] / th;
    c_mass[i] = src.fr[i];
    c_conv[i] = -(r * u * u + pdl) * gub;
    c_kin[i] = r * u * ub * gub;
    c_visc[i] = sgm * du[i] * gub;
    c_grav[i] = r * cfg.g * (u - ub);
    c_reg[i] = dl / t2 - ep * t2 * t2 * th;
    c_eps[i] = ep * rx[i] * (du[i] - gub) * ub;
    c_src[i] = src.fe[i] + (u - ub) * src.fm[i] - 0.5 * (u * u - ub * ub) * src.fr[i] +
               dl * (G / (G - 1.0) * std::pow(r, G - 1.0) + 2.0 * r) * src.fr[i];
    c_dv[i] = sgm * du[i] * du[i] / th;
    c_dd[i] = dl / (t2 * th);
    c_ded[i] = ep * dl * w_rho;
    c_det[i] = -ep * t2 * t2;
    c_ss[i] = (src.fe[i] - g * src.fr[i]) / th;
    c_m3[i] = 1.0 / (t2 * th);
    c_t5[i] = t2 * t2 * th;
    c_edr[i] = w_rho;
  }
  const double wh = wdt * h;
  rec.mass_src += wh * pairwise_sum(c_mass);
  rec.vol_conv += wh * pairwise_sum(c_conv);
  rec.vol_kin += wh * pairwise_sum(c_kin);
  rec.vol_visc += wh * pairwise_sum(c_visc);
  rec.vol_grav += wh * pairwise_sum(c_grav);
  rec.vol_reg += wh * pairwise_sum(c_reg);
  rec.eps_corr += wh * pairwise_sum(c_eps);
  rec.src_energy += wh * pairwise_sum(c_src);
  rec.d_visc += wh * pairwise_sum(c_dv);
  rec.d_delta += wh * pairwise_sum(c_dd);
  rec.d_epsdelta += wh * pairwise_sum(c_ded);
  rec.d_eps_theta += wh * pairwise_sum(c_det);
  rec.src_entropy += wh * pairwise_sum(c_ss);
  rec.int_theta_m3 += wh * pairwise_sum(c_m3);
  rec.int_theta5 += wh * pairwise_sum(c_t5);
  rec.int_epsdelta_rho += wh * pairwise_sum(c_edr);

  if (n > 1) {
    std::vector<double> fh(n - 1), fr(n - 1);
    for (std::size_t f = 1; f < n; ++f) {
      const std::size_t l = f - 1, r = f;
      fh[f - 1] = (K[r] - K[l]) * (ns.theta[r] - ns.theta[l]) / (h * ns.theta[l] * ns.theta[r]);
      fr[f - 1] = ep / h * (ns.rho[r] - ns.rho[l]) * (gt[r] - gt[l]);
    }
    rec.d_heat += wdt * pairwise_sum(fh);
    rec.d_eps_rho += wdt * pairwise_sum(fr);
  }

  for (std::size_t f = 0; f < 2; ++f) {
    const BoundaryFace& b = P.boundary.faces[f];
    const std::size_t i = cell_of(f, n);
    const double un = b.u_dot_n();
    const double r = ns.rho[i], th = ns.theta[i];
    if (b.kind == FaceKind::In) {
      const double rb = b.rho_b;
      const double rbG = std::pow(rb, G), rG = std::pow(r, G);
      rec.mass_in += wdt * rb * un;
      rec.f_ib += wdt * b.F_ib;
      rec.s_in += wdt * entropy_inflow_flux(P.eos, rb, th, un, b.F_ib, dl);
      rec.delta_in_lhs -= wdt * dl *
                          (rbG / (G - 1.0) - G / (G - 1.0) * std::pow(r, G - 1.0) * (rb - r) - rG / (G - 1.0) +
                           (r - rb) * (r - rb)) *
                          un;
      rec.delta_in_rhs -= wdt * dl * rbG / (G - 1.0) * un;
      rec.in_theta += wdt * (1.0 / th + th * th * th * std::abs(un));
      rec.bdry_delta += wdt * (r - rb) * (r - rb) * std::abs(un);
    } else if (b.kind == FaceKind::Out) {
      const double pot = std::pow(r, G) / (G - 1.0) + r * r;
      rec.mass_out += wdt * r * un;
      rec.eint_out += wdt * r * ed[i] * un;
      rec.delta_out += wdt * dl * pot * un;
      rec.s_out += wdt * r * sd[i] * un;
      rec.bdry_delta += wdt * pot * std::abs(un);
    }
  }
}

// One implicit stage from s over dt; sources at t_new.
FieldState stage(const Problem& P, const FieldState& s, double dt, double t_new, StepRecord* rec, double w) {
  const double h = P.mesh.h();
  const std::vector<double> uf = face_velocities(P, s.u);
  const std::vector<double> du = cell_divergence(uf, h);
  const Sources src = eval_sources(P, t_new);
  FieldState out;
  out.t = t_new;
  out.rho = solve_continuity(P, s.rho, uf, src, dt);
  const std::vector<double> rx = rho_gradient(P, out.rho);
  out.theta = solve_energy(P, s.rho, s.theta, out.rho, uf, du, rx, src, dt);
  out.u = solve_momentum(P, s, out.rho, out.theta, uf, du, rx, src, dt);
  if (rec) accumulate(P, out, du, rx, src, w * dt, *rec);
  return out;
}

std::vector<double> energies(const Problem& P, const FieldState& s) {
  std::vector<double> E(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    E[i] = energy_density(P.eos, s.rho[i], s.theta[i]) + P.cfg.delta * s.rho[i] * s.theta[i];
  return E;
}

double recover_theta(const Problem& P, double rho, double E, double seed) {
  const double e = E / rho;
  try {
    return theta_from_energy(P.eos, rho, e, P.cfg.delta, seed * 1e-3, seed * 1e3, seed);
  } catch (const BracketError&) {
    return theta_from_energy(P.eos, rho, e, P.cfg.delta, 1e-14, 1e14, seed);
  }
}

void validate_state(const Problem& P, const FieldState& s) {
  const std::size_t n = P.mesh.n_cells;
  if (s.rho.size() != n || s.u.size() != n || s.theta.size() != n)
    throw Error(Errc::Misuse, fmt::format("state arrays do not match the {}-cell mesh", n));
}

}  // namespace

double viscous_stress(const TransportSpec& ts, const SolverConfig& cfg, double theta, double du_dx) {
  const auto c = transport_coefficients(ts, theta);
  return ((c.mu + cfg.delta * theta) * deviatoric_factor(cfg.d) + c.eta) * du_dx;
}

double heat_flux(const TransportSpec& ts, const SolverConfig& cfg, double theta, double dtheta_dx) {
  const auto c = transport_coefficients(ts, theta);
  return -(c.kappa + cfg.delta * (std::pow(theta, cfg.Gamma) + 1.0 / theta)) * dtheta_dx;
}

double kirchhoff(const TransportSpec& ts, const SolverConfig& cfg, double theta) {
  const double t4 = theta * theta * theta * theta;
  double k = ts.kappa0 * (theta + 0.25 * t4);
  if (cfg.delta > 0.0)
    k += cfg.delta * (std::pow(theta, cfg.Gamma + 1.0) / (cfg.Gamma + 1.0) + std::log(theta));
  return k;
}

FaceFluxes convective_fluxes(const Problem& P, const FieldState& s) {
  validate_state(P, s);
  const std::size_t n = s.size();
  const std::vector<double> uf = face_velocities(P, s.u);
  FaceFluxes F;
  F.mass.assign(n + 1, 0.0);
  F.momentum.assign(n + 1, 0.0);
  F.energy.assign(n + 1, 0.0);
  F.entropy.assign(n + 1, 0.0);
  const double dl = P.cfg.delta;
  auto cell_values = [&](double r, double u, double th, double* out) {
    out[0] = r;
    out[1] = r * u;
    out[2] = energy_density(P.eos, r, th) + dl * r * th;
    out[3] = entropy_density(P.eos, r, th) + dl * r * std::log(th);
  };
  auto set = [&](std::size_t f, double speed, const double* v) {
    F.mass[f] = speed * v[0];
    F.momentum[f] = speed * v[1];
    F.energy[f] = speed * v[2];
    F.entropy[f] = speed * v[3];
  };
  double v[4];
  for (std::size_t f = 1; f < n; ++f) {
    const std::size_t up = uf[f] > 0.0 ? f - 1 : f;
    cell_values(s.rho[up], s.u[up], s.theta[up], v);
    set(f, uf[f], v);
  }
  for (std::size_t f = 0; f < 2; ++f) {
    const BoundaryFace& b = P.boundary.faces[f];
    const std::size_t i = cell_of(f, n);
    const std::size_t face = f == 0 ? 0 : n;
    if (b.kind == FaceKind::Wall) continue;
    if (b.kind == FaceKind::In) cell_values(b.rho_b, b.u_b, s.theta[i], v);
    else cell_values(s.rho[i], s.u[i], s.theta[i], v);
    set(face, b.u_b, v);
  }
  return F;
}

std::vector<double> continuity_step(const Problem& P, const FieldState& s, double dt, double t_new) {
  validate_state(P, s);
  const auto uf = face_velocities(P, s.u);
  return solve_continuity(P, s.rho, uf, eval_sources(P, t_new), dt);
}

std::vector<double> internal_energy_step(const Problem& P, const FieldState& s,
                                         const std::vector<double>& rho_new, double dt, double t_new) {
  validate_state(P, s);
  const auto uf = face_velocities(P, s.u);
  const auto du = cell_divergence(uf, P.mesh.h());
  const auto rx = rho_gradient(P, rho_new);
  return solve_energy(P, s.rho, s.theta, rho_new, uf, du, rx, eval_sources(P, t_new), dt);
}

std::vector<double> momentum_step(const Problem& P, const FieldState& s, const std::vector<double>& rho_new,
                                  const std::vector<double>& theta_new, double dt, double t_new) {
  validate_state(P, s);
  const auto uf = face_velocities(P, s.u);
  const auto du = cell_divergence(uf, P.mesh.h());
  const auto rx = rho_gradient(P, rho_new);
  return solve_momentum(P, s, rho_new, theta_new, uf, du, rx, eval_sources(P, t_new), dt);
}

double stable_dt(const Problem& P, const FieldState& s) {
  validate_state(P, s);
  const SolverConfig& cfg = P.cfg;
  const double h = P.mesh.h();
  const double G = cfg.Gamma;
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = s.rho[i], th = s.theta[i];
    const ThermoDerivs d = caloric_derivs(P.eos, r, th);
    const double ed = d.e_theta + cfg.delta;
    const double prho = d.p_rho + cfg.delta * (G * std::pow(r, G - 1.0) + 2.0 * r);
    const double cs = std::sqrt(prho + d.p_theta * d.p_theta * th / (r * r * ed));
    double lim = h / (std::abs(s.u[i]) + cs);
    if (cfg.dt_policy == DtPolicy::Full) {
      const double nu = std::max(sigma(P, th) / r, cfg.epsilon);
      const double chi = conductivity(P, th) / (r * ed);
      if (nu > 0.0) lim = std::min(lim, h * h / (2.0 * nu));
      if (chi > 0.0) lim = std::min(lim, h * h / (2.0 * chi));
    }
    dt = std::min(dt, lim);
  }
  return cfg.cfl * dt;
}

StepResult step(const Problem& P, const FieldState& s, double dt) {
  validate_state(P, s);
  StepResult res;
  const std::size_t n = s.size();
  const std::vector<double> E0 = energies(P, s);
  for (int attempt = 0; attempt <= P.cfg.max_rejections; ++attempt) {
    try {
      StepRecord rec;
      const FieldState s1 = stage(P, s, dt, s.t + dt, &rec, 0.5);
      const FieldState s2 = stage(P, s1, dt, s.t + 2.0 * dt, &rec, 0.5);
      const std::vector<double> E2 = energies(P, s2);
      FieldState out;
      out.t = s.t + dt;
      out.rho.resize(n);
      out.u.resize(n);
      out.theta.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double r = 0.5 * (s.rho[i] + s2.rho[i]);
        const double m = 0.5 * (s.rho[i] * s.u[i] + s2.rho[i] * s2.u[i]);
        const double E = 0.5 * (E0[i] + E2[i]);
        out.rho[i] = r;
        out.u[i] = m / r;
        out.theta[i] = recover_theta(P, r, E, 0.5 * (s.theta[i] + s2.theta[i]));
        if (out.theta[i] < P.cfg.theta_floor)
          throw StageFailure(fmt::format("temperature {} below floor in cell {}", out.theta[i], i), true);
      }
      rec.t0 = s.t;
      rec.t1 = out.t;
      res.state = std::move(out);
      res.record = rec;
      res.dt = dt;
      return res;
    } catch (const StageFailure& e) {
      ++res.rejections;
      if (e.floor) ++res.floor_hits;
      if (attempt == P.cfg.max_rejections)
        throw Error(Errc::Numeric,
                    fmt::format("step at t = {} rejected {} times (last dt = {:.3g}): {}", s.t,
                                res.rejections, dt, e.what()));
      dt *= 0.5;
    } catch (const BracketError& e) {
      ++res.rejections;
      if (attempt == P.cfg.max_rejections)
        throw Error(Errc::Numeric, fmt::format("step at t = {} rejected: {}", s.t, e.what()));
      dt *= 0.5;
    } catch (const Error& e) {
      if (e.code() != Errc::Domain) throw;
      ++res.rejections;
      if (attempt == P.cfg.max_rejections)
        throw Error(Errc::Numeric, fmt::format("step at t = {} rejected: {}", s.t, e.what()));
      dt *= 0.5;
    }
  }
  throw Error(Errc::Internal, "unreachable");
}

FieldState temperature_subproblem_step(const Problem& P, const FieldState& s, double dt) {
  validate_state(P, s);
  const std::size_t n = s.size();
  const double h = P.mesh.h();
  const std::vector<double> uf = face_velocities(P, s.u);
  const std::vector<double> du = cell_divergence(uf, h);
  const std::vector<double> rx = rho_gradient(P, s.rho);
  const std::vector<double> E0 = energies(P, s);
  FieldState s1 = s;
  s1.theta = solve_energy(P, s.rho, s.theta, s.rho, uf, du, rx, eval_sources(P, s.t + dt), dt);
  FieldState s2 = s;
  s2.theta = solve_energy(P, s.rho, s1.theta, s.rho, uf, du, rx, eval_sources(P, s.t + 2.0 * dt), dt);
  const std::vector<double> E2 = energies(P, s2);
  FieldState out = s;
  out.t = s.t + dt;
  for (std::size_t i = 0; i < n; ++i)
    out.theta[i] = recover_theta(P, s.rho[i], 0.5 * (E0[i] + E2[i]), 0.5 * (s.theta[i] + s2.theta[i]));
  return out;
}

Trajectory run(const Problem& P, const FieldState& initial, std::vector<double> output_times,
               bool every_step) {
  validate_state(P, initial);
  Trajectory tr;
  tr.mesh = P.mesh;
  std::sort(output_times.begin(), output_times.end());
  output_times.erase(std::unique(output_times.begin(), output_times.end()), output_times.end());
  FieldState cur = initial;
  cur.t = 0.0;
  tr.states.push_back(cur);
  tr.state_step.push_back(0);
  try {
    for (double T : output_times) {
      if (!(T > cur.t)) continue;
      while (cur.t < T) {
        double dt = P.cfg.dt_fixed > 0.0 ? P.cfg.dt_fixed : stable_dt(P, cur);
        const double remaining = T - cur.t;
        bool last = false;
        if (dt >= remaining * (1.0 - 1e-12)) {
          dt = remaining;
          last = true;
        }
        StepResult r = step(P, cur, dt);
        tr.rejections += r.rejections;
        tr.floor_hits += r.floor_hits;
        cur = std::move(r.state);
        if (last && r.dt == dt) cur.t = T;
        r.record.t1 = cur.t;
        tr.steps.push_back(r.record);
        if (every_step && cur.t < T) {
          tr.states.push_back(cur);
          tr.state_step.push_back(tr.steps.size());
        }
      }
      tr.states.push_back(cur);
      tr.state_step.push_back(tr.steps.size());
    }
  } catch (const Error& e) {
    tr.aborted = true;
    tr.abort_reason = e.what();
  }
  return tr;
}

}  // namespace nsf
