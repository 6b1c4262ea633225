#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nsf/boundary.hpp"
#include "nsf/mesh.hpp"
#include "nsf/thermo.hpp"

namespace nsf {

enum class DtPolicy {
  Full,        // advective and diffusive limits
  Hyperbolic,  // advective limit only; diffusion is treated implicitly
};

struct SolverConfig {
  double epsilon = 0.0;
  double delta = 0.0;
  double Gamma = 4.0;
  int d = 3;
  double cfl = 0.4;
  double t_end = 0.5;
  double g = 0.0;
  double rho_floor = 1e-10;
  double theta_floor = 1e-10;
  double theta_bar = 1.0;
  DtPolicy dt_policy = DtPolicy::Full;
  double dt_fixed = 0.0;  // > 0 overrides the stability bound
  int max_rejections = 20;
  int newton_max_iter = 50;
  double newton_tol = 1e-12;
};

// Cell sources for mass, momentum and internal energy at time t.
using SourceFn = std::function<void(double t, const Mesh1D& mesh, std::span<double> f_rho,
                                    std::span<double> f_m, std::span<double> f_E)>;

struct Problem {
  Mesh1D mesh;
  EosSpec eos;
  TransportSpec transport;
  BoundarySpec boundary;
  SolverConfig cfg;
  SourceFn source;
};

// Time- and space-integrated boundary, volume and dissipation terms of one step.
// Boundary fluxes are outward.
struct StepRecord {
  double t0 = 0.0, t1 = 0.0;
  double mass_in = 0.0, mass_out = 0.0, mass_src = 0.0;
  double f_ib = 0.0, eint_out = 0.0, delta_out = 0.0, delta_in_lhs = 0.0;
  double vol_conv = 0.0, vol_kin = 0.0, vol_visc = 0.0, vol_grav = 0.0, vol_reg = 0.0;
  double delta_in_rhs = 0.0, eps_corr = 0.0, src_energy = 0.0;
  double s_out = 0.0, s_in = 0.0;
  double d_visc = 0.0, d_heat = 0.0, d_delta = 0.0, d_epsdelta = 0.0, d_eps_theta = 0.0,
         d_eps_rho = 0.0;
  double src_entropy = 0.0;
  // unweighted by epsilon and delta
  double in_theta = 0.0, int_theta_m3 = 0.0, int_theta5 = 0.0, bdry_delta = 0.0,
         int_epsdelta_rho = 0.0;
};

using RecordField = double StepRecord::*;
extern const std::array<std::pair<const char*, RecordField>, 31> kRecordFields;

struct FaceFluxes {
  // fluxes in the +x direction at faces 0..n
  std::vector<double> mass, momentum, energy, entropy;
};

double viscous_stress(const TransportSpec& ts, const SolverConfig& cfg, double theta, double du_dx);
double heat_flux(const TransportSpec& ts, const SolverConfig& cfg, double theta, double dtheta_dx);

// Kirchhoff potential of the regularized conductivity.
double kirchhoff(const TransportSpec& ts, const SolverConfig& cfg, double theta);

// First-order upwind convective fluxes of the given state.
FaceFluxes convective_fluxes(const Problem& P, const FieldState& s);

// Implicit upwind continuity update with the inflow Robin condition.
std::vector<double> continuity_step(const Problem& P, const FieldState& s, double dt, double t_new = 0.0);

// Internal-energy update on frozen face velocities; returns the new temperature.
std::vector<double> internal_energy_step(const Problem& P, const FieldState& s,
                                         const std::vector<double>& rho_new, double dt,
                                         double t_new = 0.0);

// Momentum update given the new density and temperature; returns the new velocity.
std::vector<double> momentum_step(const Problem& P, const FieldState& s,
                                  const std::vector<double>& rho_new,
                                  const std::vector<double>& theta_new, double dt, double t_new = 0.0);

double stable_dt(const Problem& P, const FieldState& s);

struct StepResult {
  FieldState state;
  StepRecord record;
  double dt = 0.0;
  int rejections = 0;
  int floor_hits = 0;
};

// One SSP-RK2 step; halves dt on rejection.
StepResult step(const Problem& P, const FieldState& s, double dt);

// Advances the internal-energy equation alone with rho and u frozen.
FieldState temperature_subproblem_step(const Problem& P, const FieldState& s, double dt);

struct Trajectory {
  Mesh1D mesh;
  std::vector<FieldState> states;          // at output times
  std::vector<std::size_t> state_step;     // number of accepted steps before each state
  std::vector<StepRecord> steps;
  int rejections = 0;
  int floor_hits = 0;
  bool aborted = false;
  std::string abort_reason;
};

// States are kept at output times, or after every accepted step when every_step is set.
Trajectory run(const Problem& P, const FieldState& initial, std::vector<double> output_times,
               bool every_step = false);

}  // namespace nsf
