#pragma once

#include <string>
#include <vector>

#include "nsf/mesh.hpp"
#include "nsf/thermo.hpp"

namespace nsf {

struct RelEnergySample {
  double value = 0.0;
  double kinetic_part = 0.0;
  double bregman_part = 0.0;
};

struct RelEnergyTrace {
  std::vector<double> times;
  std::vector<double> integrals;
  std::vector<double> kinetic;
  std::vector<double> bregman;
  std::string reference_label;
};

// 1/2 rho |u - u~|^2 plus the Bregman remainder of H(rho, theta) = rho (e - theta~ s).
RelEnergySample relative_energy_standard(const EosSpec& eos, const ThermoState& state,
                                         const ThermoState& ref);

// Bregman divergence of E(rho, m, S) = m^2 / (2 rho) + E_int(rho, S).
RelEnergySample relative_energy_conservative(const EosSpec& eos, const ConservativeState& c,
                                             const ConservativeState& cref);

double total_energy(const EosSpec& eos, const ConservativeState& c);

struct EnergyGradient {
  double d_rho, d_m, d_S;
};

// Supporting-plane coefficients (-u^2/2 + g, u, theta) at an interior state.
EnergyGradient total_energy_gradient(const EosSpec& eos, const ConservativeState& c);

// Midpoint-rule integral over the mesh.
RelEnergySample relative_energy_integral(const EosSpec& eos, const FieldState& fields,
                                         const FieldState& ref, const Mesh1D& mesh);

// e(rho_b, theta~) - theta s(rho_b, theta~)
double ballistic_free_energy(const EosSpec& eos, double rho_b, double theta_tilde, double theta);

}  // namespace nsf
