#include "nsf/relent.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "nsf/errors.hpp"
#include "nsf/numerics.hpp"

namespace nsf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_interior(const ThermoState& ref) {
  if (!(ref.rho > 0.0) || !(ref.theta > 0.0))
    throw Error(Errc::Domain, "reference state must have positive density and temperature");
}

// Gibbs free enthalpy e - theta s + p / rho.
double free_enthalpy(const EosSpec& eos, double rho, double theta) {
  const ThermoDerivs d = thermo_derivs(eos, rho, theta);
  return d.e - theta * d.s + d.p / rho;
}

}  // namespace

RelEnergySample relative_energy_standard(const EosSpec& eos, const ThermoState& state,
                                         const ThermoState& ref) {
  require_interior(ref);
  if (!(state.rho >= 0.0)) throw Error(Errc::Domain, "state density must be nonnegative");
  const double tt = ref.theta;
  const double H = energy_density(eos, state.rho, state.theta) - tt * entropy_density(eos, state.rho, state.theta);
  const double Hr = energy_density(eos, ref.rho, tt) - tt * entropy_density(eos, ref.rho, tt);
  const double g = free_enthalpy(eos, ref.rho, tt);
  RelEnergySample out;
  const double du = state.u - ref.u;
  out.kinetic_part = 0.5 * state.rho * du * du;
  out.bregman_part = H - g * (state.rho - ref.rho) - Hr;
  out.value = out.kinetic_part + out.bregman_part;
  return out;
}

double total_energy(const EosSpec& eos, const ConservativeState& c) {
  double kin;
  if (c.rho > 0.0) kin = 0.5 * c.m * c.m / c.rho;
  else if (c.rho == 0.0 && c.m == 0.0) kin = 0.0;
  else return kInf;
  return kin + extended_internal_energy(eos, c.rho, c.S);
}

EnergyGradient total_energy_gradient(const EosSpec& eos, const ConservativeState& c) {
  const ThermoState s = from_conservative(eos, c);
  return {-0.5 * s.u * s.u + free_enthalpy(eos, s.rho, s.theta), s.u, s.theta};
}

RelEnergySample relative_energy_conservative(const EosSpec& eos, const ConservativeState& c,
                                             const ConservativeState& cref) {
  if (!(cref.rho > 0.0)) throw Error(Errc::Domain, "reference density must be positive");
  const ThermoState r = from_conservative(eos, cref);
  const double g = free_enthalpy(eos, r.rho, r.theta);
  RelEnergySample out;
  if (c.rho > 0.0) {
    const double du = c.m / c.rho - r.u;
    out.kinetic_part = 0.5 * c.rho * du * du;
  } else if (c.rho == 0.0 && c.m == 0.0) {
    out.kinetic_part = 0.0;
  } else {
    out.kinetic_part = kInf;
  }
  const double Eint = extended_internal_energy(eos, c.rho, c.S);
  if (!std::isfinite(Eint)) {
    out.bregman_part = kInf;
  } else {
    const double Eref = energy_density(eos, r.rho, r.theta);
    out.bregman_part = Eint - Eref - g * (c.rho - cref.rho) - r.theta * (c.S - cref.S);
  }
  out.value = out.kinetic_part + out.bregman_part;
  return out;
}

RelEnergySample relative_energy_integral(const EosSpec& eos, const FieldState& fields,
                                         const FieldState& ref, const Mesh1D& mesh) {
  const std::size_t n = mesh.n_cells;
  auto same = [n](const FieldState& f) {
    return f.rho.size() == n && f.u.size() == n && f.theta.size() == n;
  };
  if (!same(fields) || !same(ref))
    throw Error(Errc::Misuse, fmt::format("field arrays do not match the {}-cell mesh", n));
  std::vector<double> kin(n), breg(n);
  const double h = mesh.h();
  for (std::size_t i = 0; i < n; ++i) {
    const RelEnergySample s = relative_energy_standard(
        eos, {fields.rho[i], fields.u[i], fields.theta[i]}, {ref.rho[i], ref.u[i], ref.theta[i]});
    kin[i] = h * s.kinetic_part;
    breg[i] = h * s.bregman_part;
  }
  RelEnergySample out;
  out.kinetic_part = pairwise_sum(kin);
  out.bregman_part = pairwise_sum(breg);
  out.value = out.kinetic_part + out.bregman_part;
  return out;
}

double ballistic_free_energy(const EosSpec& eos, double rho_b, double theta_tilde, double theta) {
  if (!(rho_b > 0.0) || !(theta_tilde > 0.0) || !(theta > 0.0))
    throw Error(Errc::Domain, "ballistic free energy needs positive arguments");
  const ThermoDerivs d = thermo_derivs(eos, rho_b, theta_tilde);
  return d.e - theta * d.s;
}

}  // namespace nsf
