#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace nsf {

enum class ShapeKind { Iconic, Table };

// Monotone cubic P(Z) on knots z[0] = 0 < z[1] < ... < z[N], continued for Z > z[N] by
// p_inf Z^{5/3} + b Z^alpha with value and slope matched at z[N].
struct PressureTable {
  std::vector<double> z, p, dp;
  double tail_b = 0.0;
  double tail_alpha = 0.0;
  std::vector<double> s_raw;  // unnormalized entropy at knots, s_raw[0] unused
  double s_raw_inf = 0.0;
};

struct EosSpec {
  ShapeKind shape = ShapeKind::Iconic;
  double a = 1.0;
  double p_inf = 1.0;
  double entropy_const = 0.0;
  bool third_law = false;
  std::shared_ptr<const PressureTable> table;
};

EosSpec make_iconic(double a = 1.0, double p_inf = 1.0, double entropy_const = 0.0);

// Slopes from a monotone piecewise cubic fit unless dp is given. Throws Error(Validation)
// when the knots cannot define an admissible shape.
EosSpec make_tabulated(double a, double p_inf, std::vector<double> z, std::vector<double> p,
                       std::vector<double> dp = {}, bool third_law = false,
                       double entropy_const = 0.0);

struct ShapeValue {
  double P, dP, S, dS;
};

// P, P', normalized entropy function and its derivative at Z > 0.
ShapeValue shape_eval(const EosSpec& eos, double Z);

// Limit of the normalized entropy function as Z -> inf (-inf for the iconic shape).
double entropy_limit(const EosSpec& eos);

struct ThermoDerivs {
  double p, e, s;
  double p_rho, p_theta;
  double e_rho, e_theta;
  double s_rho, s_theta;
};

ThermoDerivs thermo_derivs(const EosSpec& eos, double rho, double theta);

// Same without the entropy value (s is NaN); cheaper for tabulated shapes.
ThermoDerivs caloric_derivs(const EosSpec& eos, double rho, double theta);

double pressure(const EosSpec& eos, double rho, double theta);
double specific_internal_energy(const EosSpec& eos, double rho, double theta);
double specific_entropy(const EosSpec& eos, double rho, double theta);

// rho e and rho s; both defined at rho = 0.
double energy_density(const EosSpec& eos, double rho, double theta);
double entropy_density(const EosSpec& eos, double rho, double theta);

// (theta s_theta - e_theta, theta s_rho - e_rho + p / rho^2)
std::pair<double, double> gibbs_residual(const EosSpec& eos, double rho, double theta);

// (dp/drho, de/dtheta)
std::pair<double, double> stability_margins(const EosSpec& eos, double rho, double theta);

struct ThermoState {
  double rho = 1.0;
  double u = 0.0;
  double theta = 1.0;
};

struct ConservativeState {
  double rho = 1.0;
  double m = 0.0;
  double S = 0.0;
};

ConservativeState to_conservative(const EosSpec& eos, const ThermoState& s);
ThermoState from_conservative(const EosSpec& eos, const ConservativeState& c);

// Temperature with rho s(rho, theta) = S.
double theta_from_entropy(const EosSpec& eos, double rho, double S, double lo = 1e-8,
                          double hi = 1e8, double seed = 1.0);

// Temperature with e(rho, theta) + delta theta = e_target.
double theta_from_energy(const EosSpec& eos, double rho, double e_target, double delta,
                         double lo, double hi, double seed);

// Convex l.s.c. internal energy in (rho, S); +inf off the closure of its domain.
double extended_internal_energy(const EosSpec& eos, double rho, double S);

// Directional liminf of E_int at (rho, S) along the segment from an interior anchor,
// halving the remaining distance until the relative change drops below rtol.
double boundary_liminf(const EosSpec& eos, double rho, double S, double rho_anchor,
                       double S_anchor, double rtol = 1e-6);

struct TransportSpec {
  double lambda_exp = 0.5;
  double mu0 = 1.0;
  double eta0 = 0.0;
  double kappa0 = 1.0;
  // Envelope constants; negative means "use the closure constant".
  double mu_under = -1.0, mu_over = -1.0;
  double eta_over = -1.0;
  double kappa_under = -1.0, kappa_over = -1.0;
};

struct TransportCoeffs {
  double mu, eta, kappa;
};

// mu0 (1 + theta^L), eta0 (1 + theta^L), kappa0 (1 + theta^3)
TransportCoeffs transport_coefficients(const TransportSpec& ts, double theta);
TransportCoeffs transport_derivatives(const TransportSpec& ts, double theta);

struct CheckItem {
  std::string name;
  std::string label;
  bool pass = false;
  std::string detail;
};

std::vector<CheckItem> check_eos(const EosSpec& eos);
std::vector<CheckItem> check_transport(const TransportSpec& ts, double theta_lo = 1e-10,
                                       double theta_hi = 1e10);

}  // namespace nsf
