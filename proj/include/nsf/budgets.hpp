#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "nsf/relent.hpp"
#include "nsf/solver.hpp"

namespace nsf {

// Output-state indices [first, last] of a trajectory.
struct Window {
  std::size_t first = 0;
  std::size_t last = 0;
};

// Whole trajectory.
Window full_window(const Trajectory& tr);

struct Verdict {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tol = 0.0;
};

struct BudgetTolerances {
  double mass_per_step = 1e-11;
  double entropy = 1e-8;  // scaled by domain length and window length
  double energy = 1e-2;   // relative to the largest energy storage in the window
};

struct BudgetReport {
  double t0 = 0.0, t1 = 0.0;
  std::size_t steps = 0;
  double mass_residual = 0.0;
  double energy_residual = 0.0;
  double entropy_production = 0.0;
  std::map<std::string, double> boundary_terms;
  std::map<std::string, double> energy_terms;
  std::map<std::string, double> entropy_terms;
  std::map<std::string, double> apriori;
  std::vector<Verdict> verdicts;
  bool pass = true;
};

struct TermBreakdown {
  double residual = 0.0;
  std::map<std::string, double> terms;
};

double total_mass(const Mesh1D& mesh, const FieldState& s);

// sum h [1/2 rho |u - u_b|^2 + rho e_d + delta (rho^G / (G - 1) + rho^2)]
double energy_storage(const Problem& P, const FieldState& s);

// sum h rho s_d
double total_entropy(const Problem& P, const FieldState& s);

double mass_budget(const Problem& P, const Trajectory& tr, Window w);
TermBreakdown energy_budget(const Problem& P, const Trajectory& tr, Window w);

// Entropy production (must be nonnegative) and its terms.
TermBreakdown entropy_budget(const Problem& P, const Trajectory& tr, Window w);

struct AprioriMonitor {
  std::vector<double> times;
  std::map<std::string, std::vector<double>> series;  // cumulative or running-sup values at output times
};

AprioriMonitor apriori_monitor(const Problem& P, const Trajectory& tr);

BudgetReport audit(const Problem& P, const Trajectory& tr, Window w, const BudgetTolerances& tol = {});

struct BudgetRow {
  double t0, t1, mass_res, energy_res, entropy_prod;
};

// One row per interval between consecutive output states.
std::vector<BudgetRow> windowed_budgets(const Problem& P, const Trajectory& tr);

struct GronwallFit {
  double eta = 0.0;
  double L = 0.0;
};

// Smallest envelope E(t) <= (E(0) + eta) exp(L t) with L the least-squares slope of log E,
// floored at zero.
GronwallFit gronwall_fit(const std::vector<double>& times, const std::vector<double>& values);

struct WeakStrongResult {
  RelEnergyTrace trace;
  GronwallFit fit;
};

// Cell average of a fine state onto a coarse mesh in (rho, m, rho e_d).
FieldState average_to_coarse(const Problem& fine, const FieldState& s, const Mesh1D& coarse);

// Relative energy of the coarse run against the cell-averaged fine run at shared output times.
WeakStrongResult weak_strong_trace(const Problem& coarse, const Trajectory& coarse_run,
                                   const Problem& fine, const Trajectory& fine_run);

}  // namespace nsf
