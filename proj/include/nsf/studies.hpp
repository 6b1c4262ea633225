#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nsf/budgets.hpp"
#include "nsf/harness.hpp"
#include "nsf/mms.hpp"

namespace nsf {

struct FieldErrors {
  double rho = 0.0, u = 0.0, theta = 0.0;
};

struct ConvergenceOptions {
  double t_end = 1.0;
  double dt_over_h = 0.8;  // dt refined with h
};

struct ConvergenceResult {
  MmsKind kind = MmsKind::ThermalRelaxation;
  std::vector<std::size_t> resolutions;
  std::vector<double> dts;
  std::vector<FieldErrors> errors;       // L1 at t_end against the closed form
  std::vector<double> energy_residuals;  // energy budget residual over [0, t_end]
  std::vector<double> probe_residuals;   // finite-difference source check at t = 0 and t_end
  FieldErrors orders;
  double energy_order = 0.0;
  std::vector<std::string> flags;  // non-monotone error sequences
};

// Runs the case at each resolution (independent runs in parallel); orders are least-squares
// slopes of log error against log h. Throws Error(Misuse) unless >= 3 resolutions refining by 2.
ConvergenceResult convergence_study(const MmsCase& c, const std::vector<std::size_t>& resolutions,
                                    const ConvergenceOptions& opt = {});

FieldErrors l1_errors(const Mesh1D& mesh, const FieldState& a, const FieldState& b);

struct WeakStrongOptions {
  std::vector<std::size_t> coarse{32, 64, 128};
  std::size_t refine = 4;
  double t_end = 0.25;
  double every = 0.025;
};

struct WeakStrongStudy {
  std::vector<std::size_t> coarse;
  std::vector<WeakStrongResult> results;
  std::vector<double> final_values;  // relative energy at t_end per coarse resolution
  bool decreasing = false;           // final values strictly decrease with refinement
  bool rates_nonnegative = false;
  bool eta_decreasing = false;
};

// Coarse runs start from the cell average of the reference's initial state so that the relative
// energy vanishes at t = 0. Requires expression initial data and a PASS admissibility verdict.
WeakStrongStudy weak_strong_study(const Scenario& sc, const WeakStrongOptions& opt = {});

}  // namespace nsf
