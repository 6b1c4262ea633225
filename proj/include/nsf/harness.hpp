#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "nsf/boundary.hpp"
#include "nsf/eos_io.hpp"
#include "nsf/expr.hpp"
#include "nsf/solver.hpp"

namespace nsf {

// Initial field given as an expression in x or as one value per cell.
using FieldInit = std::variant<Expr, std::vector<double>>;

struct Scenario {
  std::string name;
  Problem problem;
  FieldInit rho0, u0, theta0;
  std::vector<double> output_times;
  std::vector<CheckItem> eos_checks;
  std::vector<CheckItem> transport_checks;
  AdmissibilityReport admissibility;
};

// Parses and validates; throws Error(Validation) listing every issue, one per line, as
// "field.path: message [label]".
Scenario parse_scenario(const std::string& json_text, const std::string& name = "scenario");
Scenario load_scenario(const std::string& path);

struct BoundaryAudit {
  BoundarySpec spec;
  AdmissibilityReport report;  // issue paths are prefixed with "boundary."
};

// Classification and admissibility of a scenario's boundary block; needs only the mesh,
// eos and boundary entries to parse.
BoundaryAudit audit_boundary_text(const std::string& json_text);

struct InitialData {
  FieldState state;
  std::size_t theta_clamps = 0;
};

// Samples the initial fields at cell centres; theta is clamped to [theta_floor, 1/theta_floor].
InitialData initial_state(const Scenario& sc);

// Output times from either an explicit list or a spacing, always ending at t_end.
std::vector<double> output_schedule(double t_end, const std::vector<double>& times, double every);

}  // namespace nsf
