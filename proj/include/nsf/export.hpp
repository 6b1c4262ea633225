#pragma once

#include <string>
#include <vector>

#include "nsf/budgets.hpp"
#include "nsf/eos_io.hpp"
#include "nsf/studies.hpp"

namespace nsf {

// Round-trip decimal representation.
std::string format_double(double v);

// "state_<t>.csv" with t in fixed six-decimal notation.
std::string state_file_name(double t);

std::string state_csv(const Mesh1D& mesh, const FieldState& s);

// Cumulative boundary integrals after every accepted step.
std::string fluxes_csv(const Trajectory& tr);

std::string budget_csv(const std::vector<BudgetRow>& rows);
std::string relative_energy_csv(const RelEnergyTrace& trace);

Json check_items_json(const std::vector<CheckItem>& items);
Json admissibility_json(const BoundarySpec& spec, const AdmissibilityReport& rep);
Json budget_report_json(const BudgetReport& r);
Json convergence_json(const ConvergenceResult& r, bool pass);
Json weak_strong_json(const WeakStrongStudy& st, bool pass);

void write_text_file(const std::string& path, const std::string& content);

// Writes the state files and fluxes.csv into dir (created if missing).
void export_trajectory(const Trajectory& tr, const std::string& dir);

}  // namespace nsf
