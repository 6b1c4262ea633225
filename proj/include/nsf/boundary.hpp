#pragma once

#include <array>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nsf/mesh.hpp"
#include "nsf/thermo.hpp"

namespace nsf {

enum class FaceKind { In, Out, Wall };

const char* to_string(FaceKind k);

struct BoundaryFace {
  double pos = 0.0;
  double normal = -1.0;
  double u_b = 0.0;
  double rho_b = std::numeric_limits<double>::quiet_NaN();
  double F_ib = std::numeric_limits<double>::quiet_NaN();
  bool wall = false;  // configured wall: classify as Wall regardless of rounding in u_b
  FaceKind kind = FaceKind::Wall;

  double u_dot_n() const { return kind == FaceKind::Wall ? 0.0 : u_b * normal; }
};

// faces[0] at x_left (n = -1), faces[1] at x_right (n = +1).
struct BoundarySpec {
  std::array<BoundaryFace, 2> faces;

  // Boundary velocity extended linearly across the domain.
  double u_b_at(const Mesh1D& mesh, double x) const;
  double u_b_gradient(const Mesh1D& mesh) const;
};

// Labels by the sign of u_b . n; |u_b . n| <= 1e-14 max|u_b| counts as zero.
std::vector<FaceKind> classify_faces(const Mesh1D& mesh, std::span<const double> u_b,
                                     std::span<const bool> wall_flags = {});

// Builds a classified spec from face data at the two ends of the mesh.
BoundarySpec make_boundary(const Mesh1D& mesh, BoundaryFace left, BoundaryFace right);

// F_ib / theta + [s_d(rho_b, theta) - e_d(rho_b, theta) / theta] rho_b u_b . n with
// s_d = s + delta log theta, e_d = e + delta theta.
double entropy_inflow_flux(const EosSpec& eos, double rho_b, double theta, double u_b_dot_n,
                           double F_ib, double delta = 0.0);

struct FaceVerdict {
  std::size_t index = 0;
  double pos = 0.0;
  FaceKind kind = FaceKind::Wall;
  double u_dot_n = 0.0;
  double margin = 0.0;  // F_ib / |u_b . n| + 3/2 p_inf rho_b^{5/3}
  double F_tau = 0.0;
  bool rho_positive = true;
  bool flux_negative = true;
  bool pass = true;
};

struct AdmissibilityReport {
  bool pass = true;
  double sup_margin = -std::numeric_limits<double>::infinity();
  std::vector<FaceVerdict> faces;
  std::vector<std::string> issues;  // "faces[i].field: message [label]"
};

AdmissibilityReport admissibility_check(const EosSpec& eos, const BoundarySpec& spec);

// (3/2 p_inf rho_b^{5/3} u_b . n, F_ib / u_b . n - 3/2 p_inf rho_b^{5/3})
std::pair<double, double> cold_heat_flux_split(const EosSpec& eos, double rho_b, double u_b_dot_n,
                                               double F_ib);

}  // namespace nsf
