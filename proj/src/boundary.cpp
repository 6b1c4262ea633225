#include "nsf/boundary.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nsf/errors.hpp"

namespace nsf {

const char* to_string(FaceKind k) {
  switch (k) {
    case FaceKind::In: return "in";
    case FaceKind::Out: return "out";
    case FaceKind::Wall: return "wall";
  }
  return "?";
}

double BoundarySpec::u_b_at(const Mesh1D& mesh, double x) const {
  const double w = (x - mesh.x_left) / mesh.length();
  const double ul = faces[0].kind == FaceKind::Wall ? 0.0 : faces[0].u_b;
  const double ur = faces[1].kind == FaceKind::Wall ? 0.0 : faces[1].u_b;
  return ul + w * (ur - ul);
}

double BoundarySpec::u_b_gradient(const Mesh1D& mesh) const {
  const double ul = faces[0].kind == FaceKind::Wall ? 0.0 : faces[0].u_b;
  const double ur = faces[1].kind == FaceKind::Wall ? 0.0 : faces[1].u_b;
  return (ur - ul) / mesh.length();
}

std::vector<FaceKind> classify_faces(const Mesh1D& mesh, std::span<const double> u_b,
                                     std::span<const bool> wall_flags) {
  (void)mesh;
  if (u_b.size() != 2) throw Error(Errc::Misuse, "a 1D mesh has exactly two boundary faces");
  const std::array<double, 2> normal{-1.0, 1.0};
  double scale = 0.0;
  for (double v : u_b) scale = std::max(scale, std::abs(v));
  std::vector<FaceKind> out(2, FaceKind::Wall);
  for (std::size_t f = 0; f < 2; ++f) {
    if (!wall_flags.empty() && wall_flags[f]) continue;
    const double un = u_b[f] * normal[f];
    if (std::abs(un) <= 1e-14 * scale) continue;
    out[f] = un < 0.0 ? FaceKind::In : FaceKind::Out;
  }
  return out;
}

BoundarySpec make_boundary(const Mesh1D& mesh, BoundaryFace left, BoundaryFace right) {
  BoundarySpec b;
  left.pos = mesh.x_left;
  left.normal = -1.0;
  right.pos = mesh.x_right;
  right.normal = 1.0;
  const std::array<double, 2> u{left.u_b, right.u_b};
  const std::array<bool, 2> w{left.wall, right.wall};
  const auto kinds = classify_faces(mesh, u, w);
  left.kind = kinds[0];
  right.kind = kinds[1];
  b.faces = {left, right};
  return b;
}

double entropy_inflow_flux(const EosSpec& eos, double rho_b, double theta, double u_b_dot_n,
                           double F_ib, double delta) {
  if (!(u_b_dot_n < 0.0))
    throw Error(Errc::Misuse, "entropy inflow flux is defined on inflow faces only (u_b . n < 0)");
  const ThermoDerivs d = thermo_derivs(eos, rho_b, theta);
  const double s = d.s + delta * std::log(theta);
  const double e = d.e + delta * theta;
  return F_ib / theta + (s - e / theta) * rho_b * u_b_dot_n;
}

AdmissibilityReport admissibility_check(const EosSpec& eos, const BoundarySpec& spec) {
  AdmissibilityReport rep;
  for (std::size_t i = 0; i < spec.faces.size(); ++i) {
    const BoundaryFace& f = spec.faces[i];
    FaceVerdict v;
    v.index = i;
    v.pos = f.pos;
    v.kind = f.kind;
    v.u_dot_n = f.u_dot_n();
    if (f.kind != FaceKind::In) {
      v.margin = -std::numeric_limits<double>::infinity();
      rep.faces.push_back(v);
      continue;
    }
    const double cold = 1.5 * eos.p_inf * std::pow(std::abs(f.rho_b), 5.0 / 3.0);
    v.margin = f.F_ib / std::abs(v.u_dot_n) + cold;
    v.F_tau = f.F_ib / v.u_dot_n - cold;
    v.rho_positive = f.rho_b > 0.0;
    v.flux_negative = f.F_ib < 0.0;
    v.pass = v.rho_positive && v.flux_negative && v.margin < 0.0;
    if (!v.rho_positive)
      rep.issues.push_back(fmt::format("faces[{}].rho_b: inflow density must be positive, got {} [E1]", i, f.rho_b));
    if (!v.flux_negative)
      rep.issues.push_back(fmt::format("faces[{}].F_ib: inflow energy flux must be negative, got {} [ws12]", i, f.F_ib));
    if (!(v.margin < 0.0))
      rep.issues.push_back(fmt::format(
          "faces[{}].F_ib: F_ib/|u_b.n| + 1.5 p_inf rho_b^(5/3) = {} must be negative [ws14bis]", i, v.margin));
    rep.sup_margin = std::max(rep.sup_margin, v.margin);
    rep.pass = rep.pass && v.pass;
    rep.faces.push_back(v);
  }
  return rep;
}

std::pair<double, double> cold_heat_flux_split(const EosSpec& eos, double rho_b, double u_b_dot_n,
                                               double F_ib) {
  if (!(u_b_dot_n < 0.0))
    throw Error(Errc::Misuse, "cold/heat split is defined on inflow faces only (u_b . n < 0)");
  const double c = 1.5 * eos.p_inf * std::pow(rho_b, 5.0 / 3.0);
  return {c * u_b_dot_n, F_ib / u_b_dot_n - c};
}

}  // namespace nsf
