#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "nsf/solver.hpp"

namespace nsf {

enum class MmsKind { ThermalRelaxation, AcousticSmooth, Throughflow };

const char* to_string(MmsKind k);
MmsKind mms_kind_from_string(const std::string& name);

// Value and derivatives of one closed-form field at (t, x).
struct Jet {
  double v = 0.0, t = 0.0, x = 0.0, xx = 0.0;
};

struct MmsCase {
  MmsKind kind = MmsKind::ThermalRelaxation;
  EosSpec eos;
  TransportSpec transport;
  SolverConfig cfg;
  double x_left = 0.0, x_right = 1.0;
  BoundaryFace left, right;
  // rho, u, theta
  std::function<std::array<Jet, 3>(double t, double x)> fields;
};

// Iconic EOS (a = 1, p_inf = 1), default transport, eps = delta = 0.
MmsCase manufactured_case(MmsKind kind);

struct MmsSource {
  double f_rho, f_m, f_E;
};

// Sources that make the closed forms solve the regularized system.
MmsSource mms_source(const MmsCase& c, double t, double x);

// Problem on n cells with the case's sources attached.
Problem mms_problem(const MmsCase& c, std::size_t n);

// Closed-form fields at cell centres.
FieldState mms_exact(const MmsCase& c, const Mesh1D& mesh, double t);

// Largest residual of the three balance laws evaluated by finite differences of the closed
// forms at n_probe points, minus the sources.
double mms_residual_probe(const MmsCase& c, double t, std::size_t n_probe = 1024);

}  // namespace nsf
