#pragma once

#include <cstddef>
#include <vector>

namespace nsf {

struct Mesh1D {
  double x_left = 0.0;
  double x_right = 1.0;
  std::size_t n_cells = 64;

  double h() const { return (x_right - x_left) / static_cast<double>(n_cells); }
  double length() const { return x_right - x_left; }
  double center(std::size_t i) const { return x_left + (static_cast<double>(i) + 0.5) * h(); }
  double face(std::size_t f) const { return x_left + static_cast<double>(f) * h(); }
};

struct FieldState {
  double t = 0.0;
  std::vector<double> rho, u, theta;

  std::size_t size() const { return rho.size(); }
};

}  // namespace nsf
