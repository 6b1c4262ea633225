#include "nsf/mms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "nsf/errors.hpp"

namespace nsf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kOmega = 2.0 * kPi;
constexpr double kThroughU = 0.5;

std::array<Jet, 3> thermal_fields(double t, double x) {
  const double a = 0.1 * std::exp(-t), c = std::cos(kPi * x), s = std::sin(kPi * x);
  return {Jet{1.0, 0.0, 0.0, 0.0}, Jet{0.0, 0.0, 0.0, 0.0},
          Jet{1.0 + a * c, -a * c, -a * kPi * s, -a * kPi * kPi * c}};
}

std::array<Jet, 3> acoustic_fields(double t, double x) {
  const double c = std::cos(kPi * x), s = std::sin(kPi * x);
  const double ct = std::cos(kOmega * t), st = std::sin(kOmega * t);
  auto cosine = [&](double amp) {
    return Jet{1.0 + amp * c * ct, -amp * kOmega * c * st, -amp * kPi * s * ct, -amp * kPi * kPi * c * ct};
  };
  const double b = 0.1;
  return {cosine(0.1), Jet{b * s * st, b * kOmega * s * ct, b * kPi * c * st, -b * kPi * kPi * s * st},
          cosine(0.05)};
}

std::array<Jet, 3> throughflow_fields(double t, double x) {
  const double a = 0.1 * std::exp(-t);
  const double s = std::sin(kPi * x), c = std::cos(kPi * x);
  const double sh = std::sin(0.5 * kPi * x), ch = std::cos(0.5 * kPi * x);
  return {Jet{1.0 + a * sh, -a * sh, 0.5 * kPi * a * ch, -0.25 * kPi * kPi * a * sh},
          Jet{kThroughU + a * s, -a * s, kPi * a * c, -kPi * kPi * a * s},
          Jet{1.0 + a * (1.0 - c), -a * (1.0 - c), kPi * a * s, kPi * kPi * a * c}};
}

double sigma_of(const MmsCase& c, double theta) {
  const auto k = transport_coefficients(c.transport, theta);
  return (k.mu + c.cfg.delta * theta) * 2.0 * (1.0 - 1.0 / c.cfg.d) + k.eta;
}

double dsigma_of(const MmsCase& c, double theta) {
  const auto k = transport_derivatives(c.transport, theta);
  return (k.mu + c.cfg.delta) * 2.0 * (1.0 - 1.0 / c.cfg.d) + k.eta;
}

double cond_of(const MmsCase& c, double theta) {
  return transport_coefficients(c.transport, theta).kappa +
         c.cfg.delta * (std::pow(theta, c.cfg.Gamma) + 1.0 / theta);
}

double dcond_of(const MmsCase& c, double theta) {
  const double G = c.cfg.Gamma;
  return transport_derivatives(c.transport, theta).kappa +
         c.cfg.delta * (G * std::pow(theta, G - 1.0) - 1.0 / (theta * theta));
}

double p_delta(const MmsCase& c, double rho, double theta) {
  return pressure(c.eos, rho, theta) + c.cfg.delta * (std::pow(rho, c.cfg.Gamma) + rho * rho);
}

double e_delta(const MmsCase& c, double rho, double theta) {
  return specific_internal_energy(c.eos, rho, theta) + c.cfg.delta * theta;
}

// Fourth-order central difference.
template <class F>
double d4(F&& f, double x, double h) {
  return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

}  // namespace

const char* to_string(MmsKind k) {
  switch (k) {
    case MmsKind::ThermalRelaxation: return "thermal_relaxation";
    case MmsKind::AcousticSmooth: return "acoustic_smooth";
    case MmsKind::Throughflow: return "throughflow";
  }
  return "?";
}

MmsKind mms_kind_from_string(const std::string& name) {
  for (MmsKind k : {MmsKind::ThermalRelaxation, MmsKind::AcousticSmooth, MmsKind::Throughflow})
    if (name == to_string(k)) return k;
  throw Error(Errc::Validation, fmt::format("unknown manufactured case '{}'", name));
}

MmsCase manufactured_case(MmsKind kind) {
  MmsCase c;
  c.kind = kind;
  c.eos = make_iconic(1.0, 1.0);
  c.left.wall = c.right.wall = true;
  switch (kind) {
    case MmsKind::ThermalRelaxation: c.fields = thermal_fields; break;
    case MmsKind::AcousticSmooth: c.fields = acoustic_fields; break;
    case MmsKind::Throughflow: {
      c.fields = throughflow_fields;
      c.left.wall = c.right.wall = false;
      c.left.u_b = c.right.u_b = kThroughU;
      c.left.rho_b = 1.0;
      c.left.F_ib = -kThroughU * specific_internal_energy(c.eos, 1.0, 1.0);
      break;
    }
  }
  return c;
}

MmsSource mms_source(const MmsCase& c, double t, double x) {
  const auto [R, U, T] = c.fields(t, x);
  const SolverConfig& cfg = c.cfg;
  const double ep = cfg.epsilon, dl = cfg.delta, G = cfg.Gamma;
  const ThermoDerivs d = caloric_derivs(c.eos, R.v, T.v);
  const double ed = d.e + dl * T.v;
  const double ed_t = d.e_rho * R.t + (d.e_theta + dl) * T.t;
  const double ed_x = d.e_rho * R.x + (d.e_theta + dl) * T.x;
  const double pd_x = (d.p_rho + dl * (G * std::pow(R.v, G - 1.0) + 2.0 * R.v)) * R.x + d.p_theta * T.x;
  const double sg = sigma_of(c, T.v), dsg = dsigma_of(c, T.v);
  const double k = cond_of(c, T.v), dk = dcond_of(c, T.v);
  const double mass_x = R.x * U.v + R.v * U.x;

  MmsSource s;
  s.f_rho = R.t + mass_x - ep * R.xx;
  s.f_m = R.t * U.v + R.v * U.t + R.x * U.v * U.v + 2.0 * R.v * U.v * U.x + pd_x -
          (dsg * T.x * U.x + sg * U.xx) - R.v * cfg.g + ep * R.x * U.x;
  const double q_x = -(dk * T.x * T.x + k * T.xx);
  s.f_E = R.t * ed + R.v * ed_t + mass_x * ed + R.v * U.v * ed_x + q_x - sg * U.x * U.x + d.p * U.x -
          ep * dl * (G * std::pow(R.v, G - 2.0) + 2.0) * R.x * R.x - dl / (T.v * T.v) +
          ep * std::pow(T.v, 5.0);
  return s;
}

Problem mms_problem(const MmsCase& c, std::size_t n) {
  Problem P;
  P.mesh = Mesh1D{c.x_left, c.x_right, n};
  P.eos = c.eos;
  P.transport = c.transport;
  P.cfg = c.cfg;
  P.boundary = make_boundary(P.mesh, c.left, c.right);
  P.source = [c](double t, const Mesh1D& mesh, std::span<double> fr, std::span<double> fm,
                 std::span<double> fe) {
    for (std::size_t i = 0; i < mesh.n_cells; ++i) {
      const MmsSource s = mms_source(c, t, mesh.center(i));
      fr[i] = s.f_rho;
      fm[i] = s.f_m;
      fe[i] = s.f_E;
    }
  };
  return P;
}

FieldState mms_exact(const MmsCase& c, const Mesh1D& mesh, double t) {
  FieldState s;
  s.t = t;
  for (std::size_t i = 0; i < mesh.n_cells; ++i) {
    const auto f = c.fields(t, mesh.center(i));
    s.rho.push_back(f[0].v);
    s.u.push_back(f[1].v);
    s.theta.push_back(f[2].v);
  }
  return s;
}

double mms_residual_probe(const MmsCase& c, double t, std::size_t n_probe) {
  const SolverConfig& cfg = c.cfg;
  const double hx = 1e-3 * (c.x_right - c.x_left), ht = 1e-3;
  auto rho = [&](double tt, double x) { return c.fields(tt, x)[0].v; };
  auto vel = [&](double tt, double x) { return c.fields(tt, x)[1].v; };
  auto tem = [&](double tt, double x) { return c.fields(tt, x)[2].v; };
  double worst = 0.0;
  for (std::size_t j = 0; j < n_probe; ++j) {
    const double x = c.x_left + (static_cast<double>(j) + 0.5) / static_cast<double>(n_probe) *
                                    (c.x_right - c.x_left);
    auto dx = [&](auto&& f) { return d4([&](double y) { return f(y); }, x, hx); };
    auto dt = [&](auto&& f) { return d4([&](double s) { return f(s); }, t, ht); };
    auto rho_x = [&](double y) { return d4([&](double z) { return rho(t, z); }, y, hx); };
    auto u_x = [&](double y) { return d4([&](double z) { return vel(t, z); }, y, hx); };
    auto th_x = [&](double y) { return d4([&](double z) { return tem(t, z); }, y, hx); };

    const MmsSource s = mms_source(c, t, x);
    const double r = rho(t, x), th = tem(t, x);
    const double rx = rho_x(x), ux = u_x(x);

    const double res_rho = dt([&](double s_) { return rho(s_, x); }) +
                           dx([&](double y) { return rho(t, y) * vel(t, y); }) -
                           cfg.epsilon * dx(rho_x) - s.f_rho;
    const double res_m =
        dt([&](double s_) { return rho(s_, x) * vel(s_, x); }) +
        dx([&](double y) { return rho(t, y) * vel(t, y) * vel(t, y) + p_delta(c, rho(t, y), tem(t, y)); }) -
        dx([&](double y) { return sigma_of(c, tem(t, y)) * u_x(y); }) - r * cfg.g +
        cfg.epsilon * rx * ux - s.f_m;
    const double G = cfg.Gamma;
    const double res_E =
        dt([&](double s_) { return rho(s_, x) * e_delta(c, rho(s_, x), tem(s_, x)); }) +
        dx([&](double y) { return rho(t, y) * e_delta(c, rho(t, y), tem(t, y)) * vel(t, y); }) -
        dx([&](double y) { return cond_of(c, tem(t, y)) * th_x(y); }) - sigma_of(c, th) * ux * ux +
        pressure(c.eos, r, th) * ux - cfg.epsilon * cfg.delta * (G * std::pow(r, G - 2.0) + 2.0) * rx * rx -
        cfg.delta / (th * th) + cfg.epsilon * std::pow(th, 5.0) - s.f_E;
    worst = std::max({worst, std::abs(res_rho), std::abs(res_m), std::abs(res_E)});
  }
  return worst;
}

}  // namespace nsf
