#include "nsf/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

// pchip in this Boost release calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/random/sobol.hpp>
#include <fmt/format.h>

#include "nsf/errors.hpp"
#include "nsf/numerics.hpp"

namespace nsf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class T>
T pow23(T z) {
  T c = std::cbrt(z);
  return c * c;
}

void require_theta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw Error(Errc::Domain, fmt::format("temperature must be positive and finite, got {}", theta));
}

void require_rho_positive(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw Error(Errc::Domain, fmt::format("density must be positive and finite, got {}", rho));
}

std::size_t interval_of(const PressureTable& t, double Z) {
  // index k with z[k] <= Z < z[k+1]; N - 1 + 1 == size - 1 means tail
  auto it = std::upper_bound(t.z.begin(), t.z.end(), Z);
  return static_cast<std::size_t>(it - t.z.begin()) - 1;
}

template <class T>
void hermite(const PressureTable& t, std::size_t k, T Z, T& P, T& dP) {
  const T h = T(t.z[k + 1]) - T(t.z[k]);
  const T s = (Z - T(t.z[k])) / h;
  const T s2 = s * s;
  const T s3 = s2 * s;
  const T h00 = 2 * s3 - 3 * s2 + 1;
  const T h10 = s3 - 2 * s2 + s;
  const T h01 = -2 * s3 + 3 * s2;
  const T h11 = s3 - s2;
  P = h00 * T(t.p[k]) + h10 * h * T(t.dp[k]) + h01 * T(t.p[k + 1]) + h11 * h * T(t.dp[k + 1]);
  const T g00 = 6 * s2 - 6 * s;
  const T g10 = 3 * s2 - 4 * s + 1;
  const T g01 = -6 * s2 + 6 * s;
  const T g11 = 3 * s2 - 2 * s;
  dP = (g00 * T(t.p[k]) + g01 * T(t.p[k + 1])) / h + g10 * T(t.dp[k]) + g11 * T(t.dp[k + 1]);
}

// P, P' and the entropy-function derivative.
template <class T>
void shape_pd(const EosSpec& eos, T Z, T& P, T& dP, T& dS) {
  const T pinf = T(eos.p_inf);
  if (eos.shape == ShapeKind::Iconic) {
    const T z23 = pow23(Z);
    P = Z + pinf * Z * z23;
    dP = 1 + T(5) / 3 * pinf * z23;
    dS = -1 / Z;
    return;
  }
  const PressureTable& t = *eos.table;
  const std::size_t k = interval_of(t, static_cast<double>(Z));
  if (k + 1 >= t.z.size()) {
    const T alpha = T(t.tail_alpha);
    const T bza = T(t.tail_b) * std::pow(Z, alpha);
    const T z23 = pow23(Z);
    P = pinf * Z * z23 + bza;
    dP = T(5) / 3 * pinf * z23 + alpha * bza / Z;
    dS = -T(1.5) * (T(5) / 3 - alpha) * bza / (Z * Z);
    return;
  }
  hermite(t, k, Z, P, dP);
  dS = -T(1.5) * (T(5) / 3 * P - dP * Z) / (Z * Z);
}

double table_dS(const PressureTable& t, const EosSpec& eos, double Z) {
  double P, dP, dS;
  (void)t;
  shape_pd(eos, Z, P, dP, dS);
  return dS;
}

double first_interval_raw(const PressureTable& t, double Z) {
  const double h = t.z[1];
  const double c1 = t.dp[0];
  const double c2 = (-2 * h * t.dp[0] + 3 * t.p[1] - h * t.dp[1]) / (h * h);
  const double c3 = (h * t.dp[0] - 2 * t.p[1] + h * t.dp[1]) / (h * h * h);
  return -c1 * std::log(Z) + 0.5 * c2 * Z + c3 * Z * Z;
}

double raw_entropy(const EosSpec& eos, double Z) {
  if (eos.shape == ShapeKind::Iconic) return -std::log(Z);
  const PressureTable& t = *eos.table;
  const std::size_t k = interval_of(t, Z);
  const std::size_t N = t.z.size() - 1;
  if (k >= N) {
    const double a = t.tail_alpha;
    return t.s_raw[N] +
           1.5 * t.tail_b * (5.0 / 3.0 - a) / (1.0 - a) * (std::pow(Z, a - 1) - std::pow(t.z[N], a - 1));
  }
  if (k == 0) return first_interval_raw(t, Z);
  auto f = [&](double x) { return table_dS(t, eos, x); };
  return t.s_raw[k] + boost::math::quadrature::gauss<double, 10>::integrate(f, t.z[k], Z);
}

double entropy_anchor(const EosSpec& eos) {
  if (eos.shape == ShapeKind::Iconic) return 0.0;
  return eos.third_law ? eos.table->s_raw_inf : raw_entropy(eos, 1.0);
}

template <class T>
ThermoDerivs derivs_impl(const EosSpec& eos, double rho_d, double theta_d) {
  const T rho = rho_d, th = theta_d, a = eos.a;
  const T sq = std::sqrt(th);
  const T th32 = th * sq;
  const T Z = rho / th32;
  T P, dP, dS;
  shape_pd(eos, Z, P, dP, dS);
  const T th2 = th * th, th3 = th2 * th, th4 = th2 * th2;
  const T r = (T(5) / 3 * P - dP * Z) / Z;
  ThermoDerivs d{};
  d.p = static_cast<double>(th * th32 * P + a / 3 * th4);
  d.p_rho = static_cast<double>(th * dP);
  d.p_theta = static_cast<double>(th32 * (T(2.5) * P - T(1.5) * dP * Z) + 4 * a / 3 * th3);
  d.e = static_cast<double>(T(1.5) * th * P / Z + a * th4 / rho);
  d.e_rho = static_cast<double>(T(1.5) * th * (dP - P / Z) / rho - a * th4 / (rho * rho));
  d.e_theta = static_cast<double>(T(2.25) * r + 4 * a * th3 / rho);
  d.s = std::numeric_limits<double>::quiet_NaN();
  d.s_rho = static_cast<double>(dS * Z / rho - 4 * a / 3 * th3 / (rho * rho));
  d.s_theta = static_cast<double>(-T(1.5) * dS * Z / th + 4 * a * th2 / rho);
  return d;
}

}  // namespace

EosSpec make_iconic(double a, double p_inf, double entropy_const) {
  EosSpec e;
  e.shape = ShapeKind::Iconic;
  e.a = a;
  e.p_inf = p_inf;
  e.entropy_const = entropy_const;
  return e;
}

EosSpec make_tabulated(double a, double p_inf, std::vector<double> z, std::vector<double> p,
                       std::vector<double> dp, bool third_law, double entropy_const) {
  auto fail = [](const std::string& m) { throw Error(Errc::Validation, m); };
  if (z.size() != p.size()) fail("table: z and p differ in length");
  if (z.size() < 4) fail("table: at least four knots required");
  if (!dp.empty() && dp.size() != z.size()) fail("table: dp length differs from z");
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z[i]) || !std::isfinite(p[i])) fail("table: non-finite knot");
    if (i > 0 && !(z[i] > z[i - 1])) fail(fmt::format("table.z[{}]: knots must increase", i));
    if (i > 0 && !(p[i] > p[i - 1])) fail(fmt::format("table.p[{}]: P must increase [ws5]", i));
  }
  if (z[0] != 0.0) fail("table.z[0]: first knot must be Z = 0 [ws7]");
  if (p[0] != 0.0) fail("table.p[0]: P(0) must vanish [ws7]");
  if (!(p_inf > 0.0)) fail("p_inf: must be positive [ws6]");

  auto t = std::make_shared<PressureTable>();
  t->z = z;
  t->p = p;
  if (dp.empty()) {
    boost::math::interpolators::pchip<std::vector<double>> spline(std::move(z), std::move(p));
    t->dp.resize(t->z.size());
    for (std::size_t i = 0; i < t->z.size(); ++i) t->dp[i] = spline.prime(t->z[i]);
  } else {
    for (std::size_t i = 0; i < dp.size(); ++i)
      if (!(dp[i] > 0.0)) fail(fmt::format("table.dp[{}]: slope must be positive [ws5]", i));
    t->dp = std::move(dp);
  }

  const std::size_t N = t->z.size() - 1;
  const double zN = t->z[N];
  const double R = t->p[N] - p_inf * zN * pow23(zN);
  if (!(R > 0.0)) fail("table: last knot must lie above p_inf Z^{5/3} [ws6]");
  const double alpha = zN * (t->dp[N] - 5.0 / 3.0 * p_inf * pow23(zN)) / R;
  if (!(alpha < 1.0)) fail(fmt::format("table: tail exponent {} must be below 1 [ws7]", alpha));
  t->tail_alpha = alpha;
  t->tail_b = R / std::pow(zN, alpha);

  EosSpec e;
  e.shape = ShapeKind::Table;
  e.a = a;
  e.p_inf = p_inf;
  e.third_law = third_law;
  e.entropy_const = entropy_const;
  e.table = t;

  t->s_raw.assign(N + 1, 0.0);
  t->s_raw[1] = first_interval_raw(*t, t->z[1]);
  auto f = [&](double x) { return table_dS(*t, e, x); };
  for (std::size_t k = 1; k < N; ++k)
    t->s_raw[k + 1] =
        t->s_raw[k] + boost::math::quadrature::gauss<double, 10>::integrate(f, t->z[k], t->z[k + 1]);
  t->s_raw_inf = t->s_raw[N] - 1.5 * t->tail_b * (5.0 / 3.0 - alpha) / (1.0 - alpha) * std::pow(zN, alpha - 1);
  return e;
}

ShapeValue shape_eval(const EosSpec& eos, double Z) {
  if (!(Z > 0.0)) throw Error(Errc::Domain, "shape evaluated at nonpositive Z");
  ShapeValue v{};
  shape_pd(eos, Z, v.P, v.dP, v.dS);
  v.S = raw_entropy(eos, Z) - entropy_anchor(eos) + eos.entropy_const;
  return v;
}

double entropy_limit(const EosSpec& eos) {
  if (eos.shape == ShapeKind::Iconic) return -kInf;
  return eos.table->s_raw_inf - entropy_anchor(eos) + eos.entropy_const;
}

ThermoDerivs thermo_derivs(const EosSpec& eos, double rho, double theta) {
  require_theta(theta);
  require_rho_positive(rho);
  ThermoDerivs d = derivs_impl<double>(eos, rho, theta);
  const double Z = rho / (theta * std::sqrt(theta));
  d.s = raw_entropy(eos, Z) - entropy_anchor(eos) + eos.entropy_const +
        4.0 * eos.a / 3.0 * theta * theta * theta / rho;
  return d;
}

ThermoDerivs caloric_derivs(const EosSpec& eos, double rho, double theta) {
  require_theta(theta);
  require_rho_positive(rho);
  return derivs_impl<double>(eos, rho, theta);
}

double pressure(const EosSpec& eos, double rho, double theta) {
  require_theta(theta);
  if (!(rho >= 0.0)) throw Error(Errc::Domain, fmt::format("density must be nonnegative, got {}", rho));
  const double th4 = theta * theta * theta * theta;
  if (rho == 0.0) return eos.a / 3.0 * th4;
  const double th32 = theta * std::sqrt(theta);
  double P, dP, dS;
  shape_pd(eos, rho / th32, P, dP, dS);
  return theta * th32 * P + eos.a / 3.0 * th4;
}

double specific_internal_energy(const EosSpec& eos, double rho, double theta) {
  require_theta(theta);
  require_rho_positive(rho);
  const double th32 = theta * std::sqrt(theta);
  const double Z = rho / th32;
  double P, dP, dS;
  shape_pd(eos, Z, P, dP, dS);
  return 1.5 * theta * P / Z + eos.a * theta * theta * theta * theta / rho;
}

double specific_entropy(const EosSpec& eos, double rho, double theta) {
  require_theta(theta);
  require_rho_positive(rho);
  const double Z = rho / (theta * std::sqrt(theta));
  return raw_entropy(eos, Z) - entropy_anchor(eos) + eos.entropy_const +
         4.0 * eos.a / 3.0 * theta * theta * theta / rho;
}

double energy_density(const EosSpec& eos, double rho, double theta) {
  require_theta(theta);
  if (rho == 0.0) return eos.a * theta * theta * theta * theta;
  return rho * specific_internal_energy(eos, rho, theta);
}

double entropy_density(const EosSpec& eos, double rho, double theta) {
  require_theta(theta);
  if (rho == 0.0) return 4.0 * eos.a / 3.0 * theta * theta * theta;
  return rho * specific_entropy(eos, rho, theta);
}

std::pair<double, double> gibbs_residual(const EosSpec& eos, double rho, double theta) {
  require_theta(theta);
  require_rho_positive(rho);
  using L = long double;
  const L r = rho, th = theta, a = eos.a;
  const L sq = std::sqrt(th);
  const L Z = r / (th * sq);
  L P, dP, dS;
  shape_pd(eos, Z, P, dP, dS);
  const L th2 = th * th, th3 = th2 * th, th4 = th2 * th2;
  const L p = th2 * sq * P + a / 3 * th4;
  const L e_rho = L(1.5) * th * (dP - P / Z) / r - a * th4 / (r * r);
  const L e_theta = L(2.25) * (L(5) / 3 * P - dP * Z) / Z + 4 * a * th3 / r;
  const L s_rho = dS * Z / r - 4 * a / 3 * th3 / (r * r);
  const L s_theta = -L(1.5) * dS * Z / th + 4 * a * th2 / r;
  return {static_cast<double>(th * s_theta - e_theta),
          static_cast<double>(th * s_rho - e_rho + p / (r * r))};
}

std::pair<double, double> stability_margins(const EosSpec& eos, double rho, double theta) {
  const ThermoDerivs d = thermo_derivs(eos, rho, theta);
  return {d.p_rho, d.e_theta};
}

ConservativeState to_conservative(const EosSpec& eos, const ThermoState& s) {
  require_rho_positive(s.rho);
  return {s.rho, s.rho * s.u, entropy_density(eos, s.rho, s.theta)};
}

double theta_from_entropy(const EosSpec& eos, double rho, double S, double lo, double hi, double seed) {
  require_rho_positive(rho);
  const double smin = rho * entropy_limit(eos);
  if (!(S > smin) || !std::isfinite(S))
    throw Error(Errc::Domain, fmt::format("(rho, S) = ({}, {}) lies outside the entropy domain", rho, S));
  auto fdf = [&](double th) {
    const ThermoDerivs d = thermo_derivs(eos, rho, th);
    return std::pair{rho * d.s - S, rho * d.s_theta};
  };
  return increasing_root(fdf, lo, hi, seed, "temperature from entropy", 1e-15);
}

double theta_from_energy(const EosSpec& eos, double rho, double e_target, double delta, double lo,
                         double hi, double seed) {
  require_rho_positive(rho);
  auto fdf = [&](double th) {
    const ThermoDerivs d = derivs_impl<double>(eos, rho, th);
    return std::pair{d.e + delta * th - e_target, d.e_theta + delta};
  };
  return increasing_root(fdf, lo, hi, seed, "temperature from energy", 1e-15);
}

ThermoState from_conservative(const EosSpec& eos, const ConservativeState& c) {
  require_rho_positive(c.rho);
  const double th = theta_from_entropy(eos, c.rho, c.S, 1e-8, 1e8, 1.0);
  return {c.rho, c.m / c.rho, th};
}

double extended_internal_energy(const EosSpec& eos, double rho, double S) {
  if (std::isnan(rho) || std::isnan(S) || rho < 0.0) return kInf;
  const double s_inf = entropy_limit(eos);
  if (rho == 0.0) {
    if (S < 0.0) return std::isfinite(s_inf) ? kInf : 0.0;
    if (S == 0.0) return 0.0;
    if (!(eos.a > 0.0)) return kInf;
    return eos.a * std::pow(3.0 * S / (4.0 * eos.a), 4.0 / 3.0);
  }
  const double smin = std::isfinite(s_inf) ? rho * s_inf : -kInf;
  if (S < smin) return kInf;
  if (S == smin) return 1.5 * eos.p_inf * rho * pow23(rho);
  if (!std::isfinite(S)) return kInf;
  constexpr double lo = 1e-60, hi = 1e60;
  if (entropy_density(eos, rho, lo) >= S) return energy_density(eos, rho, lo);
  if (entropy_density(eos, rho, hi) <= S) return kInf;
  const double th = theta_from_entropy(eos, rho, S, lo, hi, 1.0);
  return energy_density(eos, rho, th);
}

double boundary_liminf(const EosSpec& eos, double rho, double S, double rho_anchor, double S_anchor,
                       double rtol) {
  double prev = std::numeric_limits<double>::quiet_NaN();
  double w = 1.0;
  for (int k = 1; k <= 200; ++k) {
    w *= 0.5;
    const double r = rho + w * (rho_anchor - rho);
    const double s = S + w * (S_anchor - S);
    const double v = extended_internal_energy(eos, r, s);
    if (!std::isfinite(v)) return kInf;
    if (std::isfinite(prev) && std::abs(v - prev) <= rtol * std::max(1.0, std::abs(v))) return v;
    prev = v;
  }
  return prev;
}

TransportCoeffs transport_coefficients(const TransportSpec& ts, double theta) {
  require_theta(theta);
  const double tl = std::pow(theta, ts.lambda_exp);
  return {ts.mu0 * (1.0 + tl), ts.eta0 * (1.0 + tl), ts.kappa0 * (1.0 + theta * theta * theta)};
}

TransportCoeffs transport_derivatives(const TransportSpec& ts, double theta) {
  require_theta(theta);
  const double dl = ts.lambda_exp * std::pow(theta, ts.lambda_exp - 1.0);
  return {ts.mu0 * dl, ts.eta0 * dl, 3.0 * ts.kappa0 * theta * theta};
}

std::vector<CheckItem> check_eos(const EosSpec& eos) {
  std::vector<CheckItem> out;
  auto add = [&](std::string name, std::string label, bool pass, std::string detail) {
    out.push_back({std::move(name), std::move(label), pass, std::move(detail)});
  };

  add("radiation constant a > 0", "", eos.a > 0.0, fmt::format("a = {}", eos.a));
  add("p_inf > 0", "ws6", eos.p_inf > 0.0, fmt::format("p_inf = {}", eos.p_inf));
  if (!(eos.p_inf > 0.0) || (eos.shape == ShapeKind::Table && !eos.table)) return out;

  // sample grid: log spaced, refined inside every table interval and along the tail
  std::vector<double> grid;
  for (int i = 0; i <= 2000; ++i) grid.push_back(std::pow(10.0, -8.0 + 16.0 * i / 2000.0));
  if (eos.shape == ShapeKind::Table) {
    const auto& t = *eos.table;
    for (std::size_t k = 0; k + 1 < t.z.size(); ++k)
      for (int j = 1; j <= 64; ++j) grid.push_back(t.z[k] + (t.z[k + 1] - t.z[k]) * j / 64.0);
  }
  std::sort(grid.begin(), grid.end());

  double P0 = 0.0;
  if (eos.shape == ShapeKind::Table) P0 = eos.table->p[0];
  add("P(0) = 0", "ws7", P0 == 0.0, fmt::format("P(0) = {}", P0));

  double min_dp = kInf, min_ratio = kInf, max_ratio = 0.0, worst_incr = 0.0;
  double prev_q = kInf;
  for (double Z : grid) {
    double P, dP, dS;
    shape_pd(eos, Z, P, dP, dS);
    min_dp = std::min(min_dp, dP);
    const double ratio = (5.0 / 3.0 * P - dP * Z) / Z;
    min_ratio = std::min(min_ratio, ratio);
    max_ratio = std::max(max_ratio, ratio);
    const double q = P / (Z * pow23(Z));
    if (std::isfinite(prev_q) && q > prev_q) worst_incr = std::max(worst_incr, (q - prev_q) / prev_q);
    prev_q = q;
  }
  add("P'(Z) > 0", "ws5", min_dp > 0.0, fmt::format("min P' = {:.6g}", min_dp));
  add("(5/3 P - P' Z)/Z > 0", "ws5", min_ratio > 0.0, fmt::format("min = {:.6g}", min_ratio));
  const bool bounded_tail = eos.shape == ShapeKind::Iconic || eos.table->tail_alpha <= 1.0;
  add("(5/3 P - P' Z)/Z bounded", "ws7", std::isfinite(max_ratio) && bounded_tail,
      fmt::format("sup = {:.6g}", max_ratio));
  {
    double P, dP, dS;
    const double Zbig = 1e12;
    shape_pd(eos, Zbig, P, dP, dS);
    const double lim = P / (Zbig * pow23(Zbig));
    const bool ok = worst_incr <= 1e-12 && std::abs(lim - eos.p_inf) <= 1e-3 * eos.p_inf;
    add("P/Z^{5/3} nonincreasing with limit p_inf", "ws6", ok,
        fmt::format("max relative increase = {:.3g}, value at 1e12 = {:.9g}", worst_incr, lim));
  }

  if (eos.third_law) {
    const double lim = entropy_limit(eos);
    add("third law: entropy function tends to 0", "", std::isfinite(lim) && lim == 0.0,
        std::isfinite(lim) ? fmt::format("limit = {}", lim)
                           : std::string("entropy function unbounded below for this shape"));
  }

  {
    boost::random::sobol qrng(2);
    const double scale = 1.0 / (static_cast<double>(qrng.max()) + 1.0);
    double worst = 0.0, min_margin = kInf;
    for (int i = 0; i < 10000; ++i) {
      const double rho = 0.1 + 9.9 * static_cast<double>(qrng()) * scale;
      const double th = 0.1 + 9.9 * static_cast<double>(qrng()) * scale;
      auto [g1, g2] = gibbs_residual(eos, rho, th);
      worst = std::max({worst, std::abs(g1), std::abs(g2)});
      auto [m1, m2] = stability_margins(eos, rho, th);
      min_margin = std::min({min_margin, m1, m2});
    }
    add("Gibbs residual < 1e-10 on 1e4 states", "", worst < 1e-10, fmt::format("max = {:.3g}", worst));
    add("stability margins positive", "ws5", min_margin > 0.0, fmt::format("min = {:.6g}", min_margin));
  }

  {
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double Z = std::pow(10.0, -2.0 + 4.0 * i / 400.0);
      const double h = 1e-5 * Z;
      const double fd = (raw_entropy(eos, Z + h) - raw_entropy(eos, Z - h)) / (2.0 * h);
      double P, dP, dS;
      shape_pd(eos, Z, P, dP, dS);
      worst = std::max(worst, std::abs(fd - dS) / std::max(1.0, std::abs(dS)));
    }
    add("entropy function slope matches its defining ODE", "ws5", worst < 1e-6,
        fmt::format("max relative deviation = {:.3g}", worst));
  }
  return out;
}

std::vector<CheckItem> check_transport(const TransportSpec& ts, double theta_lo, double theta_hi) {
  std::vector<CheckItem> out;
  auto add = [&](std::string name, std::string label, bool pass, std::string detail) {
    out.push_back({std::move(name), std::move(label), pass, std::move(detail)});
  };
  const double L = ts.lambda_exp;
  add("lambda_exp in (2/5, 1]", "ws8", L > 0.4 && L <= 1.0, fmt::format("lambda_exp = {}", L));
  const double mu_u = ts.mu_under < 0 ? ts.mu0 : ts.mu_under;
  const double mu_o = ts.mu_over < 0 ? ts.mu0 : ts.mu_over;
  const double eta_o = ts.eta_over < 0 ? ts.eta0 : ts.eta_over;
  const double k_u = ts.kappa_under < 0 ? ts.kappa0 : ts.kappa_under;
  const double k_o = ts.kappa_over < 0 ? ts.kappa0 : ts.kappa_over;
  if (!(L > 0.0)) return out;

  bool mu_ok = mu_u > 0.0, eta_ok = ts.eta0 >= 0.0, k_ok = k_u > 0.0;
  double dmu_sup = 0.0;
  constexpr double slack = 1e-12;
  for (int i = 0; i <= 400; ++i) {
    const double th = theta_lo * std::pow(theta_hi / theta_lo, i / 400.0);
    const auto c = transport_coefficients(ts, th);
    const auto dc = transport_derivatives(ts, th);
    const double w = 1.0 + std::pow(th, L);
    const double w3 = 1.0 + th * th * th;
    mu_ok = mu_ok && c.mu >= mu_u * w * (1 - slack) && c.mu <= mu_o * w * (1 + slack);
    eta_ok = eta_ok && c.eta >= 0.0 && c.eta <= eta_o * w * (1 + slack);
    k_ok = k_ok && c.kappa >= k_u * w3 * (1 - slack) && c.kappa <= k_o * w3 * (1 + slack);
    dmu_sup = std::max(dmu_sup, std::abs(dc.mu));
  }
  add("shear viscosity within mu_under/mu_over envelope", "ws8", mu_ok,
      fmt::format("mu_under = {}, mu_over = {}", mu_u, mu_o));
  add("|mu'| bounded on the admissible temperature range", "ws8", std::isfinite(dmu_sup),
      fmt::format("sup |mu'| = {:.6g} on [{:.3g}, {:.3g}]", dmu_sup, theta_lo, theta_hi));
  add("0 <= eta <= eta_over (1 + theta^L)", "ws9", eta_ok, fmt::format("eta_over = {}", eta_o));
  add("kappa within kappa_under/kappa_over envelope", "ws10", k_ok,
      fmt::format("kappa_under = {}, kappa_over = {}", k_u, k_o));
  return out;
}

}  // namespace nsf
