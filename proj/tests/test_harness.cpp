#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nsf/errors.hpp"
#include "nsf/export.hpp"
#include "nsf/harness.hpp"
#include "nsf/studies.hpp"

using namespace nsf;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

const std::string kRoot = NSF_SOURCE_DIR;

std::string rejection(const std::string& path) {
  try {
    load_scenario(path);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Validation);
    return e.what();
  }
  FAIL("scenario was accepted: " << path);
  return {};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("expressions") {
  CHECK(Expr::parse("1 + 2*3")(0.0) == 7.0);
  CHECK(Expr::parse("-2^2")(0.0) == -4.0);
  CHECK(Expr::parse("2^3^2")(0.0) == 512.0);
  CHECK(Expr::parse("(1 + x)/2")(3.0) == 2.0);
  CHECK(Expr::parse("sin(pi*x)")(0.5) == Approx(1.0).epsilon(1e-15));
  CHECK(Expr::parse("exp(log(e))")(0.0) == Approx(std::numbers::e).epsilon(1e-15));
  CHECK(Expr::parse("cos(0) - x")(1.0) == 0.0);
  CHECK(Expr::parse("1e-3 * 2.5E2")(0.0) == Approx(0.25));
  for (const char* bad : {"", "1 +", "sin(x", "foo(x)", "2 ** 3", "1 2", "y", ")"}) {
    try {
      Expr::parse(bad);
      FAIL("accepted " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::Validation);
    }
  }
}

TEST_CASE("shipped scenarios load and pass admissibility") {
  for (const char* name :
       {"closed_box_heat", "acoustic_box", "throughflow", "reversed_flow", "table_throughflow"}) {
    const Scenario sc = load_scenario(kRoot + "/scenarios/" + name + ".json");
    CHECK_MESSAGE(sc.admissibility.pass, name);
    CHECK(sc.problem.mesh.n_cells <= 256);
    CHECK(sc.output_times.back() == sc.problem.cfg.t_end);
    const auto init = initial_state(sc);
    CHECK(init.theta_clamps == 0);
    CHECK(init.state.size() == sc.problem.mesh.n_cells);
  }
}

TEST_CASE("minimal scenario takes defaults") {
  const Scenario sc = load_scenario(kRoot + "/tests/data/minimal.json");
  CHECK(sc.problem.cfg.Gamma == 4.0);
  CHECK(sc.problem.cfg.d == 3);
  CHECK(sc.problem.cfg.theta_bar == 1.0);
  CHECK(sc.problem.mesh.x_left == 0.0);
  CHECK(sc.problem.mesh.x_right == 1.0);
  CHECK(sc.problem.boundary.faces[0].kind == FaceKind::Wall);
}

TEST_CASE("rejections name the violated hypothesis") {
  const std::string ws14 = rejection(kRoot + "/tests/data/bad_ws14bis.json");
  CHECK(contains(ws14, "ws14bis"));
  CHECK(contains(ws14, "boundary.faces[0].F_ib"));
  const std::string e1 = rejection(kRoot + "/tests/data/bad_rho_b.json");
  CHECK(contains(e1, "E1"));
  CHECK(contains(e1, "boundary.faces[0].rho_b"));
  CHECK(contains(rejection(kRoot + "/tests/data/bad_ws12.json"), "ws12"));
  CHECK(contains(rejection(kRoot + "/tests/data/borderline.json"), "ws14bis"));
  CHECK(contains(rejection(kRoot + "/tests/data/malformed.json"), "malformed JSON"));
}

TEST_CASE("all issues are reported together") {
  const std::string msg = rejection(kRoot + "/tests/data/bad_many.json");
  for (const char* part : {"mesh.n", "config.epsilon", "config.Gamma", "eos.a", "lambda_exp",
                           "ws8", "initial.theta", "ws14bis"})
    CHECK_MESSAGE(contains(msg, part), std::string(part));
}

TEST_CASE("missing inflow data") {
  const std::string text = R"({
    "mesh": {"n": 8}, "eos": {"shape": "iconic"},
    "boundary": {"faces": [{"pos": 0, "u_b": 1.0}, {"pos": 1, "u_b": 1.0}]},
    "config": {"t_end": 0.1}, "initial": {"rho": 1, "u": 1, "theta": 1}})";
  try {
    parse_scenario(text);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(contains(e.what(), "rho_b"));
    CHECK(contains(e.what(), "E1"));
    CHECK(contains(e.what(), "F_ib"));
    CHECK(contains(e.what(), "ws12"));
  }
}

TEST_CASE("boundary audit of a scenario file") {
  const auto a = audit_boundary_text(slurp(kRoot + "/tests/data/bad_ws14bis.json"));
  CHECK_FALSE(a.report.pass);
  CHECK(a.report.faces[0].margin == Approx(0.5).epsilon(1e-14));
  CHECK(a.report.issues[0].rfind("boundary.faces[0]", 0) == 0);
  const auto b = audit_boundary_text(slurp(kRoot + "/scenarios/throughflow.json"));
  CHECK(b.report.pass);
  CHECK(b.report.faces[0].kind == FaceKind::In);
  CHECK(b.report.faces[1].kind == FaceKind::Out);
}

TEST_CASE("initial arrays and clamping") {
  const std::string text = R"({
    "mesh": {"n": 3}, "eos": {"shape": "iconic"},
    "boundary": {"faces": [{"pos": 0, "u_b": 0, "wall": true}, {"pos": 1, "u_b": 0, "wall": true}]},
    "config": {"t_end": 0.1, "theta_floor": 0.01},
    "initial": {"rho": [1, 2, 3], "u": "0", "theta": [0.001, 1, 1000]}})";
  const Scenario sc = parse_scenario(text);
  const auto init = initial_state(sc);
  CHECK(init.state.rho[1] == 2.0);
  CHECK(init.theta_clamps == 2);
  CHECK(init.state.theta[0] == 0.01);
  CHECK(init.state.theta[2] == 100.0);
  const std::string wrong = R"({
    "mesh": {"n": 3}, "eos": {"shape": "iconic"},
    "boundary": {"faces": [{"pos": 0, "u_b": 0}, {"pos": 1, "u_b": 0}]},
    "config": {"t_end": 0.1}, "initial": {"rho": [1, 2], "u": 0, "theta": "1 - 2*x"}})";
  CHECK_THROWS_AS(parse_scenario(wrong), Error);
}

TEST_CASE("output schedule") {
  auto s = output_schedule(1.0, {}, 0.25);
  REQUIRE(s.size() == 4);
  CHECK(s.back() == 1.0);
  s = output_schedule(1.0, {0.5, 0.1}, 0.0);
  CHECK(s == std::vector<double>{0.1, 0.5, 1.0});
  CHECK(output_schedule(0.3, {}, 0.0) == std::vector<double>{0.3});
}

TEST_CASE("manufactured cases") {
  for (MmsKind k : {MmsKind::ThermalRelaxation, MmsKind::AcousticSmooth, MmsKind::Throughflow}) {
    const MmsCase c = manufactured_case(k);
    CHECK_MESSAGE(mms_residual_probe(c, 0.0) < 1e-6, to_string(k));
    CHECK_MESSAGE(mms_residual_probe(c, 0.7) < 1e-6, to_string(k));
    CHECK(mms_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(mms_kind_from_string("vortex"), Error);

  const MmsCase th = manufactured_case(MmsKind::ThermalRelaxation);
  const auto f = th.fields(0.3, 0.2);
  CHECK(f[0].v == 1.0);
  CHECK(f[1].v == 0.0);
  CHECK(f[2].v == Approx(1.0 + 0.1 * std::exp(-0.3) * std::cos(std::numbers::pi * 0.2)));

  const MmsCase ac = manufactured_case(MmsKind::AcousticSmooth);
  const Problem P = mms_problem(ac, 32);
  const FieldState e0 = mms_exact(ac, P.mesh, 0.0);
  const FieldErrors z = l1_errors(P.mesh, e0, mms_exact(ac, P.mesh, 0.0));
  CHECK(z.rho == 0.0);
  CHECK(z.u == 0.0);
  CHECK(z.theta == 0.0);
  for (std::size_t i = 0; i < 32; ++i) CHECK(e0.u[i] == 0.0);

  const MmsCase tf = manufactured_case(MmsKind::Throughflow);
  const Problem Q = mms_problem(tf, 16);
  CHECK(Q.boundary.faces[0].kind == FaceKind::In);
  CHECK(Q.boundary.faces[0].u_dot_n() < 0.0);
  CHECK(Q.boundary.faces[1].kind == FaceKind::Out);
  CHECK(admissibility_check(Q.eos, Q.boundary).pass);
}

TEST_CASE("convergence study arguments") {
  const MmsCase c = manufactured_case(MmsKind::ThermalRelaxation);
  CHECK_THROWS_AS(convergence_study(c, {16, 32}), Error);
  CHECK_THROWS_AS(convergence_study(c, {16, 32, 48}), Error);
}

TEST_CASE("convergence study on a short horizon") {
  const MmsCase c = manufactured_case(MmsKind::ThermalRelaxation);
  const auto r = convergence_study(c, {16, 32, 64}, {0.2, 0.8});
  REQUIRE(r.errors.size() == 3);
  CHECK(r.errors[2].theta < r.errors[0].theta);
  CHECK(r.orders.theta > 0.5);
  for (double p : r.probe_residuals) CHECK(p < 1e-6);
}

TEST_CASE("weak-strong study refuses inadmissible data") {
  Scenario sc = load_scenario(kRoot + "/scenarios/throughflow.json");
  sc.admissibility.pass = false;
  CHECK_THROWS_AS(weak_strong_study(sc), Error);
}

TEST_CASE("export is deterministic") {
  const Scenario sc = load_scenario(kRoot + "/tests/data/minimal.json");
  const auto init = initial_state(sc);
  const fs::path base = fs::temp_directory_path() / "nsf_export_test";
  fs::remove_all(base);
  for (const char* d : {"a", "b"}) {
    const Trajectory tr = run(sc.problem, init.state, sc.output_times);
    export_trajectory(tr, (base / d).string());
  }
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(base / "a")) {
    ++files;
    CHECK(slurp(e.path()) == slurp(base / "b" / e.path().filename()));
  }
  CHECK(files == 3);  // two states and fluxes.csv
  CHECK(fs::exists(base / "a" / "state_0.010000.csv"));
  CHECK(slurp(base / "a" / "state_0.000000.csv").rfind("x,rho,u,theta\n", 0) == 0);

  const Trajectory empty = run(sc.problem, init.state, {0.0});
  export_trajectory(empty, (base / "c").string());
  std::size_t states = 0;
  for (const auto& e : fs::directory_iterator(base / "c"))
    if (e.path().filename().string().rfind("state_", 0) == 0) ++states;
  CHECK(states == 1);
  CHECK(budget_csv({}).rfind("t0,t1,mass_res,energy_res,entropy_prod\n", 0) == 0);
  fs::remove_all(base);
  CHECK_THROWS_AS(write_text_file("/nonexistent_dir_nsf/x.csv", "x"), Error);
}
