#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mixfem/study.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace mixfem;

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Printed {
  double am1, a0, a1;
  double rho(const Eigen::Vector2d& x, double t) const {
    return (am1 * std::exp(-t) + a0 * std::exp(-2 * t) + a1 * std::exp(-4 * t)) * (x.x() + x.y()) / std::sqrt(2.0);
  }
};

void check_consistency(const ProblemData& p, Printed law, Printed data, double f1, double f2, double f4,
                       double rho0_coef) {
  std::mt19937_64 rng(17);
  const GeneralizedPolynomial<double> F(PowerSpec<double>(0.5, {1.0}), Eigen::Vector3d(law.am1, law.a0, law.a1));
  const Eigen::Vector2d ones(1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Eigen::Vector2d x(unit(rng), unit(rng));
    const double t = unit(rng);
    const double c = (data.am1 * std::exp(-t) + data.a0 * std::exp(-2 * t) + data.a1 * std::exp(-4 * t));
    const Eigen::Vector2d grad_rho = c / std::sqrt(2.0) * ones;
    const Eigen::Vector2d m = -std::exp(-2 * t) / std::sqrt(2.0) * ones;
    // f as printed: -(f1 e^-t + f2 e^-2t + f4 e^-4t)(x1 + x2) / sqrt 2
    const double f = -(f1 * std::exp(-t) + f2 * std::exp(-2 * t) + f4 * std::exp(-4 * t)) * (x.x() + x.y()) /
                     std::sqrt(2.0);
    CHECK(std::abs(p.f(x, t) - f) <= 1e-12);
    CHECK(std::abs(p.Psi(x, t) - data.rho(x, t)) <= 1e-12);
    CHECK((p.grad_Psi(x, t) - grad_rho).norm() <= 1e-12);
    const double rho_t = (data.rho(x, t + 1e-5) - data.rho(x, t - 1e-5)) / 2e-5;
    CHECK(std::abs(p.Psi_t(x, t) - rho_t) <= 1e-8);
    CHECK(std::abs(p.rho0(x) - rho0_coef * (x.x() + x.y())) <= 1e-12);
    if (p.exact) {
      CHECK((p.exact->m(x, t) - m).norm() <= 1e-12);
      // F(|m|) m + grad rho = 0, rho_t + div m - f = 0 with div m = 0
      CHECK((flux(F, m) + grad_rho).norm() <= 1e-12);
      CHECK(std::abs(p.Psi_t(x, t) - p.f(x, t)) <= 1e-12);
    }
  }
}

}  // namespace

TEST_CASE("built-in problems agree with the printed data") {
  check_consistency(example1(), {1, 1, 1}, {1, 1, 1}, 1, 2, 4, 3 / std::sqrt(2.0));
  check_consistency(example2_F2(), {0.95, 1, 0.95}, {0.95, 1, 0.95}, 0.95, 2, 3.80, 1.45 * std::sqrt(2.0));
  check_consistency(example2_F1(), {1, 1, 1}, {0.95, 1, 0.95}, 0.95, 2, 3.80, 1.45 * std::sqrt(2.0));
  CHECK(example1().exact.has_value());
  CHECK(example2_F2().exact.has_value());
  CHECK_FALSE(example2_F1().exact.has_value());
  CHECK(example2_F1().coefficients.values == Eigen::Vector3d(1, 1, 1));
  for (const auto& id : builtin_problem_ids()) CHECK_NOTHROW(builtin_problem(id));
  CHECK_THROWS_AS(builtin_problem("example3"), std::invalid_argument);
}

TEST_CASE("config parsing") {
  std::istringstream in(R"(# study setup
study = dependence
levels = 4, 8,16
dt_ratio = 0.25   # half the default
coefficients = 1,1,1
newton_tol = 1e-8
damping = true
linear_solver = iterative
pin_boundary = yes
seed = 42
out = table.csv
)");
  const StudyConfig cfg = parse_config(in);
  CHECK(cfg.study == StudyKind::Dependence);
  CHECK(cfg.levels == std::vector<int>{4, 8, 16});
  CHECK(cfg.dt_ratio == 0.25);
  CHECK(cfg.coefficients == std::vector<double>{1, 1, 1});
  CHECK(cfg.newton.tol == 1e-8);
  CHECK(cfg.newton.damping);
  CHECK(cfg.linear_solver == LinearSolverChoice::Iterative);
  CHECK(cfg.assembly.pin_boundary);
  CHECK(cfg.seed == 42);
  CHECK(cfg.out == "table.csv");
  CHECK_NOTHROW(cfg.validate());

  std::istringstream unknown("nonsense = 1\n");
  CHECK_THROWS_AS(parse_config(unknown), std::invalid_argument);
  std::istringstream malformed("levels\n");
  CHECK_THROWS_AS(parse_config(malformed), std::invalid_argument);
  std::istringstream badnum("dt_ratio = 0.5x\n");
  CHECK_THROWS_AS(parse_config(badnum), std::invalid_argument);
  CHECK_THROWS_AS(load_config("/nonexistent/path.cfg"), std::invalid_argument);
}

TEST_CASE("config validation") {
  StudyConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.levels = {4, 6};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.levels = {8, 4};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.levels = {2};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.levels = {4, 16, 64};
  CHECK_NOTHROW(cfg.validate());
  cfg.dt_ratio = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("configured problem and linear contract") {
  StudyConfig cfg;
  CHECK(configured_problem(cfg).exact.has_value());
  cfg.coefficients = std::vector<double>{1, 1, 1};
  CHECK(configured_problem(cfg).exact.has_value());
  cfg.coefficients = std::vector<double>{2, 1, 1};
  CHECK_FALSE(configured_problem(cfg).exact.has_value());
  cfg.coefficients = std::vector<double>{2, 1};
  CHECK_THROWS(configured_problem(cfg));

  StudyConfig lc;
  CHECK(linear_contract(lc, 64).mode == LinearSolverMode::Direct);
  CHECK(linear_contract(lc, 128).mode == LinearSolverMode::Iterative);
  lc.linear_solver = LinearSolverChoice::Direct;
  CHECK(linear_contract(lc, 256).mode == LinearSolverMode::Direct);
}

TEST_CASE("CSV round trip") {
  std::vector<LevelResult> lv(2);
  lv[0] = {4, 0.25, 0.125, 2.566e-1, 4.823e-1, std::nullopt, std::nullopt, 9};
  lv[1] = {8, 0.125, 0.0625, 1.0 / 3.0, std::exp(-1.0), 0.1 + 0.2, std::nullopt, 17};
  std::stringstream ss;
  write_csv(ss, lv);
  CHECK(ss.str().rfind("N,h,dt,err_rho,rate_rho,err_m,rate_m,newton_total\n4,0.25,0.125,", 0) == 0);
  const auto back = read_csv(ss);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].n_cells == lv[i].n_cells);
    CHECK(back[i].h == lv[i].h);
    CHECK(back[i].dt == lv[i].dt);
    CHECK(back[i].err_rho == lv[i].err_rho);
    CHECK(back[i].err_m == lv[i].err_m);
    CHECK(back[i].rate_rho == lv[i].rate_rho);
    CHECK(back[i].rate_m == lv[i].rate_m);
    CHECK(back[i].newton_total == lv[i].newton_total);
  }
  std::istringstream bad("N,h\n");
  CHECK_THROWS_AS(read_csv(bad), std::invalid_argument);
}

TEST_CASE("studies on small levels") {
  StudyConfig cfg;
  cfg.levels = {4};
  const auto one = run_convergence(cfg);
  REQUIRE(one.levels.size() == 1);
  CHECK_FALSE(one.levels[0].rate_rho);
  CHECK(format_table(one).find("--") != std::string::npos);

  cfg.levels = {4, 8};
  cfg.coefficients = std::vector<double>{0.95, 1.0, 0.95};
  const auto same = run_dependence(cfg);
  for (const auto& l : same.levels) {
    CHECK(l.err_rho <= 1e-12);
    CHECK(l.err_m <= 1e-12);
  }
  CHECK(same.diagnostics.size() == 4);

  StudyConfig z;
  z.problem = "zero";
  z.levels = {4};
  const auto single = run_single(z);
  CHECK(single.run.final_state.m.norm() == 0.0);
  CHECK(single.run.final_state.rho_bar.norm() == 0.0);
  REQUIRE(single.errors);
  CHECK(single.errors->first == 0.0);

  std::ostringstream dofs;
  write_dofs_csv(dofs, build_mesh(4), single.run.final_state);
  int lines = 0;
  for (char c : dofs.str()) lines += c == '\n';
  CHECK(lines == 26);
}

TEST_CASE("verify study") {
  StudyConfig cfg;
  cfg.trials = 500;
  cfg.gronwall_trials = 200;
  const auto a = run_verify(cfg);
  INFO(a.format());
  CHECK(a.all_pass());
  CHECK(a.format() == run_verify(cfg).format());

  cfg.c3_scale = 1e3;
  const auto bad = run_verify(cfg);
  CHECK_FALSE(bad.all_pass());
  bool monotone0_failed = false;
  for (const auto& s : bad.sections) monotone0_failed |= s.name == "inequality monotone0" && !s.passed;
  CHECK(monotone0_failed);
}

TEST_CASE("max-in-time errors dominate final-time errors") {
  StudyConfig cfg;
  cfg.levels = {4, 8};
  const auto at_T = run_convergence(cfg);
  cfg.max_in_time = true;
  const auto sup = run_convergence(cfg);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(sup.levels[i].err_m >= at_T.levels[i].err_m);
    CHECK(sup.levels[i].err_rho >= at_T.levels[i].err_rho);
  }
  std::istringstream in("max_in_time = true\n");
  CHECK(parse_config(in).max_in_time);
}

TEST_CASE("concurrent levels merge in level order") {
  StudyConfig cfg;
  cfg.levels = {4, 8, 16};
  const auto serial = run_convergence(cfg);
  cfg.jobs = 3;
  const auto parallel = run_convergence(cfg);
  std::ostringstream a, b;
  write_csv(a, serial.levels);
  write_csv(b, parallel.levels);
  CHECK(a.str() == b.str());
}
