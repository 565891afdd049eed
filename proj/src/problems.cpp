#include "mixfem/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace mixfem {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

struct Amplitude {
  double a_m1, a_0, a_1;
  double value(double t) const { return a_m1 * std::exp(-t) + a_0 * std::exp(-2 * t) + a_1 * std::exp(-4 * t); }
  double rate(double t) const {
    return -a_m1 * std::exp(-t) - 2 * a_0 * std::exp(-2 * t) - 4 * a_1 * std::exp(-4 * t);
  }
};

/// Data (f, Psi, rho0) generated by the law with coefficients `data_law`,
/// constitutive law taken from `law`.
ProblemData build(Amplitude data_law, Amplitude law) {
  ProblemData p;
  p.powers = PowerSpec<double>(0.5, {1.0});
  p.coefficients = CoefficientVector<double>::from_values({law.a_m1, law.a_0, law.a_1});
  p.T = 1.0;
  p.rho0 = [c = data_law.value(0.0)](const Eigen::Vector2d& x) { return kInvSqrt2 * c * (x.x() + x.y()); };
  p.Psi = [data_law](const Eigen::Vector2d& x, double t) { return kInvSqrt2 * data_law.value(t) * (x.x() + x.y()); };
  p.Psi_t = [data_law](const Eigen::Vector2d& x, double t) { return kInvSqrt2 * data_law.rate(t) * (x.x() + x.y()); };
  p.grad_Psi = [data_law](const Eigen::Vector2d&, double t) {
    return Eigen::Vector2d::Constant(kInvSqrt2 * data_law.value(t)).eval();
  };
  // div m = 0, so f = rho_t.
  p.f = p.Psi_t;
  if (data_law.a_m1 == law.a_m1 && data_law.a_0 == law.a_0 && data_law.a_1 == law.a_1) {
    p.exact = ExactSolution{
        p.Psi,
        [](const Eigen::Vector2d&, double t) { return Eigen::Vector2d::Constant(-kInvSqrt2 * std::exp(-2 * t)).eval(); },
    };
  }
  return p;
}

}  // namespace

ProblemData manufactured_problem(double a_m1, double a_0, double a_1) {
  return build({a_m1, a_0, a_1}, {a_m1, a_0, a_1});
}

ProblemData example1() { return manufactured_problem(1.0, 1.0, 1.0); }

ProblemData example2(double a_m1, double a_0, double a_1) { return build({0.95, 1.0, 0.95}, {a_m1, a_0, a_1}); }
ProblemData example2_F1() { return example2(1.0, 1.0, 1.0); }
ProblemData example2_F2() { return example2(0.95, 1.0, 0.95); }

ProblemData zero_problem() {
  ProblemData p;
  p.exact = ExactSolution{
      [](const Eigen::Vector2d&, double) { return 0.0; },
      [](const Eigen::Vector2d&, double) { return Eigen::Vector2d::Zero().eval(); },
  };
  return p;
}

ProblemData builtin_problem(std::string_view id) {
  if (id == "example1") return example1();
  if (id == "example2_F1") return example2_F1();
  if (id == "example2_F2") return example2_F2();
  if (id == "zero") return zero_problem();
  throw std::invalid_argument("unknown problem '" + std::string(id) + "'");
}

std::vector<std::string> builtin_problem_ids() { return {"example1", "example2_F1", "example2_F2", "zero"}; }

}  // namespace mixfem
