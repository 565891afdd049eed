#pragma once

#include "mixfem/assembly.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace mixfem {

/// Manufactured problem with rho = c(t) (x1 + x2) / sqrt 2 and
/// m = -e^{-2t} (1, 1) / sqrt 2 on the unit square, phi = 1, Psi = rho.
/// c(t) = a_{-1} e^{-t} + a_0 e^{-2t} + a_1 e^{-4t} for the law
/// F(y) = a_{-1} y^{-1/2} + a_0 + a_1 y.
ProblemData manufactured_problem(double a_m1, double a_0, double a_1);

/// F(y) = y^{-1/2} + 1 + y with its manufactured solution.
ProblemData example1();

/// Example-2 data (manufactured for F2 = 0.95 y^{-1/2} + 1 + 0.95 y) paired
/// with the law F(y) = a_{-1} y^{-1/2} + a_0 + a_1 y. The exact solution is
/// attached only when the law is F2 itself.
ProblemData example2(double a_m1, double a_0, double a_1);
ProblemData example2_F1();
ProblemData example2_F2();

/// f = 0, Psi = 0, rho0 = 0 with the Example-1 law.
ProblemData zero_problem();

/// Identifiers: example1, example2_F1, example2_F2, zero.
ProblemData builtin_problem(std::string_view id);
std::vector<std::string> builtin_problem_ids();

}  // namespace mixfem
