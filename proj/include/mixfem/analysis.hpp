#pragma once

#include "mixfem/assembly.hpp"
#include "mixfem/constitutive.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mixfem {

struct LevelResult {
  int n_cells{0};
  double h{0.0};
  double dt{0.0};
  double err_rho{0.0};
  double err_m{0.0};
  std::optional<double> rate_rho;
  std::optional<double> rate_m;
  int newton_total{0};
};

/// rate_i = ln(e_i / e_{i-1}) / ln(h_i / h_{i-1}). The first level, and any
/// transition touching a zero error, is left without a rate. Throws if h
/// is not strictly decreasing.
std::vector<LevelResult> rates(std::vector<LevelResult> levels);

double convergence_rate(double e_prev, double e, double h_prev, double h);

/// L2 error of rho_bar and L^s error of m against the exact solution at state.t.
/// Throws std::invalid_argument if data carries no exact solution.
std::pair<double, double> final_time_errors(const Discretization& disc, const SystemState& state,
                                            const ProblemData& data);

/// Per-step quantities a march records for the energy estimate.
struct EnergyTerms {
  double rho_norm2{0.0};     // ||rho_bar_hn||^2
  double m_norm_s{0.0};      // ||m_hn||_{L^s}^s
  double f_norm2{0.0};       // ||f_n||^2
  double psi_t_norm2{0.0};   // ||Psi_t,n||^2
  double grad_psi_norm{0.0}; // ||grad Psi_n||_{L^{s*}}^{s*}
};

EnergyTerms energy_terms(const Discretization& disc, const SystemState& state, const ProblemData& data);

/// Left side ||rho_bar_hn||^2 + sum dt ||m_hi||^s and the data functional
/// ||rho_bar_0||^2 + sum dt (||f_i||^2 + ||Psi_t,i||^2 + ||grad Psi_i||^{s*}),
/// i.e. the estimate with its unknown constant set to one. The three data
/// sums are also kept separately.
struct StabilityEnergy {
  double e_rho{0.0};
  double e_m_accum{0.0};
  double data_side{0.0};
  double f_accum{0.0};
  double psi_t_accum{0.0};
  double grad_psi_accum{0.0};

  double left() const { return e_rho + e_m_accum; }
};

/// One entry per step (terms[0] is step 1); rho0_norm2 is ||rho_bar_0||^2.
std::vector<StabilityEnergy> stability_energy(const std::vector<EnergyTerms>& terms, double dt, double rho0_norm2);

/// Time integrals (or dt-weighted sums) of the three data terms.
struct DataIntegrals {
  double f2{0.0};
  double psi_t2{0.0};
  double grad_psi{0.0};
};

/// Explicit bound on the energy left side. Testing the scheme with its own
/// solution gives, for a_n = ||rho_bar_n||_phi^2 and b_n = ||m_n||^s,
///   (a_n - a_{n-1})/dt - a_n + C3 b_n <= 2 (||f_n||_{1/phi}^2 + ||Psi_t,n||_phi^2 + K ||grad Psi_n||^{s*}),
/// K = (s C3 / 2)^{-s*/s} / s*, and the discrete Gronwall lemma closes it over [0, T].
double stability_bound(const PowerSpec<double>& powers, double C3, double phi_lower, double phi_upper, double T,
                       double dt, double rho0_norm2, const DataIntegrals& data);

/// Hypothesis (a_n - a_{n-1})/dt - a_n + b_n <= g_n for n >= 1 on nonnegative
/// sequences of equal length (entries b_0, g_0 unused). The slack is relative
/// to max(1, a_n/dt, a_{n-1}/dt, b_n, g_n).
bool gronwall_hypothesis(const std::vector<double>& a, const std::vector<double>& b,
                         const std::vector<double>& g, double dt, double slack = 1e-12);

/// True iff a_n + dt sum_{i<=n} b_i <= exp(n dt / (1 - dt)) (a_0 + dt sum_{i<=n} g_i)
/// for every n. Throws std::invalid_argument for dt outside (0, 1) and
/// std::domain_error if the hypothesis fails.
bool gronwall_check(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& g,
                    double dt);

struct InequalityStats {
  Inequality kind{};
  int trials{0};
  int violations{0};
  double max_violation{0.0};
  std::string worst_input;
};

struct InequalitySuiteConfig {
  std::uint64_t seed{20240601};
  int trials{10000};
  double eps_reg{1e-10};
  double w_max{1e3};
  double y_max{1e2};
  double a_lower{0.5};
  double a_upper{1.5};
  double slack{1e-12};
  /// Multiplies C3 before checking; anything above 1 should expose violations.
  double c3_scale{1.0};
  std::vector<Inequality> kinds{std::begin(kAllInequalities), std::end(kAllInequalities)};
};

struct InequalityReport {
  std::vector<InequalityStats> stats;
  bool all_pass() const;
  std::string format() const;
};

/// Randomized sampling of every inequality for the given exponents.
InequalityReport inequality_suite(const PowerSpec<double>& powers, const InequalitySuiteConfig& cfg);

}  // namespace mixfem
