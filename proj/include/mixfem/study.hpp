#pragma once

// Study orchestration behind the command-line tool: configuration, the
// convergence / dependence / single / verify studies, and report I/O.

#include "mixfem/analysis.hpp"
#include "mixfem/problems.hpp"
#include "mixfem/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mixfem {

enum class StudyKind { Single, Convergence, Dependence, Verify };

std::string_view name(StudyKind k);
StudyKind parse_study_kind(std::string_view s);

enum class LinearSolverChoice { Auto, Direct, Iterative };

struct StudyConfig {
  StudyKind study{StudyKind::Convergence};
  std::string problem{"example1"};
  std::vector<int> levels{4, 8, 16, 32, 64, 128, 256};
  double dt_ratio{0.5};
  double T{1.0};

  // Constitutive overrides; unset keeps the problem's own law.
  std::optional<double> alpha;
  std::optional<std::vector<double>> exponents;
  std::optional<std::vector<double>> coefficients;
  /// Second law of the dependence study.
  std::vector<double> coefficients2{0.95, 1.0, 0.95};
  double eps_reg{1e-10};

  NewtonConfig newton;
  LinearSolverChoice linear_solver{LinearSolverChoice::Auto};
  double linear_tol{1e-10};
  AssemblyOptions assembly;

  std::uint64_t seed{20240601};
  int trials{10000};
  int gronwall_trials{1000};
  /// Scales C3 in the verify study; values above 1 must produce violations.
  double c3_scale{1.0};

  std::string out;
  bool verbose{false};
  int jobs{1};
  /// Convergence errors as the max over all time levels instead of at T.
  bool max_in_time{false};

  /// Throws std::invalid_argument on inconsistent values.
  void validate() const;
};

/// Flat "key = value" text, lists comma-separated, '#' starts a comment.
/// Unknown keys are rejected.
StudyConfig parse_config(std::istream& in, StudyConfig base = {});
StudyConfig load_config(const std::string& path, StudyConfig base = {});
void apply_config_entry(StudyConfig& cfg, const std::string& key, const std::string& value);

std::vector<int> parse_int_list(std::string_view s);
std::vector<double> parse_double_list(std::string_view s);

/// The problem's data with the configured constitutive overrides applied.
/// The exact solution is dropped when the law changes.
ProblemData configured_problem(const StudyConfig& cfg);

LinearSolveContract linear_contract(const StudyConfig& cfg, int n_cells);

struct LevelDiagnostics {
  int n_cells{0};
  std::vector<StepDiagnostics> steps;
  double energy_bound{0.0};  // explicit per-level bound on the energy left side
  double max_energy_left() const;
};

struct StudyReport {
  StudyKind kind{StudyKind::Convergence};
  std::string problem;
  std::vector<LevelResult> levels;
  std::vector<LevelDiagnostics> diagnostics;
};

/// Marches every level and measures errors against the exact solution, at T
/// or (max_in_time) as the max over all time levels.
StudyReport run_convergence(const StudyConfig& cfg);

/// Marches the Example-2 data under configured coefficients (default
/// (1,1,1)) and coefficients2 and measures the difference of the two
/// discrete solutions at T.
StudyReport run_dependence(const StudyConfig& cfg);

struct SingleResult {
  MarchResult run;
  std::optional<std::pair<double, double>> errors;
  double energy_bound{0.0};
};

/// One march on levels.front().
SingleResult run_single(const StudyConfig& cfg);

/// Writes "x,y,rho_bar,m1,m2" per node.
void write_dofs_csv(std::ostream& os, const StructuredTriMesh& mesh, const SystemState& state);

struct VerifySection {
  std::string name;
  bool passed{false};
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifySection> sections;
  bool all_pass() const;
  std::string format() const;
};

VerifyReport run_verify(const StudyConfig& cfg);

/// Largest entrywise |J - J_fd| relative to max(|J|), with J_fd from
/// central differences of residual() column by column.
double jacobian_fd_error(const Discretization& disc, const SystemState& state, const SystemState& prev, double dt,
                         const ProblemData& data);

/// CSV columns N,h,dt,err_rho,rate_rho,err_m,rate_m,newton_total; undefined
/// rates are empty fields. Numbers use shortest round-trip formatting.
void write_csv(std::ostream& os, const std::vector<LevelResult>& levels);
std::vector<LevelResult> read_csv(std::istream& is);

/// Aligned table in the layout of a published convergence table.
std::string format_table(const StudyReport& report);

/// Explicit energy bound for a march with the given steps.
double energy_bound_for(const ProblemData& data, const Discretization& disc, const MarchResult& run, double dt);

}  // namespace mixfem
