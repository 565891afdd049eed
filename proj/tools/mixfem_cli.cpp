// mixfem: command-line driver for the mixed FEM studies.
//
//   mixfem convergence --levels 4,8,16,32,64 --out errors.csv
//   mixfem dependence --levels 4,8,16,32,64
//   mixfem verify --seed 7
//   mixfem single --levels 16 --verbose --out dofs.csv
//
// Exit codes: 0 success, 1 usage or I/O error, 2 Newton failure, 3 verification violations.

#include "mixfem/errors.hpp"
#include "mixfem/study.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <utility>

namespace {

constexpr int kNewtonFailure = 2;
constexpr int kVerifyFailure = 3;

void emit_csv(const std::string& path, const std::vector<mixfem::LevelResult>& levels) {
  if (path.empty()) return;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  mixfem::write_csv(os, levels);
}

int run(mixfem::StudyConfig cfg) {
  using namespace mixfem;
  switch (cfg.study) {
    case StudyKind::Convergence:
    case StudyKind::Dependence: {
      const StudyReport report = cfg.study == StudyKind::Convergence ? run_convergence(cfg) : run_dependence(cfg);
      std::cout << format_table(report);
      emit_csv(cfg.out, report.levels);
      return 0;
    }
    case StudyKind::Single: {
      const SingleResult res = run_single(cfg);
      std::printf("steps %zu newton_total %d\n", res.run.steps.size(), res.run.newton_total());
      if (res.errors) std::printf("err_rho %.6e err_m %.6e\n", res.errors->first, res.errors->second);
      if (!res.run.steps.empty()) {
        std::printf("energy_left_max %.6e energy_bound %.6e\n",
                    std::max_element(res.run.steps.begin(), res.run.steps.end(),
                                     [](const StepDiagnostics& a, const StepDiagnostics& b) {
                                       return a.energy.left() < b.energy.left();
                                     })
                        ->energy.left(),
                    res.energy_bound);
      }
      if (!cfg.out.empty()) {
        std::ofstream os(cfg.out);
        if (!os) throw std::runtime_error("cannot write '" + cfg.out + "'");
        write_dofs_csv(os, build_mesh(cfg.levels.front()), res.run.final_state);
      }
      return 0;
    }
    case StudyKind::Verify: {
      const VerifyReport report = run_verify(cfg);
      std::cout << report.format();
      if (!cfg.out.empty()) {
        std::ofstream os(cfg.out);
        if (!os) throw std::runtime_error("cannot write '" + cfg.out + "'");
        os << report.format();
      }
      return report.all_pass() ? 0 : kVerifyFailure;
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed finite element solver for generalized Forchheimer flow"};
  app.require_subcommand(1);

  std::string config_path, levels, problem, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  bool verbose = false;

  const std::pair<const char*, const char*> subs[] = {
      {"single", "one march on the first level"},
      {"convergence", "errors against the exact solution over the levels"},
      {"dependence", "difference of two laws on Example-2 data over the levels"},
      {"verify", "inequality, Gronwall, Jacobian and mesh checks"},
  };
  for (const auto& [sub, what] : subs) {
    auto* cmd = app.add_subcommand(sub, what);
    cmd->add_option("--config", config_path, "key = value configuration file");
    cmd->add_option("--levels", levels, "comma-separated mesh levels, e.g. 4,8,16");
    cmd->add_option("--seed", seed, "random seed for the verify study");
    cmd->add_option("--out", out, "output path (CSV, dof dump or report)");
    cmd->add_option("--problem", problem, "example1, example2_F1, example2_F2 or zero");
    cmd->add_option("--trials", trials, "inequality trials per kind");
    cmd->add_flag("--verbose", verbose, "one diagnostic line per time step");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    mixfem::StudyConfig cfg;
    if (!config_path.empty()) cfg = mixfem::load_config(config_path, cfg);
    cfg.study = mixfem::parse_study_kind(app.get_subcommands().front()->get_name());
    if (!levels.empty()) cfg.levels = mixfem::parse_int_list(levels);
    if (!problem.empty()) cfg.problem = problem;
    if (!out.empty()) cfg.out = out;
    if (seed) cfg.seed = *seed;
    if (trials) cfg.trials = *trials;
    if (verbose) cfg.verbose = true;
    if (cfg.study == mixfem::StudyKind::Convergence || cfg.study == mixfem::StudyKind::Dependence) cfg.validate();
    return run(std::move(cfg));
  } catch (const mixfem::NonConvergence& e) {
    std::cerr << "mixfem: " << e.what() << '\n';
    return kNewtonFailure;
  } catch (const mixfem::LinearSolveFailure& e) {
    std::cerr << "mixfem: " << e.what() << '\n';
    return kNewtonFailure;
  } catch (const std::exception& e) {
    std::cerr << "mixfem: " << e.what() << '\n';
    return 1;
  }
}
