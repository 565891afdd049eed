#include "mixfem/study.hpp"

#include "mixfem/errors.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace mixfem {

std::string_view name(StudyKind k) {
  switch (k) {
    case StudyKind::Single: return "single";
    case StudyKind::Convergence: return "convergence";
    case StudyKind::Dependence: return "dependence";
    case StudyKind::Verify: return "verify";
  }
  return "?";
}

StudyKind parse_study_kind(std::string_view s) {
  if (s == "single") return StudyKind::Single;
  if (s == "convergence") return StudyKind::Convergence;
  if (s == "dependence") return StudyKind::Dependence;
  if (s == "verify") return StudyKind::Verify;
  throw std::invalid_argument("unknown study '" + std::string(s) + "'");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view raw) {
  const std::string s = trim(raw);
  T value{};
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || s.empty()) {
    throw std::invalid_argument("cannot parse number '" + s + "'");
  }
  return value;
}

bool parse_bool(std::string_view raw) {
  const std::string s = trim(raw);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw std::invalid_argument("cannot parse boolean '" + s + "'");
}

template <typename T>
std::vector<T> parse_list(std::string_view s) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (!trim(piece).empty()) out.push_back(parse_number<T>(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace

std::vector<int> parse_int_list(std::string_view s) { return parse_list<int>(s); }
std::vector<double> parse_double_list(std::string_view s) { return parse_list<double>(s); }

void StudyConfig::validate() const {
  if (levels.empty()) throw std::invalid_argument("config: levels must not be empty");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    int v = levels[i];
    if (v < 4 || v % 4 != 0) throw std::invalid_argument("config: levels must be 4 times a power of two");
    v /= 4;
    if ((v & (v - 1)) != 0) throw std::invalid_argument("config: levels must be 4 times a power of two");
    if (i > 0 && levels[i] <= levels[i - 1]) throw std::invalid_argument("config: levels must be strictly increasing");
  }
  if (!(dt_ratio > 0.0)) throw std::invalid_argument("config: dt_ratio must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("config: T must be positive");
  if (!(newton.tol > 0.0)) throw std::invalid_argument("config: newton_tol must be positive");
  if (newton.max_iter < 1) throw std::invalid_argument("config: newton_max_iter must be at least 1");
  if (trials < 1 || gronwall_trials < 1) throw std::invalid_argument("config: trials must be at least 1");
  if (jobs < 1) throw std::invalid_argument("config: jobs must be at least 1");
}

void apply_config_entry(StudyConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "study") cfg.study = parse_study_kind(trim(value));
  else if (key == "problem") cfg.problem = trim(value);
  else if (key == "levels") cfg.levels = parse_int_list(value);
  else if (key == "dt_ratio") cfg.dt_ratio = parse_number<double>(value);
  else if (key == "T") cfg.T = parse_number<double>(value);
  else if (key == "alpha") cfg.alpha = parse_number<double>(value);
  else if (key == "exponents") cfg.exponents = parse_double_list(value);
  else if (key == "coefficients") cfg.coefficients = parse_double_list(value);
  else if (key == "coefficients2") cfg.coefficients2 = parse_double_list(value);
  else if (key == "eps_reg") cfg.eps_reg = parse_number<double>(value);
  else if (key == "newton_tol") cfg.newton.tol = parse_number<double>(value);
  else if (key == "newton_max_iter") cfg.newton.max_iter = parse_number<int>(value);
  else if (key == "damping") cfg.newton.damping = parse_bool(value);
  else if (key == "linear_solver") {
    const auto v = trim(value);
    if (v == "auto") cfg.linear_solver = LinearSolverChoice::Auto;
    else if (v == "direct") cfg.linear_solver = LinearSolverChoice::Direct;
    else if (v == "iterative") cfg.linear_solver = LinearSolverChoice::Iterative;
    else throw std::invalid_argument("config: linear_solver must be auto, direct or iterative");
  } else if (key == "linear_tol") cfg.linear_tol = parse_number<double>(value);
  else if (key == "quadrature_order") cfg.assembly.quadrature_order = parse_number<int>(value);
  else if (key == "pin_boundary") cfg.assembly.pin_boundary = parse_bool(value);
  else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(value);
  else if (key == "trials") cfg.trials = parse_number<int>(value);
  else if (key == "gronwall_trials") cfg.gronwall_trials = parse_number<int>(value);
  else if (key == "c3_scale") cfg.c3_scale = parse_number<double>(value);
  else if (key == "out") cfg.out = trim(value);
  else if (key == "verbose") cfg.verbose = parse_bool(value);
  else if (key == "jobs") cfg.jobs = parse_number<int>(value);
  else if (key == "max_in_time") cfg.max_in_time = parse_bool(value);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

StudyConfig parse_config(std::istream& in, StudyConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    apply_config_entry(base, trim(std::string_view(line).substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

StudyConfig load_config(const std::string& path, StudyConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  return parse_config(in, std::move(base));
}

ProblemData configured_problem(const StudyConfig& cfg) {
  ProblemData p = builtin_problem(cfg.problem);
  p.eps_reg = cfg.eps_reg;
  p.T = cfg.T;
  bool changed = false;
  if (cfg.alpha || cfg.exponents) {
    const double alpha = cfg.alpha.value_or(p.powers.alpha());
    const auto exps = cfg.exponents.value_or(p.powers.exponents());
    changed = changed || alpha != p.powers.alpha() || exps != p.powers.exponents();
    p.powers = PowerSpec<double>(alpha, exps);
  }
  if (cfg.coefficients) {
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(cfg.coefficients->data(),
                                                          static_cast<Eigen::Index>(cfg.coefficients->size()));
    changed = changed || a.size() != p.coefficients.values.size() || a != p.coefficients.values;
    p.coefficients = CoefficientVector<double>::from_values(std::move(a));
  }
  if (p.coefficients.values.size() != p.powers.coefficient_count()) {
    throw std::invalid_argument("config: coefficients must have N+2 entries for the configured exponents");
  }
  if (changed) p.exact.reset();
  return p;
}

LinearSolveContract linear_contract(const StudyConfig& cfg, int n_cells) {
  LinearSolveContract c;
  c.rel_tol = cfg.linear_tol;
  switch (cfg.linear_solver) {
    case LinearSolverChoice::Direct: c.mode = LinearSolverMode::Direct; break;
    case LinearSolverChoice::Iterative: c.mode = LinearSolverMode::Iterative; break;
    case LinearSolverChoice::Auto:
      c.mode = n_cells >= 128 ? LinearSolverMode::Iterative : LinearSolverMode::Direct;
      break;
  }
  return c;
}

double LevelDiagnostics::max_energy_left() const {
  double m = 0.0;
  for (const auto& s : steps) m = std::max(m, s.energy.left());
  return m;
}

double energy_bound_for(const ProblemData& data, const Discretization&, const MarchResult& run, double dt) {
  if (run.steps.empty()) return 0.0;
  const auto& c = data.coefficients;
  const double a_lower = std::min({c.values(0), c.values(1), c.values(c.values.size() - 1)});
  if (!(a_lower > 0.0)) return std::numeric_limits<double>::infinity();
  const auto constants = LemmaConstants<double>::compute(data.powers, a_lower, c.values.maxCoeff());
  const auto& last = run.steps.back().energy;
  const double T = run.steps.back().t;
  return stability_bound(data.powers, constants.C3, data.phi_lower, data.phi_upper, T, dt, run.rho0_norm2,
                         {last.f_accum, last.psi_t_accum, last.grad_psi_accum});
}

namespace {

struct LevelRun {
  StructuredTriMesh mesh;
  MarchResult run;
  double dt{0.0};
};

LevelRun run_level(const ProblemData& data, const StudyConfig& cfg, int n,
                   const std::function<void(const Discretization&, const SystemState&)>& observer = {}) {
  LevelRun lr;
  lr.mesh = build_mesh(n);
  Discretization disc(lr.mesh, cfg.assembly);
  auto mc = MarchConfig::for_mesh(lr.mesh, cfg.dt_ratio, cfg.T);
  mc.verbose = cfg.verbose;
  if (observer) mc.on_step = [&](const SystemState& s) { observer(disc, s); };
  lr.dt = mc.dt;
  lr.run = march(data, disc, mc, cfg.newton, linear_contract(cfg, n));
  return lr;
}

template <typename Fn>
auto for_levels(const StudyConfig& cfg, Fn&& fn) {
  using Result = decltype(fn(0));
  std::vector<Result> out;
  if (cfg.jobs <= 1) {
    for (int n : cfg.levels) out.push_back(fn(n));
    return out;
  }
  std::vector<std::future<Result>> pending;
  for (int n : cfg.levels) pending.push_back(std::async(std::launch::async, fn, n));
  for (auto& f : pending) out.push_back(f.get());
  return out;
}

LevelDiagnostics diagnostics_for(const ProblemData& data, const LevelRun& lr, const StudyConfig& cfg) {
  LevelDiagnostics d;
  d.n_cells = lr.mesh.n_cells_per_side;
  d.steps = lr.run.steps;
  Discretization disc(lr.mesh, cfg.assembly);
  d.energy_bound = energy_bound_for(data, disc, lr.run, lr.dt);
  return d;
}

}  // namespace

StudyReport run_convergence(const StudyConfig& cfg) {
  cfg.validate();
  const ProblemData data = configured_problem(cfg);
  if (!data.exact) throw std::invalid_argument("convergence study needs a problem with an exact solution");
  StudyReport report;
  report.kind = StudyKind::Convergence;
  report.problem = cfg.problem;
  auto results = for_levels(cfg, [&](int n) {
    double er = 0.0, em = 0.0;
    const std::function<void(const Discretization&, const SystemState&)> track = [&](const Discretization& d, const SystemState& s) {
      const auto [a, b] = final_time_errors(d, s, data);
      er = std::max(er, a);
      em = std::max(em, b);
    };
    LevelRun lr = run_level(data, cfg, n, cfg.max_in_time ? track : decltype(track){});
    Discretization disc(lr.mesh, cfg.assembly);
    if (!cfg.max_in_time) std::tie(er, em) = final_time_errors(disc, lr.run.final_state, data);
    LevelResult level{n, lr.mesh.h, lr.dt, er, em, std::nullopt, std::nullopt, lr.run.newton_total()};
    return std::make_pair(level, diagnostics_for(data, lr, cfg));
  });
  for (auto& [level, diag] : results) {
    report.levels.push_back(level);
    report.diagnostics.push_back(std::move(diag));
  }
  report.levels = rates(std::move(report.levels));
  return report;
}

StudyReport run_dependence(const StudyConfig& cfg) {
  cfg.validate();
  const std::vector<double> a1 = cfg.coefficients.value_or(std::vector<double>{1.0, 1.0, 1.0});
  const std::vector<double>& a2 = cfg.coefficients2;
  if (a1.size() != 3 || a2.size() != 3) {
    throw std::invalid_argument("dependence study: coefficient vectors need three entries (a_-1, a_0, a_1)");
  }
  ProblemData p1 = example2(a1[0], a1[1], a1[2]);
  ProblemData p2 = example2(a2[0], a2[1], a2[2]);
  for (ProblemData* p : {&p1, &p2}) {
    p->eps_reg = cfg.eps_reg;
    p->T = cfg.T;
  }
  StudyReport report;
  report.kind = StudyKind::Dependence;
  report.problem = "example2";
  auto results = for_levels(cfg, [&](int n) {
    LevelRun r1 = run_level(p1, cfg, n);
    LevelRun r2 = run_level(p2, cfg, n);
    Discretization disc(r1.mesh, cfg.assembly);
    const double d_rho = norm(disc.scalar_space(), r1.run.final_state.rho_bar - r2.run.final_state.rho_bar, 2.0, {},
                              disc.rule());
    const double d_m =
        norm(disc.vector_space(), r1.run.final_state.m - r2.run.final_state.m, p1.powers.s(), {}, disc.rule());
    LevelResult level{n, r1.mesh.h, r1.dt, d_rho, d_m, std::nullopt, std::nullopt,
                      r1.run.newton_total() + r2.run.newton_total()};
    return std::make_tuple(level, diagnostics_for(p1, r1, cfg), diagnostics_for(p2, r2, cfg));
  });
  for (auto& [level, d1, d2] : results) {
    report.levels.push_back(level);
    report.diagnostics.push_back(std::move(d1));
    report.diagnostics.push_back(std::move(d2));
  }
  report.levels = rates(std::move(report.levels));
  return report;
}

SingleResult run_single(const StudyConfig& cfg) {
  if (cfg.levels.empty()) throw std::invalid_argument("single run needs a level");
  const int n = cfg.levels.front();
  if (n < 1) throw std::invalid_argument("single run needs a positive level");
  const ProblemData data = configured_problem(cfg);
  LevelRun lr = run_level(data, cfg, n);
  Discretization disc(lr.mesh, cfg.assembly);
  SingleResult out;
  if (data.exact) out.errors = final_time_errors(disc, lr.run.final_state, data);
  out.energy_bound = energy_bound_for(data, disc, lr.run, lr.dt);
  out.run = std::move(lr.run);
  return out;
}

void write_dofs_csv(std::ostream& os, const StructuredTriMesh& mesh, const SystemState& state) {
  os << "x,y,rho_bar,m1,m2\n";
  for (int i = 0; i < mesh.node_count(); ++i) {
    const auto& x = mesh.nodes[static_cast<std::size_t>(i)];
    os << shortest(x.x()) << ',' << shortest(x.y()) << ',' << shortest(state.rho_bar(i)) << ','
       << shortest(state.m(2 * i)) << ',' << shortest(state.m(2 * i + 1)) << '\n';
  }
}

double jacobian_fd_error(const Discretization& disc, const SystemState& state, const SystemState& prev, double dt,
                         const ProblemData& data) {
  const Eigen::MatrixXd J = Eigen::MatrixXd(jacobian(disc, state, dt, data));
  const Eigen::VectorXd x = disc.pack(state);
  Eigen::MatrixXd fd(J.rows(), J.cols());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double step = 1e-6 * (1.0 + std::abs(x(j)));
    Eigen::VectorXd xp = x, xm = x;
    xp(j) += step;
    xm(j) -= step;
    fd.col(j) = (residual(disc, disc.unpack(xp, state.t), prev, dt, data) -
                 residual(disc, disc.unpack(xm, state.t), prev, dt, data)) /
                (2.0 * step);
  }
  return (J - fd).cwiseAbs().maxCoeff() / J.cwiseAbs().maxCoeff();
}

namespace {

/// Sequences meeting the Gronwall hypothesis with equality.
struct GronwallSample {
  std::vector<double> a, b, g;
  double dt;
};

GronwallSample gronwall_sample(std::mt19937_64& rng) {
  const auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  GronwallSample s;
  const int M = 1 + static_cast<int>(unit() * 200);
  s.dt = std::min(0.5, (1e-3 + 10.0 * unit()) / M);
  s.a.assign(1, unit() * 10.0);
  s.b.assign(1, 0.0);
  s.g.assign(1, 0.0);
  for (int n = 1; n <= M; ++n) {
    const double g = unit() * 10.0;
    const double b = unit() * (g + s.a.back() / s.dt);
    s.g.push_back(g);
    s.b.push_back(b);
    s.a.push_back(std::max(0.0, (s.a.back() + s.dt * (g - b)) / (1.0 - s.dt)));
  }
  return s;
}

std::string fmt_e(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

VerifySection mesh_section() {
  VerifySection sec{"mesh+quadrature", true, {}};
  std::ostringstream d;
  double worst_area = 0.0, worst_pu = 0.0, worst_quad = 0.0, min_eig = 1.0;
  std::mt19937_64 rng(7);
  const auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int n : {1, 2, 4, 8}) {
    const auto mesh = build_mesh(n);
    double area = 0.0;
    for (int e = 0; e < mesh.triangle_count(); ++e) area += element_geometry(mesh, e).area;
    worst_area = std::max(worst_area, std::abs(area - 1.0));
    const ScalarP1Space space(mesh);
    for (int k = 0; k < 100; ++k) {
      const Eigen::Vector2d x(unit(), unit());
      const double pu = evaluate(space, Eigen::VectorXd::Ones(space.size()), x);
      worst_pu = std::max(worst_pu, std::abs(pu - 1.0));
    }
    const Eigen::MatrixXd M = Eigen::MatrixXd(mass_matrix(space, triangle_rule(4)));
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues().minCoeff());
  }
  for (int order : {1, 2, 4, 5}) {
    const auto rule = triangle_rule(order);
    for (int i = 0; i <= order; ++i) {
      for (int j = 0; i + j <= order; ++j) {
        double q = 0.0;
        for (int k = 0; k < rule.size(); ++k) {
          q += rule.weights[static_cast<std::size_t>(k)] * std::pow(rule.points[static_cast<std::size_t>(k)].x(), i) *
               std::pow(rule.points[static_cast<std::size_t>(k)].y(), j);
        }
        // int_T x^i y^j = i! j! / (i + j + 2)!
        const double exact = std::tgamma(i + 1.0) * std::tgamma(j + 1.0) / std::tgamma(i + j + 3.0);
        worst_quad = std::max(worst_quad, std::abs(q - exact));
      }
    }
  }
  sec.passed = worst_area <= 1e-14 && worst_pu <= 1e-13 && worst_quad <= 1e-13 && min_eig > 0.0;
  d << "area=" << fmt_e(worst_area) << " partition=" << fmt_e(worst_pu) << " quadrature=" << fmt_e(worst_quad)
    << " mass_min_eig=" << fmt_e(min_eig);
  sec.detail = d.str();
  return sec;
}

}  // namespace

bool VerifyReport::all_pass() const {
  return std::all_of(sections.begin(), sections.end(), [](const VerifySection& s) { return s.passed; });
}

std::string VerifyReport::format() const {
  std::ostringstream os;
  for (const auto& s : sections) os << (s.passed ? "PASS " : "FAIL ") << s.name << ": " << s.detail << '\n';
  os << (all_pass() ? "verify: all checks passed" : "verify: violations found") << '\n';
  return os.str();
}

VerifyReport run_verify(const StudyConfig& cfg) {
  VerifyReport report;
  const ProblemData data = configured_problem(cfg);

  InequalitySuiteConfig ic;
  ic.seed = cfg.seed;
  ic.trials = cfg.trials;
  ic.eps_reg = cfg.eps_reg;
  ic.c3_scale = cfg.c3_scale;
  const auto ineq = inequality_suite(data.powers, ic);
  for (const auto& st : ineq.stats) {
    VerifySection sec;
    sec.name = std::string("inequality ") + std::string(name(st.kind));
    sec.passed = st.violations == 0;
    sec.detail = std::to_string(st.trials) + " trials, " + std::to_string(st.violations) +
                 " violations, max violation " + fmt_e(st.max_violation);
    if (st.violations > 0) sec.detail += "; worst " + st.worst_input;
    report.sections.push_back(sec);
  }

  {
    std::mt19937_64 rng(cfg.seed ^ 0x5851F42D4C957F2Dull);
    int failures = 0, rejected = 0;
    for (int k = 0; k < cfg.gronwall_trials; ++k) {
      const auto s = gronwall_sample(rng);
      if (!gronwall_hypothesis(s.a, s.b, s.g, s.dt)) {
        ++rejected;
        continue;
      }
      if (!gronwall_check(s.a, s.b, s.g, s.dt)) ++failures;
    }
    report.sections.push_back({"discrete gronwall", failures == 0 && rejected == 0,
                               std::to_string(cfg.gronwall_trials) + " sequences, " + std::to_string(failures) +
                                   " violations, " + std::to_string(rejected) + " rejected"});
  }

  {
    std::mt19937_64 rng(cfg.seed ^ 0x2545F4914F6CDD1Dull);
    const auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    const ProblemData ex1 = example1();
    double worst = 0.0;
    for (int n : {2, 4}) {
      const auto mesh = build_mesh(n);
      Discretization disc(mesh, cfg.assembly);
      for (int k = 0; k < 10; ++k) {
        SystemState prev = disc.zero_state(0.4);
        SystemState state = disc.zero_state(0.5);
        for (int i = 0; i < mesh.node_count(); ++i) {
          state.m(2 * i) = 1.0 + 0.3 * (2.0 * unit() - 1.0);
          state.m(2 * i + 1) = 0.5 + 0.3 * (2.0 * unit() - 1.0);
          state.rho_bar(i) = 2.0 * unit() - 1.0;
          prev.rho_bar(i) = 2.0 * unit() - 1.0;
        }
        worst = std::max(worst, jacobian_fd_error(disc, state, prev, 0.1, ex1));
      }
    }
    report.sections.push_back({"jacobian vs finite differences", worst <= 1e-5, "max relative error " + fmt_e(worst)});
  }

  report.sections.push_back(mesh_section());
  return report;
}

void write_csv(std::ostream& os, const std::vector<LevelResult>& levels) {
  os << "N,h,dt,err_rho,rate_rho,err_m,rate_m,newton_total\n";
  for (const auto& l : levels) {
    os << l.n_cells << ',' << shortest(l.h) << ',' << shortest(l.dt) << ',' << shortest(l.err_rho) << ','
       << (l.rate_rho ? shortest(*l.rate_rho) : "") << ',' << shortest(l.err_m) << ','
       << (l.rate_m ? shortest(*l.rate_m) : "") << ',' << l.newton_total << '\n';
  }
}

std::vector<LevelResult> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != "N,h,dt,err_rho,rate_rho,err_m,rate_m,newton_total") {
    throw std::invalid_argument("read_csv: unexpected header");
  }
  std::vector<LevelResult> out;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (f.size() != 8) throw std::invalid_argument("read_csv: expected 8 fields");
    LevelResult l;
    l.n_cells = parse_number<int>(f[0]);
    l.h = parse_number<double>(f[1]);
    l.dt = parse_number<double>(f[2]);
    l.err_rho = parse_number<double>(f[3]);
    if (!trim(f[4]).empty()) l.rate_rho = parse_number<double>(f[4]);
    l.err_m = parse_number<double>(f[5]);
    if (!trim(f[6]).empty()) l.rate_m = parse_number<double>(f[6]);
    l.newton_total = parse_number<int>(f[7]);
    out.push_back(l);
  }
  return out;
}

std::string format_table(const StudyReport& report) {
  const bool dep = report.kind == StudyKind::Dependence;
  const char* rho_head = dep ? "||rho_h1 - rho_h2||_L2" : "||rho - rho_h||_L2";
  const char* m_head = dep ? "||m_h1 - m_h2||_Ls" : "||m - m_h||_Ls";
  std::ostringstream os;
  char line[200];
  std::snprintf(line, sizeof line, "%-6s| %-24s| %-8s| %-24s| %-8s\n", "N", rho_head, "Rates", m_head, "Rates");
  os << line << std::string(76, '-') << '\n';
  const auto rate = [](const std::optional<double>& r) {
    if (!r) return std::string("--");
    char b[32];
    std::snprintf(b, sizeof b, "%.3f", *r);
    return std::string(b);
  };
  for (const auto& l : report.levels) {
    std::snprintf(line, sizeof line, "%-6d| %-24s| %-8s| %-24s| %-8s\n", l.n_cells, fmt_e(l.err_rho).c_str(),
                  rate(l.rate_rho).c_str(), fmt_e(l.err_m).c_str(), rate(l.rate_m).c_str());
    os << line;
  }
  return os.str();
}

}  // namespace mixfem
