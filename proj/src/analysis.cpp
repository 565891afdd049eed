#include "mixfem/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace mixfem {

double convergence_rate(double e_prev, double e, double h_prev, double h) {
  return std::log(e / e_prev) / std::log(h / h_prev);
}

std::vector<LevelResult> rates(std::vector<LevelResult> levels) {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    levels[i].rate_rho.reset();
    levels[i].rate_m.reset();
    if (i == 0) continue;
    const auto& prev = levels[i - 1];
    auto& cur = levels[i];
    if (!(cur.h < prev.h)) throw std::invalid_argument("rates: mesh sizes must be strictly decreasing");
    if (prev.err_rho > 0.0 && cur.err_rho > 0.0) {
      cur.rate_rho = convergence_rate(prev.err_rho, cur.err_rho, prev.h, cur.h);
    }
    if (prev.err_m > 0.0 && cur.err_m > 0.0) {
      cur.rate_m = convergence_rate(prev.err_m, cur.err_m, prev.h, cur.h);
    }
  }
  return levels;
}

std::pair<double, double> final_time_errors(const Discretization& disc, const SystemState& state,
                                            const ProblemData& data) {
  if (!data.exact) throw std::invalid_argument("final_time_errors: problem has no exact solution");
  const double t = state.t;
  const auto& exact = *data.exact;
  const double err_rho = norm(
      disc.scalar_space(), state.rho_bar, 2.0,
      [&](const Eigen::Vector2d& x) { return exact.rho(x, t) - data.Psi(x, t); }, disc.rule());
  const double err_m = norm(
      disc.vector_space(), state.m, data.powers.s(), [&](const Eigen::Vector2d& x) { return exact.m(x, t); },
      disc.rule());
  return {err_rho, err_m};
}

EnergyTerms energy_terms(const Discretization& disc, const SystemState& state, const ProblemData& data) {
  const double t = state.t;
  const double s = data.powers.s();
  const double s_conj = data.powers.s_conjugate();
  const auto& mesh = disc.mesh();
  const auto& rule = disc.rule();
  EnergyTerms e;
  e.rho_norm2 = std::pow(norm(disc.scalar_space(), state.rho_bar, 2.0, {}, rule), 2.0);
  e.m_norm_s = std::pow(norm(disc.vector_space(), state.m, s, {}, rule), s);
  e.f_norm2 = std::pow(function_norm(mesh, ScalarField([&](const Eigen::Vector2d& x) { return data.f(x, t); }), 2.0, rule), 2.0);
  e.psi_t_norm2 =
      std::pow(function_norm(mesh, ScalarField([&](const Eigen::Vector2d& x) { return data.Psi_t(x, t); }), 2.0, rule), 2.0);
  e.grad_psi_norm = std::pow(
      function_norm(mesh, VectorField([&](const Eigen::Vector2d& x) { return data.grad_Psi(x, t); }), s_conj, rule),
      s_conj);
  return e;
}

std::vector<StabilityEnergy> stability_energy(const std::vector<EnergyTerms>& terms, double dt, double rho0_norm2) {
  std::vector<StabilityEnergy> out;
  out.reserve(terms.size());
  StabilityEnergy acc;
  for (const auto& term : terms) {
    acc.e_rho = term.rho_norm2;
    acc.e_m_accum += dt * term.m_norm_s;
    acc.f_accum += dt * term.f_norm2;
    acc.psi_t_accum += dt * term.psi_t_norm2;
    acc.grad_psi_accum += dt * term.grad_psi_norm;
    acc.data_side = rho0_norm2 + acc.f_accum + acc.psi_t_accum + acc.grad_psi_accum;
    out.push_back(acc);
  }
  return out;
}

double stability_bound(const PowerSpec<double>& powers, double C3, double phi_lower, double phi_upper, double T,
                       double dt, double rho0_norm2, const DataIntegrals& data) {
  if (!(dt > 0.0 && dt < 1.0)) throw std::invalid_argument("stability_bound: need 0 < dt < 1");
  const double s = powers.s();
  const double s_conj = powers.s_conjugate();
  const double K = std::pow(s * C3 / 2.0, -s_conj / s) / s_conj;
  const double forcing = data.f2 / phi_lower + phi_upper * data.psi_t2 + K * data.grad_psi;
  const double growth = std::exp(T / (1.0 - dt));
  const double scale = std::max(1.0 / phi_lower, 1.0 / C3);
  return scale * growth * (phi_upper * rho0_norm2 + 2.0 * forcing);
}

bool gronwall_hypothesis(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& g,
                         double dt, double slack) {
  if (a.size() != b.size() || a.size() != g.size()) return false;
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (a[n] < 0.0 || b[n] < 0.0 || g[n] < 0.0) return false;
    if (n == 0) continue;
    const double lhs = (a[n] - a[n - 1]) / dt - a[n] + b[n];
    const double scale = std::max({1.0, a[n] / dt, a[n - 1] / dt, b[n], g[n]});
    if (lhs > g[n] + slack * scale) return false;
  }
  return true;
}

bool gronwall_check(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& g,
                    double dt) {
  if (!(dt > 0.0 && dt < 1.0)) throw std::invalid_argument("gronwall_check: need 0 < dt < 1");
  if (!gronwall_hypothesis(a, b, g, dt)) throw std::domain_error("gronwall_check: hypothesis does not hold");
  double sum_b = 0.0;
  double sum_g = 0.0;
  for (std::size_t n = 1; n < a.size(); ++n) {
    sum_b += b[n];
    sum_g += g[n];
    const double lhs = a[n] + dt * sum_b;
    const double rhs = std::exp(static_cast<double>(n) * dt / (1.0 - dt)) * (a[0] + dt * sum_g);
    if (lhs > rhs * (1.0 + 1e-12)) return false;
  }
  return true;
}

namespace {

/// Platform-independent sampling on top of mt19937_64.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

  Eigen::Vector2d vector(double r) {
    const double theta = uniform(0.0, 2.0 * M_PI);
    return {r * std::cos(theta), r * std::sin(theta)};
  }

  Eigen::VectorXd coefficients(int n, double lo, double hi) {
    Eigen::VectorXd a(n);
    for (int i = 0; i < n; ++i) a(i) = uniform(lo, hi);
    return a;
  }

 private:
  std::mt19937_64 rng_;
};

std::string describe(const WitnessInput<double>& in) {
  std::ostringstream os;
  os.precision(17);
  os << "w=" << in.w << " p=" << in.p << " y=(" << in.y.x() << "," << in.y.y() << ") y'=(" << in.y_prime.x()
     << "," << in.y_prime.y() << ") a=(";
  for (Eigen::Index i = 0; i < in.a.size(); ++i) os << (i ? "," : "") << in.a(i);
  os << ") a'=(";
  for (Eigen::Index i = 0; i < in.a_prime.size(); ++i) os << (i ? "," : "") << in.a_prime(i);
  os << ")";
  return os.str();
}

}  // namespace

bool InequalityReport::all_pass() const {
  for (const auto& s : stats) {
    if (s.violations > 0) return false;
  }
  return true;
}

std::string InequalityReport::format() const {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-20s %8s %10s %14s\n", "inequality", "trials", "violations", "max_violation");
  os << line;
  for (const auto& s : stats) {
    std::snprintf(line, sizeof line, "%-20s %8d %10d %14.6e\n", std::string(name(s.kind)).c_str(), s.trials,
                  s.violations, s.max_violation);
    os << line;
    if (s.violations > 0) os << "  worst: " << s.worst_input << '\n';
  }
  return os.str();
}

InequalityReport inequality_suite(const PowerSpec<double>& powers, const InequalitySuiteConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("inequality_suite: need at least one trial");
  auto constants = LemmaConstants<double>::compute(powers, cfg.a_lower, cfg.a_upper);
  constants.C3 *= cfg.c3_scale;
  const int ncoef = powers.coefficient_count();

  InequalityReport report;
  for (std::size_t k = 0; k < cfg.kinds.size(); ++k) {
    const Inequality kind = cfg.kinds[k];
    Sampler rng(cfg.seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(kind) + 1));
    InequalityStats st;
    st.kind = kind;
    st.trials = cfg.trials;
    st.max_violation = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < cfg.trials; ++trial) {
      WitnessInput<double> in;
      in.w = rng.log_uniform(cfg.eps_reg, cfg.w_max);
      in.y = rng.vector(rng.log_uniform(cfg.eps_reg, cfg.y_max));
      if (rng.unit() < 0.25) {
        in.y_prime = in.y + rng.vector(in.y.norm() * rng.log_uniform(1e-8, 1.0));
      } else {
        in.y_prime = rng.vector(rng.log_uniform(cfg.eps_reg, cfg.y_max));
      }
      in.a = rng.coefficients(ncoef, cfg.a_lower, cfg.a_upper);
      in.a_prime = rng.coefficients(ncoef, cfg.a_lower, cfg.a_upper);
      in.p = kind == Inequality::Cont2 ? rng.uniform(0.01, 3.0) : rng.uniform(-0.99, -0.01);

      const auto w = lemma_witness(kind, powers, constants, in);
      const double v = w.violation();
      if (v > cfg.slack) ++st.violations;
      if (v > st.max_violation) {
        st.max_violation = v;
        st.worst_input = describe(in);
      }
    }
    report.stats.push_back(st);
  }
  return report;
}

}  // namespace mixfem
