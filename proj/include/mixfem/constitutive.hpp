#pragma once

// Generalized polynomial momentum law F(|m|) m covering pre-Darcy, Darcy
// and post-Darcy regimes, its Jacobian, and the two-sided estimates the
// monotone-operator analysis of the scheme relies on.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mixfem {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Exponents of the class P(N, alpha): one singular power -alpha, the
/// constant term, and N strictly increasing positive powers.
template <typename Scalar>
class PowerSpec {
 public:
  PowerSpec(Scalar alpha, std::vector<Scalar> exponents)
      : alpha_(alpha), exponents_(std::move(exponents)) {
    if (!(alpha_ > Scalar(0) && alpha_ < Scalar(1))) {
      throw std::invalid_argument("PowerSpec: alpha must lie in (0,1)");
    }
    if (exponents_.empty()) {
      throw std::invalid_argument("PowerSpec: need at least one positive exponent");
    }
    for (std::size_t i = 0; i < exponents_.size(); ++i) {
      if (!(exponents_[i] > Scalar(0))) {
        throw std::invalid_argument("PowerSpec: exponents must be positive");
      }
      if (i > 0 && !(exponents_[i] > exponents_[i - 1])) {
        throw std::invalid_argument("PowerSpec: exponents must be strictly increasing");
      }
    }
  }

  Scalar alpha() const { return alpha_; }
  const std::vector<Scalar>& exponents() const { return exponents_; }
  int N() const { return static_cast<int>(exponents_.size()); }
  Scalar top_exponent() const { return exponents_.back(); }

  /// Coercivity exponent s = alpha_N + 2.
  Scalar s() const { return top_exponent() + Scalar(2); }
  /// Hoelder conjugate s* = s / (s - 1).
  Scalar s_conjugate() const { return s() / (s() - Scalar(1)); }

  /// Number of coefficients a_{-1}, a_0, a_1, ..., a_N.
  int coefficient_count() const { return N() + 2; }

  /// Power attached to coefficient slot k (0 -> -alpha, 1 -> 0, k -> alpha_{k-1}).
  Scalar power(int k) const {
    if (k == 0) return -alpha_;
    if (k == 1) return Scalar(0);
    return exponents_[static_cast<std::size_t>(k - 2)];
  }

 private:
  Scalar alpha_;
  std::vector<Scalar> exponents_;
};

/// Coefficients (a_{-1}, a_0, ..., a_N) together with the box [lower, upper]
/// = [a_*, a^*] that parameterizes the lemma constants. Each entry may carry
/// a multiplicative time schedule; an empty schedule means constant in time.
template <typename Scalar>
struct CoefficientVector {
  VectorX<Scalar> values;
  Scalar lower{0};
  Scalar upper{0};
  std::vector<std::function<Scalar(Scalar)>> schedule;

  /// Records a_* = min(a_{-1}, a_0, a_N) and a^* = max over all entries.
  static CoefficientVector from_values(VectorX<Scalar> v) {
    if (v.size() < 3) {
      throw std::invalid_argument("CoefficientVector: need a_{-1}, a_0 and at least a_1");
    }
    if ((v.array() < Scalar(0)).any()) {
      throw std::invalid_argument("CoefficientVector: coefficients must be nonnegative");
    }
    CoefficientVector c;
    c.lower = std::min({v(0), v(1), v(v.size() - 1)});
    c.upper = v.maxCoeff();
    c.values = std::move(v);
    return c;
  }

  static CoefficientVector from_values(std::initializer_list<Scalar> v) {
    VectorX<Scalar> e(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (Scalar x : v) e(i++) = x;
    return from_values(std::move(e));
  }

  /// a_{-1}, a_0, a_N >= a_* > 0 and every entry <= a^*.
  bool admissible() const {
    const auto n = values.size();
    return lower > Scalar(0) && values(0) >= lower && values(1) >= lower &&
           values(n - 1) >= lower && (values.array() <= upper).all();
  }

  VectorX<Scalar> at(Scalar t) const {
    VectorX<Scalar> out = values;
    for (std::size_t k = 0; k < schedule.size() && static_cast<Eigen::Index>(k) < out.size(); ++k) {
      if (schedule[k]) out(static_cast<Eigen::Index>(k)) *= schedule[k](t);
    }
    return out;
  }
};

/// F(z) = a_{-1} z^{-alpha} + a_0 + sum_i a_i z^{alpha_i}. The argument is
/// clamped at eps_reg so F stays finite at z = 0; above the clamp the
/// formula is evaluated exactly.
template <typename Scalar>
class GeneralizedPolynomial {
 public:
  GeneralizedPolynomial(PowerSpec<Scalar> spec, VectorX<Scalar> coeffs,
                        Scalar eps_reg = Scalar(1e-10))
      : spec_(std::move(spec)), coeffs_(std::move(coeffs)), eps_reg_(eps_reg) {
    if (coeffs_.size() != spec_.coefficient_count()) {
      throw std::invalid_argument("GeneralizedPolynomial: coefficient count must be N+2");
    }
    if ((coeffs_.array() < Scalar(0)).any()) {
      throw std::invalid_argument("GeneralizedPolynomial: coefficients must be nonnegative");
    }
    if (!(eps_reg_ > Scalar(0))) {
      throw std::invalid_argument("GeneralizedPolynomial: eps_reg must be positive");
    }
  }

  const PowerSpec<Scalar>& spec() const { return spec_; }
  const VectorX<Scalar>& coefficients() const { return coeffs_; }
  Scalar eps_reg() const { return eps_reg_; }

  Scalar operator()(Scalar z) const { return exact(std::max(z, eps_reg_)); }
  Scalar derivative(Scalar z) const { return exact_derivative(std::max(z, eps_reg_)); }

  /// Unregularized value; z must be positive.
  Scalar exact(Scalar z) const {
    Scalar sum = coeffs_(0) * std::pow(z, -spec_.alpha()) + coeffs_(1);
    for (int k = 2; k < spec_.coefficient_count(); ++k) {
      sum += coeffs_(k) * std::pow(z, spec_.power(k));
    }
    return sum;
  }

  Scalar exact_derivative(Scalar z) const {
    Scalar sum = -spec_.alpha() * coeffs_(0) * std::pow(z, -spec_.alpha() - Scalar(1));
    for (int k = 2; k < spec_.coefficient_count(); ++k) {
      const Scalar p = spec_.power(k);
      sum += p * coeffs_(k) * std::pow(z, p - Scalar(1));
    }
    return sum;
  }

 private:
  PowerSpec<Scalar> spec_;
  VectorX<Scalar> coeffs_;
  Scalar eps_reg_;
};

template <typename Scalar>
Scalar eval_F(const GeneralizedPolynomial<Scalar>& F, Scalar z) {
  return F(z);
}

template <typename Scalar>
Scalar eval_F_prime(const GeneralizedPolynomial<Scalar>& F, Scalar z) {
  return F.derivative(z);
}

/// m -> F(|m|) m. Odd and isotropic; flux(0) = 0.
template <typename Scalar, typename Derived>
Vector2<Scalar> flux(const GeneralizedPolynomial<Scalar>& F, const Eigen::MatrixBase<Derived>& m) {
  return F(m.norm()) * m;
}

/// F(|m^|) I + F'(|m^|)/|m^| m m^T with |m^| = max(|m|, eps_reg).
template <typename Scalar, typename Derived>
Matrix2<Scalar> flux_jacobian(const GeneralizedPolynomial<Scalar>& F,
                             const Eigen::MatrixBase<Derived>& m) {
  const Scalar r = std::max(static_cast<Scalar>(m.norm()), F.eps_reg());
  Matrix2<Scalar> J = F.exact(r) * Matrix2<Scalar>::Identity();
  J.noalias() += (F.exact_derivative(r) / r) * (m * m.transpose());
  return J;
}

/// Constants of the two-coefficient continuity and monotonicity estimates,
/// computed from the exponents and the coefficient box [a_*, a^*].
template <typename Scalar>
struct LemmaConstants {
  Scalar C1{};
  Scalar C2{};
  Scalar C3{};
  Scalar a_lower{};
  Scalar a_upper{};

  static LemmaConstants compute(const PowerSpec<Scalar>& spec, Scalar a_lower, Scalar a_upper) {
    if (!(a_lower > Scalar(0)) || a_upper < a_lower) {
      throw std::invalid_argument("LemmaConstants: need 0 < a_* <= a^*");
    }
    const Scalar s = spec.s();
    const Scalar alpha = spec.alpha();
    LemmaConstants c;
    c.C1 = Scalar(2) * (s - Scalar(1)) / (Scalar(1) - alpha);
    c.C2 = Scalar(3 * spec.N());
    c.C3 = a_lower * (Scalar(1) - alpha) / (std::pow(Scalar(2), s - Scalar(1)) * (s - Scalar(1)));
    c.a_lower = a_lower;
    c.a_upper = a_upper;
    return c;
  }
};

enum class Inequality {
  DervFLower,      // -alpha F(w) <= w F'(w)
  DervFUpper,      // w F'(w) <= alpha_N F(w)
  OrdFLower,       // a_* (w^-alpha + 1 + w^alpha_N) <= F(w)
  OrdFUpper,       // F(w) <= (N+2) a^* (w^-alpha + 1 + w^alpha_N)
  OrdFUpperNarrow, // F(w) <= N a^* (w^-alpha + w^alpha_N); fails in general
  Cont1,           // ||x|^p x - |y|^p y| <= 2 |x-y|^(1+p), -1 < p < 0
  Cont2,           // ||x|^p x - |y|^p y| <= (1+p) (|x|+|y|)^p |x-y|, p > 0
  Umono,
  Quasimonotone,
  Lipschitz,
  Monotone0,
};

inline constexpr Inequality kAllInequalities[] = {
    Inequality::DervFLower, Inequality::DervFUpper, Inequality::OrdFLower,
    Inequality::OrdFUpper,  Inequality::Cont1,      Inequality::Cont2,
    Inequality::Umono,      Inequality::Quasimonotone, Inequality::Lipschitz,
    Inequality::Monotone0,
};

inline std::string_view name(Inequality k) {
  switch (k) {
    case Inequality::DervFLower: return "dervF-lower";
    case Inequality::DervFUpper: return "dervF-upper";
    case Inequality::OrdFLower: return "OrdF-lower";
    case Inequality::OrdFUpper: return "OrdF-upper";
    case Inequality::OrdFUpperNarrow: return "OrdF-upper-narrow";
    case Inequality::Cont1: return "cont1";
    case Inequality::Cont2: return "cont2";
    case Inequality::Umono: return "Umono";
    case Inequality::Quasimonotone: return "quasimonotone";
    case Inequality::Lipschitz: return "Lipchitz";
    case Inequality::Monotone0: return "monotone0";
  }
  return "?";
}

enum class Relation { LessEqual, GreaterEqual };

template <typename Scalar>
struct Witness {
  Scalar lhs{};
  Scalar rhs{};
  Relation relation{Relation::LessEqual};

  /// Positive when the inequality fails, scaled by max(1, |lhs|, |rhs|).
  Scalar violation() const {
    const Scalar gap = relation == Relation::LessEqual ? lhs - rhs : rhs - lhs;
    return gap / std::max({Scalar(1), std::abs(lhs), std::abs(rhs)});
  }
};

/// Inputs for any witness; each kind reads only the fields it needs.
template <typename Scalar>
struct WitnessInput {
  Scalar w{1};
  Scalar p{-0.5};
  Vector2<Scalar> y{Vector2<Scalar>::Zero()};
  Vector2<Scalar> y_prime{Vector2<Scalar>::Zero()};
  VectorX<Scalar> a;
  VectorX<Scalar> a_prime;
};

namespace detail {

template <typename Scalar>
Vector2<Scalar> power_map(const Vector2<Scalar>& x, Scalar p) {
  const Scalar r = x.norm();
  if (r == Scalar(0)) return Vector2<Scalar>::Zero();
  return std::pow(r, p) * x;
}

template <typename Scalar>
Vector2<Scalar> exact_flux(const GeneralizedPolynomial<Scalar>& F, const Vector2<Scalar>& y) {
  const Scalar r = y.norm();
  if (r == Scalar(0)) return Vector2<Scalar>::Zero();
  return F.exact(r) * y;
}

}  // namespace detail

/// Both sides of the chosen inequality with no regularization applied.
/// Throws std::domain_error for inputs on the singularity (w <= 0, or
/// y = y' = 0).
template <typename Scalar>
Witness<Scalar> lemma_witness(Inequality kind, const PowerSpec<Scalar>& spec,
                              const LemmaConstants<Scalar>& c, const WitnessInput<Scalar>& in) {
  using std::pow;
  const Scalar alpha = spec.alpha();
  const Scalar aN = spec.top_exponent();
  const Scalar s = spec.s();
  const auto coeffs = [&](const VectorX<Scalar>& a) {
    if (a.size() != spec.coefficient_count()) {
      throw std::invalid_argument("lemma_witness: coefficient vector has wrong length");
    }
    return GeneralizedPolynomial<Scalar>(spec, a);
  };
  const auto require_w = [&] {
    if (!(in.w > Scalar(0))) throw std::domain_error("lemma_witness: w must be positive");
  };
  const auto require_pair = [&] {
    if (in.y.norm() == Scalar(0) && in.y_prime.norm() == Scalar(0)) {
      throw std::domain_error("lemma_witness: y = y' = 0 is singular");
    }
  };

  switch (kind) {
    case Inequality::DervFLower:
    case Inequality::DervFUpper: {
      require_w();
      const auto F = coeffs(in.a);
      const Scalar wFp = in.w * F.exact_derivative(in.w);
      const Scalar Fw = F.exact(in.w);
      if (kind == Inequality::DervFLower) return {-alpha * Fw, wFp, Relation::LessEqual};
      return {wFp, aN * Fw, Relation::LessEqual};
    }
    case Inequality::OrdFLower:
    case Inequality::OrdFUpper:
    case Inequality::OrdFUpperNarrow: {
      require_w();
      const auto F = coeffs(in.a);
      const Scalar Fw = F.exact(in.w);
      const Scalar lo = pow(in.w, -alpha);
      const Scalar hi = pow(in.w, aN);
      if (kind == Inequality::OrdFLower) return {c.a_lower * (lo + Scalar(1) + hi), Fw, Relation::LessEqual};
      if (kind == Inequality::OrdFUpper) {
        return {Fw, Scalar(spec.N() + 2) * c.a_upper * (lo + Scalar(1) + hi), Relation::LessEqual};
      }
      return {Fw, Scalar(spec.N()) * c.a_upper * (lo + hi), Relation::LessEqual};
    }
    case Inequality::Cont1: {
      if (!(in.p > Scalar(-1) && in.p < Scalar(0))) {
        throw std::invalid_argument("lemma_witness: cont1 needs -1 < p < 0");
      }
      require_pair();
      const Scalar lhs = (detail::power_map(in.y, in.p) - detail::power_map(in.y_prime, in.p)).norm();
      return {lhs, Scalar(2) * pow((in.y - in.y_prime).norm(), Scalar(1) + in.p), Relation::LessEqual};
    }
    case Inequality::Cont2: {
      if (!(in.p > Scalar(0))) throw std::invalid_argument("lemma_witness: cont2 needs p > 0");
      const Scalar lhs = (detail::power_map(in.y, in.p) - detail::power_map(in.y_prime, in.p)).norm();
      const Scalar rhs = (Scalar(1) + in.p) * pow(in.y.norm() + in.y_prime.norm(), in.p) *
                         (in.y - in.y_prime).norm();
      return {lhs, rhs, Relation::LessEqual};
    }
    case Inequality::Umono:
    case Inequality::Quasimonotone:
    case Inequality::Lipschitz:
    case Inequality::Monotone0: {
      require_pair();
      const bool two = kind == Inequality::Umono || kind == Inequality::Quasimonotone;
      const auto F1 = coeffs(in.a);
      const auto F2 = coeffs(two ? in.a_prime : in.a);
      const Vector2<Scalar> diff = detail::exact_flux(F1, in.y) - detail::exact_flux(F2, in.y_prime);
      const Vector2<Scalar> dy = in.y - in.y_prime;
      const Scalar d = dy.norm();
      const Scalar S = Scalar(1) + in.y.norm() + in.y_prime.norm();
      const Scalar da = two ? (in.a - in.a_prime).cwiseAbs().maxCoeff() : Scalar(0);
      switch (kind) {
        case Inequality::Umono:
          return {diff.norm(),
                  c.C1 * pow(S, s - Scalar(2) + alpha) * pow(d, Scalar(1) - alpha) +
                      c.C2 * pow(S, s - Scalar(1)) * da,
                  Relation::LessEqual};
        case Inequality::Lipschitz:
          return {diff.norm(), c.C1 * pow(S, s - Scalar(2) + alpha) * pow(d, Scalar(1) - alpha),
                  Relation::LessEqual};
        case Inequality::Quasimonotone:
          return {diff.dot(dy), c.C3 * pow(d, s) - c.C2 * pow(S, s - Scalar(1)) * d * da,
                  Relation::GreaterEqual};
        default:
          return {diff.dot(dy), c.C3 * pow(d, s), Relation::GreaterEqual};
      }
    }
  }
  throw std::invalid_argument("lemma_witness: unknown inequality");
}

}  // namespace mixfem
