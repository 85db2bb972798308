/*!
  \file
  \brief Built-in test problems, reference integrals and asymptotic error
  constants.

  For a problem f and scheme with constants (alpha, beta, c_r):

    nonadaptive:  c_r (b-a)^r sqrt(alpha^2 (b-a) int|f^(r)|^2 - beta^2 (int f^(r))^2)
    adaptive:     c_r sqrt(alpha^2 - beta^2) (int |f^(r)|^{1/(r+1)})^{r+1}
    nested bound: K*(r) times the adaptive constant

  each multiplying N^{-(r+1/2)} in the RMS error law.
*/

#pragma once

#include <vrmc/error.hpp>
#include <vrmc/interp.hpp>
#include <vrmc/partition.hpp>
#include <vrmc/quadrature.hpp>
#include <vrmc/rng.hpp>
#include <vrmc/scheme.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace vrmc {

//! Integrals of f^(r) over [a, b] that enter the error constants.
struct DerivativeMoments {
  double l2_squared = 0.0;  //!< int |f^(r)|^2
  double integral = 0.0;    //!< int f^(r)
  double holder = 0.0;      //!< int |f^(r)|^{1/(r+1)}
};

struct TestProblem {
  std::string id;
  std::function<double(double)> f;
  double a = 0.0;
  double b = 1.0;
  std::optional<double> exact;
  //! f^(r)(x); empty when no analytic derivative is registered.
  std::function<double(int r, double x)> derivative;
  //! Closed-form moments of f^(r), when registered.
  std::function<std::optional<DerivativeMoments>(int r)> moments;
  //! True when f^(r) has one strict sign on [a, b].
  std::function<bool(int r)> sign_definite;
  //! Mesh grading toward a (true) or b (false) for reference quadrature.
  bool graded_toward_left = true;
};

namespace problems {

//! 1 / (x + d) on [0, 1].
inline auto logsing(double d = 1e-4) -> TestProblem {
  detail::require(d > 0.0, "logsing parameter d must be > 0");
  TestProblem p;
  char buf[64];
  std::snprintf(buf, sizeof buf, "logsing(%g)", d);
  p.id = buf;
  p.f = [d](double x) { return 1.0 / (x + d); };
  p.exact = std::log1p(1.0 / d);
  p.derivative = [d](int r, double x) {
    const double sign = r % 2 == 0 ? 1.0 : -1.0;
    return sign * detail::factorial(r) / std::pow(x + d, r + 1);
  };
  p.moments = [d](int r) -> std::optional<DerivativeMoments> {
    const double rf = detail::factorial(r);
    DerivativeMoments mo;
    mo.l2_squared = rf * rf / (2 * r + 1) *
                    (std::pow(d, -(2 * r + 1)) - std::pow(1.0 + d, -(2 * r + 1)));
    // int f^(r) = f^(r-1)(1) - f^(r-1)(0), f^(r-1) = (-1)^(r-1) (r-1)! / (x+d)^r
    const double sign = (r - 1) % 2 == 0 ? 1.0 : -1.0;
    const double rm1 = detail::factorial(r - 1);
    mo.integral = sign * rm1 * (std::pow(1.0 + d, -r) - std::pow(d, -r));
    mo.holder = std::pow(rf, 1.0 / (r + 1)) * std::log1p(1.0 / d);
    return mo;
  };
  p.sign_definite = [](int) { return true; };
  return p;
}

//! cos(100 x / (x + 1e-4)) on [0, 1]; no closed-form integral.
inline auto cos100() -> TestProblem {
  TestProblem p;
  p.id = "cos100";
  p.f = [](double x) { return std::cos(100.0 * x / (x + 1e-4)); };
  p.moments = [](int) -> std::optional<DerivativeMoments> { return std::nullopt; };
  p.sign_definite = [](int) { return false; };
  return p;
}

//! e^x on [0, 1].
inline auto exp() -> TestProblem {
  TestProblem p;
  p.id = "exp";
  p.f = [](double x) { return std::exp(x); };
  p.exact = std::numbers::e - 1.0;
  p.derivative = [](int, double x) { return std::exp(x); };
  p.moments = [](int r) -> std::optional<DerivativeMoments> {
    constexpr double e = std::numbers::e;
    DerivativeMoments mo;
    mo.l2_squared = (e * e - 1.0) / 2.0;
    mo.integral = e - 1.0;
    mo.holder = (r + 1) * std::expm1(1.0 / (r + 1));
    return mo;
  };
  p.sign_definite = [](int) { return true; };
  return p;
}

//! x^k on [0, 1].
inline auto poly(int k) -> TestProblem {
  detail::require(k >= 0, "poly degree must be >= 0");
  TestProblem p;
  p.id = "poly(" + std::to_string(k) + ")";
  p.f = [k](double x) { return std::pow(x, k); };
  p.exact = 1.0 / (k + 1);
  auto coeff = [k](int r) {
    double c = 1.0;
    for (int i = 0; i < r; ++i) c *= (k - i);
    return c;
  };
  p.derivative = [k, coeff](int r, double x) {
    return r > k ? 0.0 : coeff(r) * std::pow(x, k - r);
  };
  p.moments = [k, coeff](int r) -> std::optional<DerivativeMoments> {
    DerivativeMoments mo;
    if (r > k) return mo;
    const double c = coeff(r);
    const int j = k - r;
    mo.l2_squared = c * c / (2 * j + 1);
    mo.integral = c / (j + 1);
    mo.holder = std::pow(c, 1.0 / (r + 1)) / (static_cast<double>(j) / (r + 1) + 1.0);
    return mo;
  };
  p.sign_definite = [k](int r) { return r == k; };
  return p;
}

/*!
  Resolves a problem name: logsing (uses d), cos100, exp, poly(k) or polyK.
*/
inline auto by_name(const std::string& name, double d = 1e-4) -> TestProblem {
  if (name == "logsing") return logsing(d);
  if (name == "cos100") return cos100();
  if (name == "exp") return exp();
  if (name.rfind("poly", 0) == 0) {
    std::string digits;
    for (char c : name.substr(4)) {
      if (c >= '0' && c <= '9') digits += c;
    }
    detail::require(!digits.empty(), "poly problem needs a degree, e.g. poly(3)");
    return poly(std::stoi(digits));
  }
  throw Error(ErrorKind::invalid_argument, "unknown problem '" + name + "'");
}

//! The built-in set used by the sweep and unbiasedness checks.
inline auto builtin() -> std::vector<TestProblem> {
  return {logsing(1e-4), cos100(), exp(), poly(0), poly(3)};
}

}  // namespace problems

struct ReferenceValue {
  double value = 0.0;
  double tolerance = 0.0;
  bool closed_form = false;
};

namespace detail {

// Adaptive bisection with a 10-point Gauss scheme: partition to a tight
// priority threshold, then sum the exact integrals of the local interpolants.
inline auto reference_by_subdivision(const TestProblem& p) -> double {
  static const InterpolationScheme scheme = gauss_scheme(10);
  const Partition part = partition_auto(p.f, scheme, p.a, p.b, 1e-12,
                                        PartitionOptions{0.0, 60});
  NeumaierSum<double> acc;
  for (const auto& rec : part.records()) {
    const auto nodes = mapped_nodes(scheme, rec.left, rec.right);
    std::vector<double> values(nodes.size());
    for (std::size_t s = 0; s < nodes.size(); ++s) values[s] = p.f(nodes[s]);
    acc += interpolant_integral(scheme, rec.left, rec.right, values);
  }
  return acc.value();
}

// Composite 20-point Gauss-Legendre on a geometrically graded mesh.
inline auto reference_by_graded_rule(const TestProblem& p) -> double {
  static const quadrature::Rule rule = quadrature::gauss_legendre(20);
  const auto mesh = quadrature::graded_mesh(p.a, p.b, p.graded_toward_left, 0.85,
                                            1e-13 * (p.b - p.a), 4);
  return quadrature::composite(rule, p.f, mesh);
}

}  // namespace detail

/*!
  Exact integral of a registered problem.

  Closed form when registered; otherwise two independent deterministic
  methods (adaptive subdivision, graded composite Gauss) that must agree to
  tolerance, else ErrorKind::oracle_disagreement.
*/
inline auto reference_integral(const TestProblem& p, double tolerance = 1e-10)
    -> ReferenceValue {
  if (p.exact) return {*p.exact, 0.0, true};
  const double x = detail::reference_by_subdivision(p);
  const double y = detail::reference_by_graded_rule(p);
  if (!(std::abs(x - y) <= tolerance)) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "reference methods disagree for %s: %.17g vs %.17g",
                  p.id.c_str(), x, y);
    throw Error(ErrorKind::oracle_disagreement, buf);
  }
  return {0.5 * (x + y), std::abs(x - y), false};
}

//! Moments of f^(r): closed form when registered, else graded adaptive quadrature.
inline auto derivative_moments(const TestProblem& p, int r) -> DerivativeMoments {
  if (p.moments) {
    if (auto mo = p.moments(r)) return *mo;
  }
  detail::require(static_cast<bool>(p.derivative),
                  "problem " + p.id + " has no registered r-th derivative");
  const auto mesh = quadrature::graded_mesh(p.a, p.b, p.graded_toward_left, 0.5,
                                            1e-12 * (p.b - p.a), 2);
  const double q = 1.0 / (r + 1);
  DerivativeMoments mo;
  mo.l2_squared = quadrature::adaptive_gk(
      [&](double x) { const double v = p.derivative(r, x); return v * v; }, mesh, 1e-10);
  mo.integral = quadrature::adaptive_gk(
      [&](double x) { return p.derivative(r, x); }, mesh, 1e-10);
  mo.holder = quadrature::adaptive_gk(
      [&](double x) { return std::pow(std::abs(p.derivative(r, x)), q); }, mesh, 1e-10);
  return mo;
}

//! Asymptotic constant of the nonadaptive estimator.
inline auto constant_thm1(const InterpolationScheme& s, const TestProblem& p) -> double {
  const auto mo = derivative_moments(p, s.r());
  const double len = p.b - p.a;
  const double inner = s.alpha_squared() * len * mo.l2_squared -
                       s.beta() * s.beta() * mo.integral * mo.integral;
  return s.c_r() * std::pow(len, s.r()) * std::sqrt(std::max(inner, 0.0));
}

//! Asymptotic constant of the stratified and ideal importance estimators.
inline auto constant_thm2(const InterpolationScheme& s, const TestProblem& p) -> double {
  const auto mo = derivative_moments(p, s.r());
  return s.c_r() * s.adaptive_factor() * std::pow(mo.holder, s.r() + 1);
}

// ---------------------------------------------------------------------------
// K*(r)
// ---------------------------------------------------------------------------

struct KStarEstimate {
  double value = 1.0;     //!< two-level optimum
  double fraction = 0.0;  //!< share of intervals at the high level
};

namespace detail {

struct KStarShape {
  double ka2 = 0.0, kb2 = 0.0, ratio = 0.0;
  int r = 0;
};

inline auto kstar_shape(const InterpolationScheme& s) -> KStarShape {
  const double a2 = s.alpha_squared();
  const double b2 = s.beta() * s.beta();
  require(a2 > b2, "K* needs alpha^2 > beta^2");
  return {a2 / (a2 - b2), b2 / (a2 - b2), std::pow(2.0, s.r() + 1), s.r()};
}

// Large-m value for a fraction t of intervals at level R and 1 - t at 1.
inline auto two_level_value(const KStarShape& k, double t) -> double {
  const double R = k.ratio;
  const double second = t * R * R + 1.0 - t;
  const double first = t * R + 1.0 - t;
  const double inner = k.ka2 * second - k.kb2 * first * first;
  const double holder = t * std::pow(R, 1.0 / (k.r + 1)) + 1.0 - t;
  return std::sqrt(std::max(inner, 0.0)) / std::pow(holder, k.r + 1);
}

}  // namespace detail

/*!
  K*(r) through the two-level profile reduction: maximize over the fraction t
  of intervals whose A value is 2^{r+1} times the rest. Dense grid, then
  golden-section refinement of the best cell.
*/
inline auto kstar_two_level(const InterpolationScheme& s) -> KStarEstimate {
  const auto shape = detail::kstar_shape(s);
  constexpr int grid = 20000;
  int best = 0;
  double best_value = detail::two_level_value(shape, 0.0);
  for (int i = 1; i <= grid; ++i) {
    const double v = detail::two_level_value(shape, static_cast<double>(i) / grid);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  double lo = std::max(0, best - 1) / static_cast<double>(grid);
  double hi = std::min(grid, best + 1) / static_cast<double>(grid);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = detail::two_level_value(shape, x1), f2 = detail::two_level_value(shape, x2);
  for (int it = 0; it < 100; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = detail::two_level_value(shape, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = detail::two_level_value(shape, x1);
    }
  }
  KStarEstimate out;
  out.fraction = 0.5 * (lo + hi);
  out.value = std::max(best_value, detail::two_level_value(shape, out.fraction));
  return out;
}

inline auto estimate_kstar(const InterpolationScheme& s) -> double {
  return kstar_two_level(s).value;
}

//! K_{m,r}(A) for an explicit profile A.
inline auto kstar_profile_value(const InterpolationScheme& s,
                                std::span<const double> profile) -> double {
  const auto shape = detail::kstar_shape(s);
  const double m = static_cast<double>(profile.size());
  const double q = 1.0 / (s.r() + 1);
  double s1 = 0.0, s2 = 0.0, sq = 0.0;
  for (double x : profile) {
    s1 += x;
    s2 += x * x;
    sq += std::pow(x, q);
  }
  const double inner = shape.ka2 * m * s2 - shape.kb2 * s1 * s1;
  return std::sqrt(std::max(inner, 0.0)) / std::pow(sq, s.r() + 1) * std::pow(m, s.r());
}

/*!
  Randomized multi-start coordinate ascent over profiles A in [1, 2^{r+1}]^m.
  Returns the largest K_{m,r}(A) found.
*/
inline auto kstar_random_search(const InterpolationScheme& s, int m, int starts,
                                std::uint64_t seed) -> double {
  const auto shape = detail::kstar_shape(s);
  const double R = shape.ratio;
  const double q = 1.0 / (s.r() + 1);
  const double mf = m;
  const double mr = std::pow(mf, s.r());
  RngStream rng(seed, static_cast<std::uint64_t>(m));
  auto value = [&](double s1, double s2, double sq) {
    const double inner = shape.ka2 * mf * s2 - shape.kb2 * s1 * s1;
    return std::sqrt(std::max(inner, 0.0)) / std::pow(sq, s.r() + 1) * mr;
  };
  double best = 0.0;
  std::vector<double> A(m);
  for (int start = 0; start < starts; ++start) {
    double s1 = 0.0, s2 = 0.0, sq = 0.0;
    for (auto& x : A) {
      x = std::pow(R, rng.uniform());
      s1 += x;
      s2 += x * x;
      sq += std::pow(x, q);
    }
    double current = value(s1, s2, sq);
    for (int sweep = 0; sweep < 200; ++sweep) {
      bool improved = false;
      for (int i = 0; i < m; ++i) {
        const double old = A[i];
        const double candidates[] = {1.0, R, std::clamp(old * 1.1, 1.0, R),
                                     std::clamp(old / 1.1, 1.0, R),
                                     std::pow(R, rng.uniform())};
        for (double c : candidates) {
          const double n1 = s1 - old + c;
          const double n2 = s2 - old * old + c * c;
          const double nq = sq - std::pow(old, q) + std::pow(c, q);
          const double v = value(n1, n2, nq);
          if (v > current * (1.0 + 1e-15)) {
            A[i] = c;
            s1 = n1;
            s2 = n2;
            sq = nq;
            current = v;
            improved = true;
            break;
          }
        }
      }
      if (!improved) break;
    }
    // Recompute from scratch to shed incremental rounding.
    best = std::max(best, kstar_profile_value(s, A));
  }
  return best;
}

//! Upper-bound constant for the nested-partition importance estimator.
inline auto constant_thm3(const InterpolationScheme& s, const TestProblem& p) -> double {
  return estimate_kstar(s) * constant_thm2(s, p);
}

}  // namespace vrmc
