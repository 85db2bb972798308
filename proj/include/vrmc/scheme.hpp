/*!
  \file
  \brief Interpolation schemes on the reference interval [0, 1].

  A scheme is the node family z_1 < ... < z_r used for Lagrange interpolation
  of degree r - 1 on every subinterval, together with the constants of the
  node polynomial P(z) = (z - z_1)...(z - z_r) that drive the error laws:

    alpha  = ||P||_L2(0,1)     beta   = integral of P over [0,1]
    gamma  = ||P||_L1(0,1)     lambda = ||P||_Linf(0,1)

  and the rate constant c_r of the budget-optimal nonadaptive estimator.
*/

#pragma once

#include <vrmc/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vrmc {

namespace detail {

using Poly = std::vector<long double>;  // coefficients, lowest degree first

inline auto poly_times_linear(const Poly& p, long double root) -> Poly {
  Poly out(p.size() + 1, 0.0L);
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i + 1] += p[i];
    out[i] -= root * p[i];
  }
  return out;
}

inline auto poly_from_roots(std::span<const double> roots) -> Poly {
  Poly p{1.0L};
  for (double z : roots) p = poly_times_linear(p, z);
  return p;
}

inline auto poly_eval(const Poly& p, long double x) -> long double {
  long double acc = 0.0L;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline auto poly_derivative(const Poly& p) -> Poly {
  if (p.size() <= 1) return Poly{0.0L};
  Poly out(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) {
    out[i - 1] = static_cast<long double>(i) * p[i];
  }
  return out;
}

inline auto poly_integral_01(const Poly& p) -> long double {
  long double acc = 0.0L;
  for (std::size_t i = p.size(); i-- > 0;) {
    acc += p[i] / static_cast<long double>(i + 1);
  }
  return acc;
}

// Root of a polynomial with a sign change on [lo, hi]: Newton steps,
// falling back to bisection whenever a step leaves the bracket.
inline auto bracketed_root(const Poly& p, long double lo, long double hi)
    -> long double {
  const Poly dp = poly_derivative(p);
  long double flo = poly_eval(p, lo);
  long double x = 0.5L * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const long double fx = poly_eval(p, x);
    if (fx == 0.0L) return x;
    if ((fx < 0.0L) == (flo < 0.0L)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    const long double slope = poly_eval(dp, x);
    long double next = slope != 0.0L ? x - fx / slope : lo - 1.0L;
    if (!(next > lo && next < hi)) next = 0.5L * (lo + hi);
    if (std::abs(next - x) <= 1e-19L * std::max(1.0L, std::abs(x))) return next;
    x = next;
  }
  return x;
}

inline auto factorial(int k) -> double {
  double out = 1.0;
  for (int i = 2; i <= k; ++i) out *= i;
  return out;
}

}  // namespace detail

class InterpolationScheme {
 public:
  auto r() const noexcept -> int { return static_cast<int>(nodes_.size()); }
  auto nodes() const noexcept -> std::span<const double> { return nodes_; }
  auto alpha() const noexcept -> double { return alpha_; }
  auto alpha_squared() const noexcept -> double { return alpha_squared_; }
  auto beta() const noexcept -> double { return beta_; }
  auto gamma() const noexcept -> double { return gamma_; }
  auto lambda() const noexcept -> double { return lambda_; }
  auto c_r() const noexcept -> double { return c_r_; }
  auto endpoint_sharing() const noexcept -> bool { return endpoint_sharing_; }

  //! w_s = integral over [0,1] of the s-th Lagrange basis polynomial.
  auto quad_weights() const noexcept -> std::span<const double> {
    return quad_weights_;
  }

  //! Barycentric weights 1 / prod_{j != s} (z_s - z_j) on [0,1].
  auto basis_weights() const noexcept -> std::span<const double> {
    return basis_weights_;
  }

  //! Evaluates P(z) = (z - z_1)...(z - z_r).
  auto node_polynomial(double z) const -> double {
    return static_cast<double>(detail::poly_eval(poly_, z));
  }

  //! r!
  auto r_factorial() const noexcept -> double { return detail::factorial(r()); }

  //! sqrt(alpha^2 - beta^2), the adaptive error factor.
  auto adaptive_factor() const noexcept -> double { return adaptive_factor_; }

  //! c_hat_r = 2^{r + 5/2} lambda c_r, the automatic-integration constant.
  auto c_hat() const noexcept -> double {
    return std::pow(2.0, r() + 2.5) * lambda_ * c_r_;
  }

  friend auto make_scheme(int r, std::span<const double> nodes)
      -> InterpolationScheme;

 private:
  std::vector<double> nodes_;
  std::vector<double> quad_weights_;
  std::vector<double> basis_weights_;
  detail::Poly poly_;
  double alpha_ = 0, alpha_squared_ = 0, beta_ = 0, gamma_ = 0, lambda_ = 0;
  double c_r_ = 0, adaptive_factor_ = 0;
  bool endpoint_sharing_ = false;
};

namespace detail {

//! n-point Gauss-Legendre rule on [0, 1] in long double (Newton on P_n).
inline auto gauss_legendre_01(int n)
    -> std::pair<std::vector<long double>, std::vector<long double>> {
  std::vector<long double> x01(n), w01(n);
  for (int i = 0; i < n; ++i) {
    long double x =
        std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (n + 0.5L));
    long double dp = 1.0L;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1.0L, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n == 1 ? 1.0L : n * (x * p1 - p0) / (x * x - 1.0L);
      const long double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-19L) break;
    }
    x01[i] = 0.5L * (1.0L + x);
    w01[i] = 1.0L / ((1.0L - x * x) * dp * dp);
  }
  return {x01, w01};
}

//! prod_i (z - nodes_i); avoids the cancellation of the monomial form.
inline auto node_product(std::span<const double> nodes, long double z) -> long double {
  long double p = 1.0L;
  for (double t : nodes) p *= z - static_cast<long double>(t);
  return p;
}

}  // namespace detail

/*!
  Builds a scheme from r strictly increasing nodes in [0, 1].

  alpha^2, beta and gamma are Gauss-Legendre sums of P in product form (exact
  for these degrees; gamma piecewise between consecutive roots). lambda comes
  from the critical points of P, one per inter-node gap.
*/
inline auto make_scheme(int r, std::span<const double> nodes)
    -> InterpolationScheme {
  detail::require(r >= 1, "scheme degree r must be >= 1");
  detail::require(static_cast<int>(nodes.size()) == r,
                  "scheme needs exactly r nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    detail::require(std::isfinite(nodes[i]) && nodes[i] >= 0.0 && nodes[i] <= 1.0,
                    "scheme nodes must lie in [0,1]");
    if (i > 0) {
      detail::require(nodes[i] > nodes[i - 1],
                      "scheme nodes must be strictly increasing");
    }
  }

  InterpolationScheme s;
  s.nodes_.assign(nodes.begin(), nodes.end());
  s.poly_ = detail::poly_from_roots(nodes);

  const auto [gx, gw] = detail::gauss_legendre_01(r + 1);
  long double a2 = 0.0L, b = 0.0L;
  for (int i = 0; i <= r; ++i) {
    const long double v = detail::node_product(nodes, gx[i]);
    a2 += gw[i] * v * v;
    b += gw[i] * v;
  }
  // Gauss-type nodes make beta vanish exactly; drop quadrature round-off.
  if (std::abs(b) <= 1e-14L * std::sqrt(a2)) b = 0.0L;
  s.alpha_squared_ = static_cast<double>(a2);
  s.alpha_ = static_cast<double>(std::sqrt(a2));
  s.beta_ = static_cast<double>(b);
  s.adaptive_factor_ = static_cast<double>(std::sqrt(a2 - b * b));

  // P keeps one sign between consecutive roots, so |P| integrates piecewise.
  std::vector<long double> cuts{0.0L};
  for (double z : nodes) {
    if (z > cuts.back()) cuts.push_back(z);
  }
  if (cuts.back() < 1.0L) cuts.push_back(1.0L);
  long double l1 = 0.0L;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const long double h = cuts[i] - cuts[i - 1];
    long double piece = 0.0L;
    for (int k = 0; k <= r; ++k) {
      piece += gw[k] * detail::node_product(nodes, cuts[i - 1] + h * gx[k]);
    }
    l1 += std::abs(h * piece);
  }
  s.gamma_ = static_cast<double>(l1);

  // P is monotone outside [z_1, z_r]; interior extrema are roots of P'.
  long double sup = std::max(std::abs(detail::node_product(nodes, 0.0L)),
                             std::abs(detail::node_product(nodes, 1.0L)));
  const detail::Poly dp = detail::poly_derivative(s.poly_);
  for (int i = 0; i + 1 < r; ++i) {
    const long double z = detail::bracketed_root(dp, nodes[i], nodes[i + 1]);
    sup = std::max(sup, std::abs(detail::node_product(nodes, z)));
  }
  s.lambda_ = static_cast<double>(sup);

  s.endpoint_sharing_ = r >= 2 && nodes.front() == 0.0 && nodes.back() == 1.0;
  const double rh = r + 0.5;
  s.c_r_ = std::numbers::sqrt2 * std::pow(rh, rh) / detail::factorial(r);
  if (s.endpoint_sharing_) s.c_r_ *= std::pow(1.0 - 1.0 / r, r);

  s.quad_weights_.resize(r);
  s.basis_weights_.resize(r);
  for (int i = 0; i < r; ++i) {
    long double denom = 1.0L;
    detail::Poly basis{1.0L};
    for (int j = 0; j < r; ++j) {
      if (j == i) continue;
      denom *= static_cast<long double>(nodes[i]) - nodes[j];
      basis = detail::poly_times_linear(basis, nodes[j]);
    }
    s.basis_weights_[i] = static_cast<double>(1.0L / denom);
    s.quad_weights_[i] =
        static_cast<double>(detail::poly_integral_01(basis) / denom);
  }
  return s;
}

inline auto make_scheme(std::span<const double> nodes) -> InterpolationScheme {
  return make_scheme(static_cast<int>(nodes.size()), nodes);
}

//! z_i = (i - 1) / (r - 1); the midpoint when r = 1.
inline auto equispaced_nodes(int r) -> std::vector<double> {
  detail::require(r >= 1, "r must be >= 1");
  if (r == 1) return {0.5};
  std::vector<double> z(r);
  for (int i = 0; i < r; ++i) z[i] = static_cast<double>(i) / (r - 1);
  z.back() = 1.0;
  return z;
}

//! Gauss-Legendre nodes mapped to [0, 1]; these give beta = 0.
inline auto gauss_nodes(int r) -> std::vector<double> {
  detail::require(r >= 1, "r must be >= 1");
  const auto x = detail::gauss_legendre_01(r).first;
  std::vector<double> z(r);
  for (int i = 0; i < r; ++i) z[r - 1 - i] = static_cast<double>(x[i]);
  return z;
}

inline auto equispaced_scheme(int r) -> InterpolationScheme {
  const auto z = equispaced_nodes(r);
  return make_scheme(r, z);
}

inline auto gauss_scheme(int r) -> InterpolationScheme {
  const auto z = gauss_nodes(r);
  return make_scheme(r, z);
}

}  // namespace vrmc
