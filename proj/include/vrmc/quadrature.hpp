/*!
  \file
  \brief Deterministic reference quadrature: Gauss-Legendre rules, composite
  rules on geometrically graded meshes, and adaptive Gauss-Kronrod.
*/

#pragma once

#include <vrmc/compensated_sum.hpp>
#include <vrmc/error.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace vrmc::quadrature {

struct Rule {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

//! n-point Gauss-Legendre rule on [0, 1].
inline auto gauss_legendre(int n) -> Rule {
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
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
      dp = n * (x * p1 - p0) / (x * x - 1.0L);
      const long double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-19L) break;
    }
    rule.nodes[n - 1 - i] = static_cast<double>(0.5L * (1.0L + x));
    rule.weights[n - 1 - i] = static_cast<double>(1.0L / ((1.0L - x * x) * dp * dp));
  }
  return rule;
}

inline auto apply(const Rule& rule, const std::function<double(double)>& g,
                  double a, double b) -> double {
  NeumaierSum<double> acc;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * g(a + rule.nodes[i] * (b - a));
  }
  return (b - a) * acc.value();
}

/*!
  Breakpoints of [a, b] graded geometrically toward `focus` (a or b):
  panel edges at distance (b - a) q^j from the focus down to `smallest`,
  each panel then split into `split` equal pieces.
*/
inline auto graded_mesh(double a, double b, bool toward_left, double q,
                        double smallest, int split) -> std::vector<double> {
  std::vector<double> geometric;
  for (double w = b - a; w > smallest; w *= q) geometric.push_back(w);
  geometric.push_back(0.0);
  std::vector<double> pts;
  for (auto it = geometric.rbegin(); it + 1 != geometric.rend(); ++it) {
    const double lo = *it, hi = *(it + 1);
    for (int s = 0; s < split; ++s) pts.push_back(lo + (hi - lo) * s / split);
  }
  pts.push_back(b - a);
  std::vector<double> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out[i] = toward_left ? a + pts[i] : b - pts[pts.size() - 1 - i];
  }
  out.front() = a;
  out.back() = b;
  return out;
}

inline auto composite(const Rule& rule, const std::function<double(double)>& g,
                      const std::vector<double>& mesh) -> double {
  NeumaierSum<double> acc;
  for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
    acc += apply(rule, g, mesh[i], mesh[i + 1]);
  }
  return acc.value();
}

namespace detail {

// Gauss-Kronrod 7-15 on [-1, 1].
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline auto gk15(const std::function<double(double)>& g, double a, double b)
    -> std::pair<double, double> {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = g(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = g(c - dx) + g(c + dx);
    kronrod += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  return {kronrod * h, std::abs((kronrod - gauss) * h)};
}

inline auto gk_recurse(const std::function<double(double)>& g, double a, double b,
                       double tol, int depth, NeumaierSum<double>& acc) -> void {
  const auto [value, err] = gk15(g, a, b);
  const bool converged = err <= tol || err <= 1e-14 * std::abs(value);
  if (converged || depth >= 50) {
    if (!converged) {
      throw Error(ErrorKind::recursion_limit,
                  "adaptive Gauss-Kronrod did not converge");
    }
    acc += value;
    return;
  }
  const double c = 0.5 * (a + b);
  gk_recurse(g, a, c, 0.5 * tol, depth + 1, acc);
  gk_recurse(g, c, b, 0.5 * tol, depth + 1, acc);
}

}  // namespace detail

//! Adaptive Gauss-Kronrod 7-15 with absolute tolerance tol.
inline auto adaptive_gk(const std::function<double(double)>& g, double a, double b,
                        double tol) -> double {
  NeumaierSum<double> acc;
  detail::gk_recurse(g, a, b, tol, 0, acc);
  return acc.value();
}

//! Adaptive Gauss-Kronrod on each panel of a mesh, splitting tol by length.
inline auto adaptive_gk(const std::function<double(double)>& g,
                        const std::vector<double>& mesh, double tol) -> double {
  NeumaierSum<double> acc;
  const double total = mesh.back() - mesh.front();
  for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
    const double share = tol * (mesh[i + 1] - mesh[i]) / total;
    detail::gk_recurse(g, mesh[i], mesh[i + 1], share, 0, acc);
  }
  return acc.value();
}

}  // namespace vrmc::quadrature
